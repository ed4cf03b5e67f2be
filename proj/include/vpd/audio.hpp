// Copyright 2026 The vpd authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "vpd/error.hpp"
#include "vpd/fft.hpp"
#include "vpd/wav.hpp"

namespace vpd {

// Frame offsets for analysis with the given length and hop. Frames are fully
// contained in the signal; a signal shorter than one frame yields a single
// frame starting at zero (callers zero-pad it).
inline std::vector<std::size_t> frame_offsets(std::size_t n,
                                              std::size_t frame_len,
                                              std::size_t hop) {
  if (frame_len == 0 || hop == 0) {
    throw ValidationError("frame_offsets: frame and hop must be positive");
  }
  std::vector<std::size_t> offsets;
  if (n < frame_len) {
    offsets.push_back(0);
    return offsets;
  }
  for (std::size_t start = 0; start + frame_len <= n; start += hop) {
    offsets.push_back(start);
  }
  return offsets;
}

// Copy one frame, zero-padding past the end of the signal.
inline std::vector<double> copy_frame(const std::vector<double>& x,
                                      std::size_t start,
                                      std::size_t frame_len) {
  std::vector<double> frame(frame_len, 0.0);
  const std::size_t stop = std::min(x.size(), start + frame_len);
  for (std::size_t i = start; i < stop; ++i) frame[i - start] = x[i];
  return frame;
}

inline double rms(const double* x, std::size_t n) {
  if (n == 0) return 0.0;
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += x[i] * x[i];
  return std::sqrt(s / static_cast<double>(n));
}

inline double rms_db(const double* x, std::size_t n) {
  const double r = rms(x, n);
  if (r <= 0.0) return -std::numeric_limits<double>::infinity();
  return 20.0 * std::log10(r);
}

// Symmetric Hann window; a one-sample window is the identity.
inline std::vector<double> make_hann_window(std::size_t len) {
  std::vector<double> w(len, 1.0);
  if (len < 2) return w;
  for (std::size_t i = 0; i < len; ++i) {
    w[i] = 0.5 * (1.0 - std::cos(2.0 * kPi * static_cast<double>(i) /
                                 static_cast<double>(len - 1)));
  }
  return w;
}

// Remove leading and trailing low-energy content. A frame survives when its
// RMS level is no more than threshold_db below the loudest frame; the kept
// span runs from the first surviving frame's start to the last surviving
// frame's end. All-silent input (peak RMS of zero) raises DataError.
inline AudioBuffer trim_silence(const AudioBuffer& in, double threshold_db,
                                std::size_t frame_len = 2048,
                                std::size_t hop = 512) {
  if (in.samples.empty()) throw DataError("trim_silence: empty signal");
  const auto offsets = frame_offsets(in.samples.size(), frame_len, hop);
  std::vector<double> level(offsets.size());
  double max_db = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < offsets.size(); ++i) {
    const std::size_t len =
        std::min(frame_len, in.samples.size() - offsets[i]);
    level[i] = rms_db(in.samples.data() + offsets[i], len);
    max_db = std::max(max_db, level[i]);
  }
  if (!std::isfinite(max_db)) {
    throw DataError("trim_silence: signal is silent");
  }
  const double floor_db = max_db - threshold_db;
  std::size_t first = offsets.size(), last = offsets.size();
  for (std::size_t i = 0; i < offsets.size(); ++i) {
    if (level[i] >= floor_db) {
      if (first == offsets.size()) first = i;
      last = i;
    }
  }
  const std::size_t begin = offsets[first];
  const std::size_t end =
      std::min(in.samples.size(), offsets[last] + frame_len);
  AudioBuffer out;
  out.sample_rate = in.sample_rate;
  out.samples.assign(in.samples.begin() + static_cast<std::ptrdiff_t>(begin),
                     in.samples.begin() + static_cast<std::ptrdiff_t>(end));
  return out;
}

// First-order pre-emphasis y[n] = x[n] - coef * x[n-1].
inline std::vector<double> pre_emphasis(const std::vector<double>& x,
                                        double coef) {
  std::vector<double> y(x.size());
  if (x.empty()) return y;
  y[0] = x[0];
  for (std::size_t i = 1; i < x.size(); ++i) y[i] = x[i] - coef * x[i - 1];
  return y;
}

namespace detail {

// Odd-length windowed-sinc low-pass (Hamming window); cutoff is in cycles
// per sample of the input rate.
inline std::vector<double> design_lowpass(double cutoff, std::size_t taps) {
  std::vector<double> h(taps);
  const double mid = static_cast<double>(taps - 1) / 2.0;
  double sum = 0.0;
  for (std::size_t i = 0; i < taps; ++i) {
    const double t = static_cast<double>(i) - mid;
    const double sinc =
        t == 0.0 ? 2.0 * cutoff
                 : std::sin(2.0 * kPi * cutoff * t) / (kPi * t);
    const double win =
        0.54 - 0.46 * std::cos(2.0 * kPi * static_cast<double>(i) /
                               static_cast<double>(taps - 1));
    h[i] = sinc * win;
    sum += h[i];
  }
  for (double& v : h) v /= sum;  // unit DC gain
  return h;
}

}  // namespace detail

// Integer-factor decimation: anti-alias FIR low-pass, then keep every
// factor-th sample. Zero-phase alignment via the filter's group delay.
inline AudioBuffer decimate(const AudioBuffer& in, int factor) {
  if (factor < 1) throw ValidationError("decimate: factor must be >= 1");
  if (factor == 1) return in;
  AudioBuffer out;
  out.sample_rate = in.sample_rate / factor;
  if (in.samples.empty()) return out;
  constexpr std::size_t kTaps = 121;
  const double cutoff = 0.45 / static_cast<double>(factor);
  const auto h = detail::design_lowpass(cutoff, kTaps);
  const std::ptrdiff_t delay = (kTaps - 1) / 2;
  const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(in.samples.size());
  for (std::ptrdiff_t center = 0; center < n;
       center += factor) {
    double acc = 0.0;
    for (std::size_t k = 0; k < kTaps; ++k) {
      const std::ptrdiff_t idx =
          center + delay - static_cast<std::ptrdiff_t>(k);
      if (idx >= 0 && idx < n) acc += h[k] * in.samples[idx];
    }
    out.samples.push_back(acc);
  }
  return out;
}

// Decimate to at most target_rate using the smallest integer factor.
inline AudioBuffer decimate_to(const AudioBuffer& in, int target_rate) {
  if (target_rate <= 0) throw ValidationError("decimate_to: bad target rate");
  if (in.sample_rate <= target_rate) return in;
  const int factor =
      (in.sample_rate + target_rate - 1) / target_rate;  // ceil
  return decimate(in, factor);
}

}  // namespace vpd
