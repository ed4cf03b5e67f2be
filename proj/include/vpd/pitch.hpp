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

#include "vpd/audio.hpp"
#include "vpd/error.hpp"

namespace vpd {

struct PitchConfig {
  double fmin_hz = 75.0;
  double fmax_hz = 600.0;
  double frame_sec = 0.040;
  double hop_sec = 0.010;
  double voicing_threshold = 0.45;
};

// Voiced-frame fundamental frequency track. Unvoiced frames are dropped, so
// an empty track means estimation failed for the whole signal.
struct PitchContour {
  std::vector<double> f0_hz;
  std::vector<double> peak_corr;  // normalized autocorrelation at the pick

  bool voiced() const { return !f0_hz.empty(); }
};

namespace detail {

struct Parabola {
  double offset;  // vertex offset from the center sample, in [-0.5, 0.5]
  double value;   // interpolated peak value
};

inline Parabola parabolic_peak(double a, double b, double c) {
  const double denom = a - 2.0 * b + c;
  if (denom == 0.0) return {0.0, b};
  double off = 0.5 * (a - c) / denom;
  off = std::clamp(off, -0.5, 0.5);
  return {off, b - 0.25 * (a - c) * off};
}

}  // namespace detail

// Normalized cross-correlation pitch tracker. Per frame the NCCF is scanned
// over the lag range for the configured band; among local maxima within 0.01
// of the global maximum the smallest lag wins, which suppresses subharmonic
// picks on strongly periodic frames. Frames whose winning correlation falls
// below the voicing threshold are dropped.
inline PitchContour estimate_f0(const std::vector<double>& x, int sr,
                                const PitchConfig& cfg = {}) {
  PitchContour contour;
  if (sr <= 0) throw ValidationError("estimate_f0: bad sample rate");
  if (cfg.fmin_hz <= 0.0 || cfg.fmax_hz <= cfg.fmin_hz) {
    throw ValidationError("estimate_f0: bad frequency band");
  }
  const std::size_t frame_len =
      static_cast<std::size_t>(std::lround(cfg.frame_sec * sr));
  const std::size_t hop =
      static_cast<std::size_t>(std::lround(cfg.hop_sec * sr));
  const std::size_t lag_min = static_cast<std::size_t>(
      std::max(1.0, std::floor(static_cast<double>(sr) / cfg.fmax_hz)));
  const std::size_t lag_max = static_cast<std::size_t>(
      std::ceil(static_cast<double>(sr) / cfg.fmin_hz));
  if (frame_len <= lag_max + 2 || hop == 0) return contour;
  if (x.size() < frame_len) return contour;
  const std::size_t m = frame_len - lag_max;  // correlation window
  if (m < 16) return contour;

  std::vector<double> nccf(lag_max + 1, 0.0);
  for (std::size_t start = 0; start + frame_len <= x.size(); start += hop) {
    const double* f = x.data() + start;
    // Frames whose energy sits almost entirely in one half are silence
    // transitions; their correlation window is effectively much shorter
    // than m, which makes the normalized correlation unstable.
    double front = 0.0, back = 0.0;
    const std::size_t half = frame_len / 2;
    for (std::size_t n = 0; n < half; ++n) front += f[n] * f[n];
    for (std::size_t n = half; n < frame_len; ++n) back += f[n] * f[n];
    const double frame_energy = front + back;
    if (front < 0.005 * frame_energy || back < 0.005 * frame_energy) {
      continue;
    }
    double e0 = 0.0;
    for (std::size_t n = 0; n < m; ++n) e0 += f[n] * f[n];
    if (e0 <= 0.0) continue;
    double best_val = -2.0;
    for (std::size_t lag = lag_min; lag <= lag_max; ++lag) {
      double cross = 0.0, e1 = 0.0;
      const double* g = f + lag;
      for (std::size_t n = 0; n < m; ++n) {
        cross += f[n] * g[n];
        e1 += g[n] * g[n];
      }
      nccf[lag] = e1 > 0.0 ? cross / std::sqrt(e0 * e1) : 0.0;
      best_val = std::max(best_val, nccf[lag]);
    }
    if (best_val < cfg.voicing_threshold) continue;
    // Smallest-lag local maximum within 0.01 of the best.
    std::size_t pick = 0;
    for (std::size_t lag = lag_min; lag <= lag_max; ++lag) {
      const double left = lag > lag_min ? nccf[lag - 1] : -2.0;
      const double right = lag < lag_max ? nccf[lag + 1] : -2.0;
      if (nccf[lag] >= left && nccf[lag] >= right &&
          nccf[lag] >= best_val - 0.01) {
        pick = lag;
        break;
      }
    }
    if (pick == 0) continue;
    double lag_refined = static_cast<double>(pick);
    double corr = nccf[pick];
    if (pick > lag_min && pick < lag_max) {
      const auto p =
          detail::parabolic_peak(nccf[pick - 1], nccf[pick], nccf[pick + 1]);
      lag_refined += p.offset;
      corr = p.value;
    }
    if (lag_refined <= 0.0) continue;
    const double f0 = static_cast<double>(sr) / lag_refined;
    if (f0 < cfg.fmin_hz || f0 > cfg.fmax_hz) continue;
    contour.f0_hz.push_back(f0);
    contour.peak_corr.push_back(std::clamp(corr, 0.0, 1.0));
  }
  return contour;
}

// Relative pitch spread: (max - min) / min over the voiced track.
inline double pitch_difference(const std::vector<double>& f0) {
  if (f0.empty()) return std::numeric_limits<double>::quiet_NaN();
  const auto [mn, mx] = std::minmax_element(f0.begin(), f0.end());
  if (*mn <= 0.0) return std::numeric_limits<double>::quiet_NaN();
  return (*mx - *mn) / *mn;
}

// Glottal-cycle boundaries: positive-going zero crossings chained by the
// expected period. The search window for the next mark spans half to one
// and a half predicted periods; the prediction adapts to each found cycle.
struct PeriodMarks {
  std::vector<std::size_t> marks;       // sample index of each cycle start
  std::vector<double> periods_sec;      // marks.size() - 1 cycle lengths
  std::vector<double> peak_amplitudes;  // per-cycle max |x|
};

inline PeriodMarks mark_periods(const std::vector<double>& x, int sr,
                                double f0_hint_hz) {
  PeriodMarks out;
  if (sr <= 0 || f0_hint_hz <= 0.0 || x.size() < 4) return out;
  const auto rising_cross = [&](std::size_t from, std::size_t to,
                                double target,
                                std::size_t* found) {
    // Crossing closest to target within [from, to).
    bool any = false;
    std::size_t best = 0;
    double best_dist = std::numeric_limits<double>::infinity();
    const std::size_t stop = std::min(to, x.size() - 1);
    for (std::size_t n = from; n < stop; ++n) {
      if (x[n] <= 0.0 && x[n + 1] > 0.0) {
        const double dist =
            std::fabs(static_cast<double>(n) - target);
        if (dist < best_dist) {
          best_dist = dist;
          best = n;
          any = true;
        }
      }
    }
    if (any) *found = best;
    return any;
  };

  double period = static_cast<double>(sr) / f0_hint_hz;
  // First mark: the first rising crossing anywhere in the signal.
  std::size_t first = 0;
  if (!rising_cross(0, x.size(), 0.0, &first)) return out;
  out.marks.push_back(first);
  for (;;) {
    const double prev = static_cast<double>(out.marks.back());
    const double target = prev + period;
    const std::size_t lo = static_cast<std::size_t>(
        std::max(0.0, prev + 0.5 * period));
    const std::size_t hi = static_cast<std::size_t>(
        std::min(static_cast<double>(x.size()), prev + 1.5 * period + 1.0));
    if (lo >= hi) break;
    std::size_t next = 0;
    if (!rising_cross(lo, hi, target, &next)) break;
    out.marks.push_back(next);
    period = static_cast<double>(next) - prev;
  }
  for (std::size_t i = 0; i + 1 < out.marks.size(); ++i) {
    out.periods_sec.push_back(
        static_cast<double>(out.marks[i + 1] - out.marks[i]) / sr);
    double peak = 0.0;
    for (std::size_t n = out.marks[i]; n < out.marks[i + 1]; ++n) {
      peak = std::max(peak, std::fabs(x[n]));
    }
    out.peak_amplitudes.push_back(peak);
  }
  return out;
}

// Mean absolute first difference of consecutive cycle lengths, in seconds.
inline double jitter_absolute(const std::vector<double>& periods_sec) {
  if (periods_sec.size() < 2) {
    return std::numeric_limits<double>::quiet_NaN();
  }
  double acc = 0.0;
  for (std::size_t i = 0; i + 1 < periods_sec.size(); ++i) {
    acc += std::fabs(periods_sec[i + 1] - periods_sec[i]);
  }
  return acc / static_cast<double>(periods_sec.size() - 1);
}

// Mean absolute first difference of cycle peak amplitudes over the mean
// amplitude (dimensionless).
inline double shimmer_relative(const std::vector<double>& amps) {
  if (amps.size() < 2) return std::numeric_limits<double>::quiet_NaN();
  double diff = 0.0, mean = 0.0;
  for (std::size_t i = 0; i < amps.size(); ++i) mean += amps[i];
  mean /= static_cast<double>(amps.size());
  if (mean <= 0.0) return std::numeric_limits<double>::quiet_NaN();
  for (std::size_t i = 0; i + 1 < amps.size(); ++i) {
    diff += std::fabs(amps[i + 1] - amps[i]);
  }
  return diff / static_cast<double>(amps.size() - 1) / mean;
}

// Harmonicity from the tracker's normalized peak correlation r per voiced
// frame: 10*log10(r / (1 - r)), r clamped away from 0 and 1, averaged over
// frames.
inline double harmonics_to_noise_db(const std::vector<double>& peak_corr) {
  if (peak_corr.empty()) return std::numeric_limits<double>::quiet_NaN();
  double acc = 0.0;
  for (double r : peak_corr) {
    r = std::clamp(r, 1e-12, 1.0 - 1e-12);
    acc += 10.0 * std::log10(r / (1.0 - r));
  }
  return acc / static_cast<double>(peak_corr.size());
}

struct PitchFeatures {
  double f0_mean_hz = std::numeric_limits<double>::quiet_NaN();
  double f0_std_hz = std::numeric_limits<double>::quiet_NaN();
  double pitch_difference = std::numeric_limits<double>::quiet_NaN();
  double hnr_db = std::numeric_limits<double>::quiet_NaN();
  double jitter_abs_sec = std::numeric_limits<double>::quiet_NaN();
  double shimmer_rel = std::numeric_limits<double>::quiet_NaN();
  bool estimation_failed = true;
};

// All pitch-derived scalars for one trimmed recording. When the tracker
// finds no voiced frame every value stays NaN and estimation_failed is set;
// that flag is itself a feature downstream.
inline PitchFeatures compute_pitch_features(const std::vector<double>& x,
                                            int sr,
                                            const PitchConfig& cfg = {}) {
  PitchFeatures f;
  const PitchContour contour = estimate_f0(x, sr, cfg);
  if (!contour.voiced()) return f;
  f.estimation_failed = false;
  const std::size_t n = contour.f0_hz.size();
  double mean = 0.0;
  for (const double v : contour.f0_hz) mean += v;
  mean /= static_cast<double>(n);
  double var = 0.0;
  for (const double v : contour.f0_hz) var += (v - mean) * (v - mean);
  var /= static_cast<double>(n);
  f.f0_mean_hz = mean;
  f.f0_std_hz = std::sqrt(var);
  f.pitch_difference = pitch_difference(contour.f0_hz);
  f.hnr_db = harmonics_to_noise_db(contour.peak_corr);
  std::vector<double> sorted = contour.f0_hz;
  std::sort(sorted.begin(), sorted.end());
  const double f0_median = sorted[sorted.size() / 2];
  const PeriodMarks marks = mark_periods(x, sr, f0_median);
  f.jitter_abs_sec = jitter_absolute(marks.periods_sec);
  f.shimmer_rel = shimmer_relative(marks.peak_amplitudes);
  return f;
}

}  // namespace vpd
