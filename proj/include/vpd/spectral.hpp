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
#include <array>
#include <cmath>
#include <complex>
#include <limits>
#include <numeric>
#include <vector>

#include "vpd/audio.hpp"
#include "vpd/error.hpp"
#include "vpd/fft.hpp"
#include "vpd/matrix.hpp"

namespace vpd {

constexpr double kLogFloor = 1e-10;

// Magnitude spectrogram: rows are frames, columns are bins 0..fft/2.
// Frames are Hann-windowed; a signal shorter than one frame is zero-padded
// into a single frame.
inline Matrix stft_magnitude(const std::vector<double>& x,
                             std::size_t fft_size, std::size_t hop) {
  if (x.empty()) throw DataError("stft: empty signal");
  const auto window = make_hann_window(fft_size);
  const auto offsets = frame_offsets(x.size(), fft_size, hop);
  Matrix out(offsets.size(), fft_size / 2 + 1);
  std::vector<double> frame(fft_size);
  for (std::size_t i = 0; i < offsets.size(); ++i) {
    frame = copy_frame(x, offsets[i], fft_size);
    for (std::size_t n = 0; n < fft_size; ++n) frame[n] *= window[n];
    const auto mag = rfft_magnitude(frame);
    double* row = out.row(i);
    for (std::size_t b = 0; b < mag.size(); ++b) row[b] = mag[b];
  }
  return out;
}

inline double hz_to_mel(double hz) {
  return 2595.0 * std::log10(1.0 + hz / 700.0);
}

inline double mel_to_hz(double mel) {
  return 700.0 * (std::pow(10.0, mel / 2595.0) - 1.0);
}

namespace detail {

// Triangular filterbank over n_bins spectrum bins; centers are equally
// spaced on the warped axis (mel or linear identity).
inline Matrix triangular_filterbank(std::size_t n_filters,
                                    std::size_t n_bins, int sr, double fmin,
                                    double fmax, bool mel_scale) {
  if (n_filters == 0) throw ValidationError("filterbank: zero filters");
  if (fmax <= fmin) throw ValidationError("filterbank: bad band");
  const auto warp = [mel_scale](double hz) {
    return mel_scale ? hz_to_mel(hz) : hz;
  };
  const auto unwarp = [mel_scale](double w) {
    return mel_scale ? mel_to_hz(w) : w;
  };
  const double wlo = warp(fmin), whi = warp(fmax);
  std::vector<double> edges(n_filters + 2);
  for (std::size_t i = 0; i < edges.size(); ++i) {
    edges[i] = unwarp(wlo + (whi - wlo) * static_cast<double>(i) /
                          static_cast<double>(n_filters + 1));
  }
  Matrix fb(n_filters, n_bins);
  const double bin_hz =
      static_cast<double>(sr) / (2.0 * static_cast<double>(n_bins - 1));
  for (std::size_t f = 0; f < n_filters; ++f) {
    const double lo = edges[f], mid = edges[f + 1], hi = edges[f + 2];
    double* row = fb.row(f);
    for (std::size_t b = 0; b < n_bins; ++b) {
      const double hz = static_cast<double>(b) * bin_hz;
      double w = 0.0;
      if (hz >= lo && hz <= mid && mid > lo) {
        w = (hz - lo) / (mid - lo);
      } else if (hz > mid && hz <= hi && hi > mid) {
        w = (hi - hz) / (hi - mid);
      }
      row[b] = w;
    }
  }
  return fb;
}

}  // namespace detail

struct CepstrumConfig {
  std::size_t fft_size = 2048;
  std::size_t hop = 512;
  std::size_t n_filters = 128;
  std::size_t n_coeffs = 13;
  bool mel_scale = true;  // false gives linear-frequency cepstra
};

// Per-frame cepstral coefficients: power spectrum, triangular filterbank,
// natural log with an absolute floor, orthonormal DCT-II.
inline Matrix cepstral_coefficients(const std::vector<double>& x, int sr,
                                    const CepstrumConfig& cfg) {
  if (cfg.n_coeffs > cfg.n_filters) {
    throw ValidationError("cepstrum: more coefficients than filters");
  }
  const Matrix mag = stft_magnitude(x, cfg.fft_size, cfg.hop);
  const Matrix fb = detail::triangular_filterbank(
      cfg.n_filters, mag.cols, sr, 0.0, static_cast<double>(sr) / 2.0,
      cfg.mel_scale);
  Matrix out(mag.rows, cfg.n_coeffs);
  std::vector<double> energies(cfg.n_filters);
  for (std::size_t t = 0; t < mag.rows; ++t) {
    const double* m = mag.row(t);
    for (std::size_t f = 0; f < cfg.n_filters; ++f) {
      const double* w = fb.row(f);
      double e = 0.0;
      for (std::size_t b = 0; b < mag.cols; ++b) e += w[b] * m[b] * m[b];
      energies[f] = std::log(std::max(e, kLogFloor));
    }
    const auto cc = dct2_orthonormal(energies, cfg.n_coeffs);
    double* row = out.row(t);
    for (std::size_t k = 0; k < cfg.n_coeffs; ++k) row[k] = cc[k];
  }
  return out;
}

// Regression deltas over a 9-frame window (half width 4) with replicated
// edge frames.
inline Matrix delta_features(const Matrix& in, int half_width = 4) {
  if (half_width < 1) throw ValidationError("delta: bad window");
  Matrix out(in.rows, in.cols);
  double denom = 0.0;
  for (int n = 1; n <= half_width; ++n) denom += 2.0 * n * n;
  const auto clamp_row = [&](std::ptrdiff_t t) {
    if (t < 0) return std::size_t{0};
    if (t >= static_cast<std::ptrdiff_t>(in.rows)) return in.rows - 1;
    return static_cast<std::size_t>(t);
  };
  for (std::size_t t = 0; t < in.rows; ++t) {
    double* row = out.row(t);
    for (std::size_t c = 0; c < in.cols; ++c) {
      double acc = 0.0;
      for (int n = 1; n <= half_width; ++n) {
        const double fwd =
            in.at(clamp_row(static_cast<std::ptrdiff_t>(t) + n), c);
        const double bwd =
            in.at(clamp_row(static_cast<std::ptrdiff_t>(t) - n), c);
        acc += static_cast<double>(n) * (fwd - bwd);
      }
      row[c] = acc / denom;
    }
  }
  return out;
}

inline std::vector<double> column_means(const Matrix& m) {
  if (m.rows == 0) throw DataError("column_means: empty matrix");
  std::vector<double> out(m.cols, 0.0);
  for (std::size_t t = 0; t < m.rows; ++t) {
    const double* row = m.row(t);
    for (std::size_t c = 0; c < m.cols; ++c) out[c] += row[c];
  }
  for (double& v : out) v /= static_cast<double>(m.rows);
  return out;
}

inline std::vector<double> column_variances(const Matrix& m) {
  const auto means = column_means(m);
  std::vector<double> out(m.cols, 0.0);
  for (std::size_t t = 0; t < m.rows; ++t) {
    const double* row = m.row(t);
    for (std::size_t c = 0; c < m.cols; ++c) {
      const double d = row[c] - means[c];
      out[c] += d * d;
    }
  }
  for (double& v : out) v /= static_cast<double>(m.rows);
  return out;
}

// Scalar spectral descriptors averaged over frames.
struct SpectralFeatures {
  double entropy_bits = 0.0;
  double skewness = 0.0;
  double centroid_hz = 0.0;
  std::array<double, 7> contrast_db{};
  double flatness = 0.0;
  double rolloff_hz = 0.0;
  double zcr = 0.0;
};

namespace detail {

// Amplitude entropy: 256-bin histogram over the signal's own range,
// Shannon entropy in bits. A constant signal has zero entropy.
inline double amplitude_entropy_bits(const std::vector<double>& x) {
  constexpr std::size_t kBins = 256;
  const auto [mn_it, mx_it] = std::minmax_element(x.begin(), x.end());
  const double mn = *mn_it, mx = *mx_it;
  if (mx <= mn) return 0.0;
  std::array<std::size_t, kBins> counts{};
  for (const double v : x) {
    std::size_t b = static_cast<std::size_t>(
        (v - mn) / (mx - mn) * static_cast<double>(kBins));
    if (b >= kBins) b = kBins - 1;
    counts[b] += 1;
  }
  const double n = static_cast<double>(x.size());
  double h = 0.0;
  for (const std::size_t c : counts) {
    if (c == 0) continue;
    const double p = static_cast<double>(c) / n;
    h -= p * std::log2(p);
  }
  return h;
}

// Population skewness m3 / m2^(3/2) of the raw samples.
inline double sample_skewness(const std::vector<double>& x) {
  const double n = static_cast<double>(x.size());
  double mean = 0.0;
  for (const double v : x) mean += v;
  mean /= n;
  double m2 = 0.0, m3 = 0.0;
  for (const double v : x) {
    const double d = v - mean;
    m2 += d * d;
    m3 += d * d * d;
  }
  m2 /= n;
  m3 /= n;
  if (m2 <= 0.0) return 0.0;
  return m3 / std::pow(m2, 1.5);
}

}  // namespace detail

// Frame-averaged spectral descriptors. Contrast uses a sub-band below
// 200 Hz plus six octave bands above it; per band the contrast is
// 10*log10(mean top-2% magnitude / mean bottom-2% magnitude).
inline SpectralFeatures compute_spectral_features(
    const std::vector<double>& x, int sr, std::size_t fft_size = 2048,
    std::size_t hop = 512) {
  if (x.empty()) throw DataError("spectral: empty signal");
  SpectralFeatures out;
  out.entropy_bits = detail::amplitude_entropy_bits(x);
  out.skewness = detail::sample_skewness(x);

  const Matrix mag = stft_magnitude(x, fft_size, hop);
  const std::size_t n_bins = mag.cols;
  const double bin_hz =
      static_cast<double>(sr) / (2.0 * static_cast<double>(n_bins - 1));

  // Octave band edges for contrast.
  std::array<std::size_t, 8> band_edge{};
  band_edge[0] = 0;
  double edge_hz = 200.0;
  for (std::size_t k = 1; k < 8; ++k) {
    band_edge[k] = std::min(
        n_bins, static_cast<std::size_t>(std::ceil(edge_hz / bin_hz)));
    band_edge[k] = std::max(band_edge[k], band_edge[k - 1] + 1);
    band_edge[k] = std::min(band_edge[k], n_bins);
    edge_hz *= 2.0;
  }

  double centroid_acc = 0.0, flat_acc = 0.0, roll_acc = 0.0;
  std::array<double, 7> contrast_acc{};
  std::vector<double> band;
  for (std::size_t t = 0; t < mag.rows; ++t) {
    const double* m = mag.row(t);
    double mag_sum = 0.0, weighted = 0.0;
    double log_power = 0.0, power_sum = 0.0;
    for (std::size_t b = 0; b < n_bins; ++b) {
      mag_sum += m[b];
      weighted += m[b] * static_cast<double>(b) * bin_hz;
      const double p = std::max(m[b] * m[b], kLogFloor);
      log_power += std::log(p);
      power_sum += p;
    }
    centroid_acc += mag_sum > 0.0 ? weighted / mag_sum : 0.0;
    flat_acc += std::exp(log_power / static_cast<double>(n_bins)) /
                (power_sum / static_cast<double>(n_bins));
    // Rolloff: first bin where the cumulative magnitude reaches 85%.
    const double target = 0.85 * mag_sum;
    double cum = 0.0;
    std::size_t roll_bin = n_bins - 1;
    for (std::size_t b = 0; b < n_bins; ++b) {
      cum += m[b];
      if (cum >= target) {
        roll_bin = b;
        break;
      }
    }
    roll_acc += static_cast<double>(roll_bin) * bin_hz;
    for (std::size_t k = 0; k < 7; ++k) {
      const std::size_t lo = band_edge[k], hi = band_edge[k + 1];
      if (hi <= lo) continue;
      band.assign(m + lo, m + hi);
      std::sort(band.begin(), band.end());
      const std::size_t q = std::max<std::size_t>(
          1, static_cast<std::size_t>(0.02 * static_cast<double>(band.size())));
      double bottom = 0.0, top = 0.0;
      for (std::size_t i = 0; i < q; ++i) {
        bottom += band[i];
        top += band[band.size() - 1 - i];
      }
      bottom = std::max(bottom / static_cast<double>(q), kLogFloor);
      top = std::max(top / static_cast<double>(q), kLogFloor);
      contrast_acc[k] += 10.0 * (std::log10(top) - std::log10(bottom));
    }
  }
  const double n_frames = static_cast<double>(mag.rows);
  out.centroid_hz = centroid_acc / n_frames;
  out.flatness = flat_acc / n_frames;
  out.rolloff_hz = roll_acc / n_frames;
  for (std::size_t k = 0; k < 7; ++k) {
    out.contrast_db[k] = contrast_acc[k] / n_frames;
  }

  // Zero-crossing rate: fraction of sign-changing consecutive pairs per
  // frame, averaged over frames.
  const auto offsets = frame_offsets(x.size(), fft_size, hop);
  double zcr_acc = 0.0;
  for (const std::size_t start : offsets) {
    const std::size_t len = std::min(fft_size, x.size() - start);
    if (len < 2) continue;
    std::size_t changes = 0;
    for (std::size_t n = start; n + 1 < start + len; ++n) {
      const bool a = x[n] >= 0.0, b = x[n + 1] >= 0.0;
      if (a != b) ++changes;
    }
    zcr_acc += static_cast<double>(changes) / static_cast<double>(len - 1);
  }
  out.zcr = zcr_acc / static_cast<double>(offsets.size());
  return out;
}

// Burg's method; returns predictor polynomial [1, a1, ..., a_order].
inline std::vector<double> burg_lpc(const std::vector<double>& x, int order) {
  const std::size_t n = x.size();
  if (order < 1 || n < static_cast<std::size_t>(order) + 2) {
    throw ValidationError("burg: signal too short for order");
  }
  std::vector<double> a(static_cast<std::size_t>(order) + 1, 0.0);
  a[0] = 1.0;
  std::vector<double> f = x, b = x;
  double dk = 0.0;
  for (std::size_t j = 0; j < n; ++j) dk += 2.0 * f[j] * f[j];
  dk -= f[0] * f[0] + b[n - 1] * b[n - 1];
  for (int k = 0; k < order; ++k) {
    double mu = 0.0;
    for (std::size_t t = 0; t + k + 1 < n; ++t) {
      mu += f[t + k + 1] * b[t];
    }
    if (dk <= 0.0) break;
    mu *= -2.0 / dk;
    const int half = (k + 1) / 2;
    for (int t = 0; t <= half; ++t) {
      const double t1 = a[t] + mu * a[k + 1 - t];
      const double t2 = a[k + 1 - t] + mu * a[t];
      a[t] = t1;
      a[k + 1 - t] = t2;
    }
    for (std::size_t t = 0; t + k + 1 < n; ++t) {
      const double t1 = f[t + k + 1] + mu * b[t];
      const double t2 = b[t] + mu * f[t + k + 1];
      f[t + k + 1] = t1;
      b[t] = t2;
    }
    dk = (1.0 - mu * mu) * dk - f[k + 1] * f[k + 1] - b[n - k - 2] * b[n - k - 2];
  }
  return a;
}

// Durand-Kerner roots of a monic polynomial given by descending-power
// coefficients (coeffs[0] must be 1).
inline std::vector<std::complex<double>> polynomial_roots(
    std::vector<std::complex<double>> coeffs) {
  if (coeffs.size() < 2) return {};
  const std::complex<double> lead = coeffs[0];
  for (auto& c : coeffs) c /= lead;
  const std::size_t deg = coeffs.size() - 1;
  std::vector<std::complex<double>> roots(deg);
  const std::complex<double> seed(0.4, 0.9);
  std::complex<double> p(1.0, 0.0);
  for (std::size_t i = 0; i < deg; ++i) {
    p *= seed;
    roots[i] = p;
  }
  const auto eval = [&](std::complex<double> z) {
    std::complex<double> acc(0.0, 0.0);
    for (const auto& c : coeffs) acc = acc * z + c;
    return acc;
  };
  for (int iter = 0; iter < 500; ++iter) {
    double moved = 0.0;
    for (std::size_t i = 0; i < deg; ++i) {
      std::complex<double> denom(1.0, 0.0);
      for (std::size_t j = 0; j < deg; ++j) {
        if (j != i) denom *= roots[i] - roots[j];
      }
      if (std::abs(denom) < 1e-30) continue;
      const std::complex<double> delta = eval(roots[i]) / denom;
      roots[i] -= delta;
      moved = std::max(moved, std::abs(delta));
    }
    if (moved < 1e-12) break;
  }
  return roots;
}

struct FormantFeatures {
  double f1_hz = std::numeric_limits<double>::quiet_NaN();
  double f2_hz = std::numeric_limits<double>::quiet_NaN();
  double f3_hz = std::numeric_limits<double>::quiet_NaN();
};

// First three formants by Burg LPC on audio decimated to at most 10 kHz.
// Per frame, predictor roots with bandwidth under 400 Hz inside the valid
// band become formant candidates; the lowest three are kept and the
// per-formant median over frames is reported.
inline FormantFeatures compute_formants(const AudioBuffer& in) {
  FormantFeatures out;
  if (in.samples.empty()) return out;
  const AudioBuffer low = decimate_to(in, 10000);
  const int sr = low.sample_rate;
  const double premph = std::exp(-2.0 * kPi * 50.0 / sr);
  const std::vector<double> emph = pre_emphasis(low.samples, premph);
  const std::size_t frame_len =
      static_cast<std::size_t>(std::lround(0.025 * sr));
  const std::size_t hop = static_cast<std::size_t>(std::lround(0.010 * sr));
  const int order = std::min(16, 2 + sr / 1000);
  if (emph.size() < frame_len || frame_len < static_cast<std::size_t>(order) + 2) {
    return out;
  }
  // Hamming window for LPC frames.
  std::vector<double> window(frame_len);
  for (std::size_t i = 0; i < frame_len; ++i) {
    window[i] = 0.54 - 0.46 * std::cos(2.0 * kPi * static_cast<double>(i) /
                                       static_cast<double>(frame_len - 1));
  }
  const auto offsets = frame_offsets(emph.size(), frame_len, hop);
  // Only frames within 30 dB of the loudest frame contribute.
  std::vector<double> level(offsets.size());
  double max_db = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < offsets.size(); ++i) {
    level[i] = rms_db(emph.data() + offsets[i],
                      std::min(frame_len, emph.size() - offsets[i]));
    max_db = std::max(max_db, level[i]);
  }
  std::vector<double> f1s, f2s, f3s;
  std::vector<double> frame(frame_len);
  for (std::size_t i = 0; i < offsets.size(); ++i) {
    if (!(level[i] >= max_db - 30.0)) continue;
    for (std::size_t n = 0; n < frame_len; ++n) {
      frame[n] = emph[offsets[i] + n] * window[n];
    }
    std::vector<double> a;
    try {
      a = burg_lpc(frame, order);
    } catch (const Error&) {
      continue;
    }
    std::vector<std::complex<double>> coeffs(a.begin(), a.end());
    const auto roots = polynomial_roots(coeffs);
    std::vector<double> freqs;
    for (const auto& r : roots) {
      if (r.imag() <= 0.0) continue;
      const double mag_r = std::abs(r);
      if (mag_r <= 0.0 || mag_r >= 1.0) continue;
      const double freq =
          std::atan2(r.imag(), r.real()) * sr / (2.0 * kPi);
      const double bw = -std::log(mag_r) * sr / kPi;
      if (freq < 90.0 || freq > sr / 2.0 - 50.0) continue;
      if (bw >= 400.0) continue;
      freqs.push_back(freq);
    }
    std::sort(freqs.begin(), freqs.end());
    if (freqs.size() >= 1) f1s.push_back(freqs[0]);
    if (freqs.size() >= 2) f2s.push_back(freqs[1]);
    if (freqs.size() >= 3) f3s.push_back(freqs[2]);
  }
  const auto median = [](std::vector<double>& v) {
    if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
    std::sort(v.begin(), v.end());
    return v[v.size() / 2];
  };
  out.f1_hz = median(f1s);
  out.f2_hz = median(f2s);
  out.f3_hz = median(f3s);
  return out;
}

}  // namespace vpd
