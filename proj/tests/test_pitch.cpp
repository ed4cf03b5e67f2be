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

#include <cmath>
#include <vector>

#include <catch2/catch_amalgamated.hpp>

#include "vpd/fft.hpp"
#include "vpd/pitch.hpp"
#include "vpd/rng.hpp"

namespace {

std::vector<double> sine(double f, double sec, int sr, double amp = 0.5) {
  std::vector<double> x;
  const std::size_t n = static_cast<std::size_t>(sec * sr);
  for (std::size_t i = 0; i < n; ++i) {
    x.push_back(amp * std::sin(2.0 * vpd::kPi * f * i / sr));
  }
  return x;
}

// Linear frequency sweep via phase integration: f(t) = f0 + (f1 - f0) t/T.
std::vector<double> sweep(double f0, double f1, double sec, int sr) {
  std::vector<double> x;
  const std::size_t n = static_cast<std::size_t>(sec * sr);
  double phase = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double t = static_cast<double>(i) / n;
    phase += 2.0 * vpd::kPi * (f0 + (f1 - f0) * t) / sr;
    x.push_back(0.5 * std::sin(phase));
  }
  return x;
}

}  // namespace

TEST_CASE("constant tone tracks at the true frequency", "[pitch]") {
  const int sr = 16000;
  const auto contour = vpd::estimate_f0(sine(220.0, 1.0, sr), sr);
  REQUIRE(contour.voiced());
  REQUIRE(contour.f0_hz.size() > 50);
  for (const double f : contour.f0_hz) {
    REQUIRE(f == Catch::Approx(220.0).margin(2.0));
  }
  REQUIRE(vpd::pitch_difference(contour.f0_hz) <= 0.01);
}

TEST_CASE("a 20 percent glide yields a matching pitch difference",
          "[pitch]") {
  const int sr = 16000;
  const auto contour = vpd::estimate_f0(sweep(200.0, 240.0, 1.0, sr), sr);
  REQUIRE(contour.voiced());
  REQUIRE(vpd::pitch_difference(contour.f0_hz) ==
          Catch::Approx(0.2).margin(0.02));
}

TEST_CASE("the contour is invariant under amplitude scaling", "[pitch]") {
  const int sr = 16000;
  const auto x = sweep(150.0, 180.0, 0.8, sr);
  std::vector<double> scaled;
  for (const double v : x) scaled.push_back(0.05 * v);
  const auto a = vpd::estimate_f0(x, sr);
  const auto b = vpd::estimate_f0(scaled, sr);
  REQUIRE(a.f0_hz.size() == b.f0_hz.size());
  for (std::size_t i = 0; i < a.f0_hz.size(); ++i) {
    REQUIRE(a.f0_hz[i] == Catch::Approx(b.f0_hz[i]).epsilon(1e-9));
  }
}

TEST_CASE("harmonically rich tones resolve to the fundamental", "[pitch]") {
  const int sr = 16000;
  std::vector<double> x;
  for (int i = 0; i < 16000; ++i) {
    const double t = 2.0 * vpd::kPi * 150.0 * i / sr;
    x.push_back(0.3 * std::sin(t) + 0.25 * std::sin(2.0 * t) +
                0.2 * std::sin(3.0 * t));
  }
  const auto contour = vpd::estimate_f0(x, sr);
  REQUIRE(contour.voiced());
  for (const double f : contour.f0_hz) {
    REQUIRE(f == Catch::Approx(150.0).margin(2.0));
  }
}

TEST_CASE("white noise produces no voiced frames", "[pitch]") {
  vpd::Rng rng(21);
  std::vector<double> x;
  for (int i = 0; i < 24000; ++i) x.push_back(0.4 * (2 * rng.uniform() - 1));
  const auto contour = vpd::estimate_f0(x, 16000);
  REQUIRE_FALSE(contour.voiced());

  const auto f = vpd::compute_pitch_features(x, 16000, {});
  REQUIRE(f.estimation_failed);
  REQUIRE(std::isnan(f.f0_mean_hz));
  REQUIRE(std::isnan(f.pitch_difference));
  REQUIRE(std::isnan(f.hnr_db));
  REQUIRE(std::isnan(f.jitter_abs_sec));
  REQUIRE(std::isnan(f.shimmer_rel));
}

TEST_CASE("pitch difference follows its closed form", "[pitch]") {
  REQUIRE(vpd::pitch_difference({100.0, 120.0, 110.0}) ==
          Catch::Approx(0.2));
  REQUIRE(vpd::pitch_difference({250.0}) == 0.0);
  REQUIRE(std::isnan(vpd::pitch_difference({})));
  REQUIRE(std::isnan(vpd::pitch_difference({0.0, 100.0})));
}

TEST_CASE("period marks recover the cycle length of a sine", "[pitch]") {
  const int sr = 16000;
  const auto x = sine(200.0, 0.5, sr, 0.6);
  const auto marks = vpd::mark_periods(x, sr, 200.0);
  REQUIRE(marks.periods_sec.size() > 80);
  for (const double t : marks.periods_sec) {
    REQUIRE(t == Catch::Approx(1.0 / 200.0).margin(1.5 / sr));
  }
  for (const double a : marks.peak_amplitudes) {
    REQUIRE(a == Catch::Approx(0.6).margin(0.01));
  }
  // Near-perfect periodicity: jitter is below one sample interval and
  // shimmer is near zero.
  REQUIRE(vpd::jitter_absolute(marks.periods_sec) < 1.0 / sr);
  REQUIRE(vpd::shimmer_relative(marks.peak_amplitudes) < 0.01);
}

TEST_CASE("jitter on Gaussian period noise approaches 2 sigma over sqrt pi",
          "[pitch]") {
  // Periods T_i = T0 + e_i with e ~ N(0, s^2) give successive differences
  // distributed N(0, 2 s^2), whose absolute mean is 2 s / sqrt(pi).
  vpd::Rng rng(5);
  const double t0 = 0.005, sigma = 1e-4;
  std::vector<double> periods;
  for (int i = 0; i < 200000; ++i) periods.push_back(t0 + sigma * rng.normal());
  const double expected = 2.0 * sigma / std::sqrt(vpd::kPi);
  REQUIRE(vpd::jitter_absolute(periods) ==
          Catch::Approx(expected).epsilon(0.01));
}

TEST_CASE("shimmer matches a hand-computed case", "[pitch]") {
  REQUIRE(vpd::shimmer_relative({1.0, 1.2, 0.8}) == Catch::Approx(0.3));
  REQUIRE(std::isnan(vpd::shimmer_relative({1.0})));
  REQUIRE(std::isnan(vpd::jitter_absolute({0.01})));
}

TEST_CASE("hnr maps peak correlation through its closed form", "[pitch]") {
  REQUIRE(vpd::harmonics_to_noise_db({0.9}) ==
          Catch::Approx(10.0 * std::log10(9.0)));
  REQUIRE(vpd::harmonics_to_noise_db({0.5}) == Catch::Approx(0.0));
  // Clamping keeps a perfect correlation finite.
  REQUIRE(std::isfinite(vpd::harmonics_to_noise_db({1.0})));
  REQUIRE(std::isnan(vpd::harmonics_to_noise_db({})));
}

TEST_CASE("noisier voices score lower hnr and higher jitter", "[pitch]") {
  const int sr = 16000;
  vpd::Rng rng(13);
  const auto clean = sine(180.0, 1.0, sr, 0.5);
  std::vector<double> noisy = clean;
  for (auto& v : noisy) v += 0.15 * rng.normal();
  const auto fc = vpd::compute_pitch_features(clean, sr, {});
  const auto fn = vpd::compute_pitch_features(noisy, sr, {});
  REQUIRE_FALSE(fc.estimation_failed);
  REQUIRE_FALSE(fn.estimation_failed);
  REQUIRE(fc.hnr_db > fn.hnr_db + 3.0);
  REQUIRE(fn.jitter_abs_sec > fc.jitter_abs_sec);
  REQUIRE(fn.shimmer_rel > fc.shimmer_rel);
}

TEST_CASE("pitch features on a stable tone have tight statistics",
          "[pitch]") {
  const int sr = 16000;
  const auto f = vpd::compute_pitch_features(sine(220.0, 1.0, sr, 0.5), sr,
                                             {});
  REQUIRE_FALSE(f.estimation_failed);
  REQUIRE(f.f0_mean_hz == Catch::Approx(220.0).margin(2.0));
  REQUIRE(f.f0_std_hz < 1.0);
  REQUIRE(f.pitch_difference <= 0.01);
  REQUIRE(f.hnr_db > 15.0);
  REQUIRE(f.jitter_abs_sec < 1.0 / sr);
  REQUIRE(f.shimmer_rel < 0.01);
}
