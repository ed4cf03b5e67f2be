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

#include "vpd/audio.hpp"
#include "vpd/fft.hpp"
#include "vpd/synth.hpp"

namespace {

vpd::AudioBuffer tone(double f, double sec, int sr, double amp = 0.5) {
  vpd::AudioBuffer b;
  b.sample_rate = sr;
  const std::size_t n = static_cast<std::size_t>(sec * sr);
  for (std::size_t i = 0; i < n; ++i) {
    b.samples.push_back(amp * std::sin(2.0 * vpd::kPi * f * i / sr));
  }
  return b;
}

}  // namespace

TEST_CASE("frame offsets enumerate fully contained frames", "[audio]") {
  REQUIRE(vpd::frame_offsets(10, 4, 2) ==
          std::vector<std::size_t>{0, 2, 4, 6});
  REQUIRE(vpd::frame_offsets(4, 4, 2) == std::vector<std::size_t>{0});
  // A short signal still yields a single frame starting at zero.
  REQUIRE(vpd::frame_offsets(3, 4, 2) == std::vector<std::size_t>{0});
}

TEST_CASE("rms and decibel level match hand computation", "[audio]") {
  const std::vector<double> x{3.0, 4.0};  // rms = sqrt(12.5)
  REQUIRE(vpd::rms(x.data(), 2) == Catch::Approx(std::sqrt(12.5)));
  const std::vector<double> one{1.0};
  REQUIRE(vpd::rms_db(one.data(), 1) == Catch::Approx(0.0));
  const std::vector<double> tenth{0.1};
  REQUIRE(vpd::rms_db(tenth.data(), 1) == Catch::Approx(-20.0));
  const std::vector<double> zero{0.0};
  REQUIRE(vpd::rms_db(zero.data(), 1) ==
          -std::numeric_limits<double>::infinity());
}

TEST_CASE("hann window is symmetric with zero endpoints", "[audio]") {
  const auto w = vpd::make_hann_window(9);
  REQUIRE(w.size() == 9);
  REQUIRE(w[0] == Catch::Approx(0.0).margin(1e-12));
  REQUIRE(w[8] == Catch::Approx(0.0).margin(1e-12));
  REQUIRE(w[4] == Catch::Approx(1.0));
  for (int i = 0; i < 4; ++i) REQUIRE(w[i] == Catch::Approx(w[8 - i]));
}

TEST_CASE("trim removes leading and trailing silence only", "[audio]") {
  const int sr = 16000;
  vpd::AudioBuffer buf;
  buf.sample_rate = sr;
  buf.samples.assign(8000, 0.0);  // half a second of silence
  const auto voiced = tone(200.0, 0.5, sr);
  buf.samples.insert(buf.samples.end(), voiced.samples.begin(),
                     voiced.samples.end());
  buf.samples.insert(buf.samples.end(), 8000, 0.0);

  const auto trimmed = vpd::trim_silence(buf, 15.0, 2048, 512);
  // At least the full tone survives and at most one frame of slack per side.
  REQUIRE(trimmed.samples.size() >= voiced.samples.size());
  REQUIRE(trimmed.samples.size() <= voiced.samples.size() + 2 * 2048 + 512);
  double peak = 0.0;
  for (const double v : trimmed.samples) peak = std::max(peak, v);
  REQUIRE(peak == Catch::Approx(0.5).margin(1e-6));

  // Trimming is idempotent.
  const auto again = vpd::trim_silence(trimmed, 15.0, 2048, 512);
  REQUIRE(again.samples.size() == trimmed.samples.size());

  // All-silent input cannot be trimmed into anything usable.
  vpd::AudioBuffer silent;
  silent.sample_rate = sr;
  silent.samples.assign(4096, 0.0);
  REQUIRE_THROWS_AS(vpd::trim_silence(silent, 15.0, 2048, 512),
                    vpd::DataError);
}

TEST_CASE("trim keeps quiet-but-voiced spans within the threshold",
          "[audio]") {
  const int sr = 16000;
  vpd::AudioBuffer buf;
  buf.sample_rate = sr;
  // Loud and quiet halves 6 dB apart stay together at a 15 dB threshold.
  const auto loud = tone(200.0, 0.4, sr, 0.5);
  const auto quiet = tone(200.0, 0.4, sr, 0.25);
  buf.samples = loud.samples;
  buf.samples.insert(buf.samples.end(), quiet.samples.begin(),
                     quiet.samples.end());
  const auto trimmed = vpd::trim_silence(buf, 15.0, 2048, 512);
  REQUIRE(trimmed.samples.size() == buf.samples.size());
}

TEST_CASE("pre-emphasis applies a first difference with coefficient",
          "[audio]") {
  const std::vector<double> x{1.0, 1.0, 1.0, 1.0};
  const auto y = vpd::pre_emphasis(x, 0.9);
  REQUIRE(y.size() == 4);
  REQUIRE(y[0] == Catch::Approx(1.0));
  for (int i = 1; i < 4; ++i) REQUIRE(y[i] == Catch::Approx(0.1));
}

TEST_CASE("decimation halves the rate and preserves a low tone", "[audio]") {
  const int sr = 20000;
  const auto buf = tone(300.0, 0.5, sr);
  const auto dec = vpd::decimate(buf, 2);
  REQUIRE(dec.sample_rate == 10000);
  REQUIRE(dec.samples.size() == buf.samples.size() / 2);

  // The 300 Hz component survives with close to unit gain. Project onto
  // the quadrature pair to measure amplitude independently of phase.
  double c = 0.0, s = 0.0;
  const std::size_t skip = 200;  // filter edge transients
  const std::size_t n = dec.samples.size() - 2 * skip;
  for (std::size_t i = 0; i < n; ++i) {
    const double t = 2.0 * vpd::kPi * 300.0 * (i + skip) / 10000.0;
    c += dec.samples[i + skip] * std::cos(t);
    s += dec.samples[i + skip] * std::sin(t);
  }
  const double amp = 2.0 * std::sqrt(c * c + s * s) / n;
  REQUIRE(amp == Catch::Approx(0.5).margin(0.01));
}

TEST_CASE("decimation suppresses energy above the target band", "[audio]") {
  const int sr = 20000;
  const auto buf = tone(9000.0, 0.5, sr);  // above the 10 kHz band edge
  const auto dec = vpd::decimate(buf, 2);
  double peak = 0.0;
  for (std::size_t i = 200; i + 200 < dec.samples.size(); ++i) {
    peak = std::max(peak, std::abs(dec.samples[i]));
  }
  REQUIRE(peak < 0.01);
}

TEST_CASE("decimate_to reaches at most the target rate", "[audio]") {
  const auto buf = tone(200.0, 0.3, 44100);
  const auto dec = vpd::decimate_to(buf, 10000);
  REQUIRE(dec.sample_rate <= 10000);
  const auto same = vpd::decimate_to(tone(200.0, 0.3, 8000), 10000);
  REQUIRE(same.sample_rate == 8000);
  REQUIRE(same.samples.size() == tone(200.0, 0.3, 8000).samples.size());
}

TEST_CASE("synthetic voice generator honors duration and level", "[audio]") {
  vpd::VoiceParams p;
  p.f0_hz = 150.0;
  p.duration_sec = 0.5;
  p.silence_sec = 0.1;
  const auto buf = vpd::synth_voice(p, 16000, 42);
  REQUIRE(buf.samples.size() == static_cast<std::size_t>(0.7 * 16000));
  double peak = 0.0;
  for (const double v : buf.samples) peak = std::max(peak, std::abs(v));
  REQUIRE(peak <= 1.0);
  REQUIRE(peak > 0.05);
  // Leading silence is digital zero.
  for (int i = 0; i < 1600; ++i) REQUIRE(buf.samples[i] == 0.0);
  // Deterministic for a fixed seed.
  const auto again = vpd::synth_voice(p, 16000, 42);
  REQUIRE(again.samples == buf.samples);
}
