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

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "vpd/audio.hpp"
#include "vpd/csv.hpp"
#include "vpd/error.hpp"
#include "vpd/rng.hpp"
#include "vpd/sha256.hpp"
#include "vpd/wav.hpp"

namespace vpd {

// Sustained-vowel synthesizer for test corpora. Jitter perturbs the
// instantaneous frequency once per glottal cycle, shimmer perturbs the
// cycle gain, glide ramps the fundamental linearly over the take.
struct VoiceParams {
  double f0_hz = 200.0;
  double duration_sec = 1.2;
  double glide = 0.0;    // relative f0 rise over the take
  double jitter = 0.0;   // per-cycle relative frequency deviation
  double shimmer = 0.0;  // per-cycle relative gain deviation
  double noise = 0.0;    // additive noise level relative to voice level
  int harmonics = 8;
  double level = 0.3;
  double silence_sec = 0.15;  // leading and trailing silence
};

inline AudioBuffer synth_voice(const VoiceParams& p, int sr,
                               std::uint64_t seed) {
  if (sr <= 0) throw ValidationError("synth_voice: bad sample rate");
  Rng rng(seed);
  const std::size_t n =
      static_cast<std::size_t>(std::lround(p.duration_sec * sr));
  const std::size_t pad =
      static_cast<std::size_t>(std::lround(p.silence_sec * sr));
  AudioBuffer buf;
  buf.sample_rate = sr;
  buf.samples.assign(pad, 0.0);
  double phase = 0.0;
  double cycle_jitter = 0.0;
  double cycle_gain = 1.0;
  const double fade = 0.050 * sr;
  constexpr double kTwoPi = 2.0 * kPi;
  for (std::size_t i = 0; i < n; ++i) {
    const double t = static_cast<double>(i) / static_cast<double>(n);
    const double f_inst =
        p.f0_hz * (1.0 + p.glide * t) * (1.0 + cycle_jitter);
    phase += kTwoPi * f_inst / sr;
    if (phase >= kTwoPi) {
      phase -= kTwoPi;
      cycle_jitter = p.jitter * rng.normal();
      cycle_gain = std::max(0.2, 1.0 + p.shimmer * rng.normal());
    }
    double v = 0.0;
    double gain = 1.0;
    for (int h = 1; h <= p.harmonics; ++h) {
      if (h * f_inst >= 0.45 * sr) break;
      v += gain * std::sin(static_cast<double>(h) * phase);
      gain *= 0.7;
    }
    v *= p.level * cycle_gain / 2.4;  // keep peaks inside [-1, 1]
    v += p.noise * p.level * rng.normal();
    double env = 1.0;
    if (static_cast<double>(i) < fade) {
      env = 0.5 * (1.0 - std::cos(kPi * static_cast<double>(i) / fade));
    }
    const double tail = static_cast<double>(n - 1 - i);
    if (tail < fade) env *= 0.5 * (1.0 - std::cos(kPi * tail / fade));
    buf.samples.push_back(v * env);
  }
  buf.samples.insert(buf.samples.end(), pad, 0.0);
  return buf;
}

inline AudioBuffer synth_noise(double duration_sec, double level,
                               double silence_sec, int sr,
                               std::uint64_t seed) {
  Rng rng(seed);
  const std::size_t n =
      static_cast<std::size_t>(std::lround(duration_sec * sr));
  const std::size_t pad =
      static_cast<std::size_t>(std::lround(silence_sec * sr));
  AudioBuffer buf;
  buf.sample_rate = sr;
  buf.samples.assign(pad, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    buf.samples.push_back(level * (2.0 * rng.uniform() - 1.0));
  }
  buf.samples.insert(buf.samples.end(), pad, 0.0);
  return buf;
}

// ---------------------------------------------------------------------------
// Synthetic corpus.
// ---------------------------------------------------------------------------

struct SynthSummary {
  int files = 0;
  std::string metadata_path;
  std::string manifest_path;
  std::string rules_path;
};

// Generate a 60-recording corpus exercising every curation rule: 48
// recordings survive curation (12 healthy / 13 pathological female, 11
// healthy / 12 pathological male, at least ten per class and cohort for
// ten-fold plans), plus 3 underage sessions, 6 newer duplicate sessions,
// one defective-comment recording, one singing-voice-only annotation, and
// one recording excluded by name. Two surviving pathological recordings are
// white noise, where pitch tracking fails by construction.
inline SynthSummary generate_synthetic_corpus(const std::string& dir,
                                              std::uint64_t seed,
                                              int sample_rate = 16000) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  Rng rng(seed);

  struct Row {
    std::string talker, session, date, sex, age, paths, comment, file;
  };
  std::vector<Row> rows;
  std::vector<std::pair<std::string, AudioBuffer>> files;
  int file_counter = 0;

  // Strictly increasing in idx, so sessions added later in the roster carry
  // later dates and the keep-oldest duplicate rule removes exactly them.
  const auto date_for = [](int idx) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%04d-%02d-%02d", 2001 + idx / 4,
                  1 + idx % 12, 1 + idx % 28);
    return std::string(buf);
  };

  // Pathology cycle: jittery, gliding, breathy; every twelfth take is white
  // noise (pitch estimation fails), and one female take carries a singing
  // annotation next to a real pathology.
  const auto make_voice = [&](bool female, int variant) {
    VoiceParams p;
    p.f0_hz = female ? 180.0 + 50.0 * rng.uniform()
                     : 100.0 + 40.0 * rng.uniform();
    p.duration_sec = 1.0 + 0.5 * rng.uniform();
    switch (variant) {
      case 0:  // healthy
        p.jitter = 0.003;
        p.shimmer = 0.02;
        p.noise = 0.005;
        break;
      case 1:  // jittery
        p.jitter = 0.05;
        p.shimmer = 0.18;
        p.noise = 0.02;
        break;
      case 2:  // gliding
        p.glide = 0.30;
        p.jitter = 0.01;
        p.shimmer = 0.05;
        p.noise = 0.01;
        break;
      case 3:  // breathy
        p.jitter = 0.02;
        p.shimmer = 0.08;
        p.noise = 0.18;
        break;
      default:
        throw ValidationError("synth: unknown variant");
    }
    return synth_voice(p, sample_rate, rng.next_u64());
  };

  const auto add = [&](const std::string& talker, bool female, int age,
                       const std::string& paths, const std::string& comment,
                       int variant, int date_idx) {
    Row r;
    r.talker = talker;
    r.session = "s" + std::to_string(1000 + file_counter);
    r.date = date_for(date_idx);
    r.sex = female ? "f" : "m";
    r.age = std::to_string(age);
    r.paths = paths;
    r.comment = comment;
    char name[32];
    std::snprintf(name, sizeof(name), "rec_%03d.wav", file_counter);
    r.file = name;
    ++file_counter;
    AudioBuffer buf;
    if (variant == 4) {
      buf = synth_noise(1.0 + 0.5 * rng.uniform(), 0.25, 0.15, sample_rate,
                        rng.next_u64());
    } else {
      buf = make_voice(female, variant);
    }
    rows.push_back(r);
    files.emplace_back(r.file, std::move(buf));
    return rows.size() - 1;
  };

  const auto adult_age = [&] {
    return 19 + static_cast<int>(rng.uniform_index(60));
  };
  const char* kPathNames[] = {"", "synthetic dysphonia",
                              "synthetic pitch instability",
                              "synthetic breathiness", "synthetic aphonia"};

  // Kept: 12 healthy female.
  for (int i = 0; i < 12; ++i) {
    add("f" + std::to_string(i + 1), true, adult_age(), "", "", 0, i);
  }
  // Kept: 13 pathological female (one white noise, one singer+pathology).
  for (int i = 0; i < 13; ++i) {
    const std::string talker = "f" + std::to_string(13 + i);
    int variant = 1 + i % 3;
    std::string paths = kPathNames[variant];
    if (i == 11) {
      variant = 4;
      paths = kPathNames[4];
    }
    if (i == 12) {
      paths = std::string("Gesangsstimme;") + kPathNames[variant];
    }
    add(talker, true, adult_age(), paths, "", variant, 12 + i);
  }
  // Kept: 11 healthy male.
  for (int i = 0; i < 11; ++i) {
    add("m" + std::to_string(i + 1), false, adult_age(), "", "", 0, 25 + i);
  }
  // Kept: 12 pathological male (one white noise).
  for (int i = 0; i < 12; ++i) {
    const std::string talker = "m" + std::to_string(12 + i);
    int variant = 1 + i % 3;
    std::string paths = kPathNames[variant];
    if (i == 11) {
      variant = 4;
      paths = kPathNames[4];
    }
    add(talker, false, adult_age(), paths, "", variant, 36 + i);
  }
  // Excluded: underage sessions.
  add("u1", true, 14, "", "", 0, 48);
  add("u2", false, 10, kPathNames[1], "", 1, 49);
  add("u3", true, 17, kPathNames[2], "", 2, 50);
  // Excluded: newer duplicate sessions of kept talkers (same class, later
  // date; the curation keeps the oldest).
  add("f1", true, adult_age(), "", "", 0, 52);
  add("f2", true, adult_age(), "", "", 0, 53);
  add("f13", true, adult_age(), kPathNames[1], "", 1, 54);
  add("m1", false, adult_age(), "", "", 0, 55);
  add("m2", false, adult_age(), "", "", 0, 56);
  add("m12", false, adult_age(), kPathNames[1], "", 1, 57);
  // Excluded: defective-comment recording.
  add("f30", true, adult_age(), "", "Aufnahme defekt", 0, 58);
  // Excluded: singing-voice-only annotation.
  add("f31", true, adult_age(), "Gesangsstimme", "", 0, 59);
  // Excluded by explicit file rule.
  const std::size_t ruled = add("m30", false, adult_age(), "", "", 0, 60);

  // Write audio and manifest.
  namespace fs2 = std::filesystem;
  std::string manifest_text;
  for (const auto& [name, buf] : files) {
    const std::string path = (fs2::path(dir) / name).string();
    write_wav(path, buf);
    manifest_text += sha256_file_hex(path) + "  " + name + "\n";
  }
  const std::string manifest_path =
      (fs2::path(dir) / "manifest.sha256").string();
  {
    std::ofstream out(manifest_path, std::ios::binary);
    if (!out) throw IoError("cannot write manifest: " + manifest_path);
    out << manifest_text;
  }

  // Metadata CSV.
  csv::Writer meta({"talker_id", "session_id", "date", "sex", "age",
                    "pathologies", "comment", "file_name"});
  for (const auto& r : rows) {
    meta.add_row({r.talker, r.session, r.date, r.sex, r.age, r.paths,
                  r.comment, r.file});
  }
  const std::string metadata_path =
      (fs2::path(dir) / "metadata.csv").string();
  meta.save(metadata_path);

  // Exclusion rules.
  csv::Writer rules({"kind", "value", "reason"});
  rules.add_row({"file", rows[ruled].file, "known corrupted recording"});
  rules.add_row({"comment_marker", "defekt", "defective recording note"});
  rules.add_row({"singer_marker", "Gesangsstimme",
                 "singing voice annotation"});
  rules.add_row({"singer_marker", "Sängerstimme",
                 "singing voice annotation"});
  const std::string rules_path = (fs2::path(dir) / "rules.csv").string();
  rules.save(rules_path);

  SynthSummary summary;
  summary.files = file_counter;
  summary.metadata_path = metadata_path;
  summary.manifest_path = manifest_path;
  summary.rules_path = rules_path;
  return summary;
}

}  // namespace vpd
