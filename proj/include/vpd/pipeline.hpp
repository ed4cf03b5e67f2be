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

#include <chrono>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <limits>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "vpd/classifiers.hpp"
#include "vpd/corpus.hpp"
#include "vpd/csv.hpp"
#include "vpd/error.hpp"
#include "vpd/featureset.hpp"
#include "vpd/metrics.hpp"
#include "vpd/pitch.hpp"
#include "vpd/resample.hpp"
#include "vpd/search.hpp"
#include "vpd/sha256.hpp"
#include "vpd/synth.hpp"
#include "vpd/wav.hpp"

namespace vpd {

// ---------------------------------------------------------------------------
// Run configuration. Flat key=value file, '#' starts a comment. Every key
// has a default so a config file only needs to state what differs.
// ---------------------------------------------------------------------------

struct RunConfig {
  std::string data_root = ".";
  std::string metadata = "metadata.csv";
  std::string manifest;  // empty disables checksum verification
  std::string rules;     // empty disables rule-table exclusions
  std::string output_dir = "out";
  std::string cohorts = "all";     // "all" or comma list of F,M,B
  std::string algorithms = "all";  // "all" or comma list of family names
  std::uint64_t seed = 42;
  int jobs = 1;
  int folds = 10;
  int top_n = 1000;
  int repetitions = 100;
  int subset_min = 0;
  int subset_max = kNumSubsets - 1;
  int max_specs_per_algorithm = 0;  // 0 keeps the full grid
  double trim_db = 15.0;
  double pitch_fmin = 75.0;
  double pitch_fmax = 600.0;
  double pitch_frame_sec = 0.040;
  double pitch_hop_sec = 0.010;
  double voicing_threshold = 0.45;
  int fft_size = 2048;
  int fft_hop = 512;
  int n_filters = 128;
  int smote_neighbors = 5;
  int kmeans_k = 0;                 // 0 picks floor(sqrt(n)) at run time
  double balance_threshold = -1.0;  // <0 uses the training imbalance ratio
  int resample_max_attempts = 10;
  int synth_sample_rate = 16000;
  bool skip_verify = false;
};

namespace detail {

inline bool parse_bool(const std::string& v, const std::string& key) {
  if (v == "true" || v == "1") return true;
  if (v == "false" || v == "0") return false;
  throw ValidationError("config: key '" + key + "' expects true or false");
}

}  // namespace detail

// Applies one key=value assignment; unknown keys are rejected so typos in a
// config file fail loudly instead of silently running with defaults.
inline void apply_config_entry(RunConfig& cfg, const std::string& key,
                               const std::string& value) {
  const auto as_i64 = [&](long long lo, long long hi) {
    long long v = 0;
    try {
      std::size_t pos = 0;
      v = std::stoll(value, &pos);
      if (pos != value.size()) throw std::invalid_argument("trailing");
    } catch (const std::exception&) {
      throw ValidationError("config: key '" + key + "' expects an integer");
    }
    if (v < lo || v > hi) {
      throw ValidationError("config: key '" + key + "' out of range");
    }
    return v;
  };
  const auto as_f64 = [&] {
    try {
      std::size_t pos = 0;
      const double v = std::stod(value, &pos);
      if (pos != value.size()) throw std::invalid_argument("trailing");
      return v;
    } catch (const std::exception&) {
      throw ValidationError("config: key '" + key + "' expects a number");
    }
  };
  if (key == "data_root") {
    cfg.data_root = value;
  } else if (key == "metadata") {
    cfg.metadata = value;
  } else if (key == "manifest") {
    cfg.manifest = value;
  } else if (key == "rules") {
    cfg.rules = value;
  } else if (key == "output_dir") {
    cfg.output_dir = value;
  } else if (key == "cohorts") {
    cfg.cohorts = value;
  } else if (key == "algorithms") {
    cfg.algorithms = value;
  } else if (key == "seed") {
    cfg.seed = static_cast<std::uint64_t>(
        as_i64(0, std::numeric_limits<long long>::max()));
  } else if (key == "jobs") {
    cfg.jobs = static_cast<int>(as_i64(1, 4096));
  } else if (key == "folds") {
    cfg.folds = static_cast<int>(as_i64(2, 1000));
  } else if (key == "top_n") {
    cfg.top_n = static_cast<int>(as_i64(1, 1000000));
  } else if (key == "repetitions") {
    cfg.repetitions = static_cast<int>(as_i64(1, 1000000));
  } else if (key == "subset_min") {
    cfg.subset_min = static_cast<int>(as_i64(0, kNumSubsets - 1));
  } else if (key == "subset_max") {
    cfg.subset_max = static_cast<int>(as_i64(0, kNumSubsets - 1));
  } else if (key == "max_specs_per_algorithm") {
    cfg.max_specs_per_algorithm = static_cast<int>(as_i64(0, 1000000));
  } else if (key == "trim_db") {
    cfg.trim_db = as_f64();
  } else if (key == "pitch_fmin") {
    cfg.pitch_fmin = as_f64();
  } else if (key == "pitch_fmax") {
    cfg.pitch_fmax = as_f64();
  } else if (key == "pitch_frame_sec") {
    cfg.pitch_frame_sec = as_f64();
  } else if (key == "pitch_hop_sec") {
    cfg.pitch_hop_sec = as_f64();
  } else if (key == "voicing_threshold") {
    cfg.voicing_threshold = as_f64();
  } else if (key == "fft_size") {
    cfg.fft_size = static_cast<int>(as_i64(32, 1 << 20));
  } else if (key == "fft_hop") {
    cfg.fft_hop = static_cast<int>(as_i64(1, 1 << 20));
  } else if (key == "n_filters") {
    cfg.n_filters = static_cast<int>(as_i64(2, 8192));
  } else if (key == "smote_neighbors") {
    cfg.smote_neighbors = static_cast<int>(as_i64(1, 1000));
  } else if (key == "kmeans_k") {
    cfg.kmeans_k = static_cast<int>(as_i64(0, 1000000));
  } else if (key == "balance_threshold") {
    cfg.balance_threshold = as_f64();
  } else if (key == "resample_max_attempts") {
    cfg.resample_max_attempts = static_cast<int>(as_i64(1, 1000));
  } else if (key == "synth_sample_rate") {
    cfg.synth_sample_rate = static_cast<int>(as_i64(8000, 192000));
  } else if (key == "skip_verify") {
    cfg.skip_verify = detail::parse_bool(value, key);
  } else {
    throw ValidationError("config: unknown key '" + key + "'");
  }
}

inline RunConfig load_config_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open config file: " + path);
  RunConfig cfg;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const std::size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const std::string trimmed = detail::trim_ws(line);
    if (trimmed.empty()) continue;
    const std::size_t eq = trimmed.find('=');
    if (eq == std::string::npos) {
      throw FormatError("config: line " + std::to_string(lineno) +
                        " is not key=value");
    }
    apply_config_entry(cfg, detail::trim_ws(trimmed.substr(0, eq)),
                       detail::trim_ws(trimmed.substr(eq + 1)));
  }
  return cfg;
}

// VPD_DATA_ROOT overrides data_root so a config file can move between
// machines without edits.
inline void apply_env_overrides(RunConfig& cfg) {
  if (const char* root = std::getenv("VPD_DATA_ROOT")) {
    if (*root != '\0') cfg.data_root = root;
  }
}

inline std::string dump_config(const RunConfig& cfg) {
  std::ostringstream out;
  out << "data_root = " << cfg.data_root << "\n";
  out << "metadata = " << cfg.metadata << "\n";
  out << "manifest = " << cfg.manifest << "\n";
  out << "rules = " << cfg.rules << "\n";
  out << "output_dir = " << cfg.output_dir << "\n";
  out << "cohorts = " << cfg.cohorts << "\n";
  out << "algorithms = " << cfg.algorithms << "\n";
  out << "seed = " << cfg.seed << "\n";
  out << "jobs = " << cfg.jobs << "\n";
  out << "folds = " << cfg.folds << "\n";
  out << "top_n = " << cfg.top_n << "\n";
  out << "repetitions = " << cfg.repetitions << "\n";
  out << "subset_min = " << cfg.subset_min << "\n";
  out << "subset_max = " << cfg.subset_max << "\n";
  out << "max_specs_per_algorithm = " << cfg.max_specs_per_algorithm << "\n";
  out << "trim_db = " << cfg.trim_db << "\n";
  out << "pitch_fmin = " << cfg.pitch_fmin << "\n";
  out << "pitch_fmax = " << cfg.pitch_fmax << "\n";
  out << "pitch_frame_sec = " << cfg.pitch_frame_sec << "\n";
  out << "pitch_hop_sec = " << cfg.pitch_hop_sec << "\n";
  out << "voicing_threshold = " << cfg.voicing_threshold << "\n";
  out << "fft_size = " << cfg.fft_size << "\n";
  out << "fft_hop = " << cfg.fft_hop << "\n";
  out << "n_filters = " << cfg.n_filters << "\n";
  out << "smote_neighbors = " << cfg.smote_neighbors << "\n";
  out << "kmeans_k = " << cfg.kmeans_k << "\n";
  out << "balance_threshold = " << cfg.balance_threshold << "\n";
  out << "resample_max_attempts = " << cfg.resample_max_attempts << "\n";
  out << "synth_sample_rate = " << cfg.synth_sample_rate << "\n";
  out << "skip_verify = " << (cfg.skip_verify ? "true" : "false") << "\n";
  return out.str();
}

// ---------------------------------------------------------------------------
// Shared command helpers.
// ---------------------------------------------------------------------------

inline std::vector<Cohort> parse_cohorts(const std::string& spec) {
  if (spec == "all" || spec.empty()) {
    return {Cohort::female, Cohort::male, Cohort::both};
  }
  std::vector<Cohort> out;
  for (const auto& tag : detail::split_list(spec, ',')) {
    out.push_back(cohort_from_tag(tag));
  }
  if (out.empty()) throw ValidationError("no cohorts selected");
  return out;
}

inline std::vector<Algorithm> parse_algorithms(const std::string& spec) {
  if (spec == "all" || spec.empty()) return all_algorithms();
  std::vector<Algorithm> out;
  for (const auto& name : detail::split_list(spec, ',')) {
    out.push_back(algorithm_from_name(name));
  }
  if (out.empty()) throw ValidationError("no algorithms selected");
  return out;
}

namespace detail {

inline std::string join_path(const std::string& dir,
                             const std::string& name) {
  return (std::filesystem::path(dir) / name).string();
}

inline void write_text_file(const std::string& path,
                            const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write file: " + path);
  out << text;
  if (!out) throw IoError("write failed: " + path);
}

inline FeatureExtractionConfig feature_config(const RunConfig& cfg) {
  FeatureExtractionConfig fc;
  fc.trim_threshold_db = cfg.trim_db;
  fc.pitch.fmin_hz = cfg.pitch_fmin;
  fc.pitch.fmax_hz = cfg.pitch_fmax;
  fc.pitch.frame_sec = cfg.pitch_frame_sec;
  fc.pitch.hop_sec = cfg.pitch_hop_sec;
  fc.pitch.voicing_threshold = cfg.voicing_threshold;
  fc.fft_size = static_cast<std::size_t>(cfg.fft_size);
  fc.hop = static_cast<std::size_t>(cfg.fft_hop);
  fc.n_filters = static_cast<std::size_t>(cfg.n_filters);
  return fc;
}

inline ResampleConfig resample_config(const RunConfig& cfg) {
  ResampleConfig rc;
  rc.seed = cfg.seed;
  rc.k_neighbors = cfg.smote_neighbors;
  rc.kmeans_k = cfg.kmeans_k;
  rc.balance_threshold = cfg.balance_threshold;
  rc.max_attempts = cfg.resample_max_attempts;
  return rc;
}

inline std::vector<int> subset_range(const RunConfig& cfg) {
  if (cfg.subset_min > cfg.subset_max) {
    throw ValidationError("subset_min exceeds subset_max");
  }
  std::vector<int> ids;
  ids.reserve(static_cast<std::size_t>(cfg.subset_max - cfg.subset_min + 1));
  for (int id = cfg.subset_min; id <= cfg.subset_max; ++id) ids.push_back(id);
  return ids;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// verify: checksum every corpus file against the manifest.
// ---------------------------------------------------------------------------

inline int cmd_verify(const RunConfig& cfg, std::ostream& log) {
  if (cfg.manifest.empty()) {
    throw ValidationError("verify: no manifest configured");
  }
  const ManifestReport report = verify_manifest(cfg.manifest, cfg.data_root);
  std::filesystem::create_directories(cfg.output_dir);
  csv::Writer out({"file_name", "status", "expected", "actual"});
  std::size_t ok = 0, missing = 0, mismatched = 0;
  for (const auto& e : report.entries) {
    out.add_row({e.file_name, e.status, e.expected, e.actual});
    if (e.status == "ok") ++ok;
    if (e.status == "missing") ++missing;
    if (e.status == "mismatch") ++mismatched;
  }
  out.save(detail::join_path(cfg.output_dir, "verification_report.csv"));
  log << "verify: " << ok << " ok, " << missing << " missing, " << mismatched
      << " mismatched of " << report.entries.size() << " entries\n";
  return report.ok() ? 0 : 1;
}

// ---------------------------------------------------------------------------
// extract: curate the corpus and write the full feature table.
// ---------------------------------------------------------------------------

inline int cmd_extract(const RunConfig& cfg, std::ostream& log) {
  if (!cfg.manifest.empty() && !cfg.skip_verify) {
    const int rc = cmd_verify(cfg, log);
    if (rc != 0) {
      log << "extract: aborted, manifest verification failed\n";
      return rc;
    }
  }
  const auto records = read_metadata(cfg.metadata);
  ExclusionRules rules;
  if (!cfg.rules.empty()) rules = read_exclusion_rules(cfg.rules);
  CuratedCorpus curated = curate(records, rules);
  const CorpusCounts counts = count_corpus(curated.records);
  log << "extract: curated " << curated.records.size() << " of "
      << records.size() << " recordings (healthy f " << counts.healthy_female
      << ", pathological f " << counts.pathological_female << ", healthy m "
      << counts.healthy_male << ", pathological m "
      << counts.pathological_male << ")\n";

  const FeatureExtractionConfig fc = detail::feature_config(cfg);
  struct Slot {
    bool ok = false;
    std::string error;
    FeatureVector fv;
  };
  const auto slots = run_parallel<Slot>(
      curated.records.size(), cfg.jobs, [&](std::size_t i) {
        Slot slot;
        const SessionRecord& rec = curated.records[i];
        try {
          const AudioBuffer audio =
              read_wav(detail::join_path(cfg.data_root, rec.file_name));
          const AudioBuffer trimmed = trim_silence(
              audio, fc.trim_threshold_db, fc.trim_frame, fc.trim_hop);
          slot.fv = extract_features(rec, trimmed, fc);
          slot.ok = true;
        } catch (const Error& e) {
          slot.error = e.what();
        }
        return slot;
      });

  std::vector<FeatureVector> features;
  features.reserve(slots.size());
  for (std::size_t i = 0; i < slots.size(); ++i) {
    if (slots[i].ok) {
      features.push_back(slots[i].fv);
    } else {
      ExclusionEntry entry;
      entry.file_name = curated.records[i].file_name;
      entry.stage = "unusable_audio";
      entry.reason = slots[i].error;
      curated.exclusions.push_back(entry);
      log << "extract: skipped " << entry.file_name << " (" << entry.reason
          << ")\n";
    }
  }

  std::filesystem::create_directories(cfg.output_dir);
  const std::string features_path =
      detail::join_path(cfg.output_dir, "features.csv");
  write_features_csv(features_path, features);
  csv::Writer excl({"file_name", "stage", "reason"});
  for (const auto& e : curated.exclusions) {
    excl.add_row({e.file_name, e.stage, e.reason});
  }
  excl.save(detail::join_path(cfg.output_dir, "exclusion_log.csv"));

  int nan_count = 0;
  for (const auto& fv : features) nan_count += fv.nan_flag > 0.5 ? 1 : 0;
  std::ostringstream summary;
  summary << "recordings_total," << records.size() << "\n"
          << "recordings_kept," << features.size() << "\n"
          << "recordings_excluded," << curated.exclusions.size() << "\n"
          << "healthy_female," << counts.healthy_female << "\n"
          << "pathological_female," << counts.pathological_female << "\n"
          << "healthy_male," << counts.healthy_male << "\n"
          << "pathological_male," << counts.pathological_male << "\n"
          << "pitch_failed," << nan_count << "\n";
  detail::write_text_file(
      detail::join_path(cfg.output_dir, "corpus_summary.csv"),
      summary.str());
  log << "extract: wrote " << features.size() << " feature rows to "
      << features_path << " (" << nan_count << " with failed pitch)\n";
  return 0;
}

// ---------------------------------------------------------------------------
// gridsearch: exhaustive subset x hyperparameter sweep per cohort.
// ---------------------------------------------------------------------------

inline int cmd_gridsearch(const RunConfig& cfg, std::ostream& log) {
  const std::string features_path =
      detail::join_path(cfg.output_dir, "features.csv");
  const auto features = read_features_csv(features_path);
  GridSearchConfig gc;
  gc.k_folds = cfg.folds;
  gc.seed = cfg.seed;
  gc.n_jobs = cfg.jobs;
  gc.subset_ids = detail::subset_range(cfg);
  gc.algorithms = parse_algorithms(cfg.algorithms);
  gc.max_specs_per_algorithm = cfg.max_specs_per_algorithm;
  gc.resample = detail::resample_config(cfg);

  std::ostringstream runlog;
  runlog << "features_sha256," << sha256_file_hex(features_path) << "\n";
  runlog << "seed," << cfg.seed << "\n";
  runlog << "folds," << cfg.folds << "\n";
  runlog << "subsets," << gc.subset_ids.size() << "\n";
  std::size_t specs = 0;
  for (const Algorithm alg : gc.algorithms) {
    auto grid = hyperparameter_grid(alg);
    if (gc.max_specs_per_algorithm > 0 &&
        grid.size() > static_cast<std::size_t>(gc.max_specs_per_algorithm)) {
      grid.resize(static_cast<std::size_t>(gc.max_specs_per_algorithm));
    }
    runlog << "grid_" << algorithm_name(alg) << "," << grid.size() << "\n";
    specs += grid.size();
  }
  runlog << "specs_per_subset," << specs << "\n";

  for (const Cohort cohort : parse_cohorts(cfg.cohorts)) {
    gc.cohort = cohort;
    const auto start = std::chrono::steady_clock::now();
    const auto rows = grid_search(features, gc);
    const double elapsed =
        std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                      start)
            .count();
    const std::string tag = cohort_tag(cohort);
    const std::string out_path = detail::join_path(
        cfg.output_dir, "results_grid_" + tag + ".csv");
    write_results_csv(out_path, rows);
    runlog << "cohort_" << tag << "_rows," << rows.size() << "\n";
    runlog << "cohort_" << tag << "_seconds," << std::fixed
           << std::setprecision(3) << elapsed << "\n";
    log << "gridsearch: cohort " << tag << " wrote " << rows.size()
        << " rows to " << out_path << "\n";
  }
  detail::write_text_file(
      detail::join_path(cfg.output_dir, "gridsearch_log.csv"),
      runlog.str());
  return 0;
}

// ---------------------------------------------------------------------------
// validate-top: repeated cross-validation of the best grid rows.
// ---------------------------------------------------------------------------

inline int cmd_validate_top(const RunConfig& cfg, std::ostream& log) {
  const std::string features_path =
      detail::join_path(cfg.output_dir, "features.csv");
  const auto features = read_features_csv(features_path);
  ValidationConfig vc;
  vc.k_folds = cfg.folds;
  vc.repetitions = cfg.repetitions;
  vc.seed = cfg.seed;
  vc.n_jobs = cfg.jobs;
  vc.resample = detail::resample_config(cfg);

  for (const Cohort cohort : parse_cohorts(cfg.cohorts)) {
    vc.cohort = cohort;
    const std::string tag = cohort_tag(cohort);
    const std::string grid_path =
        detail::join_path(cfg.output_dir, "results_grid_" + tag + ".csv");
    const auto grid_rows = read_results_csv(grid_path);
    const auto top =
        select_top(grid_rows, static_cast<std::size_t>(cfg.top_n));
    const auto validated = repeated_validation(features, top, vc);
    write_results_csv(
        detail::join_path(cfg.output_dir, "validated_" + tag + ".csv"),
        validated);
    std::vector<ResultRow> best;
    for (const auto& row : validated) {
      if (row.best) best.push_back(row);
    }
    write_results_csv(
        detail::join_path(cfg.output_dir, "best_models_" + tag + ".csv"),
        best);
    const auto by_set = best_feature_sets(validated);
    write_results_csv(
        detail::join_path(cfg.output_dir,
                          "best_feature_sets_" + tag + ".csv"),
        by_set);
    log << "validate-top: cohort " << tag << " validated " << validated.size()
        << " models, " << best.size() << " per-algorithm winners\n";
  }
  return 0;
}

// ---------------------------------------------------------------------------
// report: render the validated results as a text table.
// ---------------------------------------------------------------------------

inline int cmd_report(const RunConfig& cfg, std::ostream& out) {
  std::ostringstream text;
  for (const Cohort cohort : parse_cohorts(cfg.cohorts)) {
    const std::string tag = cohort_tag(cohort);
    const std::string best_path =
        detail::join_path(cfg.output_dir, "best_models_" + tag + ".csv");
    if (!std::filesystem::exists(best_path)) continue;
    const auto rows = read_results_csv(best_path);
    text << "cohort " << tag << "\n";
    for (const auto& row : rows) {
      text << "  " << std::left << std::setw(14) << row.algorithm
           << std::right << " subset " << std::setw(6) << row.subset_id
           << " mcc " << std::fixed << std::setprecision(4) << row.mean.mcc
           << " (sd " << row.stddev.mcc << ")"
           << " uar " << row.mean.uar << " sen " << row.mean.sensitivity
           << " spe " << row.mean.specificity << "\n";
      text << "    " << row.hyper << "\n";
    }
  }
  if (text.str().empty()) {
    throw IoError("report: no best_models files found in " + cfg.output_dir);
  }
  detail::write_text_file(detail::join_path(cfg.output_dir, "report.txt"),
                          text.str());
  out << text.str();
  return 0;
}

// ---------------------------------------------------------------------------
// synth: generate the synthetic demonstration corpus plus a ready config.
// ---------------------------------------------------------------------------

inline int cmd_synth(const RunConfig& cfg, std::ostream& log) {
  const SynthSummary summary = generate_synthetic_corpus(
      cfg.data_root, cfg.seed, cfg.synth_sample_rate);
  RunConfig ready = cfg;
  ready.metadata = summary.metadata_path;
  ready.manifest = summary.manifest_path;
  ready.rules = summary.rules_path;
  detail::write_text_file(detail::join_path(cfg.data_root, "corpus.cfg"),
                          dump_config(ready));
  log << "synth: wrote " << summary.files << " recordings under "
      << cfg.data_root << "\n";
  return 0;
}

}  // namespace vpd
