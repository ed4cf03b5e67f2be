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

#include <atomic>
#include <functional>
#include <map>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include "vpd/classifiers.hpp"
#include "vpd/csv.hpp"
#include "vpd/error.hpp"
#include "vpd/featureset.hpp"
#include "vpd/metrics.hpp"
#include "vpd/resample.hpp"
#include "vpd/rng.hpp"

namespace vpd {

// Seed-derivation tags. Every random stream in the pipeline is derived by
// mixing the global seed through a fixed chain of these constants, so a
// stream never depends on scheduling or worker count.
namespace seedtag {
constexpr std::uint64_t kGridPlan = 0x01;
constexpr std::uint64_t kValidationPlan = 0x02;
constexpr std::uint64_t kResample = 0x03;
constexpr std::uint64_t kClassifier = 0x04;
}  // namespace seedtag

// ---------------------------------------------------------------------------
// Stratified k-fold.
// ---------------------------------------------------------------------------

struct FoldPlan {
  int k = 0;
  std::vector<int> assignment;  // fold index per row
};

// Shuffle each class with its own derived stream, then deal round robin.
// Every fold differs in size by at most one within each class.
inline FoldPlan stratified_kfold(const std::vector<int>& labels, int k,
                                 std::uint64_t seed) {
  if (k < 2) throw ValidationError("kfold: k must be >= 2");
  std::size_t n0 = 0, n1 = 0;
  for (const int v : labels) {
    if (v != 0 && v != 1) throw ValidationError("kfold: labels must be 0/1");
    (v == 1 ? n1 : n0) += 1;
  }
  if (n0 < static_cast<std::size_t>(k) || n1 < static_cast<std::size_t>(k)) {
    throw DataError("kfold: a class has fewer members than folds");
  }
  FoldPlan plan;
  plan.k = k;
  plan.assignment.assign(labels.size(), 0);
  for (const int cls : {0, 1}) {
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < labels.size(); ++i) {
      if (labels[i] == cls) idx.push_back(i);
    }
    Rng rng(mix_seed(seed, static_cast<std::uint64_t>(cls)));
    rng.shuffle(idx);
    for (std::size_t t = 0; t < idx.size(); ++t) {
      plan.assignment[idx[t]] = static_cast<int>(t % static_cast<std::size_t>(k));
    }
  }
  return plan;
}

// ---------------------------------------------------------------------------
// Leakage-safe cross-validation.
// ---------------------------------------------------------------------------

// Observation hooks for tests; every callback fires once per fold.
struct CvHooks {
  std::function<void(int fold, const std::vector<std::size_t>& train_rows,
                     const std::vector<std::size_t>& val_rows)>
      on_fold;
  std::function<void(int fold, const Matrix& x_aug,
                     const std::vector<int>& y_aug)>
      on_augmented;
  std::function<void(int fold, const std::vector<double>& mins,
                     const std::vector<double>& maxs)>
      on_scaler;
  std::function<void(int fold, const Matrix& val_transformed)>
      on_val_transformed;
  std::function<void(int fold, const ResampleReport& report)> on_resample;
};

// One cross-validation pass. Per fold: oversample the unscaled training
// rows, fit the min-max scaler on the augmented training set only,
// transform both sides, train, evaluate on the untouched validation fold.
// Validation rows never reach the resampler or the scaler fit. Per-fold
// metrics are rounded to 12 decimals. The classifier seed and the
// resample seed are re-derived per fold.
inline std::vector<MetricBundle> run_cv(const ClassifierSpec& spec,
                                        const DesignMatrix& dm,
                                        const FoldPlan& plan,
                                        const ResampleConfig& resample_cfg,
                                        const CvHooks* hooks = nullptr) {
  if (dm.x.rows != dm.labels.size() ||
      dm.x.rows != plan.assignment.size()) {
    throw ShapeError("run_cv: row count mismatch");
  }
  std::vector<MetricBundle> bundles;
  bundles.reserve(static_cast<std::size_t>(plan.k));
  for (int fold = 0; fold < plan.k; ++fold) {
    std::vector<std::size_t> train_idx, val_idx;
    for (std::size_t i = 0; i < dm.x.rows; ++i) {
      (plan.assignment[i] == fold ? val_idx : train_idx).push_back(i);
    }
    if (val_idx.empty() || train_idx.empty()) {
      throw DataError("run_cv: empty fold");
    }
    if (hooks && hooks->on_fold) hooks->on_fold(fold, train_idx, val_idx);

    Matrix x_train = dm.x.take_rows(train_idx);
    std::vector<int> y_train;
    y_train.reserve(train_idx.size());
    for (const std::size_t i : train_idx) y_train.push_back(dm.labels[i]);

    ResampleConfig rcfg = resample_cfg;
    rcfg.seed = mix_seed(mix_seed(resample_cfg.seed, seedtag::kResample),
                         static_cast<std::uint64_t>(fold));
    const Resampled aug = kmeans_smote(x_train, y_train, rcfg);
    if (hooks && hooks->on_resample) hooks->on_resample(fold, aug.report);
    if (hooks && hooks->on_augmented) hooks->on_augmented(fold, aug.x, aug.y);

    MinMaxScaler scaler;
    scaler.fit(aug.x);
    if (hooks && hooks->on_scaler) {
      hooks->on_scaler(fold, scaler.mins(), scaler.maxs());
    }
    const Matrix x_train_scaled = scaler.transform(aug.x);
    const Matrix x_val = dm.x.take_rows(val_idx);
    const Matrix x_val_scaled = scaler.transform(x_val);
    if (hooks && hooks->on_val_transformed) {
      hooks->on_val_transformed(fold, x_val_scaled);
    }

    ClassifierSpec fold_spec = spec;
    fold_spec.seed = mix_seed(mix_seed(spec.seed, seedtag::kClassifier),
                              static_cast<std::uint64_t>(fold));
    const TrainedModel model =
        train_classifier(fold_spec, x_train_scaled, aug.y);
    const std::vector<int> pred = model.predict(x_val_scaled);
    std::vector<int> truth;
    truth.reserve(val_idx.size());
    for (const std::size_t i : val_idx) truth.push_back(dm.labels[i]);
    bundles.push_back(
        round_bundle(compute_metrics(confusion_from_predictions(truth, pred))));
  }
  return bundles;
}

// ---------------------------------------------------------------------------
// Deterministic worker pool.
// ---------------------------------------------------------------------------

// Run fn over 0..n_tasks-1 on n_jobs threads. Results land in pre-sized
// slots keyed by task index, so the output is identical for any worker
// count. The first task exception is rethrown after all workers join.
template <typename Result>
std::vector<Result> run_parallel(std::size_t n_tasks, int n_jobs,
                                 const std::function<Result(std::size_t)>& fn) {
  std::vector<Result> results(n_tasks);
  if (n_tasks == 0) return results;
  const int jobs = std::max(1, std::min<int>(n_jobs,
                                             static_cast<int>(n_tasks)));
  if (jobs == 1) {
    for (std::size_t t = 0; t < n_tasks; ++t) results[t] = fn(t);
    return results;
  }
  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr first_error;
  std::mutex error_mu;
  std::vector<std::thread> workers;
  workers.reserve(static_cast<std::size_t>(jobs));
  for (int w = 0; w < jobs; ++w) {
    workers.emplace_back([&] {
      for (;;) {
        const std::size_t t = next.fetch_add(1);
        if (t >= n_tasks || failed.load()) return;
        try {
          results[t] = fn(t);
        } catch (...) {
          {
            const std::lock_guard<std::mutex> lock(error_mu);
            if (!first_error) first_error = std::current_exception();
          }
          failed.store(true);
          return;
        }
      }
    });
  }
  for (auto& th : workers) th.join();
  if (first_error) std::rethrow_exception(first_error);
  return results;
}

// ---------------------------------------------------------------------------
// Result rows.
// ---------------------------------------------------------------------------

struct ResultRow {
  std::string cohort;  // F | M | B
  int subset_id = 0;
  std::string algorithm;
  int spec_index = 0;
  std::string hyper;
  int folds = 0;
  int repetitions = 0;
  bool best = false;
  MetricBundle mean;
  MetricBundle stddev;
};

inline const std::vector<std::string>& result_csv_header() {
  static const std::vector<std::string> kHeader = {
      "cohort",        "subset_id",       "algorithm",
      "spec_index",    "hyperparameters", "folds",
      "repetitions",   "best",            "sensitivity_mean",
      "sensitivity_std", "specificity_mean", "specificity_std",
      "gm_mean",       "gm_std",          "uar_mean",
      "uar_std",       "bm_mean",         "bm_std",
      "mcc_mean",      "mcc_std",         "accuracy_mean",
      "accuracy_std"};
  return kHeader;
}

inline void write_results_csv(const std::string& path,
                              const std::vector<ResultRow>& rows) {
  csv::Writer w(result_csv_header());
  std::vector<std::string> fields;
  for (const auto& r : rows) {
    fields.clear();
    fields.push_back(r.cohort);
    fields.push_back(std::to_string(r.subset_id));
    fields.push_back(r.algorithm);
    fields.push_back(std::to_string(r.spec_index));
    fields.push_back(r.hyper);
    fields.push_back(std::to_string(r.folds));
    fields.push_back(std::to_string(r.repetitions));
    fields.push_back(r.best ? "1" : "0");
    const auto mean = r.mean.as_array();
    const auto sd = r.stddev.as_array();
    for (std::size_t i = 0; i < 7; ++i) {
      fields.push_back(format_fixed12(mean[i]));
      fields.push_back(format_fixed12(sd[i]));
    }
    w.add_row(fields);
  }
  w.save(path);
}

inline std::vector<ResultRow> read_results_csv(const std::string& path) {
  const auto rows = csv::parse_file(path);
  if (rows.empty() || rows[0] != result_csv_header()) {
    throw FormatError("results: unexpected header in " + path);
  }
  std::vector<ResultRow> out;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& row = rows[r];
    if (row.size() != result_csv_header().size()) {
      throw FormatError("results: bad row " + std::to_string(r + 1));
    }
    ResultRow res;
    res.cohort = row[0];
    res.subset_id = std::stoi(row[1]);
    res.algorithm = row[2];
    res.spec_index = std::stoi(row[3]);
    res.hyper = row[4];
    res.folds = std::stoi(row[5]);
    res.repetitions = std::stoi(row[6]);
    res.best = row[7] == "1";
    std::array<double, 7> mean{}, sd{};
    for (std::size_t i = 0; i < 7; ++i) {
      mean[i] = std::stod(row[8 + 2 * i]);
      sd[i] = std::stod(row[9 + 2 * i]);
    }
    const auto fill = [](MetricBundle& m, const std::array<double, 7>& a) {
      m.sensitivity = a[0];
      m.specificity = a[1];
      m.gm = a[2];
      m.uar = a[3];
      m.bm = a[4];
      m.mcc = a[5];
      m.accuracy = a[6];
    };
    fill(res.mean, mean);
    fill(res.stddev, sd);
    out.push_back(std::move(res));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Grid search.
// ---------------------------------------------------------------------------

struct GridSearchConfig {
  Cohort cohort = Cohort::both;
  int k_folds = 10;
  std::uint64_t seed = 42;
  int n_jobs = 1;
  std::vector<int> subset_ids;           // empty: all 20480
  std::vector<Algorithm> algorithms;     // empty: all six
  int max_specs_per_algorithm = 0;       // 0: full grid
  ResampleConfig resample;               // seed field is derived internally
};

inline std::vector<int> cohort_labels(
    const std::vector<FeatureVector>& vectors, Cohort cohort) {
  std::vector<int> labels;
  for (const auto& fv : vectors) {
    if (cohort == Cohort::female && fv.sex != Sex::female) continue;
    if (cohort == Cohort::male && fv.sex != Sex::male) continue;
    labels.push_back(fv.label);
  }
  return labels;
}

// Exhaustive search: one fixed fold plan per cohort, every subset times
// every hyperparameter spec, scored by cross-validated means. Rows come
// back in canonical order (subset, algorithm, spec index) regardless of
// n_jobs.
inline std::vector<ResultRow> grid_search(
    const std::vector<FeatureVector>& vectors, const GridSearchConfig& cfg) {
  std::vector<int> subset_ids = cfg.subset_ids;
  if (subset_ids.empty()) {
    subset_ids.reserve(kNumSubsets);
    for (int i = 0; i < kNumSubsets; ++i) subset_ids.push_back(i);
  }
  std::vector<Algorithm> algorithms =
      cfg.algorithms.empty() ? all_algorithms() : cfg.algorithms;

  std::map<Algorithm, std::vector<ClassifierSpec>> grids;
  for (const Algorithm a : algorithms) {
    auto grid = hyperparameter_grid(a);
    if (cfg.max_specs_per_algorithm > 0 &&
        grid.size() > static_cast<std::size_t>(cfg.max_specs_per_algorithm)) {
      grid.resize(static_cast<std::size_t>(cfg.max_specs_per_algorithm));
    }
    grids[a] = std::move(grid);
  }

  const std::vector<int> labels = cohort_labels(vectors, cfg.cohort);
  const std::uint64_t cohort_seed =
      mix_seed(cfg.seed, static_cast<std::uint64_t>(cfg.cohort));
  const FoldPlan plan = stratified_kfold(
      labels, cfg.k_folds, mix_seed(cohort_seed, seedtag::kGridPlan));

  // One task per subset; inner loop covers algorithms and specs.
  const auto task = [&](std::size_t t) {
    const int subset_id = subset_ids[t];
    const SubsetConfig subset = subset_from_id(subset_id);
    const DesignMatrix dm = materialize(vectors, subset, cfg.cohort);
    std::vector<ResultRow> rows;
    const std::uint64_t subset_seed =
        mix_seed(cohort_seed, static_cast<std::uint64_t>(subset_id));
    for (const Algorithm alg : algorithms) {
      const auto& grid = grids.at(alg);
      const std::uint64_t alg_seed = mix_seed(
          subset_seed, static_cast<std::uint64_t>(alg));
      for (std::size_t i = 0; i < grid.size(); ++i) {
        ClassifierSpec spec = grid[i];
        const std::uint64_t task_seed =
            mix_seed(alg_seed, static_cast<std::uint64_t>(i));
        spec.seed = task_seed;
        ResampleConfig rcfg = cfg.resample;
        rcfg.seed = task_seed;
        const auto bundles = run_cv(spec, dm, plan, rcfg);
        const MetricAggregate agg = aggregate_metrics(bundles);
        ResultRow row;
        row.cohort = cohort_tag(cfg.cohort);
        row.subset_id = subset_id;
        row.algorithm = algorithm_name(alg);
        row.spec_index = static_cast<int>(i);
        row.hyper = spec.canonical();
        row.folds = cfg.k_folds;
        row.repetitions = 1;
        row.mean = agg.mean;
        row.stddev = agg.stddev;
        rows.push_back(std::move(row));
      }
    }
    return rows;
  };
  const auto per_subset = run_parallel<std::vector<ResultRow>>(
      subset_ids.size(), cfg.n_jobs, task);
  std::vector<ResultRow> out;
  for (const auto& rows : per_subset) {
    out.insert(out.end(), rows.begin(), rows.end());
  }
  return out;
}

// Top-n rows per algorithm by mean MCC; ties break on lower subset id then
// lower spec index.
inline std::vector<ResultRow> select_top(const std::vector<ResultRow>& rows,
                                         std::size_t n) {
  std::map<std::string, std::vector<ResultRow>> by_alg;
  for (const auto& r : rows) by_alg[r.algorithm].push_back(r);
  std::vector<ResultRow> out;
  for (auto& [alg, group] : by_alg) {
    std::stable_sort(group.begin(), group.end(),
                     [](const ResultRow& a, const ResultRow& b) {
                       if (a.mean.mcc != b.mean.mcc) {
                         return a.mean.mcc > b.mean.mcc;
                       }
                       if (a.subset_id != b.subset_id) {
                         return a.subset_id < b.subset_id;
                       }
                       return a.spec_index < b.spec_index;
                     });
    const std::size_t take = std::min(n, group.size());
    out.insert(out.end(), group.begin(),
               group.begin() + static_cast<std::ptrdiff_t>(take));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Repeated validation.
// ---------------------------------------------------------------------------

struct ValidationConfig {
  Cohort cohort = Cohort::both;
  int k_folds = 10;
  int repetitions = 100;
  std::uint64_t seed = 42;
  int n_jobs = 1;
  ResampleConfig resample;
};

// Re-validate candidate rows with repeated cross-validation on fresh fold
// plans. Scores aggregate over every fold of every repetition. Per
// algorithm the row with the highest repeated mean MCC is flagged best.
inline std::vector<ResultRow> repeated_validation(
    const std::vector<FeatureVector>& vectors,
    const std::vector<ResultRow>& selected, const ValidationConfig& cfg) {
  const std::vector<int> labels = cohort_labels(vectors, cfg.cohort);
  const std::uint64_t cohort_seed = mix_seed(
      mix_seed(cfg.seed, static_cast<std::uint64_t>(cfg.cohort)),
      seedtag::kValidationPlan);
  const std::string tag = cohort_tag(cfg.cohort);
  const auto task = [&](std::size_t t) {
    const ResultRow& cand = selected[t];
    if (cand.cohort != tag) {
      throw ValidationError("validation: row cohort mismatch");
    }
    const Algorithm alg = algorithm_from_name(cand.algorithm);
    const auto grid = hyperparameter_grid(alg);
    if (cand.spec_index < 0 ||
        static_cast<std::size_t>(cand.spec_index) >= grid.size()) {
      throw ValidationError("validation: spec index out of range");
    }
    const SubsetConfig subset = subset_from_id(cand.subset_id);
    const DesignMatrix dm = materialize(vectors, subset, cfg.cohort);
    const std::uint64_t row_seed = mix_seed(
        mix_seed(mix_seed(cohort_seed,
                          static_cast<std::uint64_t>(cand.subset_id)),
                 static_cast<std::uint64_t>(alg)),
        static_cast<std::uint64_t>(cand.spec_index));
    std::vector<MetricBundle> bundles;
    bundles.reserve(static_cast<std::size_t>(cfg.repetitions * cfg.k_folds));
    for (int rep = 0; rep < cfg.repetitions; ++rep) {
      const std::uint64_t rep_seed =
          mix_seed(row_seed, static_cast<std::uint64_t>(rep));
      const FoldPlan plan = stratified_kfold(labels, cfg.k_folds, rep_seed);
      ClassifierSpec spec = grid[static_cast<std::size_t>(cand.spec_index)];
      spec.seed = rep_seed;
      ResampleConfig rcfg = cfg.resample;
      rcfg.seed = rep_seed;
      const auto rep_bundles = run_cv(spec, dm, plan, rcfg);
      bundles.insert(bundles.end(), rep_bundles.begin(), rep_bundles.end());
    }
    const MetricAggregate agg = aggregate_metrics(bundles);
    ResultRow row = cand;
    row.folds = cfg.k_folds;
    row.repetitions = cfg.repetitions;
    row.best = false;
    row.mean = agg.mean;
    row.stddev = agg.stddev;
    return row;
  };
  std::vector<ResultRow> out = run_parallel<ResultRow>(
      selected.size(), cfg.n_jobs, task);
  // Flag the winner per algorithm.
  std::map<std::string, std::size_t> best;
  for (std::size_t i = 0; i < out.size(); ++i) {
    const auto it = best.find(out[i].algorithm);
    if (it == best.end()) {
      best[out[i].algorithm] = i;
      continue;
    }
    const ResultRow& cur = out[it->second];
    const ResultRow& cand = out[i];
    const bool better =
        cand.mean.mcc > cur.mean.mcc ||
        (cand.mean.mcc == cur.mean.mcc &&
         (cand.subset_id < cur.subset_id ||
          (cand.subset_id == cur.subset_id &&
           cand.spec_index < cur.spec_index)));
    if (better) it->second = i;
  }
  for (const auto& [alg, idx] : best) out[idx].best = true;
  return out;
}

// Aggregate rows by (algorithm, subset): mean and population stddev of the
// per-row mean scores. Per algorithm the subset with the highest aggregate
// MCC is flagged best.
inline std::vector<ResultRow> best_feature_sets(
    const std::vector<ResultRow>& rows) {
  std::map<std::pair<std::string, int>, std::vector<const ResultRow*>> groups;
  for (const auto& r : rows) {
    groups[{r.algorithm, r.subset_id}].push_back(&r);
  }
  std::vector<ResultRow> out;
  for (const auto& [key, members] : groups) {
    std::vector<MetricBundle> means;
    means.reserve(members.size());
    for (const ResultRow* r : members) means.push_back(r->mean);
    const MetricAggregate agg = aggregate_metrics(means);
    ResultRow row;
    row.cohort = members.front()->cohort;
    row.subset_id = key.second;
    row.algorithm = key.first;
    row.spec_index = -1;
    row.hyper = "aggregate";
    row.folds = members.front()->folds;
    row.repetitions = static_cast<int>(members.size());
    row.mean = agg.mean;
    row.stddev = agg.stddev;
    out.push_back(std::move(row));
  }
  std::map<std::string, std::size_t> best;
  for (std::size_t i = 0; i < out.size(); ++i) {
    const auto it = best.find(out[i].algorithm);
    if (it == best.end()) {
      best[out[i].algorithm] = i;
      continue;
    }
    const ResultRow& cur = out[it->second];
    if (out[i].mean.mcc > cur.mean.mcc ||
        (out[i].mean.mcc == cur.mean.mcc &&
         out[i].subset_id < cur.subset_id)) {
      it->second = i;
    }
  }
  for (const auto& [alg, idx] : best) out[idx].best = true;
  return out;
}

}  // namespace vpd
