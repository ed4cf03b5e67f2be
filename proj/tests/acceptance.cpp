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

// Acceptance gate for the primary component. Each criterion prints exactly
// one PASS / FAIL / SKIP line with its elapsed time; the process exits 0
// only when no checked criterion fails. Checks verify behaviour against
// independent oracles computed inline, never against the library's own
// output from a previous run.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <unordered_set>
#include <vector>

#include "vpd/classifiers.hpp"
#include "vpd/corpus.hpp"
#include "vpd/featureset.hpp"
#include "vpd/matrix.hpp"
#include "vpd/metrics.hpp"
#include "vpd/pipeline.hpp"
#include "vpd/pitch.hpp"
#include "vpd/resample.hpp"
#include "vpd/rng.hpp"
#include "vpd/search.hpp"
#include "vpd/synth.hpp"
#include "vpd/wav.hpp"

namespace {

struct Outcome {
  bool pass = false;
  bool skipped = false;
  std::string detail;
};

// Fails a criterion with a formatted reason.
struct CheckFailure : std::runtime_error {
  explicit CheckFailure(const std::string& msg) : std::runtime_error(msg) {}
};

void require(bool cond, const std::string& msg) {
  if (!cond) throw CheckFailure(msg);
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.3g", v);
  return buf;
}

// ---------------------------------------------------------------------------
// Criterion 1: metric oracle equivalence.
// ---------------------------------------------------------------------------

Outcome check_metrics() {
  vpd::Rng rng(12345);
  double max_err = 0.0;
  const auto safe_div = [](double n, double d) {
    return d == 0.0 ? 0.0 : n / d;
  };
  for (int i = 0; i < 10000; ++i) {
    vpd::Confusion c;
    c.tp = static_cast<std::int64_t>(rng.uniform_index(501));
    c.tn = static_cast<std::int64_t>(rng.uniform_index(501));
    c.fp = static_cast<std::int64_t>(rng.uniform_index(501));
    c.fn = static_cast<std::int64_t>(rng.uniform_index(501));
    // Exercise zero-denominator cases explicitly; an all-zero matrix is a
    // typed error, not a metric value, so keep at least one count.
    if (i % 7 == 0) c.fn = 0, c.tp = 0;
    if (i % 11 == 0) c.fp = 0, c.tn = 0;
    if (c.total() == 0) c.tp = 1;

    const auto tp = static_cast<double>(c.tp);
    const auto tn = static_cast<double>(c.tn);
    const auto fp = static_cast<double>(c.fp);
    const auto fn = static_cast<double>(c.fn);
    const double sen = safe_div(tp, tp + fn);
    const double spe = safe_div(tn, tn + fp);
    const double gm = std::sqrt(sen * spe);
    const double uar = (sen + spe) / 2.0;
    const double bm = sen + spe - 1.0;
    const double mcc_den =
        std::sqrt((tp + fp) * (tp + fn) * (tn + fp) * (tn + fn));
    const double mcc = safe_div(tp * tn - fp * fn, mcc_den);
    const double acc = (tp + tn) / static_cast<double>(c.total());

    const vpd::MetricBundle m = vpd::compute_metrics(c);
    const double errs[] = {
        std::fabs(m.sensitivity - sen), std::fabs(m.specificity - spe),
        std::fabs(m.gm - gm),           std::fabs(m.uar - uar),
        std::fabs(m.bm - bm),           std::fabs(m.mcc - mcc),
        std::fabs(m.accuracy - acc)};
    for (const double e : errs) max_err = std::max(max_err, e);
    require(max_err <= 1e-12,
            "metric mismatch beyond 1e-12 at case " + std::to_string(i));
    require(m.gm <= m.uar, "gm > uar at case " + std::to_string(i));
    require(m.bm == 2.0 * m.uar - 1.0,
            "bm != 2*uar - 1 at case " + std::to_string(i));
  }
  return {true, false, "10000 matrices, max abs err " + fmt(max_err)};
}

// ---------------------------------------------------------------------------
// Criterion 2: pitch-difference fidelity.
// ---------------------------------------------------------------------------

std::vector<double> tone(double seconds, int rate,
                         const std::function<double(double)>& freq_at) {
  const auto n = static_cast<std::size_t>(seconds * rate);
  std::vector<double> x(n);
  double phase = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double t = static_cast<double>(i) / rate;
    phase += 2.0 * 3.14159265358979323846 * freq_at(t) / rate;
    x[i] = 0.7 * std::sin(phase);
  }
  return x;
}

Outcome check_pitch_difference() {
  constexpr int kRate = 16000;
  const vpd::PitchConfig pc;

  const auto glide = tone(
      2.0, kRate, [](double t) { return 100.0 + 20.0 * (t / 2.0); });
  const vpd::PitchFeatures fg = vpd::compute_pitch_features(glide, kRate, pc);
  require(!fg.estimation_failed, "glide: pitch estimation failed");
  require(std::fabs(fg.pitch_difference - 0.2) <= 0.02,
          "glide pitch difference " + fmt(fg.pitch_difference) +
              " outside 0.2 +/- 0.02");

  const auto steady = tone(2.0, kRate, [](double) { return 150.0; });
  const vpd::PitchFeatures fs = vpd::compute_pitch_features(steady, kRate, pc);
  require(!fs.estimation_failed, "steady tone: pitch estimation failed");
  require(fs.pitch_difference <= 0.01,
          "steady-tone pitch difference " + fmt(fs.pitch_difference) +
              " exceeds 0.01");

  // Scale invariance: (max - min) / min is unchanged when the whole contour
  // is multiplied by a positive constant.
  vpd::Rng rng(321);
  double worst = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const std::size_t len = 2 + rng.uniform_index(199);
    std::vector<double> contour(len), scaled(len);
    const double s = rng.uniform(0.25, 4.0);
    for (std::size_t j = 0; j < len; ++j) {
      contour[j] = rng.uniform(80.0, 400.0);
      scaled[j] = s * contour[j];
    }
    const double a = vpd::pitch_difference(contour);
    const double b = vpd::pitch_difference(scaled);
    const double err = std::fabs(a - b) / std::max(1.0, std::fabs(a));
    worst = std::max(worst, err);
    require(err <= 1e-9, "scale invariance violated on contour " +
                             std::to_string(i) + ": " + fmt(err));
  }
  return {true, false,
          "glide " + fmt(fg.pitch_difference) + ", steady " +
              fmt(fs.pitch_difference) + ", worst scale err " + fmt(worst)};
}

// ---------------------------------------------------------------------------
// Criterion 3: nan feature contract.
// ---------------------------------------------------------------------------

Outcome check_nan_contract() {
  constexpr int kRate = 16000;
  vpd::SessionRecord rec;
  rec.talker_id = "t1";
  rec.session_id = "s1";
  rec.date = "2020-01-01";
  rec.sex = vpd::Sex::female;
  rec.age = 40;
  rec.file_name = "probe.wav";

  vpd::AudioBuffer noise;
  noise.sample_rate = kRate;
  vpd::Rng rng(2024);
  noise.samples.resize(kRate * 3 / 2);
  for (double& v : noise.samples) v = rng.uniform(-0.5, 0.5);
  const vpd::FeatureVector nf =
      vpd::extract_features(rec, noise, vpd::FeatureExtractionConfig{});
  require(nf.nan_flag == 1.0, "white noise: nan flag not set");
  require(nf.f0_mean == 0.0, "white noise: f0_mean not exactly 0");
  require(nf.f0_std == 0.0, "white noise: f0_std not exactly 0");
  require(nf.pitch_diff == 0.0, "white noise: pitch_diff not exactly 0");
  require(nf.jitta == 0.0, "white noise: jitta not exactly 0");
  require(nf.shim == 0.0, "white noise: shim not exactly 0");

  vpd::AudioBuffer voiced;
  voiced.sample_rate = kRate;
  voiced.samples = tone(1.5, kRate, [](double) { return 150.0; });
  const vpd::FeatureVector vf =
      vpd::extract_features(rec, voiced, vpd::FeatureExtractionConfig{});
  require(vf.nan_flag == 0.0, "voiced input: nan flag set");
  require(vf.f0_mean > 0.0, "voiced input: f0_mean not positive");
  return {true, false,
          "noise row zero-filled, voiced f0_mean " + fmt(vf.f0_mean)};
}

// ---------------------------------------------------------------------------
// Criterion 4: feature-subset enumeration.
// ---------------------------------------------------------------------------

Outcome check_subsets() {
  const auto subsets = vpd::enumerate_subsets();
  require(subsets.size() == 20480,
          "expected 20480 subsets, got " + std::to_string(subsets.size()));

  std::vector<vpd::FeatureVector> one(1);
  one[0].sex = vpd::Sex::female;
  one[0].file_name = "r0";
  std::unordered_set<std::string> distinct;
  distinct.reserve(subsets.size() * 2);
  for (std::size_t i = 0; i < subsets.size(); ++i) {
    const vpd::SubsetConfig& s = subsets[i];
    require(s.id == static_cast<int>(i), "subset id out of order");
    const vpd::DesignMatrix dm =
        vpd::materialize(one, s, vpd::Cohort::both);
    // Independent column arithmetic: mandatory block of five plus each
    // enabled group's width.
    int expected = 5;
    expected += (s.std_f0 ? 1 : 0) + (s.nan_flag ? 1 : 0) +
                (s.pitch_diff ? 1 : 0) + (s.entropy ? 1 : 0);
    expected += (s.lfcc ? 20 : 0) + (s.formants ? 3 : 0);
    expected += (s.skewness ? 1 : 0) + (s.centroid ? 1 : 0);
    expected += (s.contrast ? 7 : 0);
    expected += (s.flatness ? 1 : 0) + (s.rolloff ? 1 : 0) + (s.zcr ? 1 : 0);
    switch (s.mfcc) {
      case vpd::MfccOption::none: break;
      case vpd::MfccOption::m13: expected += 39; break;
      case vpd::MfccOption::m20: expected += 60; break;
      case vpd::MfccOption::m13_with_var: expected += 78; break;
      case vpd::MfccOption::m20_with_var: expected += 120; break;
    }
    require(static_cast<int>(dm.columns.size()) == expected,
            "column count mismatch for subset " + std::to_string(i));
    require(vpd::subset_column_count(s) == expected,
            "column arithmetic mismatch for subset " + std::to_string(i));
    require(dm.columns.size() >= 5 && dm.columns[0] == "f0_mean" &&
                dm.columns[1] == "hnr" && dm.columns[2] == "jitta" &&
                dm.columns[3] == "shim" && dm.columns[4] == "age",
            "mandatory block missing in subset " + std::to_string(i));
    std::string key;
    for (const auto& c : dm.columns) {
      key += c;
      key += '|';
    }
    distinct.insert(std::move(key));
  }
  require(distinct.size() == subsets.size(),
          "subset column layouts are not all distinct");

  const int spot0 = vpd::subset_column_count(vpd::subset_from_id(0));
  const int spot4 = vpd::subset_column_count(vpd::subset_from_id(4));
  const int spot_last =
      vpd::subset_column_count(vpd::subset_from_id(20479));
  require(spot0 == 5, "minimal subset width != 5");
  require(spot4 == 125, "variance-heavy minimal subset width != 125");
  require(spot_last == 164, "full subset width != 164");
  return {true, false, "20480 distinct layouts; spot widths 5/125/164"};
}

// ---------------------------------------------------------------------------
// Criterion 5: resampling balance, convexity, and bounded retries.
// ---------------------------------------------------------------------------

double segment_distance(const double* p, const double* a, const double* b,
                        std::size_t d) {
  double ab2 = 0.0, ap_ab = 0.0;
  for (std::size_t j = 0; j < d; ++j) {
    const double ab = b[j] - a[j];
    ab2 += ab * ab;
    ap_ab += (p[j] - a[j]) * ab;
  }
  const double t = ab2 == 0.0 ? 0.0 : std::clamp(ap_ab / ab2, 0.0, 1.0);
  double dist2 = 0.0;
  for (std::size_t j = 0; j < d; ++j) {
    const double diff = p[j] - (a[j] + t * (b[j] - a[j]));
    dist2 += diff * diff;
  }
  return std::sqrt(dist2);
}

Outcome check_resampling() {
  vpd::Rng rig(9001);
  double worst_convexity = 0.0;
  for (int inst = 0; inst < 50; ++inst) {
    const std::size_t dims = 2 + inst % 5;
    const std::size_t n_min = 3 + rig.uniform_index(18);
    const std::size_t n_maj = n_min + 5 + rig.uniform_index(36);
    const int minority_label = inst % 2;

    vpd::Matrix x(n_min + n_maj, dims);
    std::vector<int> y(n_min + n_maj, 1 - minority_label);
    std::vector<std::size_t> minority_rows;
    for (std::size_t r = 0; r < n_min; ++r) {
      y[r] = minority_label;
      minority_rows.push_back(r);
      for (std::size_t c = 0; c < dims; ++c) {
        x.at(r, c) = rig.uniform(0.0, 10.0);
      }
    }
    for (std::size_t r = n_min; r < x.rows; ++r) {
      for (std::size_t c = 0; c < dims; ++c) {
        x.at(r, c) = rig.uniform(50.0, 60.0);
      }
    }

    vpd::ResampleConfig cfg;
    cfg.seed = 5000 + static_cast<std::uint64_t>(inst);
    const vpd::Resampled res = vpd::kmeans_smote(x, y, cfg);

    std::size_t c0 = 0, c1 = 0;
    for (const int v : res.y) (v == 1 ? c1 : c0) += 1;
    require(c0 == c1, "instance " + std::to_string(inst) +
                          " not exactly balanced after resampling");
    require(res.x.rows == x.rows + (n_maj - n_min),
            "unexpected row count after resampling");
    for (std::size_t r = x.rows; r < res.x.rows; ++r) {
      require(res.y[r] == minority_label,
              "synthetic row carries a majority label");
      double best = 1e300;
      for (std::size_t a = 0; a < minority_rows.size(); ++a) {
        for (std::size_t b = a + 1; b < minority_rows.size(); ++b) {
          best = std::min(
              best, segment_distance(res.x.row(r), x.row(minority_rows[a]),
                                     x.row(minority_rows[b]), dims));
        }
      }
      worst_convexity = std::max(worst_convexity, best);
      require(best <= 1e-9, "synthetic point off every minority segment by " +
                                fmt(best));
    }
  }

  // Adversarial instance: a balance threshold of 1.0 can never be met, so
  // cluster selection fails on every attempt and the plain fallback runs
  // after exactly max_attempts tries.
  vpd::Matrix ax(30, 2);
  std::vector<int> ay(30, 0);
  vpd::Rng arng(77);
  for (std::size_t r = 0; r < 30; ++r) {
    ay[r] = r < 8 ? 1 : 0;
    ax.at(r, 0) = arng.uniform(0.0, 1.0);
    ax.at(r, 1) = arng.uniform(0.0, 1.0);
  }
  vpd::ResampleConfig acfg;
  acfg.seed = 99;
  acfg.balance_threshold = 1.0;
  acfg.max_attempts = 10;
  const vpd::Resampled ares = vpd::kmeans_smote(ax, ay, acfg);
  require(ares.report.method == "smote_fallback",
          "adversarial instance did not fall back");
  require(ares.report.attempts == 10,
          "fallback after " + std::to_string(ares.report.attempts) +
              " attempts, wanted 10");
  std::size_t a0 = 0, a1 = 0;
  for (const int v : ares.y) (v == 1 ? a1 : a0) += 1;
  require(a0 == a1, "fallback result not balanced");
  return {true, false,
          "50 instances balanced, worst convexity gap " +
              fmt(worst_convexity) + ", fallback after 10 attempts"};
}

// ---------------------------------------------------------------------------
// Criterion 6: cross-validation leakage ban.
// ---------------------------------------------------------------------------

Outcome check_leakage() {
  constexpr std::size_t kRows = 40, kCols = 3;
  constexpr std::size_t kInjected = 39;
  vpd::DesignMatrix dm;
  dm.x = vpd::Matrix(kRows, kCols);
  dm.columns = {"c0", "c1", "c2"};
  for (std::size_t r = 0; r < kRows; ++r) {
    dm.labels.push_back(r < 24 ? 0 : 1);
    dm.row_names.push_back("r" + std::to_string(r));
    for (std::size_t c = 0; c < kCols; ++c) {
      dm.x.at(r, c) = static_cast<double>(r + 1) * 10.0 +
                      static_cast<double>(c) * 0.618 +
                      static_cast<double>((r * 7 + c * 3) % 13) * 0.01;
    }
  }
  // One validation-fold value far outside every training range.
  dm.x.at(kInjected, 0) = 10000.0;

  const vpd::FoldPlan plan = vpd::stratified_kfold(dm.labels, 4, 99);

  vpd::ClassifierSpec spec;
  spec.algorithm = vpd::Algorithm::knn;
  spec.hyper = {{"n_neighbors", 1.0}, {"p", 2.0}, {"weights", "uniform"}};
  spec.seed = 5;

  vpd::ResampleConfig rcfg;
  rcfg.seed = 17;

  struct FoldCapture {
    std::vector<std::size_t> train, val;
    vpd::Matrix aug;
    std::vector<int> aug_y;
    std::vector<double> mins, maxs;
    vpd::Matrix val_transformed;
    std::string method;
  };
  std::vector<FoldCapture> caps(4);
  vpd::CvHooks hooks;
  hooks.on_fold = [&](int fold, const std::vector<std::size_t>& tr,
                      const std::vector<std::size_t>& va) {
    caps[fold].train = tr;
    caps[fold].val = va;
  };
  hooks.on_augmented = [&](int fold, const vpd::Matrix& x,
                           const std::vector<int>& y) {
    caps[fold].aug = x;
    caps[fold].aug_y = y;
  };
  hooks.on_scaler = [&](int fold, const std::vector<double>& mins,
                        const std::vector<double>& maxs) {
    caps[fold].mins = mins;
    caps[fold].maxs = maxs;
  };
  hooks.on_val_transformed = [&](int fold, const vpd::Matrix& v) {
    caps[fold].val_transformed = v;
  };
  hooks.on_resample = [&](int fold, const vpd::ResampleReport& rep) {
    caps[fold].method = rep.method;
  };

  vpd::run_cv(spec, dm, plan, rcfg, &hooks);

  bool injected_seen = false;
  double injected_transform = 0.0;
  for (int fold = 0; fold < 4; ++fold) {
    const FoldCapture& fc = caps[fold];
    std::vector<bool> seen(kRows, false);
    for (const std::size_t r : fc.train) seen[r] = true;
    for (const std::size_t r : fc.val) {
      require(!seen[r], "row in both partitions");
      seen[r] = true;
    }
    require(std::all_of(seen.begin(), seen.end(), [](bool b) { return b; }),
            "partition does not cover all rows");

    // The resampler input is exactly the training slice: originals survive
    // as a prefix of the augmented matrix, raw and unscaled.
    require(fc.aug.rows >= fc.train.size(), "augmented lost training rows");
    for (std::size_t i = 0; i < fc.train.size(); ++i) {
      require(fc.aug_y[i] == dm.labels[fc.train[i]],
              "augmented prefix label mismatch");
      for (std::size_t c = 0; c < kCols; ++c) {
        require(fc.aug.at(i, c) == dm.x.at(fc.train[i], c),
                "augmented prefix is not the raw training slice");
      }
    }
    std::size_t b0 = 0, b1 = 0;
    for (const int v : fc.aug_y) (v == 1 ? b1 : b0) += 1;
    require(b0 == b1, "augmented training set not balanced");
    require(fc.method == "kmeans_smote" || fc.method == "smote_fallback",
            "resample report missing");

    // No validation row may appear anywhere in the augmented matrix.
    for (std::size_t i = 0; i < fc.aug.rows; ++i) {
      for (const std::size_t v : fc.val) {
        bool same = true;
        for (std::size_t c = 0; c < kCols; ++c) {
          if (fc.aug.at(i, c) != dm.x.at(v, c)) {
            same = false;
            break;
          }
        }
        require(!same, "validation row leaked into the augmented set");
      }
    }

    // Scaler bounds equal the augmented columns' extremes, nothing else.
    for (std::size_t c = 0; c < kCols; ++c) {
      double lo = fc.aug.at(0, c), hi = fc.aug.at(0, c);
      for (std::size_t i = 1; i < fc.aug.rows; ++i) {
        lo = std::min(lo, fc.aug.at(i, c));
        hi = std::max(hi, fc.aug.at(i, c));
      }
      require(fc.mins[c] == lo && fc.maxs[c] == hi,
              "scaler bounds differ from augmented extremes");
    }

    // Validation transform is (x - min) / (max - min) with training bounds.
    require(fc.val_transformed.rows == fc.val.size(),
            "transformed validation row count mismatch");
    for (std::size_t i = 0; i < fc.val.size(); ++i) {
      for (std::size_t c = 0; c < kCols; ++c) {
        const double span = fc.maxs[c] - fc.mins[c];
        const double expect =
            (dm.x.at(fc.val[i], c) - fc.mins[c]) / span;
        require(fc.val_transformed.at(i, c) == expect,
                "validation transform mismatch");
      }
      if (fc.val[i] == kInjected) {
        injected_seen = true;
        injected_transform = fc.val_transformed.at(i, 0);
        require(fc.maxs[0] < 10000.0,
                "scaler bound absorbed the injected validation value");
        require(injected_transform > 1.0,
                "out-of-range validation value transformed inside [0,1]");
      }
    }
  }
  require(injected_seen, "injected row never reached a validation fold");
  return {true, false,
          "4 folds clean; injected value transformed to " +
              fmt(injected_transform)};
}

// ---------------------------------------------------------------------------
// Criterion 7: classifier sanity and grid sizes.
// ---------------------------------------------------------------------------

Outcome check_classifiers() {
  const std::map<vpd::Algorithm, std::size_t> expected_sizes = {
      {vpd::Algorithm::svm, 588},          {vpd::Algorithm::knn, 48},
      {vpd::Algorithm::naive_bayes, 2},    {vpd::Algorithm::decision_tree, 108},
      {vpd::Algorithm::random_forest, 30}, {vpd::Algorithm::adaboost, 24}};
  std::size_t total = 0;
  for (const auto& [alg, size] : expected_sizes) {
    const auto grid = vpd::hyperparameter_grid(alg);
    require(grid.size() == size,
            vpd::algorithm_name(alg) + " grid size " +
                std::to_string(grid.size()) + ", wanted " +
                std::to_string(size));
    total += grid.size();
  }
  require(total == 800, "grid total != 800");

  vpd::DesignMatrix dm;
  dm.x = vpd::Matrix(200, 2);
  dm.columns = {"x0", "x1"};
  vpd::Rng rng(4242);
  for (std::size_t r = 0; r < 200; ++r) {
    const int label = r < 100 ? 0 : 1;
    const double center = label == 0 ? -2.0 : 2.0;
    dm.labels.push_back(label);
    dm.row_names.push_back("p" + std::to_string(r));
    dm.x.at(r, 0) = center + rng.uniform(-0.5, 0.5);
    dm.x.at(r, 1) = center + rng.uniform(-0.5, 0.5);
  }
  const vpd::FoldPlan plan = vpd::stratified_kfold(dm.labels, 10, 7);
  vpd::ResampleConfig rcfg;
  rcfg.seed = 55;

  std::string uars;
  for (const vpd::Algorithm alg : vpd::all_algorithms()) {
    vpd::ClassifierSpec spec = vpd::hyperparameter_grid(alg)[0];
    spec.seed = 123;
    const auto bundles = vpd::run_cv(spec, dm, plan, rcfg, nullptr);
    double mean_uar = 0.0;
    for (const auto& b : bundles) mean_uar += b.uar;
    mean_uar /= static_cast<double>(bundles.size());
    require(mean_uar >= 0.95, vpd::algorithm_name(alg) +
                                  " mean UAR " + fmt(mean_uar) +
                                  " below 0.95 on separable data");
    if (!uars.empty()) uars += " ";
    uars += vpd::algorithm_name(alg) + "=" + fmt(mean_uar);
  }
  return {true, false, "sizes 588/48/2/108/30/24; " + uars};
}

// ---------------------------------------------------------------------------
// Criterion 8: desk-scale determinism.
// ---------------------------------------------------------------------------

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  require(in.good(), "missing output file " + p.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Outcome check_determinism() {
  namespace fs = std::filesystem;
  const fs::path root = fs::temp_directory_path() / "vpd_acceptance_desk";
  fs::remove_all(root);
  const fs::path corpus = root / "corpus";
  fs::create_directories(corpus);

  vpd::RunConfig synth_cfg;
  synth_cfg.data_root = corpus.string();
  synth_cfg.seed = 42;
  std::ostringstream devnull;
  require(vpd::cmd_synth(synth_cfg, devnull) == 0, "corpus synthesis failed");

  const auto run = [&](const std::string& name, int jobs) {
    vpd::RunConfig cfg =
        vpd::load_config_file((corpus / "corpus.cfg").string());
    cfg.output_dir = (root / name).string();
    cfg.jobs = jobs;
    cfg.seed = 42;
    cfg.folds = 10;
    cfg.cohorts = "all";
    cfg.algorithms = "all";
    cfg.subset_min = 0;
    cfg.subset_max = 7;
    cfg.max_specs_per_algorithm = 2;
    cfg.top_n = 5;
    cfg.repetitions = 5;
    std::ostringstream log;
    require(vpd::cmd_extract(cfg, log) == 0, "extract failed in " + name);
    require(vpd::cmd_gridsearch(cfg, log) == 0,
            "gridsearch failed in " + name);
    require(vpd::cmd_validate_top(cfg, log) == 0,
            "validate-top failed in " + name);
  };
  run("out_a", 8);
  run("out_b", 8);
  run("out_c", 1);

  std::vector<std::string> files = {"features.csv", "exclusion_log.csv",
                                    "corpus_summary.csv"};
  for (const std::string tag : {"F", "M", "B"}) {
    files.push_back("results_grid_" + tag + ".csv");
    files.push_back("validated_" + tag + ".csv");
    files.push_back("best_models_" + tag + ".csv");
    files.push_back("best_feature_sets_" + tag + ".csv");
  }
  for (const auto& f : files) {
    const std::string a = slurp(root / "out_a" / f);
    require(a == slurp(root / "out_b" / f),
            f + " differs between identical runs");
    require(a == slurp(root / "out_c" / f),
            f + " differs between 8 workers and 1 worker");
  }
  fs::remove_all(root);
  return {true, false,
          std::to_string(files.size()) +
              " output CSVs byte-identical across reruns and worker counts"};
}

// ---------------------------------------------------------------------------
// Criterion 9: reference-corpus reproduction (conditional).
// ---------------------------------------------------------------------------

Outcome check_reference_reproduction() {
  // The published target values require the original licensed recordings,
  // which cannot be redistributed with this repository. When those files
  // are placed at the configured data root (matching manifest.sha256), the
  // full-scale defaults below drive the complete reproduction run. Checked
  // here: the defaults encode that full-scale protocol.
  const vpd::RunConfig d;
  require(d.folds == 10 && d.top_n == 1000 && d.repetitions == 100 &&
              d.seed == 42 && d.subset_min == 0 && d.subset_max == 20479,
          "full-scale defaults drifted");
  return {false, true,
          "source corpus not distributable; run 'vpd extract && vpd "
          "gridsearch && vpd validate-top' against the licensed recordings "
          "to check published values (excluded from CI)"};
}

}  // namespace

int main() {
  struct Criterion {
    const char* name;
    double budget_seconds;  // 0: no runtime bound
    Outcome (*fn)();
  };
  const Criterion criteria[] = {
      {"metric oracle equivalence", 5.0, check_metrics},
      {"pitch-difference fidelity", 10.0, check_pitch_difference},
      {"nan feature contract", 0.0, check_nan_contract},
      {"feature-subset enumeration", 0.0, check_subsets},
      {"resampling balance and convexity", 0.0, check_resampling},
      {"cross-validation leakage ban", 0.0, check_leakage},
      {"classifier sanity and grid sizes", 120.0, check_classifiers},
      {"desk-scale determinism", 600.0, check_determinism},
      {"reference-corpus reproduction", 0.0, check_reference_reproduction},
  };

  std::printf("vpd acceptance gate\n");
  int failed = 0, passed = 0, skipped = 0;
  int index = 0;
  for (const Criterion& c : criteria) {
    ++index;
    const auto start = std::chrono::steady_clock::now();
    Outcome out;
    try {
      out = c.fn();
    } catch (const std::exception& e) {
      out = {false, false, e.what()};
    }
    const double elapsed =
        std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                      start)
            .count();
    if (!out.skipped && out.pass && c.budget_seconds > 0.0 &&
        elapsed > c.budget_seconds) {
      out.pass = false;
      out.detail += " (exceeded " + fmt(c.budget_seconds) + " s budget)";
    }
    const char* verdict =
        out.skipped ? "SKIP" : (out.pass ? "PASS" : "FAIL");
    if (out.skipped) {
      ++skipped;
    } else if (out.pass) {
      ++passed;
    } else {
      ++failed;
    }
    std::printf("[%d/9] %s  %s (%s) [%.2f s]\n", index, verdict, c.name,
                out.detail.c_str(), elapsed);
    std::fflush(stdout);
  }
  std::printf("result: %d passed, %d failed, %d skipped\n", passed, failed,
              skipped);
  return failed == 0 ? 0 : 1;
}
