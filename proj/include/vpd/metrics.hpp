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

#include <array>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "vpd/csv.hpp"
#include "vpd/error.hpp"

namespace vpd {

// Binary confusion counts; positive class is 1.
struct Confusion {
  std::int64_t tp = 0;
  std::int64_t tn = 0;
  std::int64_t fp = 0;
  std::int64_t fn = 0;

  std::int64_t total() const { return tp + tn + fp + fn; }
};

inline Confusion confusion_from_predictions(const std::vector<int>& truth,
                                            const std::vector<int>& pred) {
  if (truth.size() != pred.size()) {
    throw ShapeError("confusion: prediction count mismatch");
  }
  if (truth.empty()) throw DataError("confusion: empty evaluation");
  Confusion c;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    if ((truth[i] != 0 && truth[i] != 1) || (pred[i] != 0 && pred[i] != 1)) {
      throw ValidationError("confusion: labels must be 0 or 1");
    }
    if (truth[i] == 1) {
      (pred[i] == 1 ? c.tp : c.fn) += 1;
    } else {
      (pred[i] == 0 ? c.tn : c.fp) += 1;
    }
  }
  return c;
}

// Low-bias scores for one evaluation. Ratios with a zero denominator are
// defined as zero.
struct MetricBundle {
  double sensitivity = 0.0;
  double specificity = 0.0;
  double gm = 0.0;   // geometric mean of sensitivity and specificity
  double uar = 0.0;  // unweighted average recall
  double bm = 0.0;   // bookmaker informedness
  double mcc = 0.0;
  double accuracy = 0.0;

  std::array<double, 7> as_array() const {
    return {sensitivity, specificity, gm, uar, bm, mcc, accuracy};
  }
};

inline const std::array<std::string, 7>& metric_names() {
  static const std::array<std::string, 7> kNames = {
      "sensitivity", "specificity", "gm", "uar", "bm", "mcc", "accuracy"};
  return kNames;
}

inline MetricBundle compute_metrics(const Confusion& c) {
  if (c.total() <= 0) throw DataError("metrics: empty confusion");
  if (c.tp < 0 || c.tn < 0 || c.fp < 0 || c.fn < 0) {
    throw ValidationError("metrics: negative count");
  }
  MetricBundle m;
  const double tp = static_cast<double>(c.tp);
  const double tn = static_cast<double>(c.tn);
  const double fp = static_cast<double>(c.fp);
  const double fn = static_cast<double>(c.fn);
  m.sensitivity = (tp + fn) > 0.0 ? tp / (tp + fn) : 0.0;
  m.specificity = (tn + fp) > 0.0 ? tn / (tn + fp) : 0.0;
  m.gm = std::sqrt(m.sensitivity * m.specificity);
  m.uar = 0.5 * (m.sensitivity + m.specificity);
  m.bm = m.sensitivity + m.specificity - 1.0;
  const double d1 = tp + fp, d2 = tp + fn, d3 = tn + fp, d4 = tn + fn;
  if (d1 > 0.0 && d2 > 0.0 && d3 > 0.0 && d4 > 0.0) {
    m.mcc = (tp * tn - fp * fn) / std::sqrt(d1 * d2 * d3 * d4);
  } else {
    m.mcc = 0.0;
  }
  m.accuracy = (tp + tn) / (tp + tn + fp + fn);
  return m;
}

// Quantize every score to 12 decimals; applied after each fold so stored
// and in-memory values agree bit for bit.
inline MetricBundle round_bundle(const MetricBundle& m) {
  MetricBundle r;
  r.sensitivity = round12(m.sensitivity);
  r.specificity = round12(m.specificity);
  r.gm = round12(m.gm);
  r.uar = round12(m.uar);
  r.bm = round12(m.bm);
  r.mcc = round12(m.mcc);
  r.accuracy = round12(m.accuracy);
  return r;
}

struct MetricAggregate {
  MetricBundle mean;
  MetricBundle stddev;  // population standard deviation
  std::size_t count = 0;
};

inline MetricAggregate aggregate_metrics(
    const std::vector<MetricBundle>& bundles) {
  if (bundles.empty()) throw DataError("aggregate: no bundles");
  MetricAggregate agg;
  agg.count = bundles.size();
  std::array<double, 7> mean{}, var{};
  for (const auto& b : bundles) {
    const auto a = b.as_array();
    for (std::size_t i = 0; i < 7; ++i) mean[i] += a[i];
  }
  const double n = static_cast<double>(bundles.size());
  for (double& v : mean) v /= n;
  for (const auto& b : bundles) {
    const auto a = b.as_array();
    for (std::size_t i = 0; i < 7; ++i) {
      const double d = a[i] - mean[i];
      var[i] += d * d;
    }
  }
  for (double& v : var) v = std::sqrt(v / n);
  const auto fill = [](MetricBundle& m, const std::array<double, 7>& a) {
    m.sensitivity = a[0];
    m.specificity = a[1];
    m.gm = a[2];
    m.uar = a[3];
    m.bm = a[4];
    m.mcc = a[5];
    m.accuracy = a[6];
  };
  fill(agg.mean, mean);
  fill(agg.stddev, var);
  return agg;
}

}  // namespace vpd
