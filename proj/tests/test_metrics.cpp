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
#include <random>
#include <vector>

#include <catch2/catch_amalgamated.hpp>

#include "vpd/metrics.hpp"

namespace {

vpd::Confusion make(std::int64_t tp, std::int64_t tn, std::int64_t fp,
                    std::int64_t fn) {
  vpd::Confusion c;
  c.tp = tp;
  c.tn = tn;
  c.fp = fp;
  c.fn = fn;
  return c;
}

}  // namespace

TEST_CASE("confusion counts predictions cell by cell", "[metrics]") {
  const std::vector<int> truth = {1, 1, 1, 0, 0, 0, 0, 1};
  const std::vector<int> pred = {1, 0, 1, 0, 1, 0, 0, 1};
  const auto c = vpd::confusion_from_predictions(truth, pred);
  REQUIRE(c.tp == 3);
  REQUIRE(c.fn == 1);
  REQUIRE(c.tn == 3);
  REQUIRE(c.fp == 1);
  REQUIRE(c.total() == 8);
}

TEST_CASE("confusion rejects malformed inputs", "[metrics]") {
  REQUIRE_THROWS_AS(vpd::confusion_from_predictions({1, 0}, {1}),
                    vpd::ShapeError);
  REQUIRE_THROWS_AS(vpd::confusion_from_predictions({}, {}), vpd::DataError);
  REQUIRE_THROWS_AS(vpd::confusion_from_predictions({2}, {1}),
                    vpd::ValidationError);
  REQUIRE_THROWS_AS(vpd::confusion_from_predictions({1}, {-1}),
                    vpd::ValidationError);
}

TEST_CASE("metrics match hand-computed values", "[metrics]") {
  // tp=40 tn=30 fp=10 fn=20: sen=2/3, spe=3/4.
  const auto m = vpd::compute_metrics(make(40, 30, 10, 20));
  REQUIRE(m.sensitivity == Catch::Approx(40.0 / 60.0).epsilon(1e-15));
  REQUIRE(m.specificity == Catch::Approx(30.0 / 40.0).epsilon(1e-15));
  REQUIRE(m.gm == Catch::Approx(std::sqrt(0.5)).epsilon(1e-15));
  REQUIRE(m.uar == Catch::Approx((2.0 / 3.0 + 0.75) / 2.0).epsilon(1e-15));
  REQUIRE(m.bm == Catch::Approx(2.0 / 3.0 + 0.75 - 1.0).epsilon(1e-15));
  // mcc = (40*30 - 10*20) / sqrt(50*60*40*50).
  const double mcc = (40.0 * 30.0 - 10.0 * 20.0) /
                     std::sqrt(50.0 * 60.0 * 40.0 * 50.0);
  REQUIRE(m.mcc == Catch::Approx(mcc).epsilon(1e-15));
  REQUIRE(m.accuracy == Catch::Approx(70.0 / 100.0).epsilon(1e-15));
}

TEST_CASE("perfect and inverted classifiers hit the extremes", "[metrics]") {
  const auto perfect = vpd::compute_metrics(make(10, 10, 0, 0));
  REQUIRE(perfect.sensitivity == 1.0);
  REQUIRE(perfect.specificity == 1.0);
  REQUIRE(perfect.gm == 1.0);
  REQUIRE(perfect.uar == 1.0);
  REQUIRE(perfect.bm == 1.0);
  REQUIRE(perfect.mcc == 1.0);
  REQUIRE(perfect.accuracy == 1.0);

  const auto inverted = vpd::compute_metrics(make(0, 0, 10, 10));
  REQUIRE(inverted.sensitivity == 0.0);
  REQUIRE(inverted.specificity == 0.0);
  REQUIRE(inverted.mcc == -1.0);
  REQUIRE(inverted.bm == -1.0);
  REQUIRE(inverted.accuracy == 0.0);
}

TEST_CASE("zero denominators collapse to zero, not NaN", "[metrics]") {
  // No positive examples at all: sensitivity denominator tp+fn == 0 and the
  // MCC denominator contains tp+fn == 0.
  const auto m = vpd::compute_metrics(make(0, 5, 3, 0));
  REQUIRE(m.sensitivity == 0.0);
  REQUIRE(std::isfinite(m.mcc));
  REQUIRE(m.mcc == 0.0);

  // All predictions negative: tp+fp == 0 zeroes MCC only.
  const auto n = vpd::compute_metrics(make(0, 5, 0, 3));
  REQUIRE(n.mcc == 0.0);
  REQUIRE(n.specificity == 1.0);
  REQUIRE(n.sensitivity == 0.0);
  REQUIRE(n.gm == 0.0);

  REQUIRE_THROWS_AS(vpd::compute_metrics(make(0, 0, 0, 0)), vpd::DataError);
}

TEST_CASE("gm never exceeds uar and bm is an affine uar", "[metrics]") {
  // AM-GM on (sen, spe) gives gm <= uar for every confusion; bm = 2*uar - 1
  // by definition. Sweep a grid of confusions to check both.
  for (std::int64_t tp = 0; tp <= 6; ++tp) {
    for (std::int64_t tn = 0; tn <= 6; ++tn) {
      for (std::int64_t fp = 0; fp <= 6; ++fp) {
        for (std::int64_t fn = 0; fn <= 6; ++fn) {
          if (tp + tn + fp + fn == 0) continue;
          const auto m = vpd::compute_metrics(make(tp, tn, fp, fn));
          REQUIRE(m.gm <= m.uar + 1e-15);
          REQUIRE(m.bm == Catch::Approx(2.0 * m.uar - 1.0).margin(1e-15));
        }
      }
    }
  }
}

TEST_CASE("label swap exchanges sensitivity and specificity", "[metrics]") {
  // Relabeling the positive class maps (tp,tn,fp,fn) -> (tn,tp,fn,fp).
  const auto a = vpd::compute_metrics(make(17, 9, 4, 6));
  const auto b = vpd::compute_metrics(make(9, 17, 6, 4));
  REQUIRE(a.sensitivity == b.specificity);
  REQUIRE(a.specificity == b.sensitivity);
  REQUIRE(a.uar == b.uar);
  REQUIRE(a.gm == b.gm);
  REQUIRE(a.bm == b.bm);
  REQUIRE(a.mcc == Catch::Approx(b.mcc).epsilon(1e-15));
  REQUIRE(a.accuracy == b.accuracy);
}

TEST_CASE("mcc is invariant under scaling all counts", "[metrics]") {
  const auto a = vpd::compute_metrics(make(7, 5, 2, 3));
  const auto b = vpd::compute_metrics(make(70, 50, 20, 30));
  REQUIRE(a.mcc == Catch::Approx(b.mcc).epsilon(1e-14));
  REQUIRE(a.uar == Catch::Approx(b.uar).epsilon(1e-14));
}

TEST_CASE("round_bundle quantizes every field to 12 decimals", "[metrics]") {
  vpd::MetricBundle m;
  m.sensitivity = 0.1234567890123456;
  m.specificity = 1.0 / 3.0;
  m.gm = 0.9999999999996;
  m.uar = -0.0000000000004;
  m.bm = 2.5e-13;
  m.mcc = -1.0 / 7.0;
  m.accuracy = 0.5;
  const auto r = vpd::round_bundle(m);
  REQUIRE(r.sensitivity == Catch::Approx(0.123456789012).margin(1e-15));
  REQUIRE(r.specificity == Catch::Approx(0.333333333333).margin(1e-15));
  REQUIRE(r.gm == Catch::Approx(1.0).margin(1e-15));
  REQUIRE(r.uar == 0.0);
  REQUIRE(r.bm == 0.0);
  REQUIRE(r.mcc == Catch::Approx(-0.142857142857).margin(1e-15));
  REQUIRE(r.accuracy == 0.5);
  // Idempotence: a rounded bundle is its own fixed point.
  const auto rr = vpd::round_bundle(r);
  REQUIRE(rr.mcc == r.mcc);
  REQUIRE(rr.sensitivity == r.sensitivity);
}

TEST_CASE("aggregate computes mean and population stddev", "[metrics]") {
  // Three bundles with mcc {0.2, 0.5, 0.8}: mean 0.5, population variance
  // ((0.3)^2 + 0 + (0.3)^2)/3 = 0.06, stddev sqrt(0.06).
  std::vector<vpd::MetricBundle> bundles(3);
  bundles[0].mcc = 0.2;
  bundles[1].mcc = 0.5;
  bundles[2].mcc = 0.8;
  bundles[0].uar = 0.6;
  bundles[1].uar = 0.6;
  bundles[2].uar = 0.6;
  const auto agg = vpd::aggregate_metrics(bundles);
  REQUIRE(agg.count == 3);
  REQUIRE(agg.mean.mcc == Catch::Approx(0.5).epsilon(1e-15));
  REQUIRE(agg.stddev.mcc == Catch::Approx(std::sqrt(0.06)).epsilon(1e-12));
  REQUIRE(agg.mean.uar == Catch::Approx(0.6).epsilon(1e-15));
  REQUIRE(agg.stddev.uar == Catch::Approx(0.0).margin(1e-15));
  REQUIRE_THROWS_AS(vpd::aggregate_metrics({}), vpd::DataError);
}

TEST_CASE("aggregate of a single bundle has zero spread", "[metrics]") {
  vpd::MetricBundle m;
  m.mcc = 0.4;
  m.uar = 0.7;
  const auto agg = vpd::aggregate_metrics({m});
  REQUIRE(agg.count == 1);
  REQUIRE(agg.mean.mcc == 0.4);
  REQUIRE(agg.stddev.mcc == 0.0);
  REQUIRE(agg.stddev.uar == 0.0);
}

TEST_CASE("aggregate matches a two-pass reference on random data",
          "[metrics]") {
  std::mt19937_64 eng(99);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  std::vector<vpd::MetricBundle> bundles(257);
  for (auto& b : bundles) {
    b.sensitivity = dist(eng);
    b.specificity = dist(eng);
    b.gm = dist(eng);
    b.uar = dist(eng);
    b.bm = dist(eng);
    b.mcc = dist(eng);
    b.accuracy = dist(eng);
  }
  double mean = 0.0;
  for (const auto& b : bundles) mean += b.mcc;
  mean /= static_cast<double>(bundles.size());
  double var = 0.0;
  for (const auto& b : bundles) var += (b.mcc - mean) * (b.mcc - mean);
  var /= static_cast<double>(bundles.size());
  const auto agg = vpd::aggregate_metrics(bundles);
  REQUIRE(agg.mean.mcc == Catch::Approx(mean).epsilon(1e-13));
  REQUIRE(agg.stddev.mcc == Catch::Approx(std::sqrt(var)).epsilon(1e-12));
}
