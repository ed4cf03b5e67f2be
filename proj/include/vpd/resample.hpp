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
#include <cstdint>
#include <numeric>
#include <string>
#include <vector>

#include "vpd/error.hpp"
#include "vpd/matrix.hpp"
#include "vpd/rng.hpp"

namespace vpd {

struct KMeansResult {
  std::vector<std::size_t> assignment;
  Matrix centroids;
};

// Lloyd's algorithm with k-means++ seeding. Ties in assignment go to the
// lower centroid index; an emptied cluster is re-seeded with the point
// farthest from its current centroid.
inline KMeansResult kmeans(const Matrix& x, std::size_t k,
                           std::uint64_t seed, int max_iter = 100) {
  if (x.rows == 0) throw DataError("kmeans: empty input");
  if (k == 0) throw ValidationError("kmeans: k must be positive");
  k = std::min(k, x.rows);
  Rng rng(seed);
  KMeansResult res;
  res.centroids = Matrix(k, x.cols);

  // k-means++ initialization.
  std::vector<std::size_t> chosen;
  chosen.push_back(rng.uniform_index(x.rows));
  std::vector<double> d2(x.rows, 0.0);
  while (chosen.size() < k) {
    double total = 0.0;
    for (std::size_t i = 0; i < x.rows; ++i) {
      double best = squared_distance(x.row(i), x.row(chosen[0]), x.cols);
      for (std::size_t c = 1; c < chosen.size(); ++c) {
        best = std::min(best,
                        squared_distance(x.row(i), x.row(chosen[c]), x.cols));
      }
      d2[i] = best;
      total += best;
    }
    std::size_t pick = 0;
    if (total <= 0.0) {
      pick = rng.uniform_index(x.rows);
    } else {
      const double target = rng.uniform() * total;
      double cum = 0.0;
      pick = x.rows - 1;
      for (std::size_t i = 0; i < x.rows; ++i) {
        cum += d2[i];
        if (cum >= target) {
          pick = i;
          break;
        }
      }
    }
    chosen.push_back(pick);
  }
  for (std::size_t c = 0; c < k; ++c) {
    const double* src = x.row(chosen[c]);
    double* dst = res.centroids.row(c);
    for (std::size_t j = 0; j < x.cols; ++j) dst[j] = src[j];
  }

  res.assignment.assign(x.rows, 0);
  std::vector<std::size_t> counts(k, 0);
  for (int iter = 0; iter < max_iter; ++iter) {
    bool changed = false;
    for (std::size_t i = 0; i < x.rows; ++i) {
      std::size_t best_c = 0;
      double best_d = squared_distance(x.row(i), res.centroids.row(0), x.cols);
      for (std::size_t c = 1; c < k; ++c) {
        const double d =
            squared_distance(x.row(i), res.centroids.row(c), x.cols);
        if (d < best_d) {
          best_d = d;
          best_c = c;
        }
      }
      if (res.assignment[i] != best_c) {
        res.assignment[i] = best_c;
        changed = true;
      }
    }
    if (!changed && iter > 0) break;
    // Recompute centroids.
    std::fill(counts.begin(), counts.end(), 0);
    std::fill(res.centroids.data.begin(), res.centroids.data.end(), 0.0);
    for (std::size_t i = 0; i < x.rows; ++i) {
      const std::size_t c = res.assignment[i];
      counts[c] += 1;
      const double* src = x.row(i);
      double* dst = res.centroids.row(c);
      for (std::size_t j = 0; j < x.cols; ++j) dst[j] += src[j];
    }
    for (std::size_t c = 0; c < k; ++c) {
      if (counts[c] == 0) {
        // Re-seed with the point farthest from its own centroid.
        double worst = -1.0;
        std::size_t worst_i = 0;
        for (std::size_t i = 0; i < x.rows; ++i) {
          const double d = squared_distance(
              x.row(i), res.centroids.row(res.assignment[i]), x.cols);
          if (d > worst) {
            worst = d;
            worst_i = i;
          }
        }
        const double* src = x.row(worst_i);
        double* dst = res.centroids.row(c);
        for (std::size_t j = 0; j < x.cols; ++j) dst[j] = src[j];
        res.assignment[worst_i] = c;
        counts[c] = 1;
        continue;
      }
      double* dst = res.centroids.row(c);
      for (std::size_t j = 0; j < x.cols; ++j) {
        dst[j] /= static_cast<double>(counts[c]);
      }
    }
  }
  return res;
}

// Classic SMOTE over one set of points: each synthetic sample interpolates
// between a random point and one of its k nearest neighbors, so it lies on
// the segment between the two parents.
inline Matrix smote(const Matrix& minority, std::size_t n_synthetic,
                    std::size_t k_neighbors, std::uint64_t seed) {
  if (minority.rows < 2) {
    throw DataError("smote: need at least two minority points");
  }
  Matrix out(0, minority.cols);
  if (n_synthetic == 0) return out;
  const std::size_t k = std::min(k_neighbors, minority.rows - 1);
  if (k == 0) throw DataError("smote: no neighbors available");
  // Neighbor table, ties broken by index.
  std::vector<std::vector<std::size_t>> nn(minority.rows);
  std::vector<std::pair<double, std::size_t>> dist;
  for (std::size_t i = 0; i < minority.rows; ++i) {
    dist.clear();
    for (std::size_t j = 0; j < minority.rows; ++j) {
      if (j == i) continue;
      dist.emplace_back(
          squared_distance(minority.row(i), minority.row(j), minority.cols),
          j);
    }
    std::sort(dist.begin(), dist.end());
    nn[i].reserve(k);
    for (std::size_t t = 0; t < k; ++t) nn[i].push_back(dist[t].second);
  }
  Rng rng(seed);
  std::vector<double> row(minority.cols);
  for (std::size_t s = 0; s < n_synthetic; ++s) {
    const std::size_t i = rng.uniform_index(minority.rows);
    const std::size_t j = nn[i][rng.uniform_index(nn[i].size())];
    const double gap = rng.uniform();
    const double* a = minority.row(i);
    const double* b = minority.row(j);
    for (std::size_t c = 0; c < minority.cols; ++c) {
      row[c] = a[c] + gap * (b[c] - a[c]);
    }
    out.append_row(row);
  }
  return out;
}

struct ResampleConfig {
  std::uint64_t seed = 0;
  int k_neighbors = 5;
  int kmeans_k = 0;                 // 0: floor(sqrt(n)) clamped to [2, 32]
  double balance_threshold = -1.0;  // negative: global minority fraction
  int max_attempts = 10;
};

struct ResampleReport {
  std::string method;  // kmeans_smote | smote_fallback
  int attempts = 0;
  std::size_t synthesized = 0;
};

struct Resampled {
  Matrix x;
  std::vector<int> y;
  ResampleReport report;
};

// Cluster-aware SMOTE. Each attempt clusters the whole training set, keeps
// clusters whose minority fraction exceeds the threshold, splits the
// synthesis quota across kept clusters proportionally to minority sparsity
// (mean pairwise distance), and runs SMOTE inside each cluster. An attempt
// fails when no cluster passes the filter or a kept cluster holds fewer
// than two minority points; each retry reseeds with seed + attempt index.
// After max_attempts failures the method falls back to plain SMOTE over
// the full minority class.
inline Resampled kmeans_smote(const Matrix& x, const std::vector<int>& y,
                              const ResampleConfig& cfg) {
  if (x.rows != y.size()) throw ShapeError("kmeans_smote: label mismatch");
  if (x.rows == 0) throw DataError("kmeans_smote: empty input");
  for (const int v : y) {
    if (v != 0 && v != 1) {
      throw ValidationError("kmeans_smote: labels must be 0 or 1");
    }
  }
  Resampled out;
  out.x = x;
  out.y = y;
  const std::size_t n1 =
      static_cast<std::size_t>(std::count(y.begin(), y.end(), 1));
  const std::size_t n0 = y.size() - n1;
  if (n0 == n1) {
    out.report = {"kmeans_smote", 1, 0};
    return out;
  }
  const int minority_label = n1 < n0 ? 1 : 0;
  const std::size_t minority_count = std::min(n0, n1);
  const std::size_t need = (n0 > n1 ? n0 : n1) - minority_count;
  if (minority_count < 2) {
    throw DataError("kmeans_smote: minority class too small");
  }
  const double threshold =
      cfg.balance_threshold >= 0.0
          ? cfg.balance_threshold
          : static_cast<double>(minority_count) /
                static_cast<double>(y.size());
  std::size_t k = cfg.kmeans_k > 0
                      ? static_cast<std::size_t>(cfg.kmeans_k)
                      : std::clamp<std::size_t>(
                            static_cast<std::size_t>(
                                std::floor(std::sqrt(
                                    static_cast<double>(x.rows)))),
                            2, 32);
  k = std::min(k, x.rows);

  const std::size_t k_nn = static_cast<std::size_t>(
      std::max(1, cfg.k_neighbors));

  for (int attempt = 0; attempt < cfg.max_attempts; ++attempt) {
    const std::uint64_t attempt_seed =
        cfg.seed + static_cast<std::uint64_t>(attempt);
    const KMeansResult km = kmeans(x, k, attempt_seed);
    const std::size_t n_clusters = km.centroids.rows;
    std::vector<std::vector<std::size_t>> members(n_clusters);
    for (std::size_t i = 0; i < x.rows; ++i) {
      members[km.assignment[i]].push_back(i);
    }
    std::vector<std::size_t> kept;
    std::vector<std::vector<std::size_t>> kept_minority;
    bool attempt_failed = false;
    for (std::size_t c = 0; c < n_clusters; ++c) {
      if (members[c].empty()) continue;
      std::vector<std::size_t> mino;
      for (const std::size_t i : members[c]) {
        if (y[i] == minority_label) mino.push_back(i);
      }
      const double fraction = static_cast<double>(mino.size()) /
                              static_cast<double>(members[c].size());
      if (fraction > threshold) {
        if (mino.size() < 2) {
          attempt_failed = true;
          break;
        }
        kept.push_back(c);
        kept_minority.push_back(std::move(mino));
      }
    }
    if (attempt_failed || kept.empty()) continue;

    // Quota per kept cluster, proportional to minority sparsity.
    std::vector<double> weight(kept.size(), 0.0);
    double weight_sum = 0.0;
    for (std::size_t ci = 0; ci < kept.size(); ++ci) {
      const auto& mino = kept_minority[ci];
      double acc = 0.0;
      std::size_t pairs = 0;
      for (std::size_t a = 0; a < mino.size(); ++a) {
        for (std::size_t b = a + 1; b < mino.size(); ++b) {
          acc += euclidean_distance(x.row(mino[a]), x.row(mino[b]), x.cols);
          ++pairs;
        }
      }
      weight[ci] = pairs > 0 ? acc / static_cast<double>(pairs) : 0.0;
      weight_sum += weight[ci];
    }
    if (weight_sum <= 0.0) {
      std::fill(weight.begin(), weight.end(), 1.0);
      weight_sum = static_cast<double>(weight.size());
    }
    // Largest-remainder apportionment of `need`.
    std::vector<std::size_t> quota(kept.size(), 0);
    std::vector<std::pair<double, std::size_t>> remainder;
    std::size_t assigned = 0;
    for (std::size_t ci = 0; ci < kept.size(); ++ci) {
      const double share =
          static_cast<double>(need) * weight[ci] / weight_sum;
      quota[ci] = static_cast<std::size_t>(std::floor(share));
      assigned += quota[ci];
      remainder.emplace_back(-(share - std::floor(share)), ci);
    }
    std::sort(remainder.begin(), remainder.end());
    for (std::size_t t = 0; assigned < need; ++t) {
      quota[remainder[t % remainder.size()].second] += 1;
      ++assigned;
    }

    for (std::size_t ci = 0; ci < kept.size(); ++ci) {
      if (quota[ci] == 0) continue;
      const auto& mino = kept_minority[ci];
      Matrix pts(0, x.cols);
      for (const std::size_t i : mino) pts.append_row(x.row_copy(i));
      const Matrix synth =
          smote(pts, quota[ci], std::min(k_nn, mino.size() - 1),
                mix_seed(attempt_seed, static_cast<std::uint64_t>(kept[ci])));
      for (std::size_t s = 0; s < synth.rows; ++s) {
        out.x.append_row(synth.row_copy(s));
        out.y.push_back(minority_label);
      }
    }
    out.report = {"kmeans_smote", attempt + 1, need};
    return out;
  }

  // Fallback: plain SMOTE over the whole minority class; the seed continues
  // the retry chain.
  Matrix pts(0, x.cols);
  for (std::size_t i = 0; i < x.rows; ++i) {
    if (y[i] == minority_label) pts.append_row(x.row_copy(i));
  }
  const Matrix synth =
      smote(pts, need, std::min(k_nn, pts.rows - 1),
            cfg.seed + static_cast<std::uint64_t>(cfg.max_attempts));
  for (std::size_t s = 0; s < synth.rows; ++s) {
    out.x.append_row(synth.row_copy(s));
    out.y.push_back(minority_label);
  }
  out.report = {"smote_fallback", cfg.max_attempts, need};
  return out;
}

}  // namespace vpd
