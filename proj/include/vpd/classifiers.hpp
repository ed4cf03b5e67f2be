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
#include <map>
#include <string>
#include <variant>
#include <vector>

#include "vpd/error.hpp"
#include "vpd/matrix.hpp"
#include "vpd/rng.hpp"

namespace vpd {

// ---------------------------------------------------------------------------
// Hyperparameter specs and grids.
// ---------------------------------------------------------------------------

enum class Algorithm { svm, knn, naive_bayes, decision_tree, random_forest,
                       adaboost };

inline const std::vector<Algorithm>& all_algorithms() {
  static const std::vector<Algorithm> kAll = {
      Algorithm::svm,           Algorithm::knn,
      Algorithm::naive_bayes,   Algorithm::decision_tree,
      Algorithm::random_forest, Algorithm::adaboost};
  return kAll;
}

inline std::string algorithm_name(Algorithm a) {
  switch (a) {
    case Algorithm::svm: return "svm";
    case Algorithm::knn: return "knn";
    case Algorithm::naive_bayes: return "nb";
    case Algorithm::decision_tree: return "dt";
    case Algorithm::random_forest: return "rf";
    case Algorithm::adaboost: return "adaboost";
  }
  throw ValidationError("unknown algorithm");
}

inline Algorithm algorithm_from_name(const std::string& s) {
  for (const Algorithm a : all_algorithms()) {
    if (algorithm_name(a) == s) return a;
  }
  throw ValidationError("unknown algorithm name: " + s);
}

using HyperValue = std::variant<double, std::string>;

struct ClassifierSpec {
  Algorithm algorithm = Algorithm::svm;
  std::map<std::string, HyperValue> hyper;
  std::uint64_t seed = 0;

  // Canonical JSON-like form: keys sorted, integral numbers without a
  // decimal point. Stable across runs; used in result tables.
  std::string canonical() const {
    std::string s = "{";
    bool first = true;
    for (const auto& [key, value] : hyper) {
      if (!first) s += ",";
      first = false;
      s += "\"" + key + "\":";
      if (std::holds_alternative<std::string>(value)) {
        s += "\"" + std::get<std::string>(value) + "\"";
      } else {
        const double v = std::get<double>(value);
        if (std::floor(v) == v && std::fabs(v) < 1e15) {
          s += std::to_string(static_cast<long long>(v));
        } else {
          char buf[48];
          std::snprintf(buf, sizeof(buf), "%.12g", v);
          s += buf;
        }
      }
    }
    s += "}";
    return s;
  }
};

namespace detail {

inline double hyper_num(const ClassifierSpec& spec, const std::string& key) {
  const auto it = spec.hyper.find(key);
  if (it == spec.hyper.end()) {
    throw ValidationError("missing hyperparameter: " + key);
  }
  if (!std::holds_alternative<double>(it->second)) {
    throw ValidationError("hyperparameter must be numeric: " + key);
  }
  return std::get<double>(it->second);
}

inline std::string hyper_str(const ClassifierSpec& spec,
                             const std::string& key) {
  const auto it = spec.hyper.find(key);
  if (it == spec.hyper.end()) {
    throw ValidationError("missing hyperparameter: " + key);
  }
  if (!std::holds_alternative<std::string>(it->second)) {
    throw ValidationError("hyperparameter must be a string: " + key);
  }
  return std::get<std::string>(it->second);
}

inline bool hyper_has(const ClassifierSpec& spec, const std::string& key) {
  return spec.hyper.find(key) != spec.hyper.end();
}

}  // namespace detail

// Full deterministic hyperparameter grid for one algorithm. Order is fixed;
// a spec's index in this vector identifies it in every result table.
inline std::vector<ClassifierSpec> hyperparameter_grid(Algorithm alg) {
  std::vector<ClassifierSpec> out;
  const auto push = [&](std::map<std::string, HyperValue> h) {
    ClassifierSpec s;
    s.algorithm = alg;
    s.hyper = std::move(h);
    out.push_back(std::move(s));
  };
  switch (alg) {
    case Algorithm::svm: {
      const std::vector<HyperValue> gammas = {0.5,   0.1,   0.05, 0.01,
                                              0.005, 0.001, std::string("auto")};
      const std::vector<double> cs = {0.1,  0.5,  1.0,    5.0,    10.0,
                                      50.0, 100.0, 500.0, 1000.0, 3000.0,
                                      5000.0, 7000.0, 10000.0, 12000.0};
      for (const auto& g : gammas) {
        for (const double c : cs) {
          push({{"kernel", std::string("rbf")}, {"gamma", g}, {"C", c}});
        }
      }
      for (int degree = 2; degree <= 6; ++degree) {
        for (const auto& g : gammas) {
          for (const double c : cs) {
            push({{"kernel", std::string("poly")},
                  {"degree", static_cast<double>(degree)},
                  {"gamma", g},
                  {"C", c}});
          }
        }
      }
      break;
    }
    case Algorithm::knn: {
      for (int n = 1; n <= 23; n += (n == 1 ? 2 : 2)) {
        for (const double p : {1.0, 2.0}) {
          for (const char* w : {"uniform", "distance"}) {
            push({{"n_neighbors", static_cast<double>(n)},
                  {"p", p},
                  {"weights", std::string(w)}});
          }
        }
      }
      break;
    }
    case Algorithm::naive_bayes: {
      for (const double vs : {1e-8, 1e-9}) {
        push({{"var_smoothing", vs}});
      }
      break;
    }
    case Algorithm::decision_tree: {
      for (const char* crit : {"gini", "entropy", "log_loss"}) {
        for (const char* split : {"best", "random"}) {
          for (int mss = 2; mss <= 10; ++mss) {
            for (const char* mf : {"sqrt", "log2"}) {
              push({{"criterion", std::string(crit)},
                    {"splitter", std::string(split)},
                    {"min_samples_split", static_cast<double>(mss)},
                    {"max_features", std::string(mf)}});
            }
          }
        }
      }
      break;
    }
    case Algorithm::random_forest: {
      for (int mss = 2; mss <= 6; ++mss) {
        for (const int ne : {50, 75, 100, 125, 150, 175}) {
          push({{"criterion", std::string("gini")},
                {"min_samples_split", static_cast<double>(mss)},
                {"n_estimators", static_cast<double>(ne)},
                {"max_features", std::string("sqrt")}});
        }
      }
      break;
    }
    case Algorithm::adaboost: {
      for (const double lr : {0.1, 1.0, 10.0}) {
        for (int ne = 50; ne <= 400; ne += 50) {
          push({{"learning_rate", lr},
                {"n_estimators", static_cast<double>(ne)}});
        }
      }
      break;
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Min-max scaler.
// ---------------------------------------------------------------------------

// Per-column min-max normalization fitted on training data only. Transforms
// are not clamped, so out-of-range validation values land outside [0, 1].
// A constant training column maps to zero everywhere.
class MinMaxScaler {
 public:
  void fit(const Matrix& x) {
    if (x.rows == 0) throw DataError("scaler: empty fit");
    mins_.assign(x.cols, 0.0);
    maxs_.assign(x.cols, 0.0);
    for (std::size_t j = 0; j < x.cols; ++j) {
      double lo = x.at(0, j), hi = x.at(0, j);
      for (std::size_t i = 1; i < x.rows; ++i) {
        lo = std::min(lo, x.at(i, j));
        hi = std::max(hi, x.at(i, j));
      }
      mins_[j] = lo;
      maxs_[j] = hi;
    }
    fitted_ = true;
  }

  Matrix transform(const Matrix& x) const {
    if (!fitted_) throw ValidationError("scaler: transform before fit");
    if (x.cols != mins_.size()) throw ShapeError("scaler: width mismatch");
    Matrix out(x.rows, x.cols);
    for (std::size_t i = 0; i < x.rows; ++i) {
      const double* src = x.row(i);
      double* dst = out.row(i);
      for (std::size_t j = 0; j < x.cols; ++j) {
        const double span = maxs_[j] - mins_[j];
        dst[j] = span > 0.0 ? (src[j] - mins_[j]) / span : 0.0;
      }
    }
    return out;
  }

  bool fitted() const { return fitted_; }
  const std::vector<double>& mins() const { return mins_; }
  const std::vector<double>& maxs() const { return maxs_; }

 private:
  std::vector<double> mins_, maxs_;
  bool fitted_ = false;
};

// ---------------------------------------------------------------------------
// Models.
// ---------------------------------------------------------------------------

namespace detail {

struct SvmModel {
  bool rbf = true;
  int degree = 3;
  double gamma = 0.1;
  Matrix support;
  std::vector<double> coef;  // alpha_i * y_i
  double b = 0.0;            // decision is sum(coef * k) - b
};

struct KnnModel {
  Matrix x;
  std::vector<int> y;
  int k = 1;
  double p = 2.0;
  bool distance_weights = false;
};

struct NbModel {
  double log_prior0 = 0.0, log_prior1 = 0.0;
  std::vector<double> mean0, mean1, var0, var1;
};

struct TreeNode {
  int feature = -1;  // -1 marks a leaf
  double threshold = 0.0;
  std::int32_t left = -1, right = -1;
  int label = 0;
};

struct TreeModel {
  std::vector<TreeNode> nodes;

  int predict_row(const double* x) const {
    std::int32_t cur = 0;
    for (;;) {
      const TreeNode& n = nodes[static_cast<std::size_t>(cur)];
      if (n.feature < 0) return n.label;
      cur = x[n.feature] <= n.threshold ? n.left : n.right;
    }
  }
};

struct ForestModel {
  std::vector<TreeModel> trees;
};

struct AdaModel {
  std::vector<TreeModel> stumps;
  std::vector<double> alphas;
  std::vector<double> staged_train_error;
};

// --------------------------- SVM (SMO) ------------------------------------

class SmoTrainer {
 public:
  SmoTrainer(const Matrix& x, const std::vector<int>& y01, double c,
             bool rbf, int degree, double gamma)
      : x_(x), c_(c), rbf_(rbf), degree_(degree), gamma_(gamma) {
    n_ = x.rows;
    y_.resize(n_);
    for (std::size_t i = 0; i < n_; ++i) y_[i] = y01[i] == 1 ? 1.0 : -1.0;
    alpha_.assign(n_, 0.0);
    error_.resize(n_);
    for (std::size_t i = 0; i < n_; ++i) error_[i] = -y_[i];
    gram_.assign(n_ * n_, 0.0);
    for (std::size_t i = 0; i < n_; ++i) {
      for (std::size_t j = i; j < n_; ++j) {
        const double k = kernel_raw(x_.row(i), x_.row(j));
        gram_[i * n_ + j] = k;
        gram_[j * n_ + i] = k;
      }
    }
    budget_ = 10 * static_cast<std::uint64_t>(n_) * n_;
  }

  SvmModel train() {
    std::size_t num_changed = 0;
    bool examine_all = true;
    while ((num_changed > 0 || examine_all) && steps_ < budget_) {
      num_changed = 0;
      if (examine_all) {
        for (std::size_t i = 0; i < n_ && steps_ < budget_; ++i) {
          num_changed += examine(i);
        }
      } else {
        for (std::size_t i = 0; i < n_ && steps_ < budget_; ++i) {
          if (alpha_[i] > 0.0 && alpha_[i] < c_) num_changed += examine(i);
        }
      }
      if (examine_all) {
        examine_all = false;
      } else if (num_changed == 0) {
        examine_all = true;
      }
    }
    SvmModel m;
    m.rbf = rbf_;
    m.degree = degree_;
    m.gamma = gamma_;
    m.b = b_;
    m.support = Matrix(0, x_.cols);
    for (std::size_t i = 0; i < n_; ++i) {
      if (alpha_[i] > 1e-12) {
        m.support.append_row(x_.row_copy(i));
        m.coef.push_back(alpha_[i] * y_[i]);
      }
    }
    return m;
  }

 private:
  double kernel_raw(const double* a, const double* b) const {
    if (rbf_) {
      return std::exp(-gamma_ * squared_distance(a, b, x_.cols));
    }
    double dot = 0.0;
    for (std::size_t j = 0; j < x_.cols; ++j) dot += a[j] * b[j];
    return std::pow(gamma_ * dot, degree_);
  }

  double k(std::size_t i, std::size_t j) const { return gram_[i * n_ + j]; }

  std::size_t examine(std::size_t i2) {
    const double y2 = y_[i2], alph2 = alpha_[i2], e2 = error_[i2];
    const double r2 = e2 * y2;
    if (!((r2 < -kTol && alph2 < c_) || (r2 > kTol && alph2 > 0.0))) {
      return 0;
    }
    // First choice: maximal |E1 - E2| among free multipliers.
    std::size_t best = n_;
    double best_gap = -1.0;
    for (std::size_t i = 0; i < n_; ++i) {
      if (alpha_[i] > 0.0 && alpha_[i] < c_) {
        const double gap = std::fabs(error_[i] - e2);
        if (gap > best_gap) {
          best_gap = gap;
          best = i;
        }
      }
    }
    if (best < n_ && take_step(best, i2)) return 1;
    for (std::size_t i = 0; i < n_ && steps_ < budget_; ++i) {
      if (alpha_[i] > 0.0 && alpha_[i] < c_ && take_step(i, i2)) return 1;
    }
    for (std::size_t i = 0; i < n_ && steps_ < budget_; ++i) {
      if (take_step(i, i2)) return 1;
    }
    return 0;
  }

  bool take_step(std::size_t i1, std::size_t i2) {
    ++steps_;
    if (i1 == i2) return false;
    const double alph1 = alpha_[i1], alph2 = alpha_[i2];
    const double y1 = y_[i1], y2 = y_[i2];
    const double e1 = error_[i1], e2 = error_[i2];
    const double s = y1 * y2;
    double lo, hi;
    if (y1 != y2) {
      lo = std::max(0.0, alph2 - alph1);
      hi = std::min(c_, c_ + alph2 - alph1);
    } else {
      lo = std::max(0.0, alph2 + alph1 - c_);
      hi = std::min(c_, alph2 + alph1);
    }
    if (lo >= hi) return false;
    const double k11 = k(i1, i1), k12 = k(i1, i2), k22 = k(i2, i2);
    const double eta = k11 + k22 - 2.0 * k12;
    double a2;
    if (eta > 0.0) {
      a2 = alph2 + y2 * (e1 - e2) / eta;
      a2 = std::clamp(a2, lo, hi);
    } else {
      const double f1 = y1 * (e1 + b_) - alph1 * k11 - s * alph2 * k12;
      const double f2 = y2 * (e2 + b_) - s * alph1 * k12 - alph2 * k22;
      const double l1 = alph1 + s * (alph2 - lo);
      const double h1 = alph1 + s * (alph2 - hi);
      const double lobj = l1 * f1 + lo * f2 + 0.5 * l1 * l1 * k11 +
                          0.5 * lo * lo * k22 + s * lo * l1 * k12;
      const double hobj = h1 * f1 + hi * f2 + 0.5 * h1 * h1 * k11 +
                          0.5 * hi * hi * k22 + s * hi * h1 * k12;
      if (lobj < hobj - kEps) {
        a2 = lo;
      } else if (lobj > hobj + kEps) {
        a2 = hi;
      } else {
        return false;
      }
    }
    if (std::fabs(a2 - alph2) < kEps * (a2 + alph2 + kEps)) return false;
    double a1 = alph1 + s * (alph2 - a2);
    if (a1 < 0.0) {
      a2 += s * a1;
      a1 = 0.0;
    } else if (a1 > c_) {
      a2 += s * (a1 - c_);
      a1 = c_;
    }
    const double b1 = e1 + y1 * (a1 - alph1) * k11 +
                      y2 * (a2 - alph2) * k12 + b_;
    const double b2 = e2 + y1 * (a1 - alph1) * k12 +
                      y2 * (a2 - alph2) * k22 + b_;
    double bnew;
    if (a1 > 0.0 && a1 < c_) {
      bnew = b1;
    } else if (a2 > 0.0 && a2 < c_) {
      bnew = b2;
    } else {
      bnew = 0.5 * (b1 + b2);
    }
    const double delta_b = bnew - b_;
    b_ = bnew;
    const double t1 = y1 * (a1 - alph1);
    const double t2 = y2 * (a2 - alph2);
    for (std::size_t i = 0; i < n_; ++i) {
      error_[i] += t1 * k(i1, i) + t2 * k(i2, i) - delta_b;
    }
    alpha_[i1] = a1;
    alpha_[i2] = a2;
    return true;
  }

  static constexpr double kTol = 1e-3;
  static constexpr double kEps = 1e-8;

  const Matrix& x_;
  double c_;
  bool rbf_;
  int degree_;
  double gamma_;
  std::size_t n_ = 0;
  std::vector<double> y_, alpha_, error_, gram_;
  double b_ = 0.0;
  std::uint64_t steps_ = 0, budget_ = 0;
};

// --------------------------- CART -----------------------------------------

enum class MaxFeatures { sqrt_mode, log2_mode, all };

struct TreeBuildConfig {
  bool entropy = false;  // false: gini
  bool random_splitter = false;
  std::size_t min_samples_split = 2;
  MaxFeatures max_features = MaxFeatures::all;
  int max_depth = -1;  // negative: unbounded
};

class TreeBuilder {
 public:
  TreeBuilder(const Matrix& x, const std::vector<int>& y,
              const std::vector<double>& w, const TreeBuildConfig& cfg,
              Rng& rng)
      : x_(x), y_(y), w_(w), cfg_(cfg), rng_(rng) {}

  TreeModel build(const std::vector<std::size_t>& rows) {
    TreeModel model;
    build_node(model, rows, 0);
    return model;
  }

 private:
  double impurity(double w0, double w1) const {
    const double w = w0 + w1;
    if (w <= 0.0) return 0.0;
    const double p0 = w0 / w, p1 = w1 / w;
    if (cfg_.entropy) {
      double h = 0.0;
      if (p0 > 0.0) h -= p0 * std::log2(p0);
      if (p1 > 0.0) h -= p1 * std::log2(p1);
      return h;
    }
    return 1.0 - p0 * p0 - p1 * p1;
  }

  std::size_t feature_count() const {
    const std::size_t f = x_.cols;
    switch (cfg_.max_features) {
      case MaxFeatures::all:
        return f;
      case MaxFeatures::sqrt_mode:
        return std::max<std::size_t>(
            1, static_cast<std::size_t>(
                   std::floor(std::sqrt(static_cast<double>(f)))));
      case MaxFeatures::log2_mode:
        return std::max<std::size_t>(
            1, static_cast<std::size_t>(
                   std::floor(std::log2(static_cast<double>(f)))));
    }
    return f;
  }

  std::int32_t build_node(TreeModel& model,
                          const std::vector<std::size_t>& rows, int depth) {
    const std::int32_t index = static_cast<std::int32_t>(model.nodes.size());
    model.nodes.emplace_back();
    double w0 = 0.0, w1 = 0.0;
    for (const std::size_t r : rows) {
      (y_[r] == 1 ? w1 : w0) += w_[r];
    }
    const auto make_leaf = [&] {
      model.nodes[static_cast<std::size_t>(index)].feature = -1;
      model.nodes[static_cast<std::size_t>(index)].label = w1 > w0 ? 1 : 0;
      return index;
    };
    if (w0 <= 0.0 || w1 <= 0.0) return make_leaf();
    if (rows.size() < cfg_.min_samples_split) return make_leaf();
    if (cfg_.max_depth >= 0 && depth >= cfg_.max_depth) return make_leaf();

    // Candidate features, sampled without replacement, scanned in
    // ascending index order.
    std::vector<std::size_t> features =
        rng_.sample_without_replacement(x_.cols, feature_count());
    std::sort(features.begin(), features.end());

    const double node_imp = impurity(w0, w1);
    const double w_total = w0 + w1;
    double best_gain = 0.0;
    std::size_t best_feature = 0;
    double best_threshold = 0.0;
    bool found = false;

    std::vector<std::pair<double, std::size_t>> order;
    for (const std::size_t f : features) {
      if (cfg_.random_splitter) {
        double lo = x_.at(rows[0], f), hi = lo;
        for (const std::size_t r : rows) {
          lo = std::min(lo, x_.at(r, f));
          hi = std::max(hi, x_.at(r, f));
        }
        if (!(hi > lo)) continue;
        const double thr = rng_.uniform(lo, hi);
        double l0 = 0.0, l1 = 0.0;
        for (const std::size_t r : rows) {
          if (x_.at(r, f) <= thr) (y_[r] == 1 ? l1 : l0) += w_[r];
        }
        const double r0 = w0 - l0, r1 = w1 - l1;
        if (l0 + l1 <= 0.0 || r0 + r1 <= 0.0) continue;
        const double gain =
            node_imp - ((l0 + l1) * impurity(l0, l1) +
                        (r0 + r1) * impurity(r0, r1)) /
                           w_total;
        if (gain > best_gain + 1e-15 || (!found && gain > 1e-15)) {
          best_gain = gain;
          best_feature = f;
          best_threshold = thr;
          found = true;
        }
        continue;
      }
      // Exhaustive splitter: scan sorted values, thresholds at midpoints.
      order.clear();
      for (const std::size_t r : rows) order.emplace_back(x_.at(r, f), r);
      std::sort(order.begin(), order.end());
      double l0 = 0.0, l1 = 0.0;
      for (std::size_t t = 0; t + 1 < order.size(); ++t) {
        const std::size_t r = order[t].second;
        (y_[r] == 1 ? l1 : l0) += w_[r];
        if (order[t].first == order[t + 1].first) continue;
        double thr =
            order[t].first + 0.5 * (order[t + 1].first - order[t].first);
        if (!(thr < order[t + 1].first)) thr = order[t].first;
        const double r0 = w0 - l0, r1 = w1 - l1;
        const double gain =
            node_imp - ((l0 + l1) * impurity(l0, l1) +
                        (r0 + r1) * impurity(r0, r1)) /
                           w_total;
        if (gain > best_gain + 1e-15 || (!found && gain > 1e-15)) {
          best_gain = gain;
          best_feature = f;
          best_threshold = thr;
          found = true;
        }
      }
    }
    if (!found) return make_leaf();

    std::vector<std::size_t> left_rows, right_rows;
    for (const std::size_t r : rows) {
      (x_.at(r, best_feature) <= best_threshold ? left_rows : right_rows)
          .push_back(r);
    }
    if (left_rows.empty() || right_rows.empty()) return make_leaf();
    const std::int32_t left = build_node(model, left_rows, depth + 1);
    const std::int32_t right = build_node(model, right_rows, depth + 1);
    TreeNode& node = model.nodes[static_cast<std::size_t>(index)];
    node.feature = static_cast<int>(best_feature);
    node.threshold = best_threshold;
    node.left = left;
    node.right = right;
    return index;
  }

  const Matrix& x_;
  const std::vector<int>& y_;
  const std::vector<double>& w_;
  TreeBuildConfig cfg_;
  Rng& rng_;
};

}  // namespace detail

// ---------------------------------------------------------------------------
// Training and prediction.
// ---------------------------------------------------------------------------

class TrainedModel {
 public:
  using Payload = std::variant<detail::SvmModel, detail::KnnModel,
                               detail::NbModel, detail::TreeModel,
                               detail::ForestModel, detail::AdaModel>;

  TrainedModel(Algorithm alg, std::size_t n_cols, Payload payload)
      : algorithm_(alg), n_cols_(n_cols), payload_(std::move(payload)) {}

  Algorithm algorithm() const { return algorithm_; }
  std::size_t columns() const { return n_cols_; }
  const Payload& payload() const { return payload_; }

  std::vector<int> predict(const Matrix& x) const;

 private:
  Algorithm algorithm_;
  std::size_t n_cols_;
  Payload payload_;
};

namespace detail {

inline void check_binary_labels(const std::vector<int>& y) {
  for (const int v : y) {
    if (v != 0 && v != 1) {
      throw ValidationError("labels must be 0 or 1");
    }
  }
}

inline bool both_classes(const std::vector<int>& y) {
  bool has0 = false, has1 = false;
  for (const int v : y) (v == 1 ? has1 : has0) = true;
  return has0 && has1;
}

inline TreeBuildConfig tree_config_from_spec(const ClassifierSpec& spec) {
  TreeBuildConfig cfg;
  const std::string crit = hyper_str(spec, "criterion");
  if (crit == "gini") {
    cfg.entropy = false;
  } else if (crit == "entropy" || crit == "log_loss") {
    cfg.entropy = true;
  } else {
    throw ValidationError("unknown criterion: " + crit);
  }
  const double mss = hyper_num(spec, "min_samples_split");
  if (mss < 2) throw ValidationError("min_samples_split must be >= 2");
  cfg.min_samples_split = static_cast<std::size_t>(mss);
  const std::string mf = hyper_str(spec, "max_features");
  if (mf == "sqrt") {
    cfg.max_features = MaxFeatures::sqrt_mode;
  } else if (mf == "log2") {
    cfg.max_features = MaxFeatures::log2_mode;
  } else if (mf == "all") {
    cfg.max_features = MaxFeatures::all;
  } else {
    throw ValidationError("unknown max_features: " + mf);
  }
  return cfg;
}

}  // namespace detail

inline TrainedModel train_classifier(const ClassifierSpec& spec,
                                     const Matrix& x,
                                     const std::vector<int>& y) {
  if (x.rows == 0 || x.cols == 0) throw DataError("train: empty matrix");
  if (x.rows != y.size()) throw ShapeError("train: label count mismatch");
  detail::check_binary_labels(y);
  switch (spec.algorithm) {
    case Algorithm::svm: {
      if (!detail::both_classes(y)) {
        throw DataError("svm: needs both classes");
      }
      const std::string kernel = detail::hyper_str(spec, "kernel");
      const bool rbf = kernel == "rbf";
      if (!rbf && kernel != "poly") {
        throw ValidationError("unknown kernel: " + kernel);
      }
      int degree = 3;
      if (!rbf) {
        degree = static_cast<int>(detail::hyper_num(spec, "degree"));
        if (degree < 1) throw ValidationError("degree must be >= 1");
      }
      double gamma;
      const auto it = spec.hyper.find("gamma");
      if (it == spec.hyper.end()) {
        throw ValidationError("missing hyperparameter: gamma");
      }
      if (std::holds_alternative<std::string>(it->second)) {
        if (std::get<std::string>(it->second) != "auto") {
          throw ValidationError("gamma must be numeric or 'auto'");
        }
        gamma = 1.0 / static_cast<double>(x.cols);
      } else {
        gamma = std::get<double>(it->second);
        if (gamma <= 0.0) throw ValidationError("gamma must be positive");
      }
      const double c = detail::hyper_num(spec, "C");
      if (c <= 0.0) throw ValidationError("C must be positive");
      detail::SmoTrainer trainer(x, y, c, rbf, degree, gamma);
      return TrainedModel(spec.algorithm, x.cols, trainer.train());
    }
    case Algorithm::knn: {
      detail::KnnModel m;
      m.k = static_cast<int>(detail::hyper_num(spec, "n_neighbors"));
      if (m.k < 1) throw ValidationError("n_neighbors must be >= 1");
      if (static_cast<std::size_t>(m.k) > x.rows) {
        throw ValidationError("n_neighbors exceeds training size");
      }
      m.p = detail::hyper_num(spec, "p");
      if (m.p < 1.0) throw ValidationError("p must be >= 1");
      const std::string w = detail::hyper_str(spec, "weights");
      if (w == "uniform") {
        m.distance_weights = false;
      } else if (w == "distance") {
        m.distance_weights = true;
      } else {
        throw ValidationError("unknown weights: " + w);
      }
      m.x = x;
      m.y = y;
      return TrainedModel(spec.algorithm, x.cols, std::move(m));
    }
    case Algorithm::naive_bayes: {
      if (!detail::both_classes(y)) {
        throw DataError("nb: needs both classes");
      }
      const double smoothing = detail::hyper_num(spec, "var_smoothing");
      if (smoothing < 0.0) {
        throw ValidationError("var_smoothing must be non-negative");
      }
      detail::NbModel m;
      const std::size_t f = x.cols;
      m.mean0.assign(f, 0.0);
      m.mean1.assign(f, 0.0);
      m.var0.assign(f, 0.0);
      m.var1.assign(f, 0.0);
      std::size_t n0 = 0, n1 = 0;
      for (std::size_t i = 0; i < x.rows; ++i) {
        auto& mean = y[i] == 1 ? m.mean1 : m.mean0;
        (y[i] == 1 ? n1 : n0) += 1;
        const double* row = x.row(i);
        for (std::size_t j = 0; j < f; ++j) mean[j] += row[j];
      }
      for (std::size_t j = 0; j < f; ++j) {
        m.mean0[j] /= static_cast<double>(n0);
        m.mean1[j] /= static_cast<double>(n1);
      }
      for (std::size_t i = 0; i < x.rows; ++i) {
        auto& mean = y[i] == 1 ? m.mean1 : m.mean0;
        auto& var = y[i] == 1 ? m.var1 : m.var0;
        const double* row = x.row(i);
        for (std::size_t j = 0; j < f; ++j) {
          const double d = row[j] - mean[j];
          var[j] += d * d;
        }
      }
      for (std::size_t j = 0; j < f; ++j) {
        m.var0[j] /= static_cast<double>(n0);
        m.var1[j] /= static_cast<double>(n1);
      }
      // Stabilizer: fraction of the largest overall feature variance.
      std::vector<double> gmean(f, 0.0), gvar(f, 0.0);
      for (std::size_t i = 0; i < x.rows; ++i) {
        const double* row = x.row(i);
        for (std::size_t j = 0; j < f; ++j) gmean[j] += row[j];
      }
      for (double& v : gmean) v /= static_cast<double>(x.rows);
      for (std::size_t i = 0; i < x.rows; ++i) {
        const double* row = x.row(i);
        for (std::size_t j = 0; j < f; ++j) {
          const double d = row[j] - gmean[j];
          gvar[j] += d * d;
        }
      }
      double max_var = 0.0;
      for (std::size_t j = 0; j < f; ++j) {
        max_var = std::max(max_var, gvar[j] / static_cast<double>(x.rows));
      }
      const double eps = smoothing * std::max(max_var, 1e-300);
      for (std::size_t j = 0; j < f; ++j) {
        m.var0[j] += eps;
        m.var1[j] += eps;
        if (m.var0[j] <= 0.0) m.var0[j] = 1e-300;
        if (m.var1[j] <= 0.0) m.var1[j] = 1e-300;
      }
      m.log_prior0 = std::log(static_cast<double>(n0) /
                              static_cast<double>(x.rows));
      m.log_prior1 = std::log(static_cast<double>(n1) /
                              static_cast<double>(x.rows));
      return TrainedModel(spec.algorithm, x.cols, std::move(m));
    }
    case Algorithm::decision_tree: {
      detail::TreeBuildConfig cfg = detail::tree_config_from_spec(spec);
      cfg.random_splitter = detail::hyper_str(spec, "splitter") == "random";
      if (!cfg.random_splitter &&
          detail::hyper_str(spec, "splitter") != "best") {
        throw ValidationError("unknown splitter");
      }
      Rng rng(spec.seed);
      std::vector<double> w(x.rows, 1.0);
      std::vector<std::size_t> rows(x.rows);
      for (std::size_t i = 0; i < x.rows; ++i) rows[i] = i;
      detail::TreeBuilder builder(x, y, w, cfg, rng);
      return TrainedModel(spec.algorithm, x.cols, builder.build(rows));
    }
    case Algorithm::random_forest: {
      detail::TreeBuildConfig cfg = detail::tree_config_from_spec(spec);
      cfg.random_splitter = false;
      const int n_estimators =
          static_cast<int>(detail::hyper_num(spec, "n_estimators"));
      if (n_estimators < 1) {
        throw ValidationError("n_estimators must be >= 1");
      }
      bool bootstrap = true;
      if (detail::hyper_has(spec, "bootstrap")) {
        bootstrap = detail::hyper_num(spec, "bootstrap") != 0.0;
      }
      detail::ForestModel m;
      std::vector<double> w(x.rows, 1.0);
      for (int t = 0; t < n_estimators; ++t) {
        Rng rng(derive_seed(spec.seed, static_cast<std::uint64_t>(t)));
        std::vector<std::size_t> rows;
        rows.reserve(x.rows);
        if (bootstrap) {
          for (std::size_t i = 0; i < x.rows; ++i) {
            rows.push_back(rng.uniform_index(x.rows));
          }
        } else {
          for (std::size_t i = 0; i < x.rows; ++i) rows.push_back(i);
        }
        detail::TreeBuilder builder(x, y, w, cfg, rng);
        m.trees.push_back(builder.build(rows));
      }
      return TrainedModel(spec.algorithm, x.cols, std::move(m));
    }
    case Algorithm::adaboost: {
      if (!detail::both_classes(y)) {
        throw DataError("adaboost: needs both classes");
      }
      const double lr = detail::hyper_num(spec, "learning_rate");
      if (lr <= 0.0) throw ValidationError("learning_rate must be positive");
      const int n_estimators =
          static_cast<int>(detail::hyper_num(spec, "n_estimators"));
      if (n_estimators < 1) {
        throw ValidationError("n_estimators must be >= 1");
      }
      detail::AdaModel m;
      const std::size_t n = x.rows;
      std::vector<double> w(n, 1.0 / static_cast<double>(n));
      std::vector<std::size_t> rows(n);
      for (std::size_t i = 0; i < n; ++i) rows[i] = i;
      detail::TreeBuildConfig cfg;
      cfg.entropy = false;
      cfg.random_splitter = false;
      cfg.min_samples_split = 2;
      cfg.max_features = detail::MaxFeatures::all;
      cfg.max_depth = 1;
      Rng rng(spec.seed);
      std::vector<double> score(n, 0.0);
      for (int round = 0; round < n_estimators; ++round) {
        detail::TreeBuilder builder(x, y, w, cfg, rng);
        detail::TreeModel stump = builder.build(rows);
        double err = 0.0;
        std::vector<int> pred(n);
        for (std::size_t i = 0; i < n; ++i) {
          pred[i] = stump.predict_row(x.row(i));
          if (pred[i] != y[i]) err += w[i];
        }
        if (err <= 0.0) {
          // Perfect stump: it alone decides, and boosting stops.
          m.stumps.push_back(std::move(stump));
          m.alphas.push_back(1.0);
          for (std::size_t i = 0; i < n; ++i) {
            score[i] += pred[i] == 1 ? 1.0 : -1.0;
          }
          double staged = 0.0;
          for (std::size_t i = 0; i < n; ++i) {
            const int p = score[i] > 0.0 ? 1 : 0;
            if (p != y[i]) staged += 1.0;
          }
          m.staged_train_error.push_back(staged / static_cast<double>(n));
          break;
        }
        if (err >= 0.5) {
          if (m.stumps.empty()) {
            m.stumps.push_back(std::move(stump));
            m.alphas.push_back(1e-10);
            m.staged_train_error.push_back(err);
          }
          break;
        }
        const double alpha = lr * std::log((1.0 - err) / err);
        m.stumps.push_back(std::move(stump));
        m.alphas.push_back(alpha);
        double wsum = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
          if (pred[i] != y[i]) w[i] *= std::exp(alpha);
          wsum += w[i];
        }
        for (double& v : w) v /= wsum;
        double staged = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
          score[i] += alpha * (pred[i] == 1 ? 1.0 : -1.0);
          const int p = score[i] > 0.0 ? 1 : 0;
          if (p != y[i]) staged += 1.0;
        }
        m.staged_train_error.push_back(staged / static_cast<double>(n));
      }
      return TrainedModel(spec.algorithm, x.cols, std::move(m));
    }
  }
  throw ValidationError("unknown algorithm");
}

inline std::vector<int> TrainedModel::predict(const Matrix& x) const {
  if (x.cols != n_cols_) throw ShapeError("predict: width mismatch");
  std::vector<int> out(x.rows, 0);
  if (std::holds_alternative<detail::SvmModel>(payload_)) {
    const auto& m = std::get<detail::SvmModel>(payload_);
    for (std::size_t i = 0; i < x.rows; ++i) {
      double u = -m.b;
      const double* q = x.row(i);
      for (std::size_t s = 0; s < m.support.rows; ++s) {
        double kv;
        if (m.rbf) {
          kv = std::exp(-m.gamma *
                        squared_distance(m.support.row(s), q, x.cols));
        } else {
          double dot = 0.0;
          for (std::size_t j = 0; j < x.cols; ++j) {
            dot += m.support.at(s, j) * q[j];
          }
          kv = std::pow(m.gamma * dot, m.degree);
        }
        u += m.coef[s] * kv;
      }
      out[i] = u > 0.0 ? 1 : 0;
    }
    return out;
  }
  if (std::holds_alternative<detail::KnnModel>(payload_)) {
    const auto& m = std::get<detail::KnnModel>(payload_);
    std::vector<std::pair<double, std::size_t>> dist(m.x.rows);
    for (std::size_t i = 0; i < x.rows; ++i) {
      for (std::size_t t = 0; t < m.x.rows; ++t) {
        dist[t] = {minkowski_distance(m.x.row(t), x.row(i), x.cols, m.p), t};
      }
      const std::size_t k = static_cast<std::size_t>(m.k);
      std::partial_sort(dist.begin(), dist.begin() + static_cast<std::ptrdiff_t>(k),
                        dist.end());
      double v0 = 0.0, v1 = 0.0;
      bool exact = false;
      for (std::size_t t = 0; t < k; ++t) {
        if (dist[t].first <= 0.0) {
          exact = true;
          break;
        }
      }
      for (std::size_t t = 0; t < k; ++t) {
        double w = 1.0;
        if (m.distance_weights) {
          if (exact) {
            // Zero-distance neighbors dominate with equal weight.
            w = dist[t].first <= 0.0 ? 1.0 : 0.0;
          } else {
            w = 1.0 / dist[t].first;
          }
        }
        (m.y[dist[t].second] == 1 ? v1 : v0) += w;
      }
      out[i] = v1 > v0 ? 1 : 0;
    }
    return out;
  }
  if (std::holds_alternative<detail::NbModel>(payload_)) {
    const auto& m = std::get<detail::NbModel>(payload_);
    constexpr double kLog2Pi = 1.8378770664093454835606594728112;
    for (std::size_t i = 0; i < x.rows; ++i) {
      const double* row = x.row(i);
      double ll0 = m.log_prior0, ll1 = m.log_prior1;
      for (std::size_t j = 0; j < x.cols; ++j) {
        const double d0 = row[j] - m.mean0[j];
        const double d1 = row[j] - m.mean1[j];
        ll0 -= 0.5 * (kLog2Pi + std::log(m.var0[j]) + d0 * d0 / m.var0[j]);
        ll1 -= 0.5 * (kLog2Pi + std::log(m.var1[j]) + d1 * d1 / m.var1[j]);
      }
      out[i] = ll1 > ll0 ? 1 : 0;
    }
    return out;
  }
  if (std::holds_alternative<detail::TreeModel>(payload_)) {
    const auto& m = std::get<detail::TreeModel>(payload_);
    for (std::size_t i = 0; i < x.rows; ++i) {
      out[i] = m.predict_row(x.row(i));
    }
    return out;
  }
  if (std::holds_alternative<detail::ForestModel>(payload_)) {
    const auto& m = std::get<detail::ForestModel>(payload_);
    for (std::size_t i = 0; i < x.rows; ++i) {
      int votes1 = 0;
      for (const auto& tree : m.trees) {
        votes1 += tree.predict_row(x.row(i));
      }
      out[i] = 2 * votes1 > static_cast<int>(m.trees.size()) ? 1 : 0;
    }
    return out;
  }
  const auto& m = std::get<detail::AdaModel>(payload_);
  for (std::size_t i = 0; i < x.rows; ++i) {
    double score = 0.0;
    for (std::size_t s = 0; s < m.stumps.size(); ++s) {
      score += m.alphas[s] *
               (m.stumps[s].predict_row(x.row(i)) == 1 ? 1.0 : -1.0);
    }
    out[i] = score > 0.0 ? 1 : 0;
  }
  return out;
}

}  // namespace vpd
