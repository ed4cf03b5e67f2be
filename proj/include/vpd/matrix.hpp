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
#include <cstddef>
#include <vector>

#include "vpd/error.hpp"

namespace vpd {

// Dense row-major matrix of doubles. Rows are observations, columns are
// features.
struct Matrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> data;

  Matrix() = default;
  Matrix(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c, 0.0) {}

  double* row(std::size_t i) { return data.data() + i * cols; }
  const double* row(std::size_t i) const { return data.data() + i * cols; }

  double& at(std::size_t i, std::size_t j) { return data[i * cols + j]; }
  double at(std::size_t i, std::size_t j) const { return data[i * cols + j]; }

  void append_row(const std::vector<double>& r) {
    if (cols == 0 && rows == 0) cols = r.size();
    if (r.size() != cols) throw ShapeError("append_row: width mismatch");
    data.insert(data.end(), r.begin(), r.end());
    ++rows;
  }

  std::vector<double> row_copy(std::size_t i) const {
    return std::vector<double>(row(i), row(i) + cols);
  }

  Matrix take_rows(const std::vector<std::size_t>& idx) const {
    Matrix out(idx.size(), cols);
    for (std::size_t i = 0; i < idx.size(); ++i) {
      const double* src = row(idx[i]);
      double* dst = out.row(i);
      for (std::size_t j = 0; j < cols; ++j) dst[j] = src[j];
    }
    return out;
  }
};

inline double squared_distance(const double* a, const double* b,
                               std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return s;
}

inline double euclidean_distance(const double* a, const double* b,
                                 std::size_t n) {
  return std::sqrt(squared_distance(a, b, n));
}

inline double minkowski_distance(const double* a, const double* b,
                                 std::size_t n, double p) {
  if (p == 2.0) return euclidean_distance(a, b, n);
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += std::pow(std::fabs(a[i] - b[i]), p);
  return std::pow(s, 1.0 / p);
}

}  // namespace vpd
