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

#include <stdexcept>
#include <string>

namespace vpd {

// Base type for every error raised by this library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Filesystem and stream failures (missing file, short read, write failure).
class IoError : public Error {
 public:
  using Error::Error;
};

// Structurally invalid input data (bad WAV header, malformed CSV row,
// unparseable manifest line).
class FormatError : public Error {
 public:
  using Error::Error;
};

// Semantically invalid values or configurations (unknown hyperparameter,
// label outside {0,1}, fold count below 2).
class ValidationError : public Error {
 public:
  using Error::Error;
};

// Dimension mismatches between cooperating objects (matrix column count vs.
// trained model, label vector length vs. row count).
class ShapeError : public Error {
 public:
  using Error::Error;
};

// A dataset that cannot be processed as requested (class with fewer members
// than folds, minority class too small to oversample, audio empty after
// silence trimming).
class DataError : public Error {
 public:
  using Error::Error;
};

}  // namespace vpd
