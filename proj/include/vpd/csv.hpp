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
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "vpd/error.hpp"

namespace vpd {

// Round to 12 decimal places, half away from zero. Applied to every metric
// before aggregation or serialization so that on-disk values and in-memory
// values agree exactly.
inline double round12(double x) {
  if (!std::isfinite(x)) return x;
  const double scaled = x * 1e12;
  return (scaled < 0.0 ? -std::floor(0.5 - scaled) : std::floor(0.5 + scaled)) /
         1e12;
}

// Fixed 12-decimal text form; the single formatting used in result CSVs so
// reruns are byte-comparable.
inline std::string format_fixed12(double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.12f", x);
  return std::string(buf);
}

namespace csv {

// Parse CSV text with RFC 4180 quoting (quoted fields may contain commas,
// doubled quotes, and newlines). Accepts LF and CRLF line endings. Returns
// one vector of fields per record; a trailing newline does not produce an
// empty record.
inline std::vector<std::vector<std::string>> parse(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> row;
  std::string field;
  bool in_quotes = false;
  bool field_started = false;
  std::size_t i = 0;
  const std::size_t n = text.size();
  auto end_field = [&] {
    row.push_back(field);
    field.clear();
    field_started = false;
  };
  auto end_row = [&] {
    end_field();
    rows.push_back(row);
    row.clear();
  };
  while (i < n) {
    const char c = text[i];
    if (in_quotes) {
      if (c == '"') {
        if (i + 1 < n && text[i + 1] == '"') {
          field.push_back('"');
          i += 2;
        } else {
          in_quotes = false;
          ++i;
        }
      } else {
        field.push_back(c);
        ++i;
      }
      continue;
    }
    switch (c) {
      case '"':
        if (field.empty() && !field_started) {
          in_quotes = true;
        } else {
          field.push_back('"');
        }
        field_started = true;
        ++i;
        break;
      case ',':
        end_field();
        ++i;
        break;
      case '\r':
        if (i + 1 < n && text[i + 1] == '\n') ++i;
        end_row();
        ++i;
        break;
      case '\n':
        end_row();
        ++i;
        break;
      default:
        field.push_back(c);
        field_started = true;
        ++i;
        break;
    }
  }
  if (in_quotes) throw FormatError("csv: unterminated quoted field");
  if (field_started || !field.empty() || !row.empty()) end_row();
  return rows;
}

inline std::vector<std::vector<std::string>> parse_file(
    const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open csv: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse(ss.str());
}

inline std::string quote_field(const std::string& s) {
  bool needs = false;
  for (const char c : s) {
    if (c == ',' || c == '"' || c == '\n' || c == '\r') {
      needs = true;
      break;
    }
  }
  if (!needs) return s;
  std::string out = "\"";
  for (const char c : s) {
    if (c == '"') out += "\"\"";
    else out.push_back(c);
  }
  out += "\"";
  return out;
}

inline std::string join_row(const std::vector<std::string>& fields) {
  std::string line;
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) line.push_back(',');
    line += quote_field(fields[i]);
  }
  line.push_back('\n');
  return line;
}

// Writer that accumulates rows and writes the file in one shot; wrote files
// always end with a trailing newline and use LF endings.
class Writer {
 public:
  explicit Writer(std::vector<std::string> header) {
    text_ += join_row(header);
    columns_ = header.size();
  }

  void add_row(const std::vector<std::string>& fields) {
    if (fields.size() != columns_) {
      throw ShapeError("csv: row width " + std::to_string(fields.size()) +
                       " does not match header width " +
                       std::to_string(columns_));
    }
    text_ += join_row(fields);
  }

  const std::string& text() const { return text_; }

  void save(const std::string& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write csv: " + path);
    out << text_;
    if (!out) throw IoError("short write: " + path);
  }

 private:
  std::string text_;
  std::size_t columns_ = 0;
};

}  // namespace csv
}  // namespace vpd
