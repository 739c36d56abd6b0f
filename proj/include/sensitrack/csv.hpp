// Copyright 2026 The sensitrack Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <istream>
#include <ostream>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "sensitrack/error.hpp"

namespace sensitrack {

// All floating-point output uses 12 significant digits so reports compare
// byte-for-byte across runs and platforms.
inline std::string format_double(double v) {
  if (v == 0.0) return "0";  // also folds -0
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

inline double round12(double v) {
  if (!std::isfinite(v)) return v;
  return std::strtod(format_double(v).c_str(), nullptr);
}

using CsvField = std::variant<std::string, std::int64_t, double>;

// Comma-separated, header row first, string fields always quoted, LF endings.
class CsvWriter {
 public:
  explicit CsvWriter(std::ostream& out) : out_(out) {}

  void header(const std::vector<std::string>& names) {
    std::vector<CsvField> row(names.begin(), names.end());
    write(row);
  }

  void write(const std::vector<CsvField>& row) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out_ << ',';
      std::visit([this](const auto& v) { put(v); }, row[i]);
    }
    out_ << '\n';
  }

 private:
  void put(const std::string& s) {
    out_ << '"';
    for (char c : s) {
      if (c == '"') out_ << '"';
      out_ << c;
    }
    out_ << '"';
  }
  void put(std::int64_t v) { out_ << v; }
  void put(double v) { out_ << format_double(v); }

  std::ostream& out_;
};

inline CsvField csv_int(std::size_t v) { return static_cast<std::int64_t>(v); }

// Reads the dialect written by CsvWriter (RFC 4180 quoting). Returns rows
// including the header.
inline std::vector<std::vector<std::string>> read_csv(std::istream& in) {
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> row;
  std::string field;
  bool quoted = false;
  bool any = false;
  char c;
  while (in.get(c)) {
    any = true;
    if (quoted) {
      if (c == '"') {
        if (in.peek() == '"') {
          in.get(c);
          field.push_back('"');
        } else {
          quoted = false;
        }
      } else {
        field.push_back(c);
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      row.push_back(std::move(field));
      field.clear();
    } else if (c == '\n') {
      row.push_back(std::move(field));
      field.clear();
      rows.push_back(std::move(row));
      row.clear();
      any = false;
    } else if (c != '\r') {
      field.push_back(c);
    }
  }
  if (quoted) throw DataError("unterminated quoted CSV field");
  if (any) {
    row.push_back(std::move(field));
    rows.push_back(std::move(row));
  }
  return rows;
}

inline double parse_double(const std::string& s) {
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (s.empty() || end != s.c_str() + s.size()) throw DataError("not a number: '" + s + "'");
  return v;
}

}  // namespace sensitrack
