//
// Copyright 2026 The mmbound Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//

// Plain-text formats: workload, strategy and Gram CSV files, data vectors and
// projection families. Reals are written with 17 significant digits so every
// double survives a round trip.

#ifndef MMBOUND_IO_HPP_
#define MMBOUND_IO_HPP_

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "mmbound/error.hpp"
#include "mmbound/numkernel.hpp"
#include "mmbound/query_matrix.hpp"
#include "mmbound/strategies.hpp"
#include "mmbound/workloads.hpp"

namespace mmbound {

inline std::string FormatReal(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

namespace internal {

inline std::string_view Trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

[[noreturn]] inline void ParseFail(int line, const std::string& what) {
  Fail(ErrorCode::kParse, "line " + std::to_string(line) + ": " + what);
}

inline double ParseReal(std::string_view field, int line) {
  field = Trim(field);
  double v = 0.0;
  const auto* end = field.data() + field.size();
  auto [ptr, ec] = std::from_chars(field.data(), end, v);
  if (ec != std::errc() || ptr != end || field.empty()) ParseFail(line, "not a number: '" + std::string(field) + "'");
  if (!std::isfinite(v)) ParseFail(line, "non-finite value");
  return v;
}

inline Index ParseIndex(std::string_view field, int line) {
  field = Trim(field);
  long long v = 0;
  const auto* end = field.data() + field.size();
  auto [ptr, ec] = std::from_chars(field.data(), end, v);
  if (ec != std::errc() || ptr != end || field.empty()) ParseFail(line, "not an integer: '" + std::string(field) + "'");
  return static_cast<Index>(v);
}

inline std::vector<std::string_view> SplitCommas(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    const auto comma = line.find(',', start);
    out.push_back(line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

// Non-blank lines with their 1-based line numbers.
inline std::vector<std::pair<int, std::string>> ReadLines(std::istream& in) {
  std::vector<std::pair<int, std::string>> out;
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (!Trim(line).empty()) out.emplace_back(number, std::string(Trim(line)));
  }
  return out;
}

inline std::optional<Index> MatchHeader(std::string_view header, std::string_view prefix) {
  if (header.substr(0, prefix.size()) != prefix) return std::nullopt;
  return ParseIndex(header.substr(prefix.size()), 1);
}

inline Matrix ReadRows(const std::vector<std::pair<int, std::string>>& lines, Index n) {
  Matrix m(static_cast<Index>(lines.size()) - 1, n);
  for (std::size_t r = 1; r < lines.size(); ++r) {
    const auto fields = SplitCommas(lines[r].second);
    if (static_cast<Index>(fields.size()) != n) {
      ParseFail(lines[r].first, "expected " + std::to_string(n) + " values, found " + std::to_string(fields.size()));
    }
    for (Index c = 0; c < n; ++c) m(static_cast<Index>(r) - 1, c) = ParseReal(fields[static_cast<std::size_t>(c)], lines[r].first);
  }
  return m;
}

inline void WriteRows(std::ostream& out, const Matrix& m) {
  for (Index r = 0; r < m.rows(); ++r) {
    for (Index c = 0; c < m.cols(); ++c) {
      if (c) out << ',';
      out << FormatReal(m(r, c));
    }
    out << '\n';
  }
}

inline std::ifstream OpenInput(const std::string& path) {
  std::ifstream in(path);
  Require(in.good(), ErrorCode::kParse, "cannot open " + path);
  return in;
}

}  // namespace internal

// Workload CSV: "n=<cells>" then one query per line. A "gram n=<cells>"
// header instead gives a Gram-only workload.
inline void WriteWorkloadCsv(std::ostream& out, const QueryMatrix& w) {
  out << "n=" << w.cells() << '\n';
  internal::WriteRows(out, w.rows());
}

inline void WriteGramCsv(std::ostream& out, const SymMatrix& g) {
  out << "gram n=" << g.size() << '\n';
  internal::WriteRows(out, g.entries());
}

inline void WriteStrategyCsv(std::ostream& out, const QueryMatrix& a) {
  out << "strategy n=" << a.cells() << '\n';
  internal::WriteRows(out, a.rows());
}

inline SymMatrix ReadGramCsv(std::istream& in) {
  const auto lines = internal::ReadLines(in);
  if (lines.empty()) internal::ParseFail(1, "empty input");
  const auto n = internal::MatchHeader(lines.front().second, "gram n=");
  if (!n || *n < 1) internal::ParseFail(lines.front().first, "expected header 'gram n=<int>'");
  if (static_cast<Index>(lines.size()) - 1 != *n) internal::ParseFail(lines.back().first, "expected n rows");
  return SymMatrix(internal::ReadRows(lines, *n));
}

// Reads either format; explicit workloads keep only distinct queries.
inline Workload ReadWorkloadCsv(std::istream& in) {
  const auto lines = internal::ReadLines(in);
  if (lines.empty()) internal::ParseFail(1, "empty input");
  const std::string& header = lines.front().second;
  if (auto n = internal::MatchHeader(header, "gram n=")) {
    if (*n < 1) internal::ParseFail(lines.front().first, "cell count must be positive");
    if (static_cast<Index>(lines.size()) - 1 != *n) internal::ParseFail(lines.back().first, "expected n rows");
    return Workload(QueryMatrix::FromGram(SymMatrix(internal::ReadRows(lines, *n))));
  }
  const auto n = internal::MatchHeader(header, "n=");
  if (!n || *n < 1) internal::ParseFail(lines.front().first, "expected header 'n=<int>' or 'gram n=<int>'");
  if (lines.size() < 2) internal::ParseFail(lines.front().first, "no queries");
  return Workload::FromQueries(internal::ReadRows(lines, *n));
}

inline Strategy ReadStrategyCsv(std::istream& in) {
  const auto lines = internal::ReadLines(in);
  if (lines.empty()) internal::ParseFail(1, "empty input");
  const auto n = internal::MatchHeader(lines.front().second, "strategy n=");
  if (!n || *n < 1) internal::ParseFail(lines.front().first, "expected header 'strategy n=<int>'");
  if (lines.size() < 2) internal::ParseFail(lines.front().first, "no rows");
  return CustomStrategy(internal::ReadRows(lines, *n));
}

// One non-negative value per line.
inline Vector ReadDataCsv(std::istream& in) {
  const auto lines = internal::ReadLines(in);
  if (lines.empty()) internal::ParseFail(1, "empty data vector");
  Vector x(static_cast<Index>(lines.size()));
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const double v = internal::ParseReal(lines[i].second, lines[i].first);
    if (v < 0.0) internal::ParseFail(lines[i].first, "data counts must be non-negative");
    x(static_cast<Index>(i)) = v;
  }
  return x;
}

inline void WriteDataCsv(std::ostream& out, const Vector& x) {
  for (Index i = 0; i < x.size(); ++i) out << FormatReal(x(i)) << '\n';
}

// One subset per line, 1-based cell indices separated by commas.
inline ProjectionSet ReadProjectionCsv(std::istream& in) {
  ProjectionSet family;
  for (const auto& [number, text] : internal::ReadLines(in)) {
    std::vector<Index> subset;
    for (auto field : internal::SplitCommas(text)) {
      const Index i = internal::ParseIndex(field, number);
      if (i < 1) internal::ParseFail(number, "cell indices are 1-based");
      subset.push_back(i - 1);
    }
    family.subsets.push_back(std::move(subset));
  }
  if (family.subsets.empty()) internal::ParseFail(1, "empty projection family");
  return family;
}

inline void WriteProjectionCsv(std::ostream& out, const ProjectionSet& family) {
  for (const auto& s : family.subsets) {
    for (std::size_t k = 0; k < s.size(); ++k) out << (k ? "," : "") << s[k] + 1;
    out << '\n';
  }
}

inline Workload ReadWorkloadFile(const std::string& path) {
  auto in = internal::OpenInput(path);
  return ReadWorkloadCsv(in);
}

inline Strategy ReadStrategyFile(const std::string& path) {
  auto in = internal::OpenInput(path);
  return ReadStrategyCsv(in);
}

inline Vector ReadDataFile(const std::string& path) {
  auto in = internal::OpenInput(path);
  return ReadDataCsv(in);
}

inline ProjectionSet ReadProjectionFile(const std::string& path) {
  auto in = internal::OpenInput(path);
  return ReadProjectionCsv(in);
}

}  // namespace mmbound

#endif  // MMBOUND_IO_HPP_
