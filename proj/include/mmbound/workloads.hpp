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

// Workload construction (range, predicate, data cube), column projection,
// and the Gram-level equivalence and containment relations.

#ifndef MMBOUND_WORKLOADS_HPP_
#define MMBOUND_WORKLOADS_HPP_

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include "mmbound/error.hpp"
#include "mmbound/magnitude.hpp"
#include "mmbound/numkernel.hpp"
#include "mmbound/query_matrix.hpp"

namespace mmbound {

// Beyond either cap a constructor returns the Gram-only form.
inline constexpr Index kExplicitMaxCells = 4096;
inline constexpr double kExplicitMaxEntries = 1e7;

// A workload: the queries an analyst wants answered together. dims records the
// attribute domain sizes when the cells form a grid (row-major, first
// attribute slowest); for a flat workload it is {cells()}.
class Workload : public QueryMatrix {
 public:
  Workload() = default;

  explicit Workload(QueryMatrix matrix, std::vector<Index> dims = {},
                    std::vector<std::string> labels = {})
      : QueryMatrix(std::move(matrix)), dims_(std::move(dims)), labels_(std::move(labels)) {
    if (dims_.empty()) dims_ = {cells()};
    Index product = 1;
    for (Index d : dims_) product *= d;
    internal::Require(product == cells(), ErrorCode::kDimensionMismatch,
                      "dims do not multiply to the cell count");
    internal::Require(labels_.empty() || static_cast<Index>(labels_.size()) == cells(),
                      ErrorCode::kDimensionMismatch, "one label per cell is required");
  }

  // Explicit workload from query rows. Duplicate rows are dropped, keeping the
  // first occurrence, since a workload is a set of distinct queries.
  static Workload FromQueries(const Matrix& rows, std::vector<Index> dims = {},
                              std::vector<std::string> labels = {}) {
    internal::Require(rows.rows() >= 1, ErrorCode::kInvalidArgument, "workload needs at least one query");
    return Workload(QueryMatrix::FromRows(DistinctRows(rows)), std::move(dims), std::move(labels));
  }

  const std::vector<Index>& dims() const { return dims_; }
  const std::vector<std::string>& labels() const { return labels_; }

  static Matrix DistinctRows(const Matrix& rows) {
    std::vector<Index> order(static_cast<std::size_t>(rows.rows()));
    std::iota(order.begin(), order.end(), Index{0});
    auto less = [&rows](Index a, Index b) {
      for (Index c = 0; c < rows.cols(); ++c) {
        if (rows(a, c) != rows(b, c)) return rows(a, c) < rows(b, c);
      }
      return false;
    };
    std::stable_sort(order.begin(), order.end(), less);
    std::vector<bool> keep(order.size(), true);
    for (std::size_t k = 1; k < order.size(); ++k) {
      if (!less(order[k - 1], order[k])) keep[static_cast<std::size_t>(order[k])] = false;
    }
    const auto kept = std::count(keep.begin(), keep.end(), true);
    if (kept == rows.rows()) return rows;
    Matrix out(kept, rows.cols());
    Index r = 0;
    for (Index i = 0; i < rows.rows(); ++i) {
      if (keep[static_cast<std::size_t>(i)]) out.row(r++) = rows.row(i);
    }
    return out;
  }

 private:
  std::vector<Index> dims_;
  std::vector<std::string> labels_;
};

// A family of cell subsets (0-based indices) over which projected bounds are
// maximized.
struct ProjectionSet {
  std::vector<std::vector<Index>> subsets;

  void Validate(Index cells) const {
    internal::Require(!subsets.empty(), ErrorCode::kInvalidArgument, "projection family is empty");
    for (const auto& s : subsets) {
      internal::Require(!s.empty(), ErrorCode::kInvalidArgument, "projection subset is empty");
      for (Index i : s) {
        internal::Require(i >= 0 && i < cells, ErrorCode::kIndexOutOfRange,
                          "cell index " + std::to_string(i + 1) + " out of range");
      }
    }
  }
};

namespace internal {

inline bool FitsExplicit(double rows, double cells) {
  return cells <= static_cast<double>(kExplicitMaxCells) && rows * cells <= kExplicitMaxEntries;
}

// Gram of the one-dimensional range workload: entry (i, j), 1-based, counts
// the ranges covering both cells, min(i,j) * (d - max(i,j) + 1).
inline SymMatrix RangeGram(Index d) {
  Matrix g(d, d);
  for (Index i = 0; i < d; ++i) {
    for (Index j = 0; j < d; ++j) {
      const double lo = static_cast<double>(std::min(i, j) + 1);
      const double hi = static_cast<double>(std::max(i, j) + 1);
      g(i, j) = lo * (static_cast<double>(d) - hi + 1.0);
    }
  }
  return SymMatrix(std::move(g));
}

// Ranges ordered by length, then by start.
inline Matrix RangeRows(Index d) {
  Matrix rows = Matrix::Zero(d * (d + 1) / 2, d);
  Index r = 0;
  for (Index len = 1; len <= d; ++len) {
    for (Index start = 0; start + len <= d; ++start) rows.row(r++).segment(start, len).setOnes();
  }
  return rows;
}

inline Workload AllRange1D(Index d) {
  internal::Require(d >= 1, ErrorCode::kDimOutOfRange, "range dimension must be >= 1");
  const double count = static_cast<double>(d) * static_cast<double>(d + 1) / 2.0;
  if (FitsExplicit(count, static_cast<double>(d))) {
    return Workload(QueryMatrix::FromRowsAndGram(RangeRows(d), RangeGram(d)));
  }
  internal::Require(d <= kMaxGramCells, ErrorCode::kTooLarge, "range dimension too large");
  return Workload(QueryMatrix::FromGram(RangeGram(d), 0.0, Magnitude::FromValue(count)));
}

}  // namespace internal

// All axis-aligned range queries over a grid with the given domain sizes. Each
// attribute contributes d(d+1)/2 intervals (the full domain included), and the
// workload is their crossproduct.
inline Workload AllRange(const std::vector<Index>& dims) {
  internal::Require(!dims.empty(), ErrorCode::kDimOutOfRange, "no dimensions given");
  for (Index d : dims) internal::Require(d >= 1, ErrorCode::kDimOutOfRange, "dimension must be >= 1");
  if (dims.size() == 1) return internal::AllRange1D(dims.front());

  std::vector<QueryMatrix> factors;
  double rows = 1.0;
  double cells = 1.0;
  for (Index d : dims) {
    factors.push_back(internal::AllRange1D(d));
    rows *= static_cast<double>(d) * static_cast<double>(d + 1) / 2.0;
    cells *= static_cast<double>(d);
  }
  if (internal::FitsExplicit(rows, cells)) {
    Matrix r = internal::RangeRows(dims.front());
    Matrix g = internal::RangeGram(dims.front()).entries();
    for (std::size_t k = 1; k < dims.size(); ++k) {
      r = Kronecker(r, internal::RangeRows(dims[k]));
      g = Kronecker(g, internal::RangeGram(dims[k]).entries());
    }
    return Workload(QueryMatrix::FromRowsAndGram(std::move(r), SymMatrix(std::move(g))), dims);
  }
  return Workload(QueryMatrix::KroneckerOf(std::move(factors)), dims);
}

// All 2^n predicate queries, held by their Gram: diagonal 2^(n-1),
// off-diagonal 2^(n-2). Stored as 2^(n-2) * (I + J) so n in the thousands
// stays representable.
inline Workload AllPredicateGram(Index n) {
  internal::Require(n >= 1, ErrorCode::kDimOutOfRange, "cell count must be >= 1");
  const double ln2 = std::numbers::ln2;
  return Workload(QueryMatrix::FromVariableAgnostic(
      n, VariableAgnosticForm{2.0, 1.0}, static_cast<double>(n - 2) * ln2,
      Magnitude::FromLog(static_cast<double>(n) * ln2)));
}

inline constexpr Index kMaxPredicateEnumeration = 16;

// Explicit enumeration; row k selects the cells whose bit is set in k (cell 1
// is bit 0). The all-zero query is included.
inline Workload AllPredicateExplicit(Index n) {
  internal::Require(n >= 1 && n <= kMaxPredicateEnumeration, ErrorCode::kDimOutOfRange,
                    "explicit predicate enumeration needs 1 <= n <= 16");
  const Index m = Index{1} << n;
  Matrix rows(m, n);
  for (Index k = 0; k < m; ++k) {
    for (Index c = 0; c < n; ++c) rows(k, c) = ((k >> c) & 1) ? 1.0 : 0.0;
  }
  return Workload(QueryMatrix::FromRows(std::move(rows)));
}

// Weighted data cube. Each cuboid is a set of attribute indices (0-based);
// it contributes one query per value combination of those attributes, summing
// every cell that agrees on them, scaled by the cuboid's weight. The empty
// cuboid is the single total query.
inline Workload DataCube(const std::vector<Index>& dims, const std::vector<std::vector<Index>>& cuboids,
                         const std::vector<double>& weights) {
  internal::Require(!cuboids.empty(), ErrorCode::kEmptyCuboidList, "no cuboids given");
  internal::Require(weights.size() == cuboids.size(), ErrorCode::kInvalidArgument,
                    "one weight per cuboid is required");
  internal::Require(!dims.empty(), ErrorCode::kDimOutOfRange, "no dimensions given");
  Index cells = 1;
  for (Index d : dims) {
    internal::Require(d >= 1, ErrorCode::kDimOutOfRange, "dimension must be >= 1");
    cells *= d;
  }
  internal::Require(cells <= kExplicitMaxCells, ErrorCode::kTooLarge, "data cube has too many cells");
  const auto attrs = static_cast<Index>(dims.size());

  // Row-major coordinates of every cell.
  std::vector<std::vector<Index>> coord(static_cast<std::size_t>(cells), std::vector<Index>(dims.size()));
  for (Index c = 0; c < cells; ++c) {
    Index rem = c;
    for (Index a = attrs - 1; a >= 0; --a) {
      coord[static_cast<std::size_t>(c)][static_cast<std::size_t>(a)] = rem % dims[static_cast<std::size_t>(a)];
      rem /= dims[static_cast<std::size_t>(a)];
    }
  }

  std::vector<Eigen::RowVectorXd> rows;
  for (std::size_t k = 0; k < cuboids.size(); ++k) {
    internal::Require(weights[k] > 0.0 && std::isfinite(weights[k]), ErrorCode::kInvalidArgument,
                      "cuboid weights must be positive");
    std::vector<Index> cuboid = cuboids[k];
    std::sort(cuboid.begin(), cuboid.end());
    cuboid.erase(std::unique(cuboid.begin(), cuboid.end()), cuboid.end());
    Index groups = 1;
    for (Index a : cuboid) {
      internal::Require(a >= 0 && a < attrs, ErrorCode::kIndexOutOfRange, "cuboid attribute out of range");
      groups *= dims[static_cast<std::size_t>(a)];
    }
    std::vector<Eigen::RowVectorXd> block(static_cast<std::size_t>(groups), Eigen::RowVectorXd::Zero(cells));
    for (Index c = 0; c < cells; ++c) {
      Index g = 0;
      for (Index a : cuboid) g = g * dims[static_cast<std::size_t>(a)] + coord[static_cast<std::size_t>(c)][static_cast<std::size_t>(a)];
      block[static_cast<std::size_t>(g)](c) = weights[k];
    }
    rows.insert(rows.end(), block.begin(), block.end());
  }
  Matrix m(static_cast<Index>(rows.size()), cells);
  for (std::size_t r = 0; r < rows.size(); ++r) m.row(static_cast<Index>(r)) = rows[r];
  return Workload::FromQueries(m, dims);
}

// Restricts the workload to the cells in subset (0-based, order preserved).
// Rows are kept as they are, so projected rows may repeat; the Gram of the
// result is the principal submatrix of the original Gram.
inline Workload ColumnProject(const Workload& w, const std::vector<Index>& subset) {
  internal::Require(!subset.empty(), ErrorCode::kInvalidArgument, "projection subset is empty");
  std::vector<bool> seen(static_cast<std::size_t>(w.cells()), false);
  for (Index i : subset) {
    internal::Require(i >= 0 && i < w.cells(), ErrorCode::kIndexOutOfRange,
                      "cell index " + std::to_string(i + 1) + " out of range");
    internal::Require(!seen[static_cast<std::size_t>(i)], ErrorCode::kInvalidArgument, "repeated cell index");
    seen[static_cast<std::size_t>(i)] = true;
  }
  const auto k = static_cast<Index>(subset.size());
  std::vector<std::string> labels;
  if (!w.labels().empty()) {
    for (Index i : subset) labels.push_back(w.labels()[static_cast<std::size_t>(i)]);
  }
  if (w.is_explicit()) {
    Matrix cols(w.rows().rows(), k);
    for (Index j = 0; j < k; ++j) cols.col(j) = w.rows().col(subset[static_cast<std::size_t>(j)]);
    return Workload(QueryMatrix::FromRows(std::move(cols)), {}, std::move(labels));
  }
  if (w.variable_agnostic()) {
    return Workload(QueryMatrix::FromVariableAgnostic(k, *w.variable_agnostic(), w.log_scale(), w.row_count()),
                    {}, std::move(labels));
  }
  const Matrix& g = w.unit_gram().entries();
  Matrix sub(k, k);
  for (Index a = 0; a < k; ++a) {
    for (Index b = 0; b < k; ++b) sub(a, b) = g(subset[static_cast<std::size_t>(a)], subset[static_cast<std::size_t>(b)]);
  }
  return Workload(QueryMatrix::FromGram(SymMatrix(std::move(sub)), w.log_scale(), w.row_count()), {},
                  std::move(labels));
}

namespace internal {

// Both Grams brought to the larger of the two scales.
inline std::pair<Matrix, Matrix> CommonScaleGrams(const QueryMatrix& a, const QueryMatrix& b) {
  Require(a.cells() == b.cells(), ErrorCode::kDimensionMismatch, "workloads have different cell counts");
  const double top = std::max(a.log_scale(), b.log_scale());
  return {a.unit_gram().entries() * std::exp(a.log_scale() - top),
          b.unit_gram().entries() * std::exp(b.log_scale() - top)};
}

}  // namespace internal

// W1 and W2 are equivalent when their Grams agree (to 1e-9 of the largest
// entry); equivalent workloads have identical error under every strategy.
inline bool Equivalent(const QueryMatrix& w1, const QueryMatrix& w2) {
  auto [g1, g2] = internal::CommonScaleGrams(w1, w2);
  const double scale = std::max(internal::MaxAbs(g1), internal::MaxAbs(g2));
  return internal::MaxAbs(g1 - g2) <= 1e-9 * scale;
}

// W1 is contained in W2 iff Gram(W2) - Gram(W1) is PSD: then stacking W1 with
// the square root of the difference gives a workload equivalent to W2.
inline bool ContainedIn(const QueryMatrix& w1, const QueryMatrix& w2) {
  auto [g1, g2] = internal::CommonScaleGrams(w1, w2);
  const Vector values = SymmetricEigenvalues(SymMatrix(g2 - g1));
  if (values.size() == 0) return true;
  const double reference = std::max({values.cwiseAbs().maxCoeff(), internal::MaxAbs(g1), internal::MaxAbs(g2)});
  return values.minCoeff() >= -kPsdRelTol * reference;
}

}  // namespace mmbound

#endif  // MMBOUND_WORKLOADS_HPP_
