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

// Composition of workloads: stacking, union, crossproduct and conjunction.

#ifndef MMBOUND_ALGEBRA_HPP_
#define MMBOUND_ALGEBRA_HPP_

#include <algorithm>
#include <cmath>
#include <vector>

#include "mmbound/error.hpp"
#include "mmbound/numkernel.hpp"
#include "mmbound/query_matrix.hpp"
#include "mmbound/workloads.hpp"

namespace mmbound {

namespace internal {

inline std::vector<Index> SharedDims(const Workload& w1, const Workload& w2) {
  return w1.dims() == w2.dims() ? w1.dims() : std::vector<Index>{};
}

inline Matrix StackRows(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() + b.rows(), a.cols());
  out.topRows(a.rows()) = a;
  out.bottomRows(b.rows()) = b;
  return out;
}

}  // namespace internal

// All rows of both workloads, duplicates kept. Gram(out) = Gram(W1) + Gram(W2).
inline Workload Stack(const Workload& w1, const Workload& w2) {
  internal::Require(w1.cells() == w2.cells(), ErrorCode::kDimensionMismatch,
                    "stacked workloads must share their cells");
  if (w1.is_explicit() && w2.is_explicit()) {
    return Workload(QueryMatrix::FromRows(internal::StackRows(w1.rows(), w2.rows())), internal::SharedDims(w1, w2));
  }
  const double top = std::max(w1.log_scale(), w2.log_scale());
  Matrix g = w1.unit_gram().entries() * std::exp(w1.log_scale() - top) +
             w2.unit_gram().entries() * std::exp(w2.log_scale() - top);
  return Workload(QueryMatrix::FromGram(SymMatrix(std::move(g)), top, w1.row_count() + w2.row_count()),
                  internal::SharedDims(w1, w2));
}

// The distinct rows of both workloads.
inline Workload Union(const Workload& w1, const Workload& w2) {
  internal::Require(w1.cells() == w2.cells(), ErrorCode::kDimensionMismatch,
                    "united workloads must share their cells");
  internal::Require(w1.is_explicit() && w2.is_explicit(), ErrorCode::kGramOnly,
                    "union removes duplicate rows and needs explicit workloads; use Stack for Grams");
  return Workload::FromQueries(internal::StackRows(w1.rows(), w2.rows()), internal::SharedDims(w1, w2));
}

// One query per pair of rows (row-major: W1's row index varies slowest), over
// the product of the two cell sets. Gram(out) = Kron(Gram(W1), Gram(W2)).
// Falls back to a Gram-only Kronecker form beyond the explicit size caps.
inline Workload Crossproduct(const Workload& w1, const Workload& w2) {
  std::vector<Index> dims = w1.dims();
  dims.insert(dims.end(), w2.dims().begin(), w2.dims().end());
  if (w1.is_explicit() && w2.is_explicit() &&
      internal::FitsExplicit(static_cast<double>(w1.rows().rows()) * static_cast<double>(w2.rows().rows()),
                             static_cast<double>(w1.cells()) * static_cast<double>(w2.cells()))) {
    return Workload(QueryMatrix::FromRows(Kronecker(w1.rows(), w2.rows())), std::move(dims));
  }
  return Workload(QueryMatrix::KroneckerOf({w1, w2}), std::move(dims));
}

namespace internal {

inline void RequirePredicate(const Workload& w) {
  Require(w.is_explicit(), ErrorCode::kGramOnly, "conjunction needs explicit predicate rows");
  Require((w.rows().array() == 0.0 || w.rows().array() == 1.0).all(), ErrorCode::kNotPredicate,
          "conjunction needs 0/1 entries");
}

}  // namespace internal

// Pairwise AND of predicate queries; on 0/1 rows this is the crossproduct.
inline Workload Conjunction(const Workload& w1, const Workload& w2) {
  internal::RequirePredicate(w1);
  internal::RequirePredicate(w2);
  return Crossproduct(w1, w2);
}

}  // namespace mmbound

#endif  // MMBOUND_ALGEBRA_HPP_
