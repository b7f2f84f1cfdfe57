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

// Strategy constructors and the strategy evaluator.

#ifndef MMBOUND_STRATEGIES_HPP_
#define MMBOUND_STRATEGIES_HPP_

#include <cmath>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "mmbound/bounds.hpp"
#include "mmbound/error.hpp"
#include "mmbound/mechanism.hpp"
#include "mmbound/numkernel.hpp"
#include "mmbound/query_matrix.hpp"
#include "mmbound/workloads.hpp"

namespace mmbound {

enum class StrategyKind { kIdentity, kWorkload, kHierarchical, kHaar, kSqrt, kCustom, kKronecker };

inline const char* StrategyKindName(StrategyKind kind) {
  switch (kind) {
    case StrategyKind::kIdentity: return "identity";
    case StrategyKind::kWorkload: return "workload";
    case StrategyKind::kHierarchical: return "hierarchical";
    case StrategyKind::kHaar: return "haar";
    case StrategyKind::kSqrt: return "sqrt";
    case StrategyKind::kCustom: return "custom";
    case StrategyKind::kKronecker: return "kronecker";
  }
  return "unknown";
}

// The queries actually answered by the mechanism.
class Strategy : public QueryMatrix {
 public:
  Strategy() = default;
  Strategy(QueryMatrix matrix, StrategyKind kind, int fanout = 0)
      : QueryMatrix(std::move(matrix)), kind_(kind), fanout_(fanout) {}

  StrategyKind kind() const { return kind_; }
  // Branching factor of a hierarchical strategy, 0 otherwise.
  int fanout() const { return fanout_; }

 private:
  StrategyKind kind_ = StrategyKind::kCustom;
  int fanout_ = 0;
};

inline Strategy IdentityStrategy(Index n) {
  internal::Require(n >= 1, ErrorCode::kDimOutOfRange, "cell count must be >= 1");
  return Strategy(QueryMatrix::FromRowsAndGram(Matrix::Identity(n, n), SymMatrix::Identity(n)),
                  StrategyKind::kIdentity);
}

inline Strategy WorkloadStrategy(const QueryMatrix& w) { return Strategy(w, StrategyKind::kWorkload); }

inline Strategy CustomStrategy(Matrix rows) {
  internal::Require(rows.rows() >= 1 && rows.cols() >= 1, ErrorCode::kInvalidArgument, "empty strategy");
  return Strategy(QueryMatrix::FromRows(std::move(rows)), StrategyKind::kCustom);
}

// One row per node of a fanout-ary tree over the cells, root first and level
// by level. A node of length L has min(fanout, L) children of length
// L / fanout, the last child taking the remainder.
inline Strategy HierarchicalStrategy(Index n, int fanout = 2) {
  internal::Require(n >= 1, ErrorCode::kDimOutOfRange, "cell count must be >= 1");
  internal::Require(fanout >= 2, ErrorCode::kInvalidArgument, "fanout must be >= 2");
  std::vector<std::pair<Index, Index>> nodes{{0, n}};  // [begin, end)
  for (std::size_t k = 0; k < nodes.size(); ++k) {
    const auto [lo, hi] = nodes[k];
    const Index len = hi - lo;
    if (len <= 1) continue;
    const Index children = std::min<Index>(fanout, len);
    const Index step = len / children;
    for (Index c = 0; c < children; ++c) {
      const Index b = lo + c * step;
      const Index e = c + 1 == children ? hi : b + step;
      nodes.emplace_back(b, e);
    }
  }
  Matrix rows = Matrix::Zero(static_cast<Index>(nodes.size()), n);
  for (std::size_t k = 0; k < nodes.size(); ++k) {
    rows.row(static_cast<Index>(k)).segment(nodes[k].first, nodes[k].second - nodes[k].first).setOnes();
  }
  return Strategy(QueryMatrix::FromRows(std::move(rows)), StrategyKind::kHierarchical, fanout);
}

// Unnormalized Haar matrix: the total, then for each level from coarse to
// fine and each block a +1/-1 split of the block.
inline Strategy HaarStrategy(Index n) {
  internal::Require(n >= 1 && (n & (n - 1)) == 0, ErrorCode::kNotPowerOfTwo,
                    "Haar strategy needs a power-of-two cell count, got " + std::to_string(n));
  Matrix rows = Matrix::Zero(n, n);
  rows.row(0).setOnes();
  Index r = 1;
  for (Index block = n; block >= 2; block /= 2) {
    for (Index lo = 0; lo < n; lo += block) {
      rows.row(r).segment(lo, block / 2).setOnes();
      rows.row(r).segment(lo + block / 2, block / 2).setConstant(-1.0);
      ++r;
    }
  }
  return Strategy(QueryMatrix::FromRows(std::move(rows)), StrategyKind::kHaar);
}

namespace internal {

inline QueryMatrix SqrtGram(const QueryMatrix& w) {
  if (w.is_kronecker()) {
    std::vector<QueryMatrix> roots;
    for (const auto& f : w.factors()) roots.push_back(SqrtGram(f));
    return QueryMatrix::KroneckerOf(std::move(roots));
  }
  if (const auto& va = w.variable_agnostic()) {
    // Same eigenvectors; eigenvalues a + (n-1)b and a - b get square-rooted.
    const double n = static_cast<double>(w.cells());
    Require(va->a >= va->b && va->a + (n - 1.0) * va->b >= 0.0, ErrorCode::kNotPsd,
            "variable-agnostic Gram is not PSD");
    const double top = std::sqrt(va->a + (n - 1.0) * va->b);
    const double rest = std::sqrt(va->a - va->b);
    return QueryMatrix::FromVariableAgnostic(w.cells(), {(top + (n - 1.0) * rest) / n, (top - rest) / n},
                                             w.log_scale() / 2.0, Magnitude::Zero());
  }
  return QueryMatrix::FromGram(PsdSqrt(w.unit_gram()), w.log_scale() / 2.0);
}

}  // namespace internal

// Gram-only strategy with Gram sqrt(W^T W). Kronecker and variable-agnostic
// structure is preserved.
inline Strategy SqrtStrategy(const QueryMatrix& w) {
  return Strategy(internal::SqrtGram(w), StrategyKind::kSqrt);
}

inline Strategy SqrtStrategy(const SymMatrix& gram) { return SqrtStrategy(QueryMatrix::FromGram(gram)); }

// The same strategy as explicit rows: the symmetric fourth root of the Gram.
inline Strategy ExplicitSqrtStrategy(const SymMatrix& gram) {
  return Strategy(QueryMatrix::FromRows(PsdPower(gram, 0.25).entries()), StrategyKind::kSqrt);
}

// Kronecker product of one strategy per attribute, matching the factor
// structure of a grid workload.
inline Strategy PerDimensionStrategy(const std::vector<Index>& dims,
                                     const std::function<Strategy(Index)>& make) {
  internal::Require(!dims.empty(), ErrorCode::kDimOutOfRange, "no dimensions given");
  if (dims.size() == 1) return make(dims.front());
  std::vector<QueryMatrix> factors;
  StrategyKind kind = StrategyKind::kKronecker;
  int fanout = 0;
  for (std::size_t k = 0; k < dims.size(); ++k) {
    Strategy s = make(dims[k]);
    if (k == 0) {
      kind = s.kind();
      fanout = s.fanout();
    } else if (s.kind() != kind) {
      kind = StrategyKind::kKronecker;
    }
    factors.push_back(std::move(s));
  }
  return Strategy(QueryMatrix::KroneckerOf(std::move(factors)), kind, fanout);
}

// Analytic error of W under A together with its ratio to P * svdb(W).
inline StrategyErrorReport EvaluateStrategy(const QueryMatrix& w, const QueryMatrix& a,
                                            const PrivacyParams& params) {
  StrategyErrorReport report = AnalyticTotalError(w, a, params);
  const Magnitude floor = Magnitude::FromValue(params.multiplier) * SingularValueBound(w);
  if (!floor.is_zero()) report.ratio_to_svdb = Ratio(report.total_error, floor);
  return report;
}

}  // namespace mmbound

#endif  // MMBOUND_STRATEGIES_HPP_
