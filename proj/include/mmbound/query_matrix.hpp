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

#ifndef MMBOUND_QUERY_MATRIX_HPP_
#define MMBOUND_QUERY_MATRIX_HPP_

#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "mmbound/error.hpp"
#include "mmbound/magnitude.hpp"
#include "mmbound/numkernel.hpp"

namespace mmbound {

// Largest Gram matrix that is ever materialized (n x n doubles, 512 MiB).
inline constexpr Index kMaxGramCells = 8192;

// Gram matrix of the form a*I + b*(J - I), relative to the owning matrix's
// scale. Holds for any workload whose Gram is invariant under column swaps.
struct VariableAgnosticForm {
  double a = 0.0;
  double b = 0.0;
};

// A set of linear queries over n cells, held in one of three ways:
//   explicit   the m x n matrix of query rows;
//   Gram-only  exp(log_scale) * G for a unit-scaled PSD matrix G, plus a
//              (possibly astronomically large) query count;
//   Kronecker  a list of factors whose Gram is the Kronecker product of the
//              factors' Grams, as produced by crossproducts.
// The Gram matrix is materialized lazily and at most once; copies share it.
// Instances are immutable and safe to share between threads.
class QueryMatrix {
 public:
  QueryMatrix() = default;

  // Rows are kept as given, duplicates included.
  static QueryMatrix FromRows(Matrix rows) {
    internal::Require(AllFiniteMatrix(rows), ErrorCode::kNonFinite, "query matrix has non-finite entries");
    QueryMatrix q;
    q.cells_ = rows.cols();
    q.row_count_ = Magnitude::FromValue(static_cast<double>(rows.rows()));
    auto shared = std::make_shared<const Matrix>(std::move(rows));
    q.rows_ = shared;
    q.gram_ = std::make_shared<LazyGram>([shared] { return ColumnGram(*shared); });
    return q;
  }

  // Explicit rows whose Gram is already known in closed form.
  static QueryMatrix FromRowsAndGram(Matrix rows, SymMatrix gram) {
    internal::Require(gram.size() == rows.cols(), ErrorCode::kDimensionMismatch,
                      "Gram size does not match row width");
    QueryMatrix q = FromRows(std::move(rows));
    q.gram_ = LazyGram::Ready(std::move(gram));
    return q;
  }

  static QueryMatrix FromGram(SymMatrix unit_gram, double log_scale = 0.0,
                              Magnitude row_count = Magnitude::Zero()) {
    QueryMatrix q;
    q.cells_ = unit_gram.size();
    q.log_scale_ = log_scale;
    q.row_count_ = row_count;
    q.gram_ = LazyGram::Ready(std::move(unit_gram));
    return q;
  }

  // Gram-only matrix whose Gram is exp(log_scale) * (a*I + b*(J - I)).
  static QueryMatrix FromVariableAgnostic(Index n, VariableAgnosticForm form, double log_scale,
                                          Magnitude row_count) {
    internal::Require(n >= 1, ErrorCode::kDimOutOfRange, "cell count must be positive");
    QueryMatrix q;
    q.cells_ = n;
    q.log_scale_ = log_scale;
    q.row_count_ = row_count;
    q.va_ = form;
    q.gram_ = std::make_shared<LazyGram>([n, form] {
      Matrix g = Matrix::Constant(n, n, form.b);
      g.diagonal().setConstant(form.a);
      return SymMatrix(std::move(g));
    });
    return q;
  }

  // Gram-only Kronecker product; cells are ordered row-major over the factors
  // (the first factor varies slowest).
  static QueryMatrix KroneckerOf(std::vector<QueryMatrix> factors) {
    internal::Require(!factors.empty(), ErrorCode::kInvalidArgument, "no Kronecker factors");
    std::vector<QueryMatrix> flat;
    for (auto& f : factors) {
      if (f.is_kronecker()) {
        flat.insert(flat.end(), f.factors_.begin(), f.factors_.end());
      } else {
        flat.push_back(std::move(f));
      }
    }
    if (flat.size() == 1) return flat.front();
    QueryMatrix q;
    q.cells_ = 1;
    q.row_count_ = Magnitude::One();
    for (const auto& f : flat) {
      q.cells_ *= f.cells_;
      q.log_scale_ += f.log_scale_;
      q.row_count_ *= f.row_count_;
    }
    q.factors_ = flat;
    q.gram_ = std::make_shared<LazyGram>([flat] {
      Matrix g = flat.front().unit_gram().entries();
      for (std::size_t i = 1; i < flat.size(); ++i) g = Kronecker(g, flat[i].unit_gram().entries());
      return SymMatrix(std::move(g));
    });
    return q;
  }

  Index cells() const { return cells_; }
  bool is_explicit() const { return rows_ != nullptr; }
  bool is_kronecker() const { return !factors_.empty(); }
  const std::vector<QueryMatrix>& factors() const { return factors_; }
  const std::optional<VariableAgnosticForm>& variable_agnostic() const { return va_; }

  const Matrix& rows() const {
    internal::Require(is_explicit(), ErrorCode::kGramOnly, "query matrix is held as a Gram only");
    return *rows_;
  }

  // Number of queries; zero when unknown (a bare Gram).
  Magnitude row_count() const { return row_count_; }

  // The Gram is exp(log_scale()) * unit_gram().
  double log_scale() const { return log_scale_; }
  Magnitude scale() const { return Magnitude::FromLog(log_scale_); }

  const SymMatrix& unit_gram() const {
    internal::Require(cells_ <= kMaxGramCells, ErrorCode::kTooLarge,
                      "Gram over " + std::to_string(cells_) + " cells is too large to materialize");
    internal::Require(gram_ != nullptr, ErrorCode::kInvalidArgument, "empty query matrix");
    return gram_->Get();
  }

  // The Gram at its true scale; only for scales representable as a double.
  SymMatrix gram() const {
    if (log_scale_ == 0.0) return unit_gram();
    const double s = std::exp(log_scale_);
    internal::Require(std::isfinite(s) && s > 0.0, ErrorCode::kTooLarge,
                      "Gram scale exceeds double range; use unit_gram() and log_scale()");
    return SymMatrix(unit_gram().entries() * s);
  }

  // Squared L2 sensitivity: the largest diagonal entry of the Gram.
  Magnitude max_column_norm_sq() const {
    if (is_kronecker()) {
      Magnitude out = Magnitude::One();
      for (const auto& f : factors_) out *= f.max_column_norm_sq();
      return out;
    }
    if (va_) return scale() * Magnitude::FromValue(va_->a);
    if (is_explicit()) {
      return Magnitude::FromValue(rows_->colwise().squaredNorm().maxCoeff());
    }
    return scale() * Magnitude::FromValue(std::max(0.0, unit_gram().entries().diagonal().maxCoeff()));
  }

  // trace(Gram) = ||W||_F^2.
  Magnitude frobenius_sq() const {
    if (is_kronecker()) {
      Magnitude out = Magnitude::One();
      for (const auto& f : factors_) out *= f.frobenius_sq();
      return out;
    }
    if (va_) return scale() * Magnitude::FromValue(va_->a * static_cast<double>(cells_));
    if (is_explicit()) return Magnitude::FromValue(rows_->squaredNorm());
    return scale() * Magnitude::FromValue(std::max(0.0, unit_gram().trace()));
  }

 private:
  static bool AllFiniteMatrix(const Matrix& m) { return m.allFinite(); }

  class LazyGram {
   public:
    explicit LazyGram(std::function<SymMatrix()> make) : make_(std::move(make)) {}
    static std::shared_ptr<LazyGram> Ready(SymMatrix g) {
      auto lazy = std::make_shared<LazyGram>(nullptr);
      lazy->value_ = std::move(g);
      std::call_once(lazy->once_, [] {});
      return lazy;
    }
    const SymMatrix& Get() {
      std::call_once(once_, [this] { value_ = make_(); });
      return value_;
    }

   private:
    std::once_flag once_;
    std::function<SymMatrix()> make_;
    SymMatrix value_;
  };

  Index cells_ = 0;
  std::shared_ptr<const Matrix> rows_;
  double log_scale_ = 0.0;
  Magnitude row_count_;
  std::vector<QueryMatrix> factors_;
  std::optional<VariableAgnosticForm> va_;
  std::shared_ptr<LazyGram> gram_;
};

}  // namespace mmbound

#endif  // MMBOUND_QUERY_MATRIX_HPP_
