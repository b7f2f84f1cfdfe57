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

// Sensitivity, the Gaussian and (extended) matrix mechanisms, the analytic
// total-error formula, column equalization, and Monte-Carlo error estimates.

#ifndef MMBOUND_MECHANISM_HPP_
#define MMBOUND_MECHANISM_HPP_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <random>
#include <string>
#include <thread>
#include <vector>

#include "mmbound/error.hpp"
#include "mmbound/magnitude.hpp"
#include "mmbound/numkernel.hpp"
#include "mmbound/query_matrix.hpp"

namespace mmbound {

// Relative trace residual above which a strategy is rejected because it
// cannot represent the workload.
inline constexpr double kSupportRelTol = 1e-6;
// Same check on explicit matrices: ||W A^+ A - W||_F <= 1e-7 ||W||_F.
inline constexpr double kExplicitSupportRelTol = 1e-7;

// (epsilon, delta) and the multiplier P = 2 ln(2/delta) / epsilon^2 that
// turns unit-noise error into (epsilon, delta)-private error. The noise scale
// for a strategy with L2 sensitivity s is s * sqrt(P).
struct PrivacyParams {
  double epsilon = 1.0;
  double delta = 1e-5;
  double multiplier = 1.0;

  static PrivacyParams Gaussian(double epsilon, double delta) {
    internal::Require(epsilon > 0.0 && std::isfinite(epsilon), ErrorCode::kInvalidArgument,
                      "epsilon must be positive");
    internal::Require(delta > 0.0 && delta < 1.0, ErrorCode::kInvalidArgument, "delta must be in (0, 1)");
    return {epsilon, delta, 2.0 * std::log(2.0 / delta) / (epsilon * epsilon)};
  }

  // P = 1, the normalization used when comparing against the bound.
  static PrivacyParams Unit() {
    const double nan = std::numeric_limits<double>::quiet_NaN();
    return {nan, nan, 1.0};
  }

  double NoiseScale(double sensitivity) const { return sensitivity * std::sqrt(multiplier); }
};

// Deterministic source of standard normal draws, identified by (seed, stream).
// Split derives an independent stream so parallel trials never share state.
// Zero() yields exact zeros, which turns every mechanism into its noiseless
// answer.
class NoiseSource {
 public:
  static NoiseSource Seeded(std::uint64_t seed, std::uint64_t stream = 0) {
    NoiseSource n;
    n.zero_ = false;
    n.seed_ = seed;
    n.stream_ = stream;
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
    n.engine_.seed(seq);
    return n;
  }

  static NoiseSource Zero() { return NoiseSource(); }

  bool is_zero() const { return zero_; }

  NoiseSource Split(std::uint64_t stream) const {
    if (zero_) return Zero();
    return Seeded(seed_ ^ (stream_ * 0x9E3779B97F4A7C15ULL), stream);
  }

  Vector Draw(Index count) {
    Vector z = Vector::Zero(count);
    if (zero_) return z;
    std::normal_distribution<double> normal(0.0, 1.0);
    for (Index i = 0; i < count; ++i) z(i) = normal(engine_);
    return z;
  }

 private:
  bool zero_ = true;
  std::uint64_t seed_ = 0;
  std::uint64_t stream_ = 0;
  std::mt19937_64 engine_;
};

enum class Norm { kL1, kL2 };

// Largest column norm. L2 works from the Gram (sqrt of the largest diagonal
// entry); L1 needs the explicit rows.
inline double Sensitivity(const QueryMatrix& a, Norm norm) {
  if (norm == Norm::kL2) return a.max_column_norm_sq().sqrt().value();
  internal::Require(a.is_explicit(), ErrorCode::kGramOnlyL1, "L1 sensitivity needs explicit rows");
  if (a.rows().size() == 0) return 0.0;
  return a.rows().cwiseAbs().colwise().sum().maxCoeff();
}

// W x + Normal(sigma)^m with sigma = Delta_W * sqrt(P).
inline Vector GaussianMechanism(const QueryMatrix& w, const Vector& x, const PrivacyParams& params,
                                NoiseSource& noise) {
  internal::Require(x.size() == w.cells(), ErrorCode::kDimensionMismatch, "data vector length differs from cell count");
  const Matrix& rows = w.rows();
  const double sigma = params.NoiseScale(Sensitivity(w, Norm::kL2));
  return rows * x + sigma * noise.Draw(rows.rows());
}

namespace internal {

inline double ExplicitSupportResidual(const Matrix& w, const Matrix& a, const Matrix& a_pinv) {
  const double scale = w.norm();
  if (scale == 0.0) return 0.0;
  return (w * a_pinv * a - w).norm() / scale;
}

}  // namespace internal

// The extended matrix mechanism: strategy answers A x + noise are computed
// privately, then mapped to the workload through W A^+. Equivalent to
// W x + W A^+ Normal(sigma)^p with sigma = Delta_A * sqrt(P).
inline Vector MatrixMechanism(const QueryMatrix& w, const QueryMatrix& a, const Vector& x,
                              const PrivacyParams& params, NoiseSource& noise) {
  internal::Require(w.cells() == a.cells(), ErrorCode::kDimensionMismatch, "workload and strategy differ in cells");
  internal::Require(x.size() == w.cells(), ErrorCode::kDimensionMismatch, "data vector length differs from cell count");
  const Matrix& wr = w.rows();
  const Matrix& ar = a.rows();
  const Matrix a_pinv = PseudoInverse(ar);
  const double residual = internal::ExplicitSupportResidual(wr, ar, a_pinv);
  internal::Require(residual <= kExplicitSupportRelTol, ErrorCode::kSupportViolation,
                    "strategy cannot represent the workload (residual " + std::to_string(residual) + ")");
  const double sigma = params.NoiseScale(Sensitivity(a, Norm::kL2));
  return wr * x + wr * (a_pinv * (sigma * noise.Draw(ar.rows())));
}

struct StrategyErrorReport {
  Magnitude sensitivity_l2_sq;
  std::optional<double> sensitivity_l1;
  Magnitude total_error;
  double support_residual = 0.0;
  std::optional<double> ratio_to_svdb;

  double sensitivity_l2() const { return sensitivity_l2_sq.sqrt().value(); }
};

namespace internal {

struct ErrorTerms {
  Magnitude sensitivity_sq;  // Delta_A^2
  Magnitude trace;           // ||W A^+||_F^2 = trace(G_W pinv(G_A))
  double support_residual = 0.0;
};

inline bool SameKroneckerShape(const QueryMatrix& w, const QueryMatrix& a) {
  if (!w.is_kronecker() || !a.is_kronecker() || w.factors().size() != a.factors().size()) return false;
  for (std::size_t k = 0; k < w.factors().size(); ++k) {
    if (w.factors()[k].cells() != a.factors()[k].cells()) return false;
  }
  return true;
}

// Every quantity factorizes over matching Kronecker factors: the pseudoinverse
// and the range projector of a Kronecker product are the products of the
// factors', and so are traces and the largest diagonal of non-negative
// diagonals.
inline ErrorTerms ComputeErrorTerms(const QueryMatrix& w, const QueryMatrix& a) {
  Require(w.cells() == a.cells(), ErrorCode::kDimensionMismatch, "workload and strategy differ in cells");
  if (SameKroneckerShape(w, a)) {
    ErrorTerms out{Magnitude::One(), Magnitude::One(), 0.0};
    double represented = 1.0;
    for (std::size_t k = 0; k < w.factors().size(); ++k) {
      const ErrorTerms f = ComputeErrorTerms(w.factors()[k], a.factors()[k]);
      out.sensitivity_sq *= f.sensitivity_sq;
      out.trace *= f.trace;
      represented *= 1.0 - f.support_residual;
    }
    out.support_residual = 1.0 - represented;
    return out;
  }
  const PinvTraceResult r = PinvTraceWithSupport(w.unit_gram(), a.unit_gram());
  ErrorTerms out;
  out.sensitivity_sq = a.max_column_norm_sq();
  out.trace = Magnitude::FromValue(std::max(0.0, r.trace)) * w.scale() / a.scale();
  out.support_residual = r.support_residual;
  return out;
}

}  // namespace internal

// Total mean squared error of answering W through strategy A:
// P * Delta_A^2 * trace(G_W pinv(G_A)). Works on Gram-only and Kronecker
// forms. ratio_to_svdb is left empty; EvaluateStrategy fills it.
inline StrategyErrorReport AnalyticTotalError(const QueryMatrix& w, const QueryMatrix& a,
                                              const PrivacyParams& params) {
  const internal::ErrorTerms terms = internal::ComputeErrorTerms(w, a);
  internal::Require(terms.support_residual <= kSupportRelTol, ErrorCode::kSupportViolation,
                    "strategy cannot represent the workload (relative trace residual " +
                        std::to_string(terms.support_residual) + ")");
  StrategyErrorReport report;
  report.sensitivity_l2_sq = terms.sensitivity_sq;
  if (a.is_explicit()) report.sensitivity_l1 = Sensitivity(a, Norm::kL1);
  report.total_error = Magnitude::FromValue(params.multiplier) * terms.sensitivity_sq * terms.trace;
  report.support_residual = terms.support_residual;
  return report;
}

// Appends diag(sqrt(Delta^2 - ||a_i||^2)) below A so every column reaches the
// sensitivity. Rows that would be zero are omitted. Sensitivity is unchanged
// and the error of any supported workload cannot grow.
inline Matrix EqualizeColumns(const Matrix& a) {
  internal::Require(a.allFinite(), ErrorCode::kNonFinite, "strategy has non-finite entries");
  if (a.size() == 0) return a;
  const Eigen::RowVectorXd norms = a.colwise().squaredNorm();
  const double top = norms.maxCoeff();
  std::vector<std::pair<Index, double>> extra;
  for (Index i = 0; i < a.cols(); ++i) {
    const double gap = top - norms(i);
    if (gap > 1e-12 * top) extra.emplace_back(i, std::sqrt(gap));
  }
  Matrix out = Matrix::Zero(a.rows() + static_cast<Index>(extra.size()), a.cols());
  out.topRows(a.rows()) = a;
  for (std::size_t k = 0; k < extra.size(); ++k) {
    out(a.rows() + static_cast<Index>(k), extra[k].first) = extra[k].second;
  }
  return out;
}

struct EmpiricalErrorResult {
  double mean = 0.0;
  double standard_error = 0.0;
};

// Monte-Carlo estimate of the total squared error: trial t draws its noise
// from noise.Split(t) and the mean and its standard error are formed in trial
// order, so the result is independent of the thread count.
inline EmpiricalErrorResult EmpiricalError(const QueryMatrix& w, const QueryMatrix& a, const Vector& x,
                                           const PrivacyParams& params, std::int64_t trials,
                                           const NoiseSource& noise, unsigned threads = 1) {
  internal::Require(trials >= 2, ErrorCode::kInvalidArgument, "at least two trials are required");
  internal::Require(w.cells() == a.cells(), ErrorCode::kDimensionMismatch, "workload and strategy differ in cells");
  internal::Require(x.size() == w.cells(), ErrorCode::kDimensionMismatch, "data vector length differs from cell count");
  const Matrix& wr = w.rows();
  const Matrix& ar = a.rows();
  const Matrix a_pinv = PseudoInverse(ar);
  const double residual = internal::ExplicitSupportResidual(wr, ar, a_pinv);
  internal::Require(residual <= kExplicitSupportRelTol, ErrorCode::kSupportViolation,
                    "strategy cannot represent the workload (residual " + std::to_string(residual) + ")");
  const Matrix transfer = wr * a_pinv;
  const Vector truth = wr * x;
  const double sigma = params.NoiseScale(Sensitivity(a, Norm::kL2));

  std::vector<double> errors(static_cast<std::size_t>(trials));
  auto run = [&](std::int64_t begin, std::int64_t end) {
    for (std::int64_t t = begin; t < end; ++t) {
      NoiseSource source = noise.Split(static_cast<std::uint64_t>(t));
      const Vector noisy = truth + transfer * (sigma * source.Draw(ar.rows()));
      errors[static_cast<std::size_t>(t)] = (noisy - truth).squaredNorm();
    }
  };
  threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(trials)));
  if (threads == 1) {
    run(0, trials);
  } else {
    std::vector<std::thread> pool;
    const std::int64_t chunk = (trials + threads - 1) / threads;
    for (unsigned k = 0; k < threads; ++k) {
      const std::int64_t begin = static_cast<std::int64_t>(k) * chunk;
      const std::int64_t end = std::min(trials, begin + chunk);
      if (begin < end) pool.emplace_back(run, begin, end);
    }
    for (auto& t : pool) t.join();
  }

  double sum = 0.0;
  for (double e : errors) sum += e;
  const double mean = sum / static_cast<double>(trials);
  double ss = 0.0;
  for (double e : errors) ss += (e - mean) * (e - mean);
  const double var = ss / static_cast<double>(trials - 1);
  return {mean, std::sqrt(var / static_cast<double>(trials))};
}

}  // namespace mmbound

#endif  // MMBOUND_MECHANISM_HPP_
