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

#include "mmbound/mechanism.hpp"

#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "mmbound/workloads.hpp"
#include "oracles.hpp"
#include "test_util.hpp"

namespace mmbound {
namespace {

TEST(PrivacyParamsTest, Multiplier) {
  const PrivacyParams p = PrivacyParams::Gaussian(1.0, 1e-5);
  EXPECT_DOUBLE_EQ(p.multiplier, 2.0 * std::log(2e5));
  EXPECT_DOUBLE_EQ(PrivacyParams::Gaussian(0.5, 1e-5).multiplier, 4.0 * p.multiplier);
  EXPECT_DOUBLE_EQ(p.NoiseScale(3.0), 3.0 * std::sqrt(p.multiplier));
  EXPECT_MM_ERROR(PrivacyParams::Gaussian(0.0, 1e-5), ErrorCode::kInvalidArgument);
  EXPECT_MM_ERROR(PrivacyParams::Gaussian(1.0, 1.0), ErrorCode::kInvalidArgument);
}

TEST(SensitivityTest, ColumnNorms) {
  Matrix a(2, 3);
  a << 1, -2, 0, 2, 2, 3;
  const QueryMatrix q = QueryMatrix::FromRows(a);
  EXPECT_DOUBLE_EQ(Sensitivity(q, Norm::kL1), 4.0);
  EXPECT_NEAR(Sensitivity(q, Norm::kL2), std::sqrt(9.0), 1e-12);
  const QueryMatrix g = QueryMatrix::FromGram(q.gram());
  EXPECT_NEAR(Sensitivity(g, Norm::kL2), 3.0, 1e-12);
  EXPECT_MM_ERROR(Sensitivity(g, Norm::kL1), ErrorCode::kGramOnlyL1);
}

TEST(MechanismTest, ZeroNoiseIsExact) {
  const Workload w = AllRange({4});
  const Vector x = Vector::LinSpaced(4, 1.0, 4.0);
  NoiseSource zero = NoiseSource::Zero();
  const PrivacyParams p = PrivacyParams::Gaussian(1.0, 1e-5);
  EXPECT_EQ(GaussianMechanism(w, x, p, zero), w.rows() * x);
  const QueryMatrix id = QueryMatrix::FromRows(Matrix::Identity(4, 4));
  EXPECT_LT((MatrixMechanism(w, id, x, p, zero) - w.rows() * x).norm(), 1e-12);
}

TEST(MechanismTest, RejectsUnsupportedStrategy) {
  const Workload w = AllRange({3});
  Matrix a = Matrix::Zero(1, 3);
  a(0, 0) = 1.0;
  NoiseSource zero = NoiseSource::Zero();
  EXPECT_MM_ERROR(MatrixMechanism(w, QueryMatrix::FromRows(a), Vector::Ones(3), PrivacyParams::Unit(), zero),
                  ErrorCode::kSupportViolation);
  EXPECT_MM_ERROR(AnalyticTotalError(w, QueryMatrix::FromRows(a), PrivacyParams::Unit()),
                  ErrorCode::kSupportViolation);
  EXPECT_MM_ERROR(MatrixMechanism(w, QueryMatrix::FromRows(Matrix::Identity(2, 2)), Vector::Ones(3),
                                  PrivacyParams::Unit(), zero),
                  ErrorCode::kDimensionMismatch);
}

TEST(AnalyticErrorTest, IdentityOnRanges) {
  const PrivacyParams p = PrivacyParams::Gaussian(1.0, 1e-5);
  const StrategyErrorReport r = AnalyticTotalError(AllRange({4}), QueryMatrix::FromRows(Matrix::Identity(4, 4)), p);
  EXPECT_NEAR(r.total_error.value(), 2.0 * std::log(2e5) * 20.0, 1e-9);
  EXPECT_DOUBLE_EQ(r.sensitivity_l2(), 1.0);
  ASSERT_TRUE(r.sensitivity_l1.has_value());
  EXPECT_FALSE(r.ratio_to_svdb.has_value());
}

TEST(AnalyticErrorTest, MatchesOracle) {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 2 + trial % 6;
    const Matrix w = oracle::RandomMatrix(rng, n + 1, n);
    const Matrix a = oracle::RandomMatrix(rng, n + trial % 3, n);
    const double got = AnalyticTotalError(QueryMatrix::FromRows(w), QueryMatrix::FromRows(a), PrivacyParams::Unit())
                           .total_error.value();
    EXPECT_LT(oracle::RelDiff(got, oracle::TotalError(oracle::Gram(w), oracle::Gram(a))), 1e-8);
  }
}

TEST(AnalyticErrorTest, GramOnlyAndExplicitAgree) {
  std::mt19937_64 rng(18);
  const Matrix w = oracle::RandomMatrix(rng, 3, 5);
  const Matrix a = oracle::RandomMatrix(rng, 2, 5) ;
  Matrix a_full(5, 5);
  a_full << a, w;  // rank 5 with probability one
  const QueryMatrix qw = QueryMatrix::FromRows(w);
  const QueryMatrix qa = QueryMatrix::FromRows(a_full);
  const double e1 = AnalyticTotalError(qw, qa, PrivacyParams::Unit()).total_error.value();
  const double e2 = AnalyticTotalError(QueryMatrix::FromGram(qw.gram()), QueryMatrix::FromGram(qa.gram(), 0.0),
                                       PrivacyParams::Unit())
                        .total_error.value();
  EXPECT_LT(oracle::RelDiff(e1, e2), 1e-10);
}

TEST(AnalyticErrorTest, KroneckerFactorsMatchMaterialized) {
  const QueryMatrix w1 = AllRange({3});
  const QueryMatrix w2 = AllRange({4});
  Matrix h(3, 2);
  h << 1, 1, 1, 0, 0, 1;
  const QueryMatrix a1 = QueryMatrix::FromRows(Matrix::Identity(3, 3));
  const QueryMatrix a2 = QueryMatrix::FromRows(Kronecker(h, h));
  const QueryMatrix kw = QueryMatrix::KroneckerOf({w1, w2});
  const QueryMatrix ka = QueryMatrix::KroneckerOf({a1, a2});
  const double factored = AnalyticTotalError(kw, ka, PrivacyParams::Unit()).total_error.value();
  const double direct = oracle::TotalError(Kronecker(w1.gram().entries(), w2.gram().entries()),
                                           oracle::Gram(Kronecker(a1.rows(), a2.rows())));
  EXPECT_LT(oracle::RelDiff(factored, direct), 1e-10);
}

TEST(AnalyticErrorTest, ScaleInvariance) {
  std::mt19937_64 rng(19);
  const Matrix w = oracle::RandomMatrix(rng, 4, 4);
  const Matrix a = oracle::RandomMatrix(rng, 6, 4);
  const double e1 = AnalyticTotalError(QueryMatrix::FromRows(w), QueryMatrix::FromRows(a), PrivacyParams::Unit())
                        .total_error.value();
  const double e2 =
      AnalyticTotalError(QueryMatrix::FromRows(w), QueryMatrix::FromRows(7.5 * a), PrivacyParams::Unit())
          .total_error.value();
  EXPECT_LT(oracle::RelDiff(e1, e2), 1e-9);
}

TEST(EqualizeColumnsTest, RaisesShortColumns) {
  Matrix a(2, 2);
  a << 1, 0, 1, 1;
  const Matrix e = EqualizeColumns(a);
  ASSERT_EQ(e.rows(), 3);
  EXPECT_DOUBLE_EQ(e(2, 1), 1.0);
  const Eigen::RowVectorXd norms = e.colwise().squaredNorm();
  EXPECT_DOUBLE_EQ(norms(0), norms(1));
}

TEST(EqualizeColumnsTest, NeverHurts) {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 30; ++trial) {
    const int n = 2 + trial % 5;
    const Matrix w = oracle::RandomMatrix(rng, n, n);
    Matrix a = oracle::RandomMatrix(rng, n + 1, n);
    a.col(0) *= 3.0;
    const QueryMatrix qa = QueryMatrix::FromRows(a);
    const QueryMatrix qe = QueryMatrix::FromRows(EqualizeColumns(a));
    const auto before = AnalyticTotalError(QueryMatrix::FromRows(w), qa, PrivacyParams::Unit());
    const auto after = AnalyticTotalError(QueryMatrix::FromRows(w), qe, PrivacyParams::Unit());
    EXPECT_LE(after.total_error.value(), before.total_error.value() * (1 + 1e-9));
    EXPECT_NEAR(Sensitivity(qe, Norm::kL2), Sensitivity(qa, Norm::kL2), 1e-9 * Sensitivity(qa, Norm::kL2));
  }
}

TEST(NoiseSourceTest, Deterministic) {
  NoiseSource a = NoiseSource::Seeded(5);
  NoiseSource b = NoiseSource::Seeded(5);
  EXPECT_EQ(a.Draw(10), b.Draw(10));
  NoiseSource c = NoiseSource::Seeded(5).Split(1);
  NoiseSource d = NoiseSource::Seeded(5).Split(2);
  EXPECT_NE(c.Draw(4), d.Draw(4));
  EXPECT_EQ(NoiseSource::Zero().Split(3).Draw(3), Vector::Zero(3));
}

TEST(EmpiricalErrorTest, ThreadCountDoesNotMatter) {
  const Workload w = AllRange({5});
  const QueryMatrix a = QueryMatrix::FromRows(Matrix::Identity(5, 5));
  const Vector x = Vector::Ones(5);
  const auto noise = NoiseSource::Seeded(99);
  const auto r1 = EmpiricalError(w, a, x, PrivacyParams::Unit(), 500, noise, 1);
  const auto r3 = EmpiricalError(w, a, x, PrivacyParams::Unit(), 500, noise, 3);
  EXPECT_EQ(r1.mean, r3.mean);
  EXPECT_EQ(r1.standard_error, r3.standard_error);
}

TEST(EmpiricalErrorTest, AgreesWithAnalytic) {
  const Workload w = AllRange({6});
  const QueryMatrix a = QueryMatrix::FromRows(Kronecker(Matrix::Identity(3, 3), (Matrix(3, 2) << 1, 1, 1, 0, 0, 1).finished()));
  const PrivacyParams p = PrivacyParams::Gaussian(1.0, 1e-3);
  const double analytic = AnalyticTotalError(w, a, p).total_error.value();
  const auto r = EmpiricalError(w, a, Vector::Ones(6), p, 4000, NoiseSource::Seeded(1), 2);
  EXPECT_LT(std::abs(r.mean - analytic), 4.0 * r.standard_error);
  EXPECT_MM_ERROR(EmpiricalError(w, a, Vector::Ones(6), p, 1, NoiseSource::Seeded(1)), ErrorCode::kInvalidArgument);
}

TEST(EmpiricalErrorTest, ZeroNoiseHasZeroError) {
  const Workload w = AllRange({3});
  const auto r = EmpiricalError(w, QueryMatrix::FromRows(Matrix::Identity(3, 3)), Vector::Ones(3),
                                PrivacyParams::Unit(), 10, NoiseSource::Zero());
  EXPECT_EQ(r.mean, 0.0);
  EXPECT_EQ(r.standard_error, 0.0);
}

}  // namespace
}  // namespace mmbound
