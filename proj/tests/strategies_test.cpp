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

#include "mmbound/strategies.hpp"

#include <cmath>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "mmbound/bounds.hpp"
#include "mmbound/workloads.hpp"
#include "oracles.hpp"
#include "test_util.hpp"

namespace mmbound {
namespace {

const PrivacyParams kUnit = PrivacyParams::Unit();

Matrix Rows(std::initializer_list<std::initializer_list<double>> rows) {
  Matrix m(static_cast<Index>(rows.size()), static_cast<Index>(rows.begin()->size()));
  Index r = 0;
  for (const auto& row : rows) {
    Index c = 0;
    for (double v : row) m(r, c++) = v;
    ++r;
  }
  return m;
}

TEST(HierarchicalTest, FourCells) {
  const Strategy s = HierarchicalStrategy(4);
  EXPECT_EQ(s.kind(), StrategyKind::kHierarchical);
  EXPECT_EQ(s.rows(), Rows({{1, 1, 1, 1}, {1, 1, 0, 0}, {0, 0, 1, 1}, {1, 0, 0, 0}, {0, 1, 0, 0}, {0, 0, 1, 0}, {0, 0, 0, 1}}));
}

TEST(HierarchicalTest, UnevenSplitsAndFanout) {
  // The last child takes the remainder: [0,5) -> [0,2) [2,5) -> ... -> [3,5) -> [3,4) [4,5).
  const Strategy five = HierarchicalStrategy(5);
  EXPECT_EQ(five.rows().rows(), 9);
  EXPECT_DOUBLE_EQ(five.max_column_norm_sq().value(), 4.0);
  const Strategy nine = HierarchicalStrategy(9, 3);
  EXPECT_EQ(nine.rows().rows(), 13);
  EXPECT_EQ(nine.fanout(), 3);
  EXPECT_DOUBLE_EQ(nine.max_column_norm_sq().value(), 3.0);
  EXPECT_EQ(HierarchicalStrategy(1).rows(), Rows({{1}}));
  EXPECT_MM_ERROR(HierarchicalStrategy(4, 1), ErrorCode::kInvalidArgument);
}

TEST(HierarchicalTest, SensitivityIsLevelCount) {
  EXPECT_DOUBLE_EQ(HierarchicalStrategy(2048).max_column_norm_sq().value(), 12.0);
}

TEST(HaarTest, SmallCases) {
  EXPECT_EQ(HaarStrategy(2).rows(), Rows({{1, 1}, {1, -1}}));
  EXPECT_EQ(HaarStrategy(4).rows(), Rows({{1, 1, 1, 1}, {1, 1, -1, -1}, {1, -1, 0, 0}, {0, 0, 1, -1}}));
  EXPECT_EQ(HaarStrategy(1).rows(), Rows({{1}}));
  EXPECT_MM_ERROR(HaarStrategy(6), ErrorCode::kNotPowerOfTwo);
}

TEST(HaarTest, EveryColumnHasOneEntryPerLevel) {
  const Strategy s = HaarStrategy(64);
  for (Index c = 0; c < 64; ++c) {
    EXPECT_EQ((s.rows().col(c).array() != 0.0).count(), 7);
  }
  EXPECT_DOUBLE_EQ(s.max_column_norm_sq().value(), 7.0);
}

TEST(SqrtStrategyTest, Identity) {
  const Strategy s = SqrtStrategy(SymMatrix::Identity(6));
  const Workload id = Workload::FromQueries(Matrix::Identity(6, 6));
  EXPECT_NEAR(EvaluateStrategy(id, s, kUnit).total_error.value(), 6.0, 1e-12);
}

TEST(SqrtStrategyTest, AchievesBoundOnTightWorkload) {
  const Workload w = AllRange({2});
  const StrategyErrorReport r = EvaluateStrategy(w, SqrtStrategy(w), kUnit);
  EXPECT_NEAR(r.total_error.value(), 3.7320508, 1e-6);
  EXPECT_NEAR(*r.ratio_to_svdb, 1.0, 1e-9);
}

TEST(SqrtStrategyTest, RatioIsLoosenessFactor) {
  std::mt19937_64 rng(41);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 2 + trial % 7;
    const Workload w = Workload::FromQueries(oracle::RandomMatrix(rng, 1 + trial % 9, n));
    const StrategyErrorReport r = EvaluateStrategy(w, SqrtStrategy(w), kUnit);
    EXPECT_LT(oracle::RelDiff(*r.ratio_to_svdb, LoosenessFactor(w)), 1e-9);
    const StrategyErrorReport e = EvaluateStrategy(w, ExplicitSqrtStrategy(w.gram()), kUnit);
    EXPECT_LT(oracle::RelDiff(e.total_error.value(), r.total_error.value()), 1e-8);
  }
}

TEST(SqrtStrategyTest, LooseWorkloadStaysAboveBound) {
  Matrix rows = Matrix::Zero(2, 16);
  rows(0, 0) = 1.0;
  rows.row(1).setConstant(0.1);
  const Workload w = Workload::FromQueries(rows);
  const PrivacyParams p = PrivacyParams::Gaussian(1.0, 1e-5);
  const StrategyErrorReport r = EvaluateStrategy(w, SqrtStrategy(w), p);
  EXPECT_LT(oracle::RelDiff(r.total_error.value(), LoosenessUpperBound(w.gram(), p).value()), 1e-9);
  EXPECT_GT(*r.ratio_to_svdb, 1.01);
}

TEST(SqrtStrategyTest, StructuredForms) {
  const Workload pred = AllPredicateGram(1024);
  const Strategy s = SqrtStrategy(pred);
  ASSERT_TRUE(s.variable_agnostic().has_value());
  EXPECT_NEAR(*EvaluateStrategy(pred, s, kUnit).ratio_to_svdb, 1.0, 1e-9);
  const Workload grid = AllRange({8, 4});
  const Workload kgrid(QueryMatrix::KroneckerOf({AllRange({8}), AllRange({4})}), {8, 4});
  const double dense = *EvaluateStrategy(grid, SqrtStrategy(grid), kUnit).ratio_to_svdb;
  const double factored = *EvaluateStrategy(kgrid, SqrtStrategy(kgrid), kUnit).ratio_to_svdb;
  EXPECT_LT(oracle::RelDiff(dense, factored), 1e-9);
}

TEST(EvaluateTest, SmallRatios) {
  EXPECT_NEAR(*EvaluateStrategy(AllRange({2}), IdentityStrategy(2), kUnit).ratio_to_svdb, 4.0 / 3.7320508, 1e-6);
}

TEST(EvaluateTest, LowerBoundLaw) {
  std::mt19937_64 rng(42);
  for (int trial = 0; trial < 50; ++trial) {
    const int n = 1 + trial % 8;
    const Workload w = Workload::FromQueries(oracle::RandomMatrix(rng, 1 + trial % 5, n));
    const Strategy a = CustomStrategy(oracle::RandomMatrix(rng, n + trial % 3, n));
    EXPECT_GE(*EvaluateStrategy(w, a, kUnit).ratio_to_svdb, 1.0 - 1e-6);
  }
}

TEST(EvaluateTest, RescalingLeavesReportUnchanged) {
  std::mt19937_64 rng(43);
  const Workload w = Workload::FromQueries(oracle::RandomMatrix(rng, 4, 5));
  const Matrix a = oracle::RandomMatrix(rng, 7, 5);
  const auto r1 = EvaluateStrategy(w, CustomStrategy(a), kUnit);
  const auto r2 = EvaluateStrategy(w, CustomStrategy(0.01 * a), kUnit);
  EXPECT_LT(oracle::RelDiff(r1.total_error.value(), r2.total_error.value()), 1e-9);
  EXPECT_LT(oracle::RelDiff(*r1.ratio_to_svdb, *r2.ratio_to_svdb), 1e-9);
}

TEST(EvaluateTest, ConstructorsSupportTheirWorkloads) {
  const Workload w = AllRange({16});
  for (const Strategy& a : {IdentityStrategy(16), HierarchicalStrategy(16), HierarchicalStrategy(16, 4),
                            HaarStrategy(16), SqrtStrategy(w), WorkloadStrategy(w)}) {
    EXPECT_LE(EvaluateStrategy(w, a, kUnit).support_residual, 1e-9) << StrategyKindName(a.kind());
  }
}

TEST(EvaluateTest, SupportViolation) {
  EXPECT_MM_ERROR(EvaluateStrategy(AllRange({3}), CustomStrategy(Rows({{1, 1, 1}})), kUnit),
                  ErrorCode::kSupportViolation);
}

TEST(EvaluateTest, PublishedRatios) {
  const Workload pred = AllPredicateGram(1024);
  EXPECT_NEAR(*EvaluateStrategy(pred, IdentityStrategy(1024), kUnit).ratio_to_svdb / 1.884, 1.0, 0.01);
  const Workload grid = AllRange({64, 32});
  const Strategy id = PerDimensionStrategy({64, 32}, [](Index n) { return IdentityStrategy(n); });
  EXPECT_NEAR(*EvaluateStrategy(grid, id, kUnit).ratio_to_svdb / 12.11, 1.0, 0.01);
}

TEST(EvaluateTest, PublishedTreeRatios) {
  const Workload w = AllRange({2048});
  EXPECT_NEAR(*EvaluateStrategy(w, HierarchicalStrategy(2048), kUnit).ratio_to_svdb / 1.776, 1.0, 0.02);
  EXPECT_NEAR(*EvaluateStrategy(w, HaarStrategy(2048), kUnit).ratio_to_svdb / 1.545, 1.0, 0.02);
}

TEST(PerDimensionTest, MatchesExplicitKronecker) {
  const Strategy k = PerDimensionStrategy({4, 2}, [](Index n) { return HaarStrategy(n); });
  EXPECT_EQ(k.kind(), StrategyKind::kHaar);
  ASSERT_TRUE(k.is_kronecker());
  const Workload w = AllRange({4, 2});
  const Strategy e = CustomStrategy(Kronecker(HaarStrategy(4).rows(), HaarStrategy(2).rows()));
  EXPECT_LT(oracle::RelDiff(EvaluateStrategy(w, k, kUnit).total_error.value(),
                            EvaluateStrategy(w, e, kUnit).total_error.value()),
            1e-10);
}

}  // namespace
}  // namespace mmbound
