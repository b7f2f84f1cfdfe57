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

#include "mmbound/io.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include "mmbound/report_json.hpp"
#include "oracles.hpp"
#include "test_util.hpp"

namespace mmbound {
namespace {

TEST(WorkloadCsvTest, RoundTripIsBitExact) {
  std::mt19937_64 rng(61);
  for (int trial = 0; trial < 20; ++trial) {
    const Matrix rows = oracle::RandomMatrix(rng, 1 + trial % 5, 1 + trial % 7) * std::pow(10.0, trial - 10);
    const Workload w = Workload::FromQueries(rows);
    std::stringstream s;
    WriteWorkloadCsv(s, w);
    const Workload back = ReadWorkloadCsv(s);
    EXPECT_EQ(back.rows(), w.rows());
  }
}

TEST(WorkloadCsvTest, Format) {
  std::stringstream s;
  WriteWorkloadCsv(s, AllRange({2}));
  EXPECT_EQ(s.str(), "n=2\n1,0\n0,1\n1,1\n");
}

TEST(WorkloadCsvTest, GramHeaderGivesGramOnly) {
  std::stringstream s("gram n=2\n2,1\n1,2\n");
  const Workload w = ReadWorkloadCsv(s);
  EXPECT_FALSE(w.is_explicit());
  EXPECT_EQ(w.gram().entries(), AllRange({2}).gram().entries());
}

TEST(WorkloadCsvTest, ParseErrors) {
  auto parse = [](const std::string& text) {
    std::stringstream s(text);
    return ReadWorkloadCsv(s);
  };
  EXPECT_MM_ERROR(parse(""), ErrorCode::kParse);
  EXPECT_MM_ERROR(parse("m=2\n1,2\n"), ErrorCode::kParse);
  EXPECT_MM_ERROR(parse("n=2\n1,2,3\n"), ErrorCode::kParse);
  EXPECT_MM_ERROR(parse("n=2\n1,x\n"), ErrorCode::kParse);
  EXPECT_MM_ERROR(parse("n=2\n1,inf\n"), ErrorCode::kParse);
  EXPECT_MM_ERROR(parse("n=2\n"), ErrorCode::kParse);
  EXPECT_MM_ERROR(parse("gram n=2\n1,2\n3,4\n"), ErrorCode::kNonSymmetric);
}

TEST(GramCsvTest, RoundTrip) {
  std::mt19937_64 rng(62);
  const Matrix b = oracle::RandomMatrix(rng, 4, 4);
  const SymMatrix g(b.transpose() * b);
  std::stringstream s;
  WriteGramCsv(s, g);
  EXPECT_EQ(ReadGramCsv(s).entries(), g.entries());
}

TEST(StrategyCsvTest, RoundTrip) {
  const Strategy h = HaarStrategy(8);
  std::stringstream s;
  WriteStrategyCsv(s, h);
  EXPECT_EQ(s.str().rfind("strategy n=8\n", 0), 0u);
  const Strategy back = ReadStrategyCsv(s);
  EXPECT_EQ(back.rows(), h.rows());
  EXPECT_EQ(back.kind(), StrategyKind::kCustom);
}

TEST(DataCsvTest, RoundTripAndValidation) {
  Vector x(3);
  x << 0.0, 1.5, 1e300;
  std::stringstream s;
  WriteDataCsv(s, x);
  EXPECT_EQ(ReadDataCsv(s), x);
  std::stringstream neg("1\n-2\n");
  EXPECT_MM_ERROR(ReadDataCsv(neg), ErrorCode::kParse);
}

TEST(ProjectionCsvTest, OneBasedIndices) {
  std::stringstream s("1\n2,3\n");
  const ProjectionSet f = ReadProjectionCsv(s);
  EXPECT_EQ(f.subsets, (std::vector<std::vector<Index>>{{0}, {1, 2}}));
  std::stringstream out;
  WriteProjectionCsv(out, f);
  EXPECT_EQ(out.str(), "1\n2,3\n");
  std::stringstream zero("0\n");
  EXPECT_MM_ERROR(ReadProjectionCsv(zero), ErrorCode::kParse);
}

TEST(FormatTest, Magnitudes) {
  EXPECT_EQ(FormatMagnitude(Magnitude::FromValue(3.0342e7)), "3.03420e+07");
  EXPECT_EQ(FormatMagnitude(Magnitude::FromLog10(310.5)), "3.16228e+310");
  EXPECT_EQ(FormatMagnitude(Magnitude::FromValue(9.999999999)), "1.00000e+01");
  EXPECT_EQ(FormatReal(0.1), "0.10000000000000001");
}

TEST(ReportJsonTest, BoundFieldNames) {
  ProjectedBound p{Magnitude::FromValue(1.01), {0}, false};
  const nlohmann::json j = ToJson(ComputeBoundReport(AllRange({2}), p, 1.0));
  std::vector<std::string> keys;
  for (const auto& [k, v] : j.items()) keys.push_back(k);
  std::sort(keys.begin(), keys.end());
  EXPECT_EQ(keys, (std::vector<std::string>{"diag_spread", "l1_geometric", "l1_svdb", "looseness_factor",
                                            "projected_subset", "projected_svdb", "svdb", "svdb_log10", "tight"}));
  EXPECT_EQ(j["projected_subset"], nlohmann::json::array({1}));
  EXPECT_TRUE(j["tight"].get<bool>());
}

TEST(ReportJsonTest, OverflowBecomesNull) {
  const nlohmann::json j = ToJson(ComputeBoundReport(AllPredicateGram(1024)));
  EXPECT_TRUE(j["svdb"].is_null());
  EXPECT_NEAR(j["svdb_log10"].get<double>(), 310.689, 1e-3);
  EXPECT_TRUE(j["projected_svdb"].is_null());
  EXPECT_TRUE(j["l1_svdb"].is_null());
}

}  // namespace
}  // namespace mmbound
