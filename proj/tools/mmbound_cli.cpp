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

// Command-line front end: bounds, strategy evaluation, Monte-Carlo runs and
// the four-workload comparison table.

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "mmbound/mmbound.hpp"
#include "mmbound/report_json.hpp"

namespace {

using mmbound::ErrorCode;
using mmbound::Index;

struct Options {
  std::string workload = "all-range";
  std::string dims;
  Index cells = 0;
  std::string cuboids;
  std::string weights;
  std::string strategy = "identity";
  int fanout = 2;
  double epsilon = 1.0;
  double delta = 1e-5;
  std::int64_t trials = 1000;
  std::uint64_t seed = 0;
  std::string projections = "none";
  std::string data;
  std::string out;
  unsigned threads = std::max(1u, std::thread::hardware_concurrency());
};

int ExitCodeFor(ErrorCode code) {
  switch (code) {
    case ErrorCode::kSupportViolation:
      return 4;
    case ErrorCode::kDimensionMismatch:
      return 5;
    case ErrorCode::kNonFinite:
    case ErrorCode::kNotPsd:
    case ErrorCode::kTooLarge:
    case ErrorCode::kFamilyTooLarge:
    case ErrorCode::kSubsetTooLarge:
      return 3;
    default:
      return 2;
  }
}

[[noreturn]] void Invalid(const std::string& what) { mmbound::internal::Fail(ErrorCode::kInvalidArgument, what); }

std::vector<std::string> Split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream in(s);
  std::string item;
  while (std::getline(in, item, sep)) out.push_back(item);
  if (!s.empty() && s.back() == sep) out.emplace_back();
  return out;
}

Index ToIndex(const std::string& s) {
  std::size_t used = 0;
  long long v = 0;
  try {
    v = std::stoll(s, &used);
  } catch (const std::exception&) {
    Invalid("not an integer: '" + s + "'");
  }
  if (used != s.size()) Invalid("not an integer: '" + s + "'");
  return static_cast<Index>(v);
}

std::vector<Index> ParseIndexList(const std::string& s) {
  std::vector<Index> out;
  for (const auto& item : Split(s, ',')) out.push_back(ToIndex(item));
  return out;
}

std::vector<Index> Dims(const Options& o) {
  if (!o.dims.empty()) return ParseIndexList(o.dims);
  if (o.cells > 0) return {o.cells};
  Invalid("--dims or --cells is required");
}

bool HasPrefix(const std::string& s, const std::string& prefix) { return s.rfind(prefix, 0) == 0; }

// Cuboids are ';'-separated lists of 1-based attributes; '-' is the empty
// cuboid (the grand total).
std::vector<std::vector<Index>> ParseCuboids(const std::string& s) {
  if (s.empty()) Invalid("--cuboids is required for data-cube");
  std::vector<std::vector<Index>> out;
  for (const auto& item : Split(s, ';')) {
    std::vector<Index> cuboid;
    if (item != "-" && !item.empty()) {
      for (Index a : ParseIndexList(item)) cuboid.push_back(a - 1);
    }
    out.push_back(std::move(cuboid));
  }
  return out;
}

mmbound::Workload BuildWorkload(const Options& o, bool need_explicit) {
  if (HasPrefix(o.workload, "csv:")) return mmbound::ReadWorkloadFile(o.workload.substr(4));
  if (o.workload == "all-range") return mmbound::AllRange(Dims(o));
  if (o.workload == "all-predicate") {
    const Index n = o.cells > 0 ? o.cells : Dims(o).front();
    return need_explicit ? mmbound::AllPredicateExplicit(n) : mmbound::AllPredicateGram(n);
  }
  if (o.workload == "data-cube") {
    std::vector<double> weights;
    if (!o.weights.empty()) {
      for (const auto& w : Split(o.weights, ',')) {
        try {
          weights.push_back(std::stod(w));
        } catch (const std::exception&) {
          Invalid("bad weight '" + w + "'");
        }
      }
    }
    return mmbound::DataCube(Dims(o), ParseCuboids(o.cuboids), weights);
  }
  Invalid("unknown workload '" + o.workload + "'");
}

// Builtin strategies are built per attribute and combined by Kronecker product
// when the workload is a grid with more than one attribute.
mmbound::Strategy BuildStrategy(const Options& o, const mmbound::Workload& w, bool need_explicit) {
  using mmbound::Strategy;
  if (HasPrefix(o.strategy, "csv:")) return mmbound::ReadStrategyFile(o.strategy.substr(4));
  if (o.strategy == "workload") return mmbound::WorkloadStrategy(w);
  if (o.strategy == "sqrt") {
    return need_explicit ? mmbound::ExplicitSqrtStrategy(w.gram()) : mmbound::SqrtStrategy(w);
  }
  std::function<Strategy(Index)> make;
  if (o.strategy == "identity") {
    make = [](Index n) { return mmbound::IdentityStrategy(n); };
  } else if (o.strategy == "hierarchical") {
    const int fanout = o.fanout;
    make = [fanout](Index n) { return mmbound::HierarchicalStrategy(n, fanout); };
  } else if (o.strategy == "haar") {
    make = [](Index n) { return mmbound::HaarStrategy(n); };
  } else {
    Invalid("unknown strategy '" + o.strategy + "'");
  }
  if (need_explicit || w.dims().size() == 1) {
    if (w.dims().size() == 1) return make(w.cells());
    // Explicit rows of the per-attribute product.
    Strategy s = mmbound::PerDimensionStrategy(w.dims(), make);
    if (s.is_explicit()) return s;
    mmbound::Matrix rows = make(w.dims().front()).rows();
    for (std::size_t k = 1; k < w.dims().size(); ++k) rows = mmbound::Kronecker(rows, make(w.dims()[k]).rows());
    return Strategy(mmbound::QueryMatrix::FromRows(std::move(rows)), s.kind(), s.fanout());
  }
  return mmbound::PerDimensionStrategy(w.dims(), make);
}

mmbound::PrivacyParams Params(const Options& o) { return mmbound::PrivacyParams::Gaussian(o.epsilon, o.delta); }

void Emit(const Options& o, const std::string& text) {
  if (o.out.empty() || o.out == "-") {
    std::cout << text;
    return;
  }
  std::ofstream f(o.out);
  if (!f) mmbound::internal::Fail(ErrorCode::kInvalidArgument, "cannot write " + o.out);
  f << text;
}

std::optional<mmbound::ProjectedBound> Projected(const Options& o, const mmbound::Workload& w) {
  const std::string& p = o.projections;
  if (p == "none") return std::nullopt;
  if (p == "exhaustive") {
    if (w.variable_agnostic()) return mmbound::VariableAgnosticProjectedBound(w);
    return mmbound::ProjectedSingularValueBound(w, mmbound::AllSubsetsFamily(w.cells()), o.threads);
  }
  if (p == "ranges") {
    if (w.is_kronecker() && w.factors().size() == w.dims().size()) {
      std::vector<mmbound::ProjectionSet> families;
      for (Index d : w.dims()) families.push_back(mmbound::RangeProjectionFamily1D(d));
      return mmbound::ProductProjectedSingularValueBound(w, families, o.threads);
    }
    return mmbound::ProjectedSingularValueBound(w, mmbound::RangeProjectionFamily(w.dims()), o.threads);
  }
  if (p == "greedy") return mmbound::GreedyProjectedSingularValueBound(w, 8, o.seed);
  if (HasPrefix(p, "csv:")) {
    return mmbound::ProjectedSingularValueBound(w, mmbound::ReadProjectionFile(p.substr(4)), o.threads);
  }
  Invalid("unknown projection family '" + p + "'");
}

int CmdBound(const Options& o) {
  const mmbound::Workload w = BuildWorkload(o, false);
  const mmbound::BoundReport report = mmbound::ComputeBoundReport(w, Projected(o, w), o.epsilon);
  Emit(o, ToJson(report).dump(2) + "\n");
  std::cerr << "svdb " << mmbound::FormatMagnitude(report.svdb) << (report.tight ? " (tight)" : "")
            << ", looseness factor " << report.looseness_factor;
  if (report.projected) std::cerr << ", projected " << mmbound::FormatMagnitude(report.projected->value);
  std::cerr << "\n";
  return 0;
}

int CmdEval(const Options& o) {
  const mmbound::Workload w = BuildWorkload(o, false);
  const mmbound::Strategy a = BuildStrategy(o, w, false);
  const mmbound::PrivacyParams params = Params(o);
  const mmbound::StrategyErrorReport report = mmbound::EvaluateStrategy(w, a, params);
  nlohmann::json j = ToJson(report);
  j["strategy"] = mmbound::StrategyKindName(a.kind());
  j["epsilon"] = o.epsilon;
  j["delta"] = o.delta;
  j["privacy_multiplier"] = params.multiplier;
  Emit(o, j.dump(2) + "\n");
  std::cerr << mmbound::StrategyKindName(a.kind()) << ": total error " << mmbound::FormatMagnitude(report.total_error);
  if (report.ratio_to_svdb) std::cerr << ", ratio to bound " << *report.ratio_to_svdb;
  std::cerr << "\n";
  return 0;
}

int CmdRun(const Options& o) {
  if (o.trials < 2) Invalid("--trials must be at least 2");
  const mmbound::Workload w = BuildWorkload(o, true);
  const mmbound::Strategy a = BuildStrategy(o, w, true);
  if (!w.is_explicit() || !a.is_explicit()) Invalid("run needs explicit workload and strategy rows");
  mmbound::Vector x;
  if (o.data.empty()) {
    x = mmbound::Vector::Ones(w.cells());
  } else {
    x = mmbound::ReadDataFile(o.data);
  }
  mmbound::internal::Require(x.size() == w.cells(), ErrorCode::kDimensionMismatch,
                             "data vector has " + std::to_string(x.size()) + " entries, workload has " +
                                 std::to_string(w.cells()) + " cells");
  const mmbound::PrivacyParams params = Params(o);
  const mmbound::StrategyErrorReport analytic = mmbound::AnalyticTotalError(w, a, params);
  const auto empirical = mmbound::EmpiricalError(w, a, x, params, o.trials, mmbound::NoiseSource::Seeded(o.seed),
                                                 o.threads);
  const double expected = analytic.total_error.value();
  const double z = empirical.standard_error > 0.0 ? (empirical.mean - expected) / empirical.standard_error : 0.0;
  nlohmann::json j;
  j["trials"] = o.trials;
  j["seed"] = o.seed;
  j["mean"] = empirical.mean;
  j["standard_error"] = empirical.standard_error;
  j["analytic"] = expected;
  j["z_score"] = z;
  Emit(o, j.dump(2) + "\n");
  std::cerr << "empirical " << empirical.mean << " +/- " << empirical.standard_error << " vs analytic " << expected
            << " (z = " << z << ")\n";
  return 0;
}

struct Table2Row {
  std::string name;
  mmbound::Workload workload;
  std::vector<Index> dims;
};

int CmdTable2(const Options& o) {
  using mmbound::Workload;
  const mmbound::PrivacyParams unit = mmbound::PrivacyParams::Unit();
  std::vector<Table2Row> rows;
  rows.push_back({"AllRange(2048)", mmbound::AllRange({2048}), {2048}});
  rows.push_back({"AllRange(64x32)", mmbound::AllRange({64, 32}), {64, 32}});
  rows.push_back({"AllRange(2^10)", mmbound::AllRange(std::vector<Index>(10, 2)), std::vector<Index>(10, 2)});
  rows.push_back({"AllPredicate(1024)", mmbound::AllPredicateGram(1024), {1024}});

  std::ostringstream csv;
  csv << "workload,cells,svdb,svdb_log10,svdb_u_ratio,svdb_u_family,identity,hierarchical,wavelet,eigen_design\n";
  for (const auto& row : rows) {
    const Workload& w = row.workload;
    const mmbound::Magnitude svdb = mmbound::SingularValueBound(w);

    mmbound::ProjectedBound projected;
    std::string family;
    if (w.variable_agnostic()) {
      projected = mmbound::VariableAgnosticProjectedBound(w);
      family = "all subsets (by size)";
    } else if (w.is_kronecker()) {
      std::vector<mmbound::ProjectionSet> families;
      for (Index d : row.dims) families.push_back(mmbound::RangeProjectionFamily1D(d));
      projected = mmbound::ProductProjectedSingularValueBound(w, families, o.threads);
      family = "all ranges";
    } else {
      projected = mmbound::ProjectedSingularValueBound(w, mmbound::CenteredRangeFamily(row.dims.front(), 31),
                                                       o.threads);
      family = "centered ranges (heuristic)";
    }

    Options so = o;
    std::vector<double> ratios;
    for (const char* s : {"identity", "hierarchical", "haar"}) {
      so.strategy = s;
      so.fanout = 2;
      const mmbound::Strategy a = BuildStrategy(so, w, false);
      ratios.push_back(*mmbound::EvaluateStrategy(w, a, unit).ratio_to_svdb);
    }
    char buf[256];
    std::snprintf(buf, sizeof buf, "%s,%lld,%s,%.6f,%.6g,%s,%.6g,%.6g,%.6g,", row.name.c_str(),
                  static_cast<long long>(w.cells()), mmbound::FormatMagnitude(svdb).c_str(), svdb.log10(),
                  mmbound::Ratio(projected.value, svdb), family.c_str(), ratios[0], ratios[1], ratios[2]);
    csv << buf << "not implemented: external mechanism\n";
    std::cerr << row.name << ": svdb " << mmbound::FormatMagnitude(svdb) << ", identity " << ratios[0]
              << ", hierarchical " << ratios[1] << ", wavelet " << ratios[2] << "\n";
  }
  Emit(o, csv.str());
  return 0;
}

void AddWorkloadOptions(CLI::App* cmd, Options& o) {
  cmd->add_option("--workload", o.workload, "all-range | all-predicate | data-cube | csv:<path>");
  cmd->add_option("--dims", o.dims, "domain sizes, comma-separated");
  cmd->add_option("--cells", o.cells, "cell count for one-attribute workloads");
  cmd->add_option("--cuboids", o.cuboids, "data-cube cuboids: ';'-separated 1-based attribute lists, '-' = total");
  cmd->add_option("--weights", o.weights, "data-cube cuboid weights, comma-separated");
}

void AddPrivacyOptions(CLI::App* cmd, Options& o) {
  cmd->add_option("--epsilon", o.epsilon, "privacy parameter epsilon");
  cmd->add_option("--delta", o.delta, "privacy parameter delta");
}

void AddStrategyOptions(CLI::App* cmd, Options& o) {
  cmd->add_option("--strategy", o.strategy, "identity | workload | hierarchical | haar | sqrt | csv:<path>");
  cmd->add_option("--fanout", o.fanout, "hierarchical branching factor");
}

}  // namespace

int main(int argc, char** argv) {
  Options o;
  CLI::App app{"Singular value bounds for the matrix mechanism"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all");

  auto* bound = app.add_subcommand("bound", "lower bound and diagnostics for a workload");
  AddWorkloadOptions(bound, o);
  bound->add_option("--projections", o.projections, "none | ranges | exhaustive | greedy | csv:<path>");
  bound->add_option("--epsilon", o.epsilon, "epsilon for the pure-privacy reference values");

  auto* eval = app.add_subcommand("eval", "analytic error of a strategy");
  AddWorkloadOptions(eval, o);
  AddStrategyOptions(eval, o);
  AddPrivacyOptions(eval, o);

  auto* run = app.add_subcommand("run", "Monte-Carlo error of the mechanism");
  AddWorkloadOptions(run, o);
  AddStrategyOptions(run, o);
  AddPrivacyOptions(run, o);
  run->add_option("--trials", o.trials, "number of noise draws (>= 2)");
  run->add_option("--seed", o.seed, "noise seed");
  run->add_option("--data", o.data, "data vector CSV (default all ones)");

  auto* table2 = app.add_subcommand("table2", "bounds and strategy ratios for four standard workloads");

  for (auto* cmd : {bound, eval, run, table2}) {
    cmd->add_option("--out", o.out, "output path (default stdout)");
    cmd->add_option("--threads", o.threads, "worker threads")->check(CLI::PositiveNumber);
  }
  bound->add_option("--seed", o.seed, "seed for the greedy search");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "ParseError: " << e.what() << "\n";
    return 2;
  }

  try {
    if (*bound) return CmdBound(o);
    if (*eval) return CmdEval(o);
    if (*run) return CmdRun(o);
    if (*table2) return CmdTable2(o);
  } catch (const mmbound::Error& e) {
    std::cerr << e.name() << ": " << e.what() << "\n";
    return ExitCodeFor(e.code());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return 2;
}
