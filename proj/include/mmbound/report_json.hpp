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

// JSON and text renderings of bound and error reports.

#ifndef MMBOUND_REPORT_JSON_HPP_
#define MMBOUND_REPORT_JSON_HPP_

#include <cmath>
#include <cstdio>
#include <string>

#include <nlohmann/json.hpp>

#include "mmbound/bounds.hpp"
#include "mmbound/magnitude.hpp"
#include "mmbound/mechanism.hpp"

namespace mmbound {

// Six significant digits, e.g. "3.03420e+07"; exponents beyond double range
// are fine.
inline std::string FormatMagnitude(Magnitude m) {
  if (m.is_zero()) return "0.00000e+00";
  auto [mantissa, exponent] = m.scientific();
  mantissa = std::round(mantissa * 1e5) / 1e5;
  if (mantissa >= 10.0) {
    mantissa /= 10.0;
    ++exponent;
  }
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.5fe%+03ld", mantissa, exponent);
  return buf;
}

namespace internal {

// A plain number when it fits in a double, null otherwise.
inline nlohmann::json MaybeNumber(Magnitude m) {
  const double v = m.value();
  return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr);
}

}  // namespace internal

// Subsets are reported with 1-based cell indices. Values too large for a
// double are null; svdb_log10 always carries the bound.
inline nlohmann::json ToJson(const BoundReport& r) {
  nlohmann::json j;
  j["svdb"] = internal::MaybeNumber(r.svdb);
  j["svdb_log10"] = r.svdb.log10();
  if (r.projected) {
    j["projected_svdb"] = internal::MaybeNumber(r.projected->value);
    nlohmann::json subset = nlohmann::json::array();
    for (Index i : r.projected->subset) subset.push_back(i + 1);
    j["projected_subset"] = subset;
  } else {
    j["projected_svdb"] = nullptr;
    j["projected_subset"] = nullptr;
  }
  j["tight"] = r.tight;
  j["diag_spread"] = r.diag_spread;
  j["looseness_factor"] = r.looseness_factor;
  j["l1_svdb"] = r.l1 ? internal::MaybeNumber(r.l1->svdb) : nlohmann::json(nullptr);
  j["l1_geometric"] = r.l1 ? internal::MaybeNumber(r.l1->geometric) : nlohmann::json(nullptr);
  return j;
}

inline nlohmann::json ToJson(const StrategyErrorReport& r) {
  nlohmann::json j;
  j["sensitivity_l2"] = internal::MaybeNumber(r.sensitivity_l2_sq.sqrt());
  j["sensitivity_l1"] = r.sensitivity_l1 ? nlohmann::json(*r.sensitivity_l1) : nlohmann::json(nullptr);
  j["total_error"] = internal::MaybeNumber(r.total_error);
  j["total_error_log10"] = r.total_error.log10();
  j["support_residual"] = r.support_residual;
  j["ratio_to_svdb"] = r.ratio_to_svdb ? nlohmann::json(*r.ratio_to_svdb) : nlohmann::json(nullptr);
  return j;
}

}  // namespace mmbound

#endif  // MMBOUND_REPORT_JSON_HPP_
