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

// The singular value bound on the minimum total error of a workload, its
// projected variants, the tightness certificate, the looseness upper bound,
// and closed forms for variable-agnostic workloads.

#ifndef MMBOUND_BOUNDS_HPP_
#define MMBOUND_BOUNDS_HPP_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <numbers>
#include <optional>
#include <random>
#include <thread>
#include <vector>

#include "mmbound/error.hpp"
#include "mmbound/magnitude.hpp"
#include "mmbound/mechanism.hpp"
#include "mmbound/numkernel.hpp"
#include "mmbound/query_matrix.hpp"
#include "mmbound/workloads.hpp"

namespace mmbound {

inline constexpr double kTightnessRelTol = 1e-8;
inline constexpr std::size_t kMaxFamilySize = 1'000'000;
inline constexpr std::size_t kMaxFamilyEntries = 50'000'000;
inline constexpr Index kMaxExhaustiveCells = 20;

// (sum_i sqrt(d_i))^2 / n over the eigenvalues d_i of a PSD Gram.
inline double GramSingularValueBound(const SymMatrix& gram) {
  const Index n = gram.size();
  internal::Require(n >= 1, ErrorCode::kDimOutOfRange, "empty Gram");
  const Vector d = SymmetricEigenvalues(gram, Definiteness::kPsd);
  internal::RequirePsdSpectrum(d);
  double sum = 0.0;
  for (Index i = 0; i < n; ++i) sum += d(i) > 0.0 ? std::sqrt(d(i)) : 0.0;
  return sum * sum / static_cast<double>(n);
}

// Closed form for a Gram a*I + b*(J - I) (eigenvalues a + (n-1)b once and
// a - b with multiplicity n - 1):
//   (sqrt(a + (n-1)b) + (n-1) sqrt(a - b))^2 / n.
inline Magnitude VariableAgnosticBound(Magnitude a, Magnitude b, Index n) {
  internal::Require(n >= 1, ErrorCode::kDimOutOfRange, "cell count must be >= 1");
  internal::Require(a > b, ErrorCode::kNotVariableAgnostic, "diagonal must exceed off-diagonal (a > b)");
  const double r = Ratio(b, a);
  const double nm1 = static_cast<double>(n - 1);
  const double inner = std::sqrt(1.0 + nm1 * r) + nm1 * std::sqrt(1.0 - r);
  return a * Magnitude::FromValue(inner * inner / static_cast<double>(n));
}

inline Magnitude VariableAgnosticBound(double a, double b, Index n) {
  internal::Require(b >= 0.0, ErrorCode::kNotVariableAgnostic, "off-diagonal must be non-negative");
  internal::Require(a > b, ErrorCode::kNotVariableAgnostic, "diagonal must exceed off-diagonal (a > b)");
  return VariableAgnosticBound(Magnitude::FromValue(a), Magnitude::FromValue(b), n);
}

// The bound for all 2^n predicate queries:
//   2^(n-2) / n * (n - 1 + sqrt(n + 1))^2.
inline Magnitude AllPredicateBound(Index n) {
  internal::Require(n >= 1, ErrorCode::kDimOutOfRange, "cell count must be >= 1");
  const double nd = static_cast<double>(n);
  const double inner = nd - 1.0 + std::sqrt(nd + 1.0);
  return Magnitude::FromLog((nd - 2.0) * std::numbers::ln2 + std::log(inner * inner / nd));
}

// Lower bound on the total error of any strategy for W, in units of P.
// Kronecker workloads multiply their factors' bounds; variable-agnostic
// Grams use the closed form; everything else is eigensolved.
inline Magnitude SingularValueBound(const QueryMatrix& w) {
  if (w.is_kronecker()) {
    Magnitude out = Magnitude::One();
    for (const auto& f : w.factors()) out *= SingularValueBound(f);
    return out;
  }
  if (const auto& va = w.variable_agnostic()) {
    if (w.cells() == 1) return w.scale() * Magnitude::FromValue(va->a);
    return w.scale() * VariableAgnosticBound(va->a, va->b, w.cells());
  }
  return w.scale() * Magnitude::FromValue(GramSingularValueBound(w.unit_gram()));
}

struct TightnessCertificate {
  bool tight = false;
  // (max - min) / max over the diagonal of sqrt(Gram).
  double diag_spread = 0.0;
};

namespace internal {

inline TightnessCertificate CertificateFromDiagonal(double lo, double hi) {
  const double spread = hi > 0.0 ? (hi - lo) / hi : 0.0;
  return {spread <= kTightnessRelTol, spread};
}

}  // namespace internal

// The bound is attained exactly when sqrt(Gram) has a constant diagonal.
inline TightnessCertificate CertifyTightness(const SymMatrix& gram) {
  const SymMatrix root = PsdSqrt(gram);
  const Vector diag = root.entries().diagonal();
  return internal::CertificateFromDiagonal(diag.minCoeff(), diag.maxCoeff());
}

// sqrt(Kronecker product) is the product of the factors' roots, so its
// diagonal extremes are products of the factors' extremes. Variable-agnostic
// Grams commute with every permutation and so does their root.
inline TightnessCertificate CertifyTightness(const QueryMatrix& w) {
  if (w.is_kronecker()) {
    double lo = 1.0;
    double hi = 1.0;
    for (const auto& f : w.factors()) {
      const Vector diag = PsdSqrt(f.unit_gram()).entries().diagonal();
      lo *= diag.minCoeff();
      hi *= diag.maxCoeff();
    }
    return internal::CertificateFromDiagonal(lo, hi);
  }
  if (w.variable_agnostic()) return {true, 0.0};
  return CertifyTightness(w.unit_gram());
}

// n * d0 / trace(sqrt(Gram)), with d0 the largest diagonal entry of
// sqrt(Gram). At least 1; equal to 1 exactly for tight workloads.
inline double LoosenessFactor(const SymMatrix& gram) {
  const SymMatrix root = PsdSqrt(gram);
  const double trace = root.trace();
  if (trace <= 0.0) return 1.0;
  return static_cast<double>(gram.size()) * root.entries().diagonal().maxCoeff() / trace;
}

inline double LoosenessFactor(const QueryMatrix& w) {
  if (w.is_kronecker()) {
    double out = 1.0;
    for (const auto& f : w.factors()) out *= LoosenessFactor(f);
    return out;
  }
  if (w.variable_agnostic()) return 1.0;
  return LoosenessFactor(w.unit_gram());
}

// Upper bound on the minimum error: the error of the square-root strategy,
// n * d0 * P * svdb / trace(sqrt(Gram)) = d0 * trace(sqrt(Gram)) * P.
inline Magnitude LoosenessUpperBound(const QueryMatrix& w, const PrivacyParams& params) {
  return Magnitude::FromValue(LoosenessFactor(w) * params.multiplier) * SingularValueBound(w);
}

inline Magnitude LoosenessUpperBound(const SymMatrix& gram, const PrivacyParams& params) {
  return LoosenessUpperBound(QueryMatrix::FromGram(gram), params);
}

// Reference values under pure epsilon-privacy (multiplier 1/eps^2): the
// singular value bound and the sum of squared singular values, the latter
// being the (constant-free, asymptotic) lower bound for m <= n workloads.
struct L1Reference {
  Magnitude svdb;
  Magnitude geometric;
};

inline L1Reference ComputeL1Reference(const QueryMatrix& w, double epsilon) {
  internal::Require(epsilon > 0.0 && std::isfinite(epsilon), ErrorCode::kInvalidArgument,
                    "epsilon must be positive");
  const Magnitude inv_eps_sq = Magnitude::FromValue(1.0 / (epsilon * epsilon));
  return {SingularValueBound(w) * inv_eps_sq, w.frobenius_sq() * inv_eps_sq};
}

// ---------------------------------------------------------------------------
// Projected bounds

struct ProjectedBound {
  Magnitude value;
  std::vector<Index> subset;  // 0-based cells of the maximizing projection
  bool heuristic = false;
};

namespace internal {

// Lexicographically smaller subset wins ties.
inline bool Better(Magnitude value, const std::vector<Index>& subset, const ProjectedBound& best) {
  if (best.subset.empty()) return true;
  if (value != best.value) return value > best.value;
  return subset < best.subset;
}

}  // namespace internal

// max over the family of svdb(column projection). Subsets are evaluated in
// parallel; the maximum (ties to the lexicographically smallest subset) does
// not depend on the thread count. For variable-agnostic workloads the value
// depends only on the subset size, which is exploited.
inline ProjectedBound ProjectedSingularValueBound(const Workload& w, const ProjectionSet& family,
                                                  unsigned threads = 1) {
  family.Validate(w.cells());
  const std::size_t count = family.subsets.size();
  std::vector<Magnitude> values(count);

  if (w.variable_agnostic()) {
    std::map<std::size_t, Magnitude> by_size;
    for (std::size_t k = 0; k < count; ++k) {
      const std::size_t size = family.subsets[k].size();
      auto it = by_size.find(size);
      if (it == by_size.end()) {
        it = by_size.emplace(size, SingularValueBound(ColumnProject(w, family.subsets[k]))).first;
      }
      values[k] = it->second;
    }
  } else {
    auto run = [&](std::size_t begin, std::size_t end) {
      for (std::size_t k = begin; k < end; ++k) {
        values[k] = SingularValueBound(ColumnProject(w, family.subsets[k]));
      }
    };
    threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(std::min<std::size_t>(count, 1u << 20))));
    if (threads == 1) {
      run(0, count);
    } else {
      std::vector<std::thread> pool;
      std::vector<std::exception_ptr> failures(threads);
      const std::size_t chunk = (count + threads - 1) / threads;
      for (unsigned t = 0; t < threads; ++t) {
        const std::size_t begin = t * chunk;
        const std::size_t end = std::min(count, begin + chunk);
        if (begin >= end) break;
        pool.emplace_back([&, t, begin, end] {
          try {
            run(begin, end);
          } catch (...) {
            failures[t] = std::current_exception();
          }
        });
      }
      for (auto& th : pool) th.join();
      for (auto& f : failures) {
        if (f) std::rethrow_exception(f);
      }
    }
  }

  ProjectedBound best;
  for (std::size_t k = 0; k < count; ++k) {
    if (internal::Better(values[k], family.subsets[k], best)) {
      best.value = values[k];
      best.subset = family.subsets[k];
    }
  }
  return best;
}

// For a Kronecker workload and a product family (one family per factor),
// projecting onto a product of subsets is the Kronecker product of the
// projections, so the bound is the product of per-factor maxima. The returned
// subset lists the row-major cells of the product.
inline ProjectedBound ProductProjectedSingularValueBound(const Workload& w,
                                                         const std::vector<ProjectionSet>& families,
                                                         unsigned threads = 1) {
  internal::Require(w.is_kronecker() && w.factors().size() == families.size(), ErrorCode::kInvalidArgument,
                    "product family needs a Kronecker workload with one family per factor");
  ProjectedBound out{Magnitude::One(), {0}, false};
  Index stride_cells = 1;
  for (std::size_t k = 0; k < families.size(); ++k) {
    const QueryMatrix& f = w.factors()[k];
    const ProjectedBound part = ProjectedSingularValueBound(Workload(f), families[k], threads);
    out.value *= part.value;
    std::vector<Index> combined;
    for (Index base : out.subset) {
      for (Index c : part.subset) combined.push_back(base * f.cells() + c);
    }
    out.subset = std::move(combined);
    stride_cells *= f.cells();
  }
  return out;
}

// Exact supreme bound over all subsets for a variable-agnostic workload: a
// projection's Gram depends only on the subset size, so the first k cells
// stand in for every subset of size k.
inline ProjectedBound VariableAgnosticProjectedBound(const Workload& w) {
  internal::Require(w.variable_agnostic().has_value(), ErrorCode::kNotVariableAgnostic,
                    "workload Gram is not of the form a*I + b*(J - I)");
  ProjectedBound best;
  std::vector<Index> subset;
  for (Index k = 1; k <= w.cells(); ++k) {
    subset.push_back(k - 1);
    const Magnitude value = SingularValueBound(ColumnProject(w, subset));
    if (internal::Better(value, subset, best)) {
      best.value = value;
      best.subset = subset;
    }
  }
  return best;
}

// Every non-empty subset of the cells, ordered by bitmask.
inline ProjectionSet AllSubsetsFamily(Index n) {
  internal::Require(n >= 1 && n <= kMaxExhaustiveCells, ErrorCode::kSubsetTooLarge,
                    "exhaustive projection is limited to n <= 20 cells");
  ProjectionSet family;
  const std::uint64_t total = std::uint64_t{1} << n;
  family.subsets.reserve(total - 1);
  for (std::uint64_t mask = 1; mask < total; ++mask) {
    std::vector<Index> s;
    for (Index c = 0; c < n; ++c) {
      if ((mask >> c) & 1) s.push_back(c);
    }
    family.subsets.push_back(std::move(s));
  }
  return family;
}

// All contiguous ranges of a single attribute, shortest first.
inline ProjectionSet RangeProjectionFamily1D(Index d) {
  ProjectionSet family;
  for (Index len = 1; len <= d; ++len) {
    for (Index start = 0; start + len <= d; ++start) {
      std::vector<Index> s(static_cast<std::size_t>(len));
      for (Index i = 0; i < len; ++i) s[static_cast<std::size_t>(i)] = start + i;
      family.subsets.push_back(std::move(s));
    }
  }
  return family;
}

// All axis-aligned sub-rectangles of the grid, as row-major cell subsets.
inline ProjectionSet RangeProjectionFamily(const std::vector<Index>& dims) {
  internal::Require(!dims.empty(), ErrorCode::kDimOutOfRange, "no dimensions given");
  double count = 1.0;
  double entries = 1.0;
  for (Index d : dims) {
    internal::Require(d >= 1, ErrorCode::kDimOutOfRange, "dimension must be >= 1");
    const double dd = static_cast<double>(d);
    count *= dd * (dd + 1.0) / 2.0;
    // sum over ranges of their length: d(d+1)(d+2)/6
    entries *= dd * (dd + 1.0) * (dd + 2.0) / 6.0;
  }
  internal::Require(count <= static_cast<double>(kMaxFamilySize) && entries <= static_cast<double>(kMaxFamilyEntries),
                    ErrorCode::kFamilyTooLarge, "range family has too many subsets");
  ProjectionSet out = RangeProjectionFamily1D(dims.front());
  Index width = dims.front();
  for (std::size_t k = 1; k < dims.size(); ++k) {
    const ProjectionSet next = RangeProjectionFamily1D(dims[k]);
    ProjectionSet merged;
    for (const auto& a : out.subsets) {
      for (const auto& b : next.subsets) {
        std::vector<Index> s;
        for (Index i : a) {
          for (Index j : b) s.push_back(i * dims[k] + j);
        }
        merged.subsets.push_back(std::move(s));
      }
    }
    out = std::move(merged);
    width *= dims[k];
  }
  return out;
}

// Heuristic family for long single-attribute domains: the ranges obtained by
// trimming s - 1 cells from both ends, s = 1..max_trim + 1.
inline ProjectionSet CenteredRangeFamily(Index d, Index max_trim) {
  ProjectionSet family;
  for (Index s = 0; s <= max_trim && 2 * s < d; ++s) {
    std::vector<Index> sub;
    for (Index i = s; i < d - s; ++i) sub.push_back(i);
    family.subsets.push_back(std::move(sub));
  }
  return family;
}

// Local search over subsets: from the full set and from `restarts - 1` random
// starting subsets, repeatedly apply the single-cell insertion or removal that
// most increases the bound. A heuristic lower estimate of the supreme bound.
inline ProjectedBound GreedyProjectedSingularValueBound(const Workload& w, int restarts = 8,
                                                        std::uint64_t seed = 0) {
  const Index n = w.cells();
  std::mt19937_64 rng(seed);
  ProjectedBound best;
  best.heuristic = true;
  auto evaluate = [&w](const std::vector<bool>& in) {
    std::vector<Index> s;
    for (Index i = 0; i < static_cast<Index>(in.size()); ++i) {
      if (in[static_cast<std::size_t>(i)]) s.push_back(i);
    }
    return std::make_pair(SingularValueBound(ColumnProject(w, s)), s);
  };
  for (int r = 0; r < std::max(1, restarts); ++r) {
    std::vector<bool> in(static_cast<std::size_t>(n), true);
    if (r > 0) {
      std::bernoulli_distribution coin(0.5);
      for (auto&& b : in) b = coin(rng);
      if (std::find(in.begin(), in.end(), true) == in.end()) in[0] = true;
    }
    auto [value, subset] = evaluate(in);
    for (;;) {
      Magnitude step_value = value;
      Index step = -1;
      for (Index i = 0; i < n; ++i) {
        in[static_cast<std::size_t>(i)] = !in[static_cast<std::size_t>(i)];
        if (std::find(in.begin(), in.end(), true) != in.end()) {
          const auto candidate = evaluate(in).first;
          if (candidate > step_value) {
            step_value = candidate;
            step = i;
          }
        }
        in[static_cast<std::size_t>(i)] = !in[static_cast<std::size_t>(i)];
      }
      if (step < 0) break;
      in[static_cast<std::size_t>(step)] = !in[static_cast<std::size_t>(step)];
      std::tie(value, subset) = evaluate(in);
    }
    if (internal::Better(value, subset, best)) {
      best.value = value;
      best.subset = subset;
    }
  }
  return best;
}

// ---------------------------------------------------------------------------
// Report

struct BoundReport {
  Magnitude svdb;
  std::optional<ProjectedBound> projected;
  bool tight = false;
  double diag_spread = 0.0;
  double looseness_factor = 1.0;
  std::optional<L1Reference> l1;
};

inline BoundReport ComputeBoundReport(const Workload& w, std::optional<ProjectedBound> projected = std::nullopt,
                                      std::optional<double> epsilon = std::nullopt) {
  BoundReport report;
  report.svdb = SingularValueBound(w);
  report.projected = std::move(projected);
  const TightnessCertificate cert = CertifyTightness(w);
  report.tight = cert.tight;
  report.diag_spread = cert.diag_spread;
  report.looseness_factor = LoosenessFactor(w);
  if (epsilon) report.l1 = ComputeL1Reference(w, *epsilon);
  return report;
}

}  // namespace mmbound

#endif  // MMBOUND_BOUNDS_HPP_
