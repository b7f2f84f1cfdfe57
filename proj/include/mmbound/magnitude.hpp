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

#ifndef MMBOUND_MAGNITUDE_HPP_
#define MMBOUND_MAGNITUDE_HPP_

#include <algorithm>
#include <cmath>
#include <compare>
#include <limits>
#include <numbers>

#include "mmbound/error.hpp"

namespace mmbound {

// A non-negative real stored as its natural logarithm. Error totals and bounds
// for the predicate workloads overflow double range long before n reaches the
// sizes of interest (2^1023 at n = 1024), so every such quantity is carried
// here and only converted to a plain double at the edges.
class Magnitude {
 public:
  constexpr Magnitude() = default;

  static Magnitude FromValue(double value) {
    internal::Require(std::isfinite(value) && value >= 0.0,
                      ErrorCode::kNonFinite,
                      "magnitude must be finite and non-negative");
    return FromLog(value == 0.0 ? -kInf : std::log(value));
  }

  static constexpr Magnitude FromLog(double ln) {
    Magnitude m;
    m.ln_ = ln;
    return m;
  }

  static Magnitude FromLog10(double log10) {
    return FromLog(log10 * std::numbers::ln10);
  }

  static constexpr Magnitude Zero() { return FromLog(-kInf); }
  static constexpr Magnitude One() { return FromLog(0.0); }

  constexpr double log() const { return ln_; }
  double log10() const { return ln_ / std::numbers::ln10; }
  bool is_zero() const { return ln_ == -kInf; }

  // Plain value; +inf when it does not fit in a double.
  double value() const { return std::exp(ln_); }

  // Decimal scientific form: value = mantissa * 10^exponent, mantissa in [1, 10).
  struct Scientific {
    double mantissa;
    long exponent;
  };
  Scientific scientific() const {
    if (is_zero()) return {0.0, 0};
    const double l10 = log10();
    long exponent = static_cast<long>(std::floor(l10));
    double mantissa = std::pow(10.0, l10 - static_cast<double>(exponent));
    if (mantissa >= 10.0) {
      mantissa /= 10.0;
      ++exponent;
    }
    return {mantissa, exponent};
  }

  Magnitude sqrt() const { return FromLog(ln_ / 2.0); }
  Magnitude pow(double p) const { return is_zero() ? Zero() : FromLog(ln_ * p); }

  friend Magnitude operator*(Magnitude a, Magnitude b) {
    if (a.is_zero() || b.is_zero()) return Zero();
    return FromLog(a.ln_ + b.ln_);
  }
  friend Magnitude operator/(Magnitude a, Magnitude b) {
    internal::Require(!b.is_zero(), ErrorCode::kNonFinite, "division by zero magnitude");
    if (a.is_zero()) return Zero();
    return FromLog(a.ln_ - b.ln_);
  }
  friend Magnitude operator+(Magnitude a, Magnitude b) {
    if (a.is_zero()) return b;
    if (b.is_zero()) return a;
    const double hi = std::max(a.ln_, b.ln_);
    const double lo = std::min(a.ln_, b.ln_);
    return FromLog(hi + std::log1p(std::exp(lo - hi)));
  }
  Magnitude& operator*=(Magnitude other) { return *this = *this * other; }
  Magnitude& operator+=(Magnitude other) { return *this = *this + other; }

  friend constexpr auto operator<=>(Magnitude a, Magnitude b) { return a.ln_ <=> b.ln_; }
  friend constexpr bool operator==(Magnitude a, Magnitude b) { return a.ln_ == b.ln_; }

 private:
  static constexpr double kInf = std::numeric_limits<double>::infinity();
  double ln_ = -kInf;
};

// a / b as a plain double, computed without leaving log space.
inline double Ratio(Magnitude a, Magnitude b) { return (a / b).value(); }

}  // namespace mmbound

#endif  // MMBOUND_MAGNITUDE_HPP_
