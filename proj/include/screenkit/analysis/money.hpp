// Copyright 2026 The screenkit Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <string_view>

#include "screenkit/error.hpp"
#include "screenkit/text.hpp"

namespace screenkit::analysis {

// Non-negative decimal with nine fractional digits held as an integer, so
// sums and products with integers are exact.
class Decimal {
 public:
  static constexpr std::int64_t kScale = 1'000'000'000;

  constexpr Decimal() = default;

  static constexpr Decimal from_units(std::int64_t units) { return Decimal(units); }
  static constexpr Decimal from_integer(std::int64_t v) { return Decimal(v * kScale); }

  static Decimal parse(std::string_view s) {
    const auto t = text::trim(s);
    if (t.empty()) throw UsageError("empty decimal value");
    std::int64_t whole = 0;
    std::int64_t frac = 0;
    std::int64_t frac_scale = kScale;
    bool seen_dot = false;
    bool any_digit = false;
    for (char c : t) {
      if (c == '.' && !seen_dot) {
        seen_dot = true;
      } else if (c >= '0' && c <= '9') {
        any_digit = true;
        if (!seen_dot) {
          if (whole > (INT64_MAX / kScale) / 10) throw UsageError("decimal value out of range: " + std::string(t));
          whole = whole * 10 + (c - '0');
        } else {
          if (frac_scale == 1) throw UsageError("more than 9 fractional digits: " + std::string(t));
          frac_scale /= 10;
          frac += (c - '0') * frac_scale;
        }
      } else {
        throw UsageError("not a non-negative decimal: '" + std::string(t) + "'");
      }
    }
    if (!any_digit) throw UsageError("not a non-negative decimal: '" + std::string(t) + "'");
    return Decimal(whole * kScale + frac);
  }

  // Nearest representable value; for inputs that come from text, prefer parse().
  static Decimal from_double(double v) {
    if (!(v >= 0.0) || !std::isfinite(v) || v > static_cast<double>(INT64_MAX / kScale)) {
      throw UsageError("decimal value out of range");
    }
    return Decimal(static_cast<std::int64_t>(std::llround(v * static_cast<double>(kScale))));
  }

  constexpr std::int64_t units() const noexcept { return units_; }
  double to_double() const noexcept { return static_cast<double>(units_) / static_cast<double>(kScale); }

  // Exact product with a count, rounded half-up to `kScale` units.
  Decimal times(std::int64_t n) const {
    const __int128 p = static_cast<__int128>(units_) * n;
    if (p > INT64_MAX) throw DataError("decimal overflow");
    return Decimal(static_cast<std::int64_t>(p));
  }

  // Exact quotient by a positive integer, rounded half-up.
  Decimal divided_by(std::int64_t d) const {
    if (d <= 0) throw UsageError("division by a non-positive integer");
    return Decimal((units_ + d / 2) / d);
  }

  // Half-up rounding to an integer.
  std::int64_t round_to_integer() const noexcept { return (units_ + kScale / 2) / kScale; }

  // Fixed notation with `digits` fractional digits (0..9), half-up.
  std::string to_string(int digits = 9) const {
    if (digits < 0 || digits > 9) throw UsageError("digits must lie in 0..9");
    std::int64_t step = 1;
    for (int i = digits; i < 9; ++i) step *= 10;
    const std::int64_t rounded = (units_ + step / 2) / step;
    std::int64_t unit = 1;
    for (int i = 0; i < digits; ++i) unit *= 10;
    std::string out = std::to_string(rounded / unit);
    if (digits > 0) {
      std::string frac = std::to_string(rounded % unit);
      out += '.';
      out.append(static_cast<std::size_t>(digits) - frac.size(), '0');
      out += frac;
    }
    return out;
  }

  friend constexpr Decimal operator+(Decimal a, Decimal b) { return Decimal(a.units_ + b.units_); }
  friend constexpr bool operator==(Decimal a, Decimal b) = default;
  friend constexpr auto operator<=>(Decimal a, Decimal b) = default;

 private:
  constexpr explicit Decimal(std::int64_t units) : units_(units) {}
  std::int64_t units_ = 0;
};

using Money = Decimal;

// usd = tokens x price_per_1k / 1000, exact up to nine fractional digits.
inline Money token_cost(std::int64_t tokens, Money usd_per_1k_tokens) {
  return usd_per_1k_tokens.times(tokens).divided_by(1000);
}

}  // namespace screenkit::analysis
