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

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "screenkit/decision.hpp"
#include "screenkit/error.hpp"

namespace screenkit {

// Undefined (zero denominator) metrics are nullopt, never NaN.
using Metric = std::optional<double>;

struct ConfusionMatrix {
  std::uint64_t tp = 0;
  std::uint64_t tn = 0;
  std::uint64_t fp = 0;
  std::uint64_t fn = 0;

  std::uint64_t total() const noexcept { return tp + tn + fp + fn; }
  std::uint64_t positives() const noexcept { return tp + fn; }
  std::uint64_t negatives() const noexcept { return tn + fp; }

  ConfusionMatrix& operator+=(const ConfusionMatrix& o) noexcept {
    tp += o.tp;
    tn += o.tn;
    fp += o.fp;
    fn += o.fn;
    return *this;
  }

  // Exchanges the roles of the two classes.
  ConfusionMatrix swapped() const noexcept { return {tn, tp, fn, fp}; }

  bool operator==(const ConfusionMatrix&) const = default;
};

inline void record(ConfusionMatrix& cm, Decision truth, Decision predicted) noexcept {
  if (truth == Decision::Include) {
    (predicted == Decision::Include ? cm.tp : cm.fn) += 1;
  } else {
    (predicted == Decision::Include ? cm.fp : cm.tn) += 1;
  }
}

// (ground truth, prediction) pairs.
inline ConfusionMatrix confusion_from_pairs(std::span<const std::pair<Decision, Decision>> pairs) {
  ConfusionMatrix cm;
  for (const auto& [truth, predicted] : pairs) record(cm, truth, predicted);
  return cm;
}

inline ConfusionMatrix confusion_from_pairs(std::span<const Decision> truth,
                                            std::span<const Decision> predicted) {
  if (truth.size() != predicted.size()) {
    throw DataError("ground truth and predictions differ in length (" + std::to_string(truth.size()) +
                    " vs " + std::to_string(predicted.size()) + ")");
  }
  ConfusionMatrix cm;
  for (std::size_t i = 0; i < truth.size(); ++i) record(cm, truth[i], predicted[i]);
  return cm;
}

namespace detail {

using u128 = unsigned __int128;
using i128 = __int128;

inline constexpr u128 kExactDoubleLimit = u128{1} << 53;

// num / den rounded once. Exact inputs below 2^53 convert without loss, so
// the IEEE division gives the correctly rounded quotient.
inline double exact_ratio(u128 num, u128 den) {
  if (num < kExactDoubleLimit && den < kExactDoubleLimit) {
    return static_cast<double>(static_cast<std::uint64_t>(num)) /
           static_cast<double>(static_cast<std::uint64_t>(den));
  }
  return static_cast<double>(static_cast<long double>(num) / static_cast<long double>(den));
}

inline Metric ratio(std::uint64_t num, std::uint64_t den) {
  if (den == 0) return std::nullopt;
  return exact_ratio(num, den);
}

}  // namespace detail

struct MetricsReport {
  Metric precision;
  Metric recall;
  Metric specificity;
  Metric npv;
  Metric balanced_accuracy;
  Metric f2;
  Metric mcc_normalized;
};

inline Metric precision(const ConfusionMatrix& cm) { return detail::ratio(cm.tp, cm.tp + cm.fp); }
inline Metric recall(const ConfusionMatrix& cm) { return detail::ratio(cm.tp, cm.tp + cm.fn); }
inline Metric specificity(const ConfusionMatrix& cm) { return detail::ratio(cm.tn, cm.tn + cm.fp); }
inline Metric npv(const ConfusionMatrix& cm) { return detail::ratio(cm.tn, cm.tn + cm.fn); }

// (Rec + Spec) / 2, evaluated as one fraction.
inline Metric balanced_accuracy(const ConfusionMatrix& cm) {
  const std::uint64_t p = cm.tp + cm.fn;
  const std::uint64_t n = cm.tn + cm.fp;
  if (p == 0 || n == 0) return std::nullopt;
  using detail::u128;
  const u128 num = u128{cm.tp} * n + u128{cm.tn} * p;
  const u128 den = u128{2} * p * n;
  return detail::exact_ratio(num, den);
}

// 5PR / (4P + R) reduces to 5TP / (5TP + 4FN + FP). Undefined when P or R
// is, and when 4P + R = 0 (no true positives).
inline Metric f2(const ConfusionMatrix& cm) {
  if (cm.tp + cm.fp == 0 || cm.tp + cm.fn == 0 || cm.tp == 0) return std::nullopt;
  using detail::u128;
  return detail::exact_ratio(u128{5} * cm.tp, u128{5} * cm.tp + u128{4} * cm.fn + cm.fp);
}

// General F-beta on the same undefined-ness rules as f2().
inline Metric f_beta(const ConfusionMatrix& cm, double beta) {
  const auto p = precision(cm);
  const auto r = recall(cm);
  if (!p || !r) return std::nullopt;
  const double b2 = beta * beta;
  const double den = b2 * *p + *r;
  if (den == 0.0) return std::nullopt;
  return (1.0 + b2) * *p * *r / den;
}

// Matthews correlation rescaled to [0, 1]: MCC / 2 + 0.5.
inline Metric mcc_normalized(const ConfusionMatrix& cm) {
  using detail::i128;
  using detail::u128;
  const u128 den = u128{cm.tp + cm.fp} * (cm.tp + cm.fn) * (cm.tn + cm.fp) * (cm.tn + cm.fn);
  if (den == 0) return std::nullopt;
  const i128 num = static_cast<i128>(u128{cm.tp} * cm.tn) - static_cast<i128>(u128{cm.fp} * cm.fn);
  const long double raw = static_cast<long double>(num) / sqrtl(static_cast<long double>(den));
  return static_cast<double>(raw / 2.0L + 0.5L);
}

inline MetricsReport metrics_report(const ConfusionMatrix& cm) {
  MetricsReport r;
  r.precision = precision(cm);
  r.recall = recall(cm);
  r.specificity = specificity(cm);
  r.npv = npv(cm);
  r.balanced_accuracy = balanced_accuracy(cm);
  r.f2 = f2(cm);
  r.mcc_normalized = mcc_normalized(cm);
  return r;
}

// Column order used by every tabular rendering.
enum class MetricId { Recall, Precision, Specificity, Npv, BalancedAccuracy, F2, Mcc };

inline constexpr std::array<MetricId, 7> kMetricColumns{
    MetricId::Recall, MetricId::Precision,        MetricId::Specificity, MetricId::Npv,
    MetricId::BalancedAccuracy, MetricId::F2, MetricId::Mcc};

inline std::string_view metric_name(MetricId id) noexcept {
  switch (id) {
    case MetricId::Recall: return "Rec";
    case MetricId::Precision: return "Prec";
    case MetricId::Specificity: return "Spec";
    case MetricId::Npv: return "NPV";
    case MetricId::BalancedAccuracy: return "bAcc";
    case MetricId::F2: return "F2";
    case MetricId::Mcc: return "MCC";
  }
  return "?";
}

inline std::string_view metric_key(MetricId id) noexcept {
  switch (id) {
    case MetricId::Recall: return "recall";
    case MetricId::Precision: return "precision";
    case MetricId::Specificity: return "specificity";
    case MetricId::Npv: return "npv";
    case MetricId::BalancedAccuracy: return "balanced_accuracy";
    case MetricId::F2: return "f2";
    case MetricId::Mcc: return "mcc_normalized";
  }
  return "?";
}

inline Metric get(const MetricsReport& r, MetricId id) noexcept {
  switch (id) {
    case MetricId::Recall: return r.recall;
    case MetricId::Precision: return r.precision;
    case MetricId::Specificity: return r.specificity;
    case MetricId::Npv: return r.npv;
    case MetricId::BalancedAccuracy: return r.balanced_accuracy;
    case MetricId::F2: return r.f2;
    case MetricId::Mcc: return r.mcc_normalized;
  }
  return std::nullopt;
}

inline Metric& get(MetricsReport& r, MetricId id) noexcept {
  switch (id) {
    case MetricId::Recall: return r.recall;
    case MetricId::Precision: return r.precision;
    case MetricId::Specificity: return r.specificity;
    case MetricId::Npv: return r.npv;
    case MetricId::BalancedAccuracy: return r.balanced_accuracy;
    case MetricId::F2: return r.f2;
    case MetricId::Mcc: break;
  }
  return r.mcc_normalized;
}

// ---------------------------------------------------------------------------
// Work saved over sampling at the achieved recall:
//   (TN + FN) / N - 1 + Rec.  May be negative.

inline double wss_at_recall(const ConfusionMatrix& cm) {
  const auto rec = recall(cm);
  if (!rec) throw DataError("WSS needs a defined recall (no included articles in ground truth)");
  return static_cast<double>(cm.tn + cm.fn) / static_cast<double>(cm.total()) - 1.0 + *rec;
}

// ---------------------------------------------------------------------------
// Fleiss' kappa over the two decision categories.

enum class AgreementBand { Poor, Slight, Fair, Moderate, Substantial, AlmostPerfect };

inline AgreementBand agreement_band(double kappa) noexcept {
  if (kappa < 0.0) return AgreementBand::Poor;
  if (kappa <= 0.20) return AgreementBand::Slight;
  if (kappa <= 0.40) return AgreementBand::Fair;
  if (kappa <= 0.60) return AgreementBand::Moderate;
  if (kappa <= 0.80) return AgreementBand::Substantial;
  return AgreementBand::AlmostPerfect;
}

inline std::string_view to_string(AgreementBand b) noexcept {
  switch (b) {
    case AgreementBand::Poor: return "poor";
    case AgreementBand::Slight: return "slight";
    case AgreementBand::Fair: return "fair";
    case AgreementBand::Moderate: return "moderate";
    case AgreementBand::Substantial: return "substantial";
    case AgreementBand::AlmostPerfect: return "almost perfect";
  }
  return "?";
}

struct AgreementResult {
  double kappa = 0.0;
  double p_o = 0.0;
  double p_e = 0.0;
  AgreementBand band = AgreementBand::Poor;
  // Every decision fell into one category (p_e = 1); kappa is reported as 1.
  bool degenerate = false;
};

// decisions[item][rater]. Every item must be rated by the same number of
// raters; a short row is a missing cell.
inline AgreementResult fleiss_kappa(const std::vector<std::vector<Decision>>& decisions) {
  const std::size_t items = decisions.size();
  if (items < 2) throw DataError("Fleiss' kappa needs at least 2 items");
  const std::size_t raters = decisions.front().size();
  if (raters < 2) throw DataError("Fleiss' kappa needs at least 2 raters");
  double agreement_sum = 0.0;
  std::uint64_t include_votes = 0;
  for (std::size_t i = 0; i < items; ++i) {
    if (decisions[i].size() != raters) {
      throw DataError("missing cell: item " + std::to_string(i) + " has " +
                      std::to_string(decisions[i].size()) + " of " + std::to_string(raters) +
                      " ratings");
    }
    std::uint64_t inc = 0;
    for (auto d : decisions[i]) inc += d == Decision::Include ? 1 : 0;
    const std::uint64_t exc = raters - inc;
    include_votes += inc;
    const double pairs = static_cast<double>(raters) * static_cast<double>(raters - 1);
    // Unsigned wrap of (0 - 1) is harmless: it is multiplied by zero.
    agreement_sum += static_cast<double>(inc * (inc - 1) + exc * (exc - 1)) / pairs;
  }
  AgreementResult r;
  r.p_o = agreement_sum / static_cast<double>(items);
  const double total = static_cast<double>(items) * static_cast<double>(raters);
  const double p_inc = static_cast<double>(include_votes) / total;
  const double p_exc = 1.0 - p_inc;
  r.p_e = p_inc * p_inc + p_exc * p_exc;
  if (include_votes == 0 || include_votes == items * raters) {
    r.kappa = 1.0;
    r.p_e = 1.0;
    r.degenerate = true;
  } else {
    r.kappa = (r.p_o - r.p_e) / (1.0 - r.p_e);
  }
  r.band = agreement_band(r.kappa);
  return r;
}

// ---------------------------------------------------------------------------
// Dispersion moments of a series of metric values.

struct DispersionStats {
  Metric mean;
  Metric median;
  Metric std_dev;  // sample (n - 1)
  Metric iqr;
  Metric excess_kurtosis;  // bias-corrected, normal -> 0
};

// Linear interpolation between order statistics (Hyndman-Fan type 7).
inline double quantile_sorted(std::span<const double> sorted, double q) {
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

inline DispersionStats dispersion_stats(std::span<const double> values) {
  DispersionStats s;
  const std::size_t n = values.size();
  if (n == 0) return s;
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  double sum = 0.0;
  for (double v : values) sum += v;
  const double mean = sum / static_cast<double>(n);
  s.mean = mean;
  s.median = quantile_sorted(sorted, 0.5);
  s.iqr = quantile_sorted(sorted, 0.75) - quantile_sorted(sorted, 0.25);
  if (n < 2) return s;
  double m2 = 0.0;
  double m4 = 0.0;
  for (double v : values) {
    const double d = v - mean;
    m2 += d * d;
    m4 += d * d * d * d;
  }
  s.std_dev = std::sqrt(m2 / static_cast<double>(n - 1));
  if (n < 4 || m2 == 0.0) return s;
  const double nn = static_cast<double>(n);
  const double g2 = nn * m4 / (m2 * m2) - 3.0;  // (m4/n) / (m2/n)^2 - 3
  s.excess_kurtosis = ((nn + 1.0) * g2 + 6.0) * (nn - 1.0) / ((nn - 2.0) * (nn - 3.0));
  return s;
}

}  // namespace screenkit
