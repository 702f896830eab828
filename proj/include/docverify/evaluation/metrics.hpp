#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <boost/rational.hpp>

#include "docverify/evaluation/dataset.hpp"
#include "docverify/verdict/verdict.hpp"

namespace docverify {

using Rational = boost::rational<std::int64_t>;
// Empty when the denominator is zero.
using Metric = std::optional<Rational>;

using Predictions = std::map<std::string, Verdict>;

struct ConfusionMatrix {
  std::int64_t tp = 0;
  std::int64_t fp = 0;
  std::int64_t tn = 0;
  std::int64_t fn = 0;

  std::int64_t total() const { return tp + fp + tn + fn; }
  friend bool operator==(const ConfusionMatrix&, const ConfusionMatrix&) = default;
};

struct MetricsReport {
  Metric precision;
  Metric recall;
  Metric specificity;
  Metric f1;
  Metric pfp;
  ConfusionMatrix cm;

  friend bool operator==(const MetricsReport&, const MetricsReport&) = default;
};

// Throws MissingPrediction for an entry without a verdict.
ConfusionMatrix score(const Predictions& predictions, const std::vector<DatasetEntry>& entries);

// Everything except pfp.
MetricsReport metrics(const ConfusionMatrix& cm);

// |TP whose counterpart is predicted Negative| / |TP|.
// Throws MissingPair for a true positive without a usable pair link.
Metric pair_fix_precision(const Predictions& predictions, const std::vector<DatasetEntry>& entries);

// score + metrics + pair_fix_precision.
MetricsReport evaluate(const Predictions& predictions, const std::vector<DatasetEntry>& entries);

// Half-up rounding of a non-negative rational to `digits` decimals, returned
// scaled by 10^digits.
std::int64_t round_half_up(const Rational& r, int digits);

// Two-decimal display value. The value is first rounded half-up to three
// decimals and that result half-up to two, which is how the published
// tables round (30/87 prints as .35). Zero prints as "0", one as "1.00",
// and "n/a" marks an undefined value.
std::string render_metric(const Metric& m);

double to_double(const Rational& r);

}  // namespace docverify
