#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "docverify/evaluation/metrics.hpp"

namespace docverify {

struct MetricStats {
  Metric median;
  Metric min;
  Metric max;
  // Draws in which the metric was defined.
  int defined = 0;

  friend bool operator==(const MetricStats&, const MetricStats&) = default;
};

struct SweepRow {
  // Share of positives in percent: 50 means 50/50, 10 means 10/90.
  int positive_percent = 50;
  std::int64_t negatives = 0;
  // Keyed by "precision", "specificity", "recall", "pfp", "f1".
  std::map<std::string, MetricStats> cells;

  friend bool operator==(const SweepRow&, const SweepRow&) = default;
};

struct SweepReport {
  std::uint64_t seed = 0;
  int n_draws = 0;
  std::int64_t positives = 0;
  std::vector<SweepRow> rows;

  friend bool operator==(const SweepReport&, const SweepReport&) = default;
};

std::vector<int> default_ratio_grid();  // 50, 40, 30, 20, 10
const std::vector<std::string>& sweep_metric_names();

// Negatives needed so that positives make up `positive_percent` percent,
// rounded half-up.
std::int64_t negatives_for_ratio(std::int64_t positives, int positive_percent);

// SplitMix64 finalizer over (seed, ratio index, draw index).
std::uint64_t sub_seed(std::uint64_t seed, std::uint64_t ratio_index, std::uint64_t draw_index);

// Uniform integer in [0, bound) from a 64-bit Mersenne Twister, by rejection.
template <typename Engine>
std::uint64_t bounded(Engine& eng, std::uint64_t bound) {
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
  for (;;) {
    std::uint64_t x = eng();
    if (x < limit) return x % bound;
  }
}

// Every Inconsistent entry is kept. Negatives are the paired counterparts of
// the positives, topped up with a uniform draw without replacement from the
// other Consistent entries. Each draw seeds std::mt19937_64 with sub_seed().
// Throws InsufficientConsistentPool when a ratio cannot be reached.
SweepReport imbalance_sweep(const Predictions& predictions, const std::vector<DatasetEntry>& entries,
                            const std::vector<int>& ratios, int n_draws, std::uint64_t seed);

// Median of a non-empty list; mean of the middle pair for even sizes.
Rational median_of(std::vector<Rational> values);

}  // namespace docverify
