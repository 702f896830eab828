#include "docverify/evaluation/sweep.hpp"

#include <algorithm>
#include <map>
#include <random>

#include "docverify/core/error.hpp"

namespace docverify {

std::vector<int> default_ratio_grid() { return {50, 40, 30, 20, 10}; }

const std::vector<std::string>& sweep_metric_names() {
  static const std::vector<std::string> names = {"precision", "specificity", "recall", "pfp", "f1"};
  return names;
}

std::int64_t negatives_for_ratio(std::int64_t positives, int positive_percent) {
  if (positive_percent <= 0 || positive_percent >= 100) {
    throw Error(ErrorCode::ConfigError,
                "ratio must leave both classes non-empty, got " + std::to_string(positive_percent));
  }
  const std::int64_t num = positives * (100 - positive_percent);
  return (2 * num + positive_percent) / (2 * positive_percent);
}

std::uint64_t sub_seed(std::uint64_t seed, std::uint64_t ratio_index, std::uint64_t draw_index) {
  auto mix = [](std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  };
  return mix(mix(mix(seed) ^ ratio_index) ^ draw_index);
}

Rational median_of(std::vector<Rational> values) {
  if (values.empty()) throw std::invalid_argument("median_of: empty input");
  std::sort(values.begin(), values.end());
  const auto n = values.size();
  if (n % 2 == 1) return values[n / 2];
  return (values[n / 2 - 1] + values[n / 2]) / Rational(2);
}

namespace {

MetricStats summarize(std::vector<Rational> values) {
  MetricStats s;
  s.defined = static_cast<int>(values.size());
  if (values.empty()) return s;
  auto [lo, hi] = std::minmax_element(values.begin(), values.end());
  s.min = *lo;
  s.max = *hi;
  s.median = median_of(std::move(values));
  return s;
}

}  // namespace

SweepReport imbalance_sweep(const Predictions& predictions, const std::vector<DatasetEntry>& entries,
                            const std::vector<int>& ratios, int n_draws, std::uint64_t seed) {
  if (n_draws <= 0) throw Error(ErrorCode::ConfigError, "n_draws must be positive");
  if (ratios.empty()) throw Error(ErrorCode::ConfigError, "no ratios given");

  std::vector<const DatasetEntry*> positives;
  std::vector<const DatasetEntry*> paired;
  std::vector<const DatasetEntry*> extra;
  std::map<std::string, const DatasetEntry*> by_id;
  for (const auto& e : entries) by_id[e.id] = &e;
  for (const auto& e : entries) {
    if (e.label == Label::Inconsistent) {
      positives.push_back(&e);
      if (e.pair_id && by_id.count(*e.pair_id)) paired.push_back(by_id[*e.pair_id]);
    }
  }
  for (const auto& e : entries) {
    if (e.label == Label::Consistent &&
        std::find(paired.begin(), paired.end(), &e) == paired.end()) {
      extra.push_back(&e);
    }
  }

  // Fixed parts of every draw: all positives, and PFP which depends on them only.
  std::vector<DatasetEntry> positive_entries;
  for (auto* p : positives) positive_entries.push_back(*p);
  const auto pos_cm = score(predictions, positive_entries);
  const auto pfp = pair_fix_precision(predictions, entries);
  auto predicted_positive = [&](const DatasetEntry* e) {
    auto it = predictions.find(e->id);
    if (it == predictions.end()) {
      throw Error(ErrorCode::MissingPrediction, "no prediction for entry '" + e->id + "'");
    }
    return it->second == Verdict::Positive;
  };
  std::vector<char> paired_pos;
  for (auto* e : paired) paired_pos.push_back(predicted_positive(e));
  std::vector<char> extra_pos;
  for (auto* e : extra) extra_pos.push_back(predicted_positive(e));

  SweepReport report;
  report.seed = seed;
  report.n_draws = n_draws;
  report.positives = static_cast<std::int64_t>(positives.size());

  for (std::size_t ri = 0; ri < ratios.size(); ++ri) {
    const auto need = negatives_for_ratio(report.positives, ratios[ri]);
    const auto pool = static_cast<std::int64_t>(paired.size() + extra.size());
    if (need > pool) {
      throw Error(ErrorCode::InsufficientConsistentPool,
                  "ratio " + std::to_string(ratios[ri]) + "/" + std::to_string(100 - ratios[ri]) +
                      " needs " + std::to_string(need) + " consistent entries, pool has " +
                      std::to_string(pool));
    }
    // Paired counterparts go in first; the rest is sampled.
    const bool sample_paired = need < static_cast<std::int64_t>(paired.size());
    const auto& source = sample_paired ? paired_pos : extra_pos;
    const auto take = sample_paired ? need : need - static_cast<std::int64_t>(paired.size());
    std::int64_t fixed_fp = 0;
    if (!sample_paired) {
      for (char c : paired_pos) fixed_fp += c;
    }

    std::map<std::string, std::vector<Rational>> values;
    std::vector<std::size_t> idx(source.size());
    for (int d = 0; d < n_draws; ++d) {
      std::mt19937_64 eng(sub_seed(seed, ri, static_cast<std::uint64_t>(d)));
      for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
      std::int64_t fp = fixed_fp;
      for (std::int64_t k = 0; k < take; ++k) {
        auto j = static_cast<std::size_t>(k) +
                 bounded(eng, static_cast<std::uint64_t>(idx.size()) - static_cast<std::uint64_t>(k));
        std::swap(idx[static_cast<std::size_t>(k)], idx[j]);
        fp += source[idx[static_cast<std::size_t>(k)]];
      }
      ConfusionMatrix cm = pos_cm;
      cm.fp = fp;
      cm.tn = need - fp;
      auto m = metrics(cm);
      m.pfp = pfp;
      const std::pair<const char*, const Metric*> fields[] = {{"precision", &m.precision},
                                                              {"specificity", &m.specificity},
                                                              {"recall", &m.recall},
                                                              {"pfp", &m.pfp},
                                                              {"f1", &m.f1}};
      for (const auto& [name, metric] : fields) {
        auto& bucket = values[name];
        if (*metric) bucket.push_back(**metric);
      }
    }
    SweepRow row;
    row.positive_percent = ratios[ri];
    row.negatives = need;
    for (const auto& name : sweep_metric_names()) row.cells[name] = summarize(values[name]);
    report.rows.push_back(std::move(row));
  }
  return report;
}

}  // namespace docverify
