#include "docverify/evaluation/metrics.hpp"

#include <cstdio>
#include <map>

#include "docverify/core/error.hpp"

namespace docverify {

namespace {

Metric ratio(std::int64_t num, std::int64_t den) {
  if (den == 0) return std::nullopt;
  return Rational(num, den);
}

}  // namespace

ConfusionMatrix score(const Predictions& predictions, const std::vector<DatasetEntry>& entries) {
  ConfusionMatrix cm;
  for (const auto& e : entries) {
    auto it = predictions.find(e.id);
    if (it == predictions.end()) {
      throw Error(ErrorCode::MissingPrediction, "no prediction for entry '" + e.id + "'");
    }
    const bool positive = it->second == Verdict::Positive;
    if (e.label == Label::Inconsistent) {
      ++(positive ? cm.tp : cm.fn);
    } else {
      ++(positive ? cm.fp : cm.tn);
    }
  }
  return cm;
}

MetricsReport metrics(const ConfusionMatrix& cm) {
  MetricsReport r;
  r.cm = cm;
  r.precision = ratio(cm.tp, cm.tp + cm.fp);
  r.recall = ratio(cm.tp, cm.tp + cm.fn);
  r.specificity = ratio(cm.tn, cm.tn + cm.fp);
  // 2PR/(P+R) simplifies to 2TP/(2TP+FP+FN); undefined whenever P or R is.
  if (r.precision && r.recall) r.f1 = ratio(2 * cm.tp, 2 * cm.tp + cm.fp + cm.fn);
  return r;
}

Metric pair_fix_precision(const Predictions& predictions, const std::vector<DatasetEntry>& entries) {
  std::map<std::string, const DatasetEntry*> by_id;
  for (const auto& e : entries) by_id[e.id] = &e;
  std::int64_t tp = 0;
  std::int64_t fixed = 0;
  for (const auto& e : entries) {
    if (e.label != Label::Inconsistent) continue;
    auto p = predictions.find(e.id);
    if (p == predictions.end()) {
      throw Error(ErrorCode::MissingPrediction, "no prediction for entry '" + e.id + "'");
    }
    if (p->second != Verdict::Positive) continue;
    ++tp;
    if (!e.pair_id || !by_id.count(*e.pair_id)) {
      throw Error(ErrorCode::MissingPair, "true positive '" + e.id + "' has no paired entry");
    }
    auto q = predictions.find(*e.pair_id);
    if (q == predictions.end()) {
      throw Error(ErrorCode::MissingPrediction, "no prediction for entry '" + *e.pair_id + "'");
    }
    if (q->second == Verdict::Negative) ++fixed;
  }
  return ratio(fixed, tp);
}

MetricsReport evaluate(const Predictions& predictions, const std::vector<DatasetEntry>& entries) {
  auto r = metrics(score(predictions, entries));
  r.pfp = pair_fix_precision(predictions, entries);
  return r;
}

std::int64_t round_half_up(const Rational& r, int digits) {
  std::int64_t scale = 1;
  for (int i = 0; i < digits; ++i) scale *= 10;
  const std::int64_t num = r.numerator() * scale;
  const std::int64_t den = r.denominator();
  // floor(num/den + 1/2) for non-negative values.
  return (2 * num + den) / (2 * den);
}

std::string render_metric(const Metric& m) {
  if (!m) return "n/a";
  const std::int64_t thousandths = round_half_up(*m, 3);
  const std::int64_t hundredths = round_half_up(Rational(thousandths, 1000), 2);
  if (hundredths >= 100) return "1.00";
  if (hundredths == 0) return "0";
  char buf[8];
  std::snprintf(buf, sizeof buf, ".%02lld", static_cast<long long>(hundredths));
  return buf;
}

double to_double(const Rational& r) {
  return static_cast<double>(r.numerator()) / static_cast<double>(r.denominator());
}

}  // namespace docverify
