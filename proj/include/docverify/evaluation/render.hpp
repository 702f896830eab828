#pragma once

#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "docverify/evaluation/metrics.hpp"
#include "docverify/evaluation/sweep.hpp"

namespace docverify {

// Markdown table: label | prec. spec. rec. PFP F1 | TP FP TN FN.
std::string render_metrics_table(const std::vector<std::pair<std::string, MetricsReport>>& rows);

// Markdown table with one row per ratio: median [min, max] per metric.
std::string render_sweep_table(const SweepReport& report);

nlohmann::json metric_to_json(const Metric& m);
nlohmann::json to_json(const MetricsReport& report);
nlohmann::json to_json(const SweepReport& report);

}  // namespace docverify
