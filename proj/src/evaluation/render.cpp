#include "docverify/evaluation/render.hpp"

#include <sstream>

namespace docverify {

using nlohmann::json;

std::string render_metrics_table(const std::vector<std::pair<std::string, MetricsReport>>& rows) {
  std::ostringstream out;
  out << "| | prec. | spec. | rec. | PFP | F1 | | TP | FP | TN | FN |\n";
  out << "|---|---:|---:|---:|---:|---:|---|---:|---:|---:|---:|\n";
  for (const auto& [label, r] : rows) {
    out << "| " << label << " | " << render_metric(r.precision) << " | "
        << render_metric(r.specificity) << " | " << render_metric(r.recall) << " | "
        << render_metric(r.pfp) << " | " << render_metric(r.f1) << " | | " << r.cm.tp << " | "
        << r.cm.fp << " | " << r.cm.tn << " | " << r.cm.fn << " |\n";
  }
  return out.str();
}

std::string render_sweep_table(const SweepReport& report) {
  std::ostringstream out;
  out << "Positives fixed at " << report.positives << "; " << report.n_draws
      << " draws per ratio; seed " << report.seed << ". Cells: median [min, max].\n\n";
  out << "| split | negatives | prec. | spec. | rec. | PFP | F1 |\n";
  out << "|---|---:|---|---|---|---|---|\n";
  for (const auto& row : report.rows) {
    out << "| " << row.positive_percent << "%/" << 100 - row.positive_percent << "% | "
        << row.negatives << " |";
    for (const char* name : {"precision", "specificity", "recall", "pfp", "f1"}) {
      const auto& c = row.cells.at(name);
      if (!c.median) {
        out << " n/a |";
      } else {
        out << " " << render_metric(c.median) << " [" << render_metric(c.min) << ", "
            << render_metric(c.max) << "] |";
      }
    }
    out << "\n";
  }
  return out.str();
}

json metric_to_json(const Metric& m) {
  if (!m) return nullptr;
  return json{{"num", m->numerator()},
              {"den", m->denominator()},
              {"value", to_double(*m)},
              {"display", render_metric(m)}};
}

json to_json(const MetricsReport& r) {
  return json{{"precision", metric_to_json(r.precision)},
              {"recall", metric_to_json(r.recall)},
              {"specificity", metric_to_json(r.specificity)},
              {"f1", metric_to_json(r.f1)},
              {"pfp", metric_to_json(r.pfp)},
              {"confusion", {{"tp", r.cm.tp}, {"fp", r.cm.fp}, {"tn", r.cm.tn}, {"fn", r.cm.fn}}}};
}

json to_json(const SweepReport& report) {
  json rows = json::array();
  for (const auto& row : report.rows) {
    json cells = json::object();
    for (const auto& [name, c] : row.cells) {
      cells[name] = {{"median", metric_to_json(c.median)},
                     {"min", metric_to_json(c.min)},
                     {"max", metric_to_json(c.max)},
                     {"defined", c.defined}};
    }
    rows.push_back({{"positive_percent", row.positive_percent},
                    {"negatives", row.negatives},
                    {"cells", cells}});
  }
  return json{{"seed", report.seed},
              {"n_draws", report.n_draws},
              {"positives", report.positives},
              {"rows", rows}};
}

}  // namespace docverify
