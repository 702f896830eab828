#include "docverify/cli/report.hpp"

#include <algorithm>
#include <ctime>
#include <sstream>

#include "docverify/core/error.hpp"
#include "docverify/core/fs.hpp"
#include "docverify/core/hash.hpp"
#include "docverify/core/text.hpp"
#include "docverify/evaluation/render.hpp"

namespace docverify {

namespace fs = std::filesystem;
using nlohmann::json;

int RunReport::positives() const {
  return static_cast<int>(std::count_if(detections.begin(), detections.end(), [](const auto& d) {
    return d.verdict == Verdict::Positive;
  }));
}

std::map<std::string, int> RunReport::counts_by_reason() const {
  std::map<std::string, int> out;
  for (const auto& d : detections) ++out[std::string(to_string(d.reason))];
  return out;
}

namespace {

json statuses_to_json(const std::map<std::string, TestStatus>& m) {
  json out = json::object();
  for (const auto& [name, s] : m) out[name] = std::string(to_string(s));
  return out;
}

std::map<std::string, TestStatus> statuses_from_json(const json& j) {
  std::map<std::string, TestStatus> out;
  for (const auto& [name, v] : j.items()) {
    auto s = test_status_from_string(v.get<std::string>());
    if (!s) throw std::runtime_error("bad test status '" + v.get<std::string>() + "'");
    out[name] = *s;
  }
  return out;
}

}  // namespace

json detection_to_json(const Detection& d) {
  json j = {{"kind", "detection"},
            {"function_id", d.function_id},
            {"verdict", std::string(to_string(d.verdict))},
            {"reason", std::string(to_string(d.reason))}};
  if (d.tally) {
    j["tally"] = {{"p2p", d.tally->p2p}, {"p2f", d.tally->p2f}, {"f2p", d.tally->f2p},
                  {"f2f", d.tally->f2f}};
  } else {
    j["tally"] = nullptr;
  }
  j["evidence"] = d.evidence;
  j["repair_attempts"] = d.repair_attempts;
  j["phase1"] = statuses_to_json(d.phase1);
  j["phase2"] = statuses_to_json(d.phase2);
  j["artifacts"] = d.artifacts;
  j["detail"] = d.detail;
  return j;
}

Detection detection_from_json(const json& j) {
  Detection d;
  d.function_id = j.at("function_id").get<std::string>();
  auto v = verdict_from_string(j.at("verdict").get<std::string>());
  auto r = reason_from_string(j.at("reason").get<std::string>());
  if (!v || !r) throw std::runtime_error("bad verdict or reason");
  d.verdict = *v;
  d.reason = *r;
  if (j.contains("tally") && !j["tally"].is_null()) {
    const auto& t = j["tally"];
    d.tally = TransitionTally{t.at("p2p").get<int>(), t.at("p2f").get<int>(), t.at("f2p").get<int>(),
                              t.at("f2f").get<int>()};
  }
  d.evidence = j.value("evidence", std::vector<std::string>{});
  d.repair_attempts = j.value("repair_attempts", 0);
  if (j.contains("phase1")) d.phase1 = statuses_from_json(j["phase1"]);
  if (j.contains("phase2")) d.phase2 = statuses_from_json(j["phase2"]);
  d.artifacts = j.value("artifacts", std::vector<std::string>{});
  d.detail = j.value("detail", std::string());
  return d;
}

std::string render_report_jsonl(const RunReport& r) {
  std::string out;
  auto line = [&](const json& j) { out += j.dump() + "\n"; };
  line({{"kind", "header"},
        {"command", r.command},
        {"started_at", r.started_at},
        {"elapsed_ms", r.elapsed_ms}});
  line({{"kind", "run"},
        {"tool_version", r.tool_version},
        {"template_version", r.template_version},
        {"config", r.config},
        {"warnings", r.warnings}});
  for (const auto& d : r.detections) line(detection_to_json(d));
  for (const auto& [id, v] : r.predictions) {
    line({{"kind", "prediction"}, {"id", id}, {"verdict", std::string(to_string(v))}});
  }
  line({{"kind", "aggregate"},
        {"functions", r.detections.size()},
        {"positives", r.positives()},
        {"by_reason", r.counts_by_reason()}});
  if (r.metrics) line({{"kind", "metrics"}, {"metrics", to_json(*r.metrics)}});
  if (r.sweep) line({{"kind", "sweep"}, {"sweep", to_json(*r.sweep)}});
  return out;
}

std::string render_summary(const RunReport& r) {
  std::ostringstream out;
  out << "# docverify " << r.command << "\n\n";
  if (!r.template_version.empty()) out << "Template version: " << r.template_version << "\n";
  if (r.config.contains("mode")) out << "Mode: " << r.config["mode"].get<std::string>() << "\n";
  out << "Functions analyzed: " << r.detections.size() << "\n";
  out << "Positives: " << r.positives() << "\n\n";

  if (!r.detections.empty()) {
    out << "## Verdicts by reason\n\n";
    for (const auto& [reason, n] : r.counts_by_reason()) out << "- " << reason << ": " << n << "\n";
    out << "\n";
  }

  out << "## Findings\n\n";
  if (r.positives() == 0) {
    out << "no findings\n";
  } else {
    for (const auto& d : r.detections) {
      if (d.verdict != Verdict::Positive) continue;
      out << "### " << d.function_id << "\n\n";
      out << "Reason: " << to_string(d.reason);
      if (d.tally) {
        out << " (p2p " << d.tally->p2p << ", p2f " << d.tally->p2f << ", f2p " << d.tally->f2p
            << ", f2f " << d.tally->f2f << ")";
      }
      out << "\n\nEvidence tests: " << text::join(d.evidence, ", ") << "\n";
      if (!d.artifacts.empty()) {
        out << "\nArtifacts:\n";
        for (const auto& a : d.artifacts) out << "- " << a << "\n";
      }
      out << "\n";
    }
  }

  if (r.metrics) {
    out << "\n## Metrics\n\n";
    out << render_metrics_table({{r.config.value("mode", std::string("full")), *r.metrics}});
  }
  if (r.sweep) {
    out << "\n## Imbalance sweep\n\n" << render_sweep_table(*r.sweep);
  }
  if (!r.warnings.empty()) {
    out << "\n## Warnings\n\n";
    for (const auto& w : r.warnings) out << "- " << w << "\n";
  }
  return out.str();
}

void write_run_report(const RunReport& report, const fs::path& dir, const PromptLog* log) {
  fsutil::write_file(dir / kReportFile, render_report_jsonl(report));
  fsutil::write_file(dir / kSummaryFile, render_summary(report));
  if (log) {
    auto records = log->records();
    std::stable_sort(records.begin(), records.end(),
                     [](const auto& a, const auto& b) { return a.function_id < b.function_id; });
    std::string out;
    for (const auto& rec : records) {
      out += json{{"function_id", rec.function_id},
                  {"stage", rec.stage},
                  {"prompt", rec.prompt},
                  {"response", rec.response}}
                 .dump() +
             "\n";
    }
    fsutil::write_file(dir / kPromptFile, out);
  }
}

RunReport read_run_report(const fs::path& dir) {
  std::error_code ec;
  const auto file = fs::is_directory(dir, ec) ? dir / kReportFile : dir;
  std::string content;
  try {
    content = fsutil::read_file(file);
  } catch (const Error&) {
    throw Error(ErrorCode::MissingReport, "no run report at " + file.string());
  }
  return parse_run_report(content, file.string());
}

RunReport parse_run_report(std::string_view content, const std::string& source) {
  RunReport r;
  bool saw_header = false;
  int line_no = 0;
  try {
    for (const auto& line : text::split_lines(content)) {
      ++line_no;
      if (text::trim(line).empty()) continue;
      auto j = json::parse(line);
      const auto kind = j.at("kind").get<std::string>();
      if (kind == "header") {
        saw_header = true;
        r.command = j.value("command", std::string());
        r.started_at = j.value("started_at", std::string());
        r.elapsed_ms = j.value("elapsed_ms", std::int64_t{0});
      } else if (kind == "run") {
        r.tool_version = j.value("tool_version", std::string());
        r.template_version = j.value("template_version", std::string());
        r.config = j.value("config", json::object());
        r.warnings = j.value("warnings", std::vector<std::string>{});
      } else if (kind == "detection") {
        r.detections.push_back(detection_from_json(j));
      } else if (kind == "prediction") {
        auto v = verdict_from_string(j.at("verdict").get<std::string>());
        if (!v) throw std::runtime_error("bad verdict");
        r.predictions[j.at("id").get<std::string>()] = *v;
      }
    }
  } catch (const std::exception& e) {
    throw Error(ErrorCode::MissingReport, source + ":" + std::to_string(line_no) +
                                              ": corrupted run report (" + e.what() + ")");
  }
  if (!saw_header) throw Error(ErrorCode::MissingReport, source + ": no header line");
  return r;
}

void clear_run_outputs(const fs::path& dir) {
  std::error_code ec;
  for (const char* f : {kReportFile, kSummaryFile, kPromptFile}) fs::remove(dir / f, ec);
  fs::remove_all(dir / "artifacts", ec);
}

std::string artifact_subdir_for(const std::string& function_id) {
  return "artifacts/" + text::sanitize_for_path(function_id) + "-" +
         sha256_hex(function_id).substr(0, 8);
}

std::string utc_timestamp() {
  std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace docverify
