#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "docverify/evaluation/metrics.hpp"
#include "docverify/evaluation/sweep.hpp"
#include "docverify/generation/generator.hpp"
#include "docverify/verdict/verdict.hpp"

namespace docverify {

inline constexpr const char* kToolVersion = "0.3.0";
inline constexpr const char* kReportFile = "report.jsonl";
inline constexpr const char* kSummaryFile = "summary.md";
inline constexpr const char* kPromptFile = "prompts.jsonl";

// Contents of report.jsonl. The first line holds everything that varies
// between identical reruns (start time, elapsed time); every later line is
// a deterministic function of the inputs.
struct RunReport {
  std::string command;
  std::string tool_version = kToolVersion;
  std::string template_version;
  nlohmann::json config = nlohmann::json::object();
  std::string started_at;
  std::int64_t elapsed_ms = 0;

  std::vector<std::string> warnings;
  std::vector<Detection> detections;  // ordered by function id
  Predictions predictions;            // eval runs only
  std::optional<MetricsReport> metrics;
  std::optional<SweepReport> sweep;

  int positives() const;
  std::map<std::string, int> counts_by_reason() const;
};

nlohmann::json detection_to_json(const Detection& d);
Detection detection_from_json(const nlohmann::json& j);

std::string render_report_jsonl(const RunReport& report);
// Human-readable summary: positives with evidence and artifact paths.
std::string render_summary(const RunReport& report);

// Writes report.jsonl, summary.md and (when a log is given) prompts.jsonl.
void write_run_report(const RunReport& report, const std::filesystem::path& dir,
                      const PromptLog* log = nullptr);

// Accepts a run directory or the report file itself. Throws MissingReport
// when the file is absent, unreadable or corrupted.
RunReport read_run_report(const std::filesystem::path& dir);
RunReport parse_run_report(std::string_view content, const std::string& source);

// Removes the files a previous run left in `dir`.
void clear_run_outputs(const std::filesystem::path& dir);

// "artifacts/<sanitized id>-<hash prefix>"
std::string artifact_subdir_for(const std::string& function_id);

std::string utc_timestamp();

}  // namespace docverify
