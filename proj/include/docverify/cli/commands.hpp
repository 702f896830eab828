#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "docverify/cli/config.hpp"
#include "docverify/cli/report.hpp"

namespace docverify {

struct ScanOptions {
  // Keeps functions whose name, qualified name or id is listed.
  std::vector<std::string> functions;
  std::optional<DetectionMode> mode;
  std::optional<std::filesystem::path> report_dir;
  // Replaces the configured provider when set.
  std::shared_ptr<Provider> provider;
};

struct ScanResult {
  RunReport report;
  std::filesystem::path report_dir;
  int exit_code = 0;  // 0: no Positive, 1: at least one Positive
};

// Extracts, filters and checks every eligible function under `root`, then
// writes the run report. Throws ConfigError, and SubjectBroken when no
// function's unit builds.
ScanResult cmd_scan(const std::filesystem::path& root, const Config& config,
                    const ScanOptions& options = {});

struct EvalOptions {
  // Prior run directory or report file; the detector is run per entry otherwise.
  std::optional<std::filesystem::path> replay;
  bool sweep = false;
  std::vector<int> ratios;  // default grid when empty
  int draws = 1000;
  std::optional<std::uint64_t> seed;  // config seed when unset
  std::optional<DetectionMode> mode;
  std::optional<std::filesystem::path> report_dir;
  std::shared_ptr<Provider> provider;
};

// Live mode resolves each entry to `<manifest dir>/<project>/<revision>` and
// the function whose file and (qualified) name match the entry.
RunReport cmd_eval(const std::filesystem::path& manifest, const Config& config,
                   const EvalOptions& options = {});

// Predictions for the manifest entries taken from a prior report. Prediction
// lines win; detection lines are matched on function id.
Predictions replay_predictions(const RunReport& prior, const std::vector<DatasetEntry>& entries);

std::string cmd_report(const std::filesystem::path& run_dir);

}  // namespace docverify
