#include <CLI11.hpp>

#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "docverify/cli/commands.hpp"
#include "docverify/core/error.hpp"
#include "docverify/evaluation/render.hpp"

namespace dv = docverify;

namespace {

constexpr int kExitError = 2;

dv::DetectionMode parse_mode(const std::string& s) {
  auto m = dv::mode_from_string(s);
  if (!m) throw dv::Error(dv::ErrorCode::ConfigError, "unknown mode '" + s + "'");
  return *m;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Checks that functions do what their documentation says."};
  app.set_version_flag("--version", std::string(dv::kToolVersion));
  app.require_subcommand(1);

  std::string scan_root, config_file, mode, report_dir;
  std::vector<std::string> functions;
  auto* scan = app.add_subcommand("scan", "Analyze every eligible function under a source tree");
  scan->add_option("root", scan_root, "Subject source tree")->required();
  scan->add_option("--config", config_file, "JSON configuration file")->required();
  scan->add_option("--function", functions, "Only analyze these functions (repeatable)");
  scan->add_option("--mode", mode, "full | no-p2f-gate | phase1-only");
  scan->add_option("--report-dir", report_dir, "Overrides report_dir from the config");

  std::string manifest, replay, ratios_text;
  bool sweep = false;
  int draws = 1000;
  std::optional<std::uint64_t> seed;
  auto* eval = app.add_subcommand("eval", "Score predictions against a labeled dataset");
  eval->add_option("manifest", manifest, "Dataset manifest (JSON lines)")->required();
  eval->add_option("--config", config_file, "JSON configuration file");
  eval->add_option("--replay", replay, "Take predictions from a prior run directory");
  eval->add_flag("--sweep", sweep, "Run the class-imbalance sweep");
  eval->add_option("--ratios", ratios_text, "Positive shares in percent, e.g. 50,40,30,20,10");
  eval->add_option("--draws", draws, "Subsets per ratio")->check(CLI::PositiveNumber);
  eval->add_option("--seed", seed, "Sweep seed (defaults to the config seed)");
  eval->add_option("--mode", mode, "full | no-p2f-gate | phase1-only");
  eval->add_option("--report-dir", report_dir, "Overrides report_dir from the config");

  std::string run_dir;
  auto* report = app.add_subcommand("report", "Summarize a finished run");
  report->add_option("run_dir", run_dir, "Report directory of a scan or eval run")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : kExitError;
  }

  try {
    if (*scan) {
      auto config = dv::load_config(config_file);
      dv::ScanOptions opts;
      opts.functions = functions;
      if (!mode.empty()) opts.mode = parse_mode(mode);
      if (!report_dir.empty()) opts.report_dir = report_dir;
      auto result = dv::cmd_scan(scan_root, config, opts);
      std::cout << result.report.detections.size() << " functions analyzed, "
                << result.report.positives() << " positive; report in "
                << result.report_dir.string() << "\n";
      return result.exit_code;
    }
    if (*eval) {
      dv::Config config;
      if (!config_file.empty()) {
        config = dv::load_config(config_file);
      } else if (replay.empty()) {
        throw dv::Error(dv::ErrorCode::ConfigError, "eval without --replay needs --config");
      }
      dv::EvalOptions opts;
      if (!replay.empty()) opts.replay = replay;
      opts.sweep = sweep;
      opts.draws = draws;
      opts.seed = seed;
      if (!mode.empty()) opts.mode = parse_mode(mode);
      if (!report_dir.empty()) opts.report_dir = report_dir;
      for (const auto& part : CLI::detail::split(ratios_text, ',')) {
        if (part.empty()) continue;
        try {
          opts.ratios.push_back(std::stoi(part));
        } catch (const std::exception&) {
          throw dv::Error(dv::ErrorCode::ConfigError, "bad ratio '" + part + "'");
        }
      }
      auto r = dv::cmd_eval(manifest, config, opts);
      std::cout << dv::render_metrics_table({{r.config.value("mode", std::string("full")), *r.metrics}});
      if (r.sweep) std::cout << "\n" << dv::render_sweep_table(*r.sweep);
      return 0;
    }
    if (*report) {
      std::cout << dv::cmd_report(run_dir);
      return 0;
    }
  } catch (const dv::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitError;
  }
  return kExitError;
}
