#include "docverify/cli/commands.hpp"

#include <chrono>
#include <map>
#include <set>
#include <thread>

#include "docverify/core/text.hpp"

#include "docverify/core/error.hpp"
#include "docverify/core/fs.hpp"
#include "docverify/core/parallel.hpp"
#include "docverify/corpus/corpus.hpp"
#include "docverify/evaluation/dataset.hpp"
#include "docverify/generation/templates.hpp"

namespace docverify {

namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

std::int64_t ms_since(Clock::time_point t0) {
  return std::chrono::duration_cast<std::chrono::milliseconds>(Clock::now() - t0).count();
}

unsigned worker_count(const Config& config, const SubjectAdapter& adapter) {
  if (!adapter.parallel_safe() || config.provider.script_mode == "playbook") return 1;
  unsigned n = config.limits.parallelism;
  if (n == 0) n = std::max(1u, std::thread::hardware_concurrency());
  return std::min(n, adapter.max_parallelism());
}

fs::path absolute_or_empty(const std::string& p) {
  return p.empty() ? fs::path() : fs::absolute(p);
}

void guard_outside(const fs::path& dir, const fs::path& root, const char* what) {
  if (!dir.empty() && fsutil::is_within(fs::weakly_canonical(dir), fs::weakly_canonical(root))) {
    throw Error(ErrorCode::ConfigError,
                std::string(what) + " " + dir.string() + " lies inside the subject " + root.string());
  }
}

DetectorConfig detector_config(const Config& config, DetectionMode mode, const fs::path& report_dir,
                               PromptLog* log) {
  DetectorConfig dc;
  dc.params = ProviderParams{config.provider.model, config.provider.temperature};
  dc.generation = generation_limits(config);
  dc.run = run_limits(config);
  dc.mode = mode;
  dc.scratch_base = absolute_or_empty(config.work_dir);
  dc.keep_workspaces = config.keep_workspaces;
  dc.report_dir = report_dir;
  dc.log = log;
  return dc;
}

bool matches_filter(const DocumentedFunction& fn, const std::vector<std::string>& names) {
  if (names.empty()) return true;
  for (const auto& n : names) {
    if (n == fn.id || n == fn.qualified_name || n == fn.name()) return true;
  }
  return false;
}

RunReport start_report(const std::string& command, const Config& config, DetectionMode mode) {
  RunReport r;
  r.command = command;
  r.template_version = templates::version();
  r.config = config_to_json(config);
  r.config["mode"] = std::string(to_string(mode));
  r.started_at = utc_timestamp();
  return r;
}

}  // namespace

ScanResult cmd_scan(const fs::path& root, const Config& config, const ScanOptions& options) {
  const auto t0 = Clock::now();
  validate(config);
  const auto mode = options.mode.value_or(config.mode);
  const fs::path report_dir = fs::absolute(options.report_dir.value_or(config.report_dir));
  const fs::path subject = fs::absolute(root);
  guard_outside(report_dir, subject, "report_dir");
  guard_outside(absolute_or_empty(config.work_dir), subject, "work_dir");

  auto adapter = make_adapter(config.subject_language, adapter_options(config));
  auto extraction = extract_functions(subject, *adapter);
  std::vector<DocumentedFunction> targets;
  for (auto& fn : filter_eligible(extraction.functions)) {
    if (matches_filter(fn, options.functions)) targets.push_back(std::move(fn));
  }
  if (!options.functions.empty() && targets.empty()) {
    throw Error(ErrorCode::ConfigError,
                "no eligible function matches " + text::join(options.functions, ", "));
  }

  auto provider = options.provider ? options.provider : make_provider(config);
  PromptLog log;
  clear_run_outputs(report_dir);
  fs::create_directories(report_dir);

  auto dc = detector_config(config, mode, report_dir, &log);
  SubjectHealth health(subject, *adapter, dc.run);
  std::vector<Detection> detections(targets.size());
  parallel_for(targets.size(), worker_count(config, *adapter), [&](std::size_t i) {
    auto local = dc;
    local.artifact_subdir = artifact_subdir_for(targets[i].id);
    detections[i] = detect_inconsistency(targets[i], subject, *adapter, *provider, local, &health);
  });

  ScanResult result;
  result.report = start_report("scan", config, mode);
  result.report.warnings = extraction.warnings;
  result.report.detections = std::move(detections);
  result.report.elapsed_ms = ms_since(t0);
  result.report_dir = report_dir;
  write_run_report(result.report, report_dir, &log);

  const auto& dets = result.report.detections;
  if (!dets.empty() && std::all_of(dets.begin(), dets.end(), [](const Detection& d) {
        return d.reason == Reason::SubjectBroken;
      })) {
    throw Error(ErrorCode::SubjectBroken,
                "no function's unit builds under " + subject.string() + "; see " +
                    (report_dir / kSummaryFile).string());
  }
  result.exit_code = result.report.positives() > 0 ? 1 : 0;
  return result;
}

Predictions replay_predictions(const RunReport& prior, const std::vector<DatasetEntry>& entries) {
  Predictions out;
  std::map<std::string, Verdict> by_function;
  for (const auto& d : prior.detections) by_function[d.function_id] = d.verdict;
  for (const auto& e : entries) {
    if (auto it = prior.predictions.find(e.id); it != prior.predictions.end()) {
      out[e.id] = it->second;
    } else if (auto jt = by_function.find(e.id); jt != by_function.end()) {
      out[e.id] = jt->second;
    }
  }
  return out;
}

namespace {

const DocumentedFunction* find_entry_function(const std::vector<DocumentedFunction>& fns,
                                              const DatasetEntry& e) {
  for (const auto& fn : fns) {
    if (fn.file_path != e.subject.file) continue;
    if (fn.qualified_name == e.subject.function || fn.id == e.subject.function ||
        fn.name() == e.subject.function) {
      return &fn;
    }
  }
  return nullptr;
}

}  // namespace

RunReport cmd_eval(const fs::path& manifest, const Config& config, const EvalOptions& options) {
  const auto t0 = Clock::now();
  const auto mode = options.mode.value_or(config.mode);
  auto entries = load_dataset(manifest);
  const fs::path report_dir = fs::absolute(options.report_dir.value_or(config.report_dir));

  RunReport report = start_report("eval", config, mode);
  PromptLog log;
  bool live = !options.replay;

  if (!live) {
    auto prior = read_run_report(*options.replay);
    report.predictions = replay_predictions(prior, entries);
    clear_run_outputs(report_dir);
    fs::create_directories(report_dir);
  } else {
    validate(config);
    auto adapter = make_adapter(config.subject_language, adapter_options(config));
    auto provider = options.provider ? options.provider : make_provider(config);
    const auto base = fs::absolute(manifest).parent_path();
    std::map<fs::path, std::vector<DocumentedFunction>> extracted;
    std::vector<std::pair<const DatasetEntry*, DocumentedFunction>> jobs;
    for (const auto& e : entries) {
      auto root = base / e.subject.project / e.subject.revision;
      auto it = extracted.find(root);
      if (it == extracted.end()) {
        auto ex = extract_functions(root, *adapter);
        for (const auto& w : ex.warnings) report.warnings.push_back(w);
        it = extracted.emplace(root, filter_eligible(ex.functions)).first;
      }
      const auto* fn = find_entry_function(it->second, e);
      if (!fn) {
        throw Error(ErrorCode::SchemaError, "entry '" + e.id + "': no eligible function " +
                                                e.subject.function + " in " +
                                                (root / e.subject.file).string());
      }
      guard_outside(report_dir, root, "report_dir");
      jobs.emplace_back(&e, *fn);
    }
    clear_run_outputs(report_dir);
    fs::create_directories(report_dir);

    auto dc = detector_config(config, mode, report_dir, &log);
    std::map<fs::path, std::unique_ptr<SubjectHealth>> health;
    for (const auto& [root, _] : extracted) {
      health[root] = std::make_unique<SubjectHealth>(root, *adapter, dc.run);
    }
    std::vector<Detection> detections(jobs.size());
    parallel_for(jobs.size(), worker_count(config, *adapter), [&](std::size_t i) {
      const auto& [entry, fn] = jobs[i];
      auto root = base / entry->subject.project / entry->subject.revision;
      auto local = dc;
      local.artifact_subdir = artifact_subdir_for(entry->id);
      auto d = detect_inconsistency(fn, root, *adapter, *provider, local, health[root].get());
      // Several entries may name one function in different revisions.
      d.function_id = entry->id;
      detections[i] = std::move(d);
    });
    std::sort(detections.begin(), detections.end(),
              [](const auto& a, const auto& b) { return a.function_id < b.function_id; });
    for (const auto& d : detections) report.predictions[d.function_id] = d.verdict;
    report.detections = std::move(detections);
  }

  report.metrics = evaluate(report.predictions, entries);
  if (options.sweep) {
    auto ratios = options.ratios.empty() ? default_ratio_grid() : options.ratios;
    report.sweep = imbalance_sweep(report.predictions, entries, ratios, options.draws,
                                   options.seed.value_or(config.seed));
  }
  report.elapsed_ms = ms_since(t0);
  write_run_report(report, report_dir, live ? &log : nullptr);
  return report;
}

std::string cmd_report(const fs::path& run_dir) { return render_summary(read_run_report(run_dir)); }

}  // namespace docverify
