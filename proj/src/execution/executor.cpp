#include "docverify/execution/executor.hpp"

#include <stdexcept>

#include "docverify/core/error.hpp"
#include "docverify/core/fs.hpp"
#include "docverify/core/text.hpp"

namespace docverify {

namespace fs = std::filesystem;

namespace {

// Removes the workspace on scope exit unless asked to keep it.
class WorkspaceGuard {
 public:
  WorkspaceGuard(fs::path root, bool keep) : root_(std::move(root)), keep_(keep) {}
  ~WorkspaceGuard() {
    if (keep_ || root_.empty()) return;
    std::error_code ec;
    fs::remove_all(root_, ec);
  }
  WorkspaceGuard(const WorkspaceGuard&) = delete;
  WorkspaceGuard& operator=(const WorkspaceGuard&) = delete;

 private:
  fs::path root_;
  bool keep_;
};

}  // namespace

void validate_limits(const RunLimits& limits) {
  if (limits.per_test_timeout.count() <= 0) {
    throw Error(ErrorCode::ConfigError, "per_test_timeout must be positive");
  }
  if (limits.build_timeout.count() <= 0) {
    throw Error(ErrorCode::ConfigError, "build_timeout must be positive");
  }
}

RawRunArtifacts run_with_timeout(const Workspace& workspace, const SubjectAdapter& adapter,
                                 const RunLimits& limits) {
  validate_limits(limits);
  return adapter.run(workspace, limits);
}

ExecutionOutcome execute_suite(const fs::path& subject_root, const DocumentedFunction& fn,
                               const GeneratedTestSuite& suite, const SubjectAdapter& adapter,
                               const std::optional<SynthesizedImpl>& impl_override,
                               const ExecutionOptions& options) {
  if (suite.tests.empty()) throw std::invalid_argument("execute_suite: empty suite");
  for (const auto& t : suite.tests) {
    if (text::trim(t.source_text).empty()) {
      throw std::invalid_argument("execute_suite: test " + t.name + " has no source");
    }
  }
  if (impl_override && !adapter.same_signature(impl_override->signature, fn.signature)) {
    throw Error(ErrorCode::SignatureMismatch, "override signature differs from " + fn.signature);
  }
  validate_limits(options.limits);

  auto base = options.scratch_base.empty() ? fs::temp_directory_path() / "docverify"
                                           : options.scratch_base;
  auto ws = adapter.materialize_test_workspace(subject_root, fn, suite, impl_override, base);
  WorkspaceGuard guard(ws.root, options.keep_workspace);

  auto raw = run_with_timeout(ws, adapter, options.limits);
  auto outcome = adapter.parse_run(raw);
  complete_results(outcome, raw);

  if (!options.artifact_dir.empty()) {
    fsutil::write_file(options.artifact_dir / "build.log", raw.build_log);
    fsutil::write_file(options.artifact_dir / "test.log", raw.test_log);
    fsutil::write_file(options.artifact_dir / "outcome.txt", render_outcome(outcome));
    if (options.keep_workspace) {
      fsutil::write_file(options.artifact_dir / "workspace.txt", ws.root.string() + "\n");
    }
  }
  return outcome;
}

std::string render_outcome(const ExecutionOutcome& outcome) {
  std::string out = outcome.compiled ? "compiled\n" : "not compiled\n";
  for (const auto& [name, status] : outcome.results) {
    out += name + " " + std::string(to_string(status)) + "\n";
  }
  for (const auto& d : outcome.diagnostics) out += d.render() + "\n";
  return out;
}

}  // namespace docverify
