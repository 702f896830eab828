#pragma once

#include <filesystem>
#include <optional>

#include "docverify/corpus/adapter.hpp"
#include "docverify/corpus/function.hpp"
#include "docverify/execution/outcome.hpp"
#include "docverify/generation/suite.hpp"

namespace docverify {

struct ExecutionOptions {
  RunLimits limits;
  // Parent of per-run workspaces; the system temp dir when empty.
  std::filesystem::path scratch_base;
  bool keep_workspace = false;
  // When set, build.log / test.log / outcome.txt are written here.
  std::filesystem::path artifact_dir;
};

// Throws ConfigError for zero or negative timeouts.
void validate_limits(const RunLimits& limits);

// Runs a materialized workspace. Tests over the per-test timeout are
// recorded in `timed_out`; the remaining tests still run.
RawRunArtifacts run_with_timeout(const Workspace& workspace, const SubjectAdapter& adapter,
                                 const RunLimits& limits);

// Copies the subject, injects the suite (and the override, when given),
// runs it, and normalizes the result. The subject tree is never written.
ExecutionOutcome execute_suite(const std::filesystem::path& subject_root,
                               const DocumentedFunction& fn, const GeneratedTestSuite& suite,
                               const SubjectAdapter& adapter,
                               const std::optional<SynthesizedImpl>& impl_override,
                               const ExecutionOptions& options = {});

// One line per test ("name status"), sorted by name, then diagnostics.
std::string render_outcome(const ExecutionOutcome& outcome);

}  // namespace docverify
