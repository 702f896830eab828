#pragma once

#include <filesystem>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "docverify/corpus/adapter.hpp"
#include "docverify/corpus/function.hpp"
#include "docverify/execution/outcome.hpp"
#include "docverify/generation/generator.hpp"
#include "docverify/generation/provider.hpp"

namespace docverify {

enum class Transition { P2P, P2F, F2P, F2F };

struct TransitionTally {
  int p2p = 0;
  int p2f = 0;
  int f2p = 0;
  int f2f = 0;

  int total() const { return p2p + p2f + f2p + f2f; }
  void add(Transition t);

  friend bool operator==(const TransitionTally&, const TransitionTally&) = default;
};

enum class Verdict { Positive, Negative };

enum class Reason {
  F2pNoP2f,
  AllTestsPassed,
  UncompilableAfterRepairs,
  P2fPresent,
  NoF2p,
  RegeneratedCodeUncompilable,
  SubjectBroken,
  GenerationFailed,
  // Only produced by the ablation modes.
  F2pDespiteP2f,
  Phase1Failures,
};

enum class DetectionMode { Full, NoP2fGate, Phase1Only };

std::string_view to_string(Transition t);
std::string_view to_string(Verdict v);
std::string_view to_string(Reason r);
std::string_view to_string(DetectionMode m);
std::optional<Verdict> verdict_from_string(std::string_view s);
std::optional<Reason> reason_from_string(std::string_view s);
// Accepts both "no_p2f_gate" and "no-p2f-gate" spellings.
std::optional<DetectionMode> mode_from_string(std::string_view s);

struct Detection {
  std::string function_id;
  Verdict verdict = Verdict::Negative;
  Reason reason = Reason::GenerationFailed;
  std::optional<TransitionTally> tally;
  // f2p test names (failing tests in phase1-only mode).
  std::vector<std::string> evidence;
  // Files written for this function, relative to the report directory.
  std::vector<std::string> artifacts;
  int repair_attempts = 0;
  std::string detail;
  std::map<std::string, TestStatus> phase1;
  std::map<std::string, TestStatus> phase2;

  friend bool operator==(const Detection&, const Detection&) = default;
};

// Timeout and Crash are treated as Fail.
Transition classify_transition(TestStatus s1, TestStatus s2);

// Full: Positive iff f2p > 0 and p2f = 0. NoP2fGate: Positive iff f2p > 0.
// Phase1Only never reaches a tally and is rejected with invalid_argument.
std::pair<Verdict, Reason> verdict_from_tally(const TransitionTally& t, DetectionMode mode);

// Tallies every test in `tests`; a test absent from `res2` counts as Fail there.
TransitionTally tally_transitions(const std::vector<std::string>& tests,
                                  const ExecutionOutcome& res1, const ExecutionOutcome& res2);

// Memoizes adapter.check_subject per source file, safe to share across threads.
class SubjectHealth {
 public:
  SubjectHealth(std::filesystem::path root, const SubjectAdapter& adapter, RunLimits limits);
  const std::vector<Diagnostic>& check(const DocumentedFunction& fn);

 private:
  std::filesystem::path root_;
  const SubjectAdapter& adapter_;
  RunLimits limits_;
  std::mutex mu_;
  std::map<std::string, std::vector<Diagnostic>> cache_;
};

struct DetectorConfig {
  ProviderParams params;
  GenerationLimits generation;
  RunLimits run;
  DetectionMode mode = DetectionMode::Full;
  std::filesystem::path scratch_base;
  bool keep_workspaces = false;
  // Report directory and the per-function subdirectory below it; no
  // artifacts are written when report_dir is empty.
  std::filesystem::path report_dir;
  std::filesystem::path artifact_subdir;
  PromptLog* log = nullptr;
};

// Two-phase check of one function. Generation failures become a Negative
// detection; toolchain and sandbox failures propagate.
Detection detect_inconsistency(const DocumentedFunction& fn, const std::filesystem::path& subject_root,
                               const SubjectAdapter& adapter, Provider& provider,
                               const DetectorConfig& config, SubjectHealth* health = nullptr);

}  // namespace docverify
