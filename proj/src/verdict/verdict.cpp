#include "docverify/verdict/verdict.hpp"

#include <algorithm>
#include <array>
#include <stdexcept>

#include "docverify/core/error.hpp"
#include "docverify/core/fs.hpp"
#include "docverify/execution/executor.hpp"

namespace docverify {

namespace fs = std::filesystem;

namespace {

constexpr std::array<std::pair<Reason, std::string_view>, 10> kReasons{{
    {Reason::F2pNoP2f, "F2pNoP2f"},
    {Reason::AllTestsPassed, "AllTestsPassed"},
    {Reason::UncompilableAfterRepairs, "UncompilableAfterRepairs"},
    {Reason::P2fPresent, "P2fPresent"},
    {Reason::NoF2p, "NoF2p"},
    {Reason::RegeneratedCodeUncompilable, "RegeneratedCodeUncompilable"},
    {Reason::SubjectBroken, "SubjectBroken"},
    {Reason::GenerationFailed, "GenerationFailed"},
    {Reason::F2pDespiteP2f, "F2pDespiteP2f"},
    {Reason::Phase1Failures, "Phase1Failures"},
}};

}  // namespace

std::string_view to_string(Transition t) {
  switch (t) {
    case Transition::P2P: return "p2p";
    case Transition::P2F: return "p2f";
    case Transition::F2P: return "f2p";
    case Transition::F2F: return "f2f";
  }
  return "?";
}

std::string_view to_string(Verdict v) { return v == Verdict::Positive ? "Positive" : "Negative"; }

std::string_view to_string(Reason r) {
  for (const auto& [reason, name] : kReasons) {
    if (reason == r) return name;
  }
  return "?";
}

std::string_view to_string(DetectionMode m) {
  switch (m) {
    case DetectionMode::Full: return "full";
    case DetectionMode::NoP2fGate: return "no_p2f_gate";
    case DetectionMode::Phase1Only: return "phase1_only";
  }
  return "?";
}

std::optional<Verdict> verdict_from_string(std::string_view s) {
  if (s == "Positive") return Verdict::Positive;
  if (s == "Negative") return Verdict::Negative;
  return std::nullopt;
}

std::optional<Reason> reason_from_string(std::string_view s) {
  for (const auto& [reason, name] : kReasons) {
    if (name == s) return reason;
  }
  return std::nullopt;
}

std::optional<DetectionMode> mode_from_string(std::string_view s) {
  if (s == "full") return DetectionMode::Full;
  if (s == "no_p2f_gate" || s == "no-p2f-gate") return DetectionMode::NoP2fGate;
  if (s == "phase1_only" || s == "phase1-only") return DetectionMode::Phase1Only;
  return std::nullopt;
}

void TransitionTally::add(Transition t) {
  switch (t) {
    case Transition::P2P: ++p2p; break;
    case Transition::P2F: ++p2f; break;
    case Transition::F2P: ++f2p; break;
    case Transition::F2F: ++f2f; break;
  }
}

Transition classify_transition(TestStatus s1, TestStatus s2) {
  const bool a = is_passing(s1);
  const bool b = is_passing(s2);
  if (a) return b ? Transition::P2P : Transition::P2F;
  return b ? Transition::F2P : Transition::F2F;
}

std::pair<Verdict, Reason> verdict_from_tally(const TransitionTally& t, DetectionMode mode) {
  if (mode == DetectionMode::Phase1Only) {
    throw std::invalid_argument("verdict_from_tally: phase1_only has no tally");
  }
  if (t.f2p == 0) return {Verdict::Negative, Reason::NoF2p};
  if (t.p2f == 0) return {Verdict::Positive, Reason::F2pNoP2f};
  if (mode == DetectionMode::NoP2fGate) return {Verdict::Positive, Reason::F2pDespiteP2f};
  return {Verdict::Negative, Reason::P2fPresent};
}

TransitionTally tally_transitions(const std::vector<std::string>& tests,
                                  const ExecutionOutcome& res1, const ExecutionOutcome& res2) {
  TransitionTally tally;
  for (const auto& name : tests) {
    auto a = res1.results.find(name);
    auto b = res2.results.find(name);
    auto s1 = a == res1.results.end() ? TestStatus::Fail : a->second;
    auto s2 = b == res2.results.end() ? TestStatus::Fail : b->second;
    tally.add(classify_transition(s1, s2));
  }
  return tally;
}

SubjectHealth::SubjectHealth(fs::path root, const SubjectAdapter& adapter, RunLimits limits)
    : root_(std::move(root)), adapter_(adapter), limits_(limits) {}

const std::vector<Diagnostic>& SubjectHealth::check(const DocumentedFunction& fn) {
  std::lock_guard lock(mu_);
  auto it = cache_.find(fn.file_path);
  if (it == cache_.end()) {
    it = cache_.emplace(fn.file_path, adapter_.check_subject(root_, fn, limits_)).first;
  }
  return it->second;
}

namespace {

class Run {
 public:
  Run(const DocumentedFunction& fn, const fs::path& subject, const SubjectAdapter& adapter,
      Provider& provider, const DetectorConfig& config)
      : fn_(fn),
        subject_(subject),
        adapter_(adapter),
        config_(config),
        ctx_{provider, config.params, adapter, config.generation, config.log} {
    det_.function_id = fn.id;
  }

  Detection go(SubjectHealth* health) {
    if (health) {
      const auto& diags = health->check(fn_);
      if (!diags.empty()) {
        det_.detail = diags.front().render();
        return finish(Verdict::Negative, Reason::SubjectBroken);
      }
    }

    GeneratedTestSuite suite;
    try {
      auto behaviors = extract_behaviors(fn_, ctx_);
      write("behaviors.txt", render_behaviors(behaviors));
      suite = complete_tests(build_test_skeleton(behaviors, fn_, adapter_), fn_, ctx_);
    } catch (const Error& e) {
      return failed(e);
    }

    auto res1 = execute(suite, std::nullopt, "phase1");
    while (!res1.compiled && suite.revision < config_.generation.max_repair_attempts) {
      auto diags = res1.diagnostics;
      if (diags.empty()) diags.push_back({DiagnosticKind::CompileError, "build failed", {}});
      try {
        suite = repair_tests(suite, diags, fn_, ctx_);
      } catch (const Error& e) {
        return failed(e);
      }
      det_.repair_attempts = suite.revision;
      res1 = execute(suite, std::nullopt, "phase1");
    }
    det_.phase1 = res1.results;
    if (!res1.compiled) {
      if (!res1.diagnostics.empty()) det_.detail = res1.diagnostics.front().render();
      return finish(Verdict::Negative, Reason::UncompilableAfterRepairs);
    }
    auto failing = res1.failed();
    if (failing.empty()) return finish(Verdict::Negative, Reason::AllTestsPassed);
    if (config_.mode == DetectionMode::Phase1Only) {
      det_.evidence = failing;
      return finish(Verdict::Positive, Reason::Phase1Failures);
    }

    std::optional<SynthesizedImpl> impl;
    try {
      impl = synthesize_code(fn_, ctx_);
    } catch (const Error& e) {
      return failed(e);
    }
    write(std::string("impl.") + std::string(adapter_.code_fence_tag()), impl->source_text + "\n");

    auto res2 = execute(suite, impl, "phase2");
    det_.phase2 = res2.results;
    if (!res2.compiled) {
      if (!res2.diagnostics.empty()) det_.detail = res2.diagnostics.front().render();
      return finish(Verdict::Negative, Reason::RegeneratedCodeUncompilable);
    }

    auto names = suite.names();
    auto tally = tally_transitions(names, res1, res2);
    det_.tally = tally;
    for (const auto& name : names) {
      auto b = res2.results.find(name);
      if (!is_passing(res1.results.at(name)) && b != res2.results.end() && is_passing(b->second)) {
        det_.evidence.push_back(name);
      }
    }
    auto [verdict, reason] = verdict_from_tally(tally, config_.mode);
    return finish(verdict, reason);
  }

 private:
  bool recording() const { return !config_.report_dir.empty(); }

  fs::path artifact_root() const { return config_.report_dir / config_.artifact_subdir; }

  void write(const std::string& name, const std::string& content) {
    if (!recording()) return;
    fsutil::write_file(artifact_root() / name, content);
    det_.artifacts.push_back((config_.artifact_subdir / name).generic_string());
  }

  static std::string render_behaviors(const std::vector<BehaviorItem>& items) {
    std::string out;
    for (const auto& b : items) out += std::to_string(b.index) + ". " + b.description + "\n";
    return out;
  }

  ExecutionOutcome execute(const GeneratedTestSuite& suite,
                           const std::optional<SynthesizedImpl>& impl, const std::string& phase) {
    const auto ext = std::string(adapter_.code_fence_tag());
    const auto tag = phase + "-r" + std::to_string(suite.revision);
    write("tests-r" + std::to_string(suite.revision) + "." + ext, adapter_.render_suite(suite, fn_));

    ExecutionOptions opts;
    opts.limits = config_.run;
    opts.scratch_base = config_.scratch_base;
    opts.keep_workspace = config_.keep_workspaces;
    if (recording()) {
      opts.artifact_dir = artifact_root() / tag;
    }
    auto outcome = execute_suite(subject_, fn_, suite, adapter_, impl, opts);
    if (recording()) {
      for (const char* f : {"build.log", "test.log", "outcome.txt"}) {
        det_.artifacts.push_back((config_.artifact_subdir / tag / f).generic_string());
      }
    }
    return outcome;
  }

  Detection failed(const Error& e) {
    det_.detail = e.what();
    return finish(Verdict::Negative, Reason::GenerationFailed);
  }

  Detection finish(Verdict v, Reason r) {
    det_.verdict = v;
    det_.reason = r;
    // Repeated writes of one suite revision are recorded once.
    std::sort(det_.artifacts.begin(), det_.artifacts.end());
    det_.artifacts.erase(std::unique(det_.artifacts.begin(), det_.artifacts.end()),
                         det_.artifacts.end());
    return det_;
  }

  const DocumentedFunction& fn_;
  const fs::path& subject_;
  const SubjectAdapter& adapter_;
  const DetectorConfig& config_;
  GenerationContext ctx_;
  Detection det_;
};

}  // namespace

Detection detect_inconsistency(const DocumentedFunction& fn, const fs::path& subject_root,
                               const SubjectAdapter& adapter, Provider& provider,
                               const DetectorConfig& config, SubjectHealth* health) {
  return Run(fn, subject_root, adapter, provider, config).go(health);
}

}  // namespace docverify
