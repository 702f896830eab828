// End-to-end acceptance checks. One PASS/FAIL line per criterion; the exit
// status is nonzero when any criterion fails.

#include <chrono>
#include <functional>
#include <iostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "docverify/cli/commands.hpp"
#include "docverify/core/error.hpp"
#include "docverify/core/fs.hpp"
#include "docverify/core/text.hpp"
#include "docverify/corpus/corpus.hpp"
#include "docverify/evaluation/metrics.hpp"
#include "docverify/generation/generator.hpp"
#include "support.hpp"

namespace dv = docverify;
namespace fs = std::filesystem;
using dvtest::TempDir;
using nlohmann::json;

namespace {

// Collects the first few failed expectations of one criterion.
struct Check {
  std::vector<std::string> failures;

  void expect(bool ok, const std::string& what) {
    if (!ok && failures.size() < 5) failures.push_back(what);
  }
  bool ok() const { return failures.empty(); }
};

fs::path corpus() { return dvtest::fixtures() / "corpus"; }
fs::path manifest() { return corpus() / "manifest.jsonl"; }

std::vector<std::string> report_body(const fs::path& dir) {
  auto lines = dv::text::split_lines(dv::fsutil::read_file(dir / dv::kReportFile));
  if (!lines.empty()) lines.erase(lines.begin());
  return lines;
}

std::set<std::string> positives(const dv::RunReport& r) {
  std::set<std::string> out;
  for (const auto& [id, v] : r.predictions) {
    if (v == dv::Verdict::Positive) out.insert(id);
  }
  return out;
}

bool subset(const std::set<std::string>& a, const std::set<std::string>& b) {
  return std::includes(b.begin(), b.end(), a.begin(), a.end());
}

std::string show(const dv::Metric& m) { return dv::render_metric(m); }

// ---------------------------------------------------------------------------

void verdict_oracle(Check& c) {
  int cases = 0;
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b)
      for (int f = 0; f < 4; ++f)
        for (int g = 0; g < 4; ++g) {
          dv::TransitionTally t{a, b, f, g};
          bool oracle = t.f2p > 0 && t.p2f == 0;
          auto [verdict, reason] = dv::verdict_from_tally(t, dv::DetectionMode::Full);
          c.expect((verdict == dv::Verdict::Positive) == oracle,
                   "tally " + std::to_string(a) + std::to_string(b) + std::to_string(f) +
                       std::to_string(g));
          ++cases;
        }
  c.expect(cases == 256, "case count");
}

void metric_goldens(Check& c) {
  struct Row {
    dv::ConfusionMatrix cm;
    std::vector<std::pair<const char*, std::string>> expected;
  };
  const std::vector<Row> rows = {
      {{15, 2, 70, 55}, {{"precision", ".88"}, {"specificity", ".97"}, {"recall", ".21"}, {"f1", ".35"}}},
      {{41, 27, 45, 29}, {{"precision", ".60"}, {"specificity", ".63"}, {"recall", ".59"}}},
  };
  for (const auto& row : rows) {
    auto m = dv::metrics(row.cm);
    std::map<std::string, dv::Metric> by_name = {{"precision", m.precision},
                                                 {"specificity", m.specificity},
                                                 {"recall", m.recall},
                                                 {"f1", m.f1}};
    for (const auto& [name, want] : row.expected) {
      auto got = show(by_name.at(name));
      c.expect(got == want, std::string(name) + " " + got + " != " + want);
    }
  }
}

void phase_dominance(Check& c) {
  TempDir t;
  dvtest::write_calc_scripts(t / "scripts", true);
  auto config = dvtest::scripted_config(t / "scripts", t / "report", t / "work");
  c.expect(dv::load_dataset(manifest()).size() >= 20, "corpus has at least 20 functions");

  std::map<dv::DetectionMode, std::set<std::string>> flagged;
  for (auto mode : {dv::DetectionMode::Full, dv::DetectionMode::NoP2fGate, dv::DetectionMode::Phase1Only}) {
    dv::EvalOptions o;
    o.mode = mode;
    o.report_dir = t / ("eval-" + std::string(dv::to_string(mode)));
    flagged[mode] = positives(dv::cmd_eval(manifest(), config, o));
  }
  const auto& full = flagged[dv::DetectionMode::Full];
  const auto& gate = flagged[dv::DetectionMode::NoP2fGate];
  const auto& p1 = flagged[dv::DetectionMode::Phase1Only];
  std::cout << "  positives: full " << full.size() << ", no-p2f-gate " << gate.size()
            << ", phase1-only " << p1.size() << "\n";
  c.expect(subset(full, gate), "full within no-p2f-gate");
  c.expect(subset(gate, p1), "no-p2f-gate within phase1-only");
  // The noisy scripts exist to make the phases disagree.
  c.expect(full.size() < gate.size() && gate.size() < p1.size(), "each phase filters something");
}

void hermetic_detection(Check& c) {
  TempDir t;
  dvtest::write_calc_scripts(t / "scripts", false);
  auto config = dvtest::scripted_config(t / "scripts", t / "report", t / "work");
  auto entries = dv::load_dataset(manifest());
  int inconsistent = 0;
  for (const auto& e : entries) inconsistent += e.label == dv::Label::Inconsistent;
  c.expect(inconsistent == 10 && entries.size() == 20, "10 inconsistent and 10 consistent entries");

  dv::EvalOptions o;
  o.report_dir = t / "eval";
  auto first = dv::cmd_eval(manifest(), config, o);
  auto body = report_body(t / "eval");
  auto prompts = dv::fsutil::read_file(t / "eval" / dv::kPromptFile);
  auto second = dv::cmd_eval(manifest(), config, o);

  const auto& m = *first.metrics;
  std::cout << "  precision " << show(m.precision) << ", recall " << show(m.recall) << ", PFP "
            << show(m.pfp) << "\n";
  c.expect(m.precision && *m.precision == dv::Rational(1), "precision is 1");
  c.expect(m.recall && *m.recall >= dv::Rational(4, 5), "recall at least .8");
  c.expect(m.pfp && *m.pfp == dv::Rational(1), "PFP is 1");
  c.expect(*second.metrics == m, "metrics repeat");
  c.expect(report_body(t / "eval") == body, "report repeats outside the header");
  c.expect(dv::fsutil::read_file(t / "eval" / dv::kPromptFile) == prompts, "prompt log repeats");
}

// One-function subject with a playbook provider; returns the detection.
dv::RunReport playbook_scan(const TempDir& t, const std::string& name,
                            const std::vector<std::string>& responses) {
  dvtest::write_tree(t / (name + "-subject"), {{"inc.fx", "#doc Returns x plus one.\nfn inc(x) = x - 1\n"}});
  std::map<std::string, std::string> files;
  for (std::size_t i = 0; i < responses.size(); ++i) {
    files[(i < 9 ? "0" : "") + std::to_string(i + 1) + ".txt"] = responses[i];
  }
  dvtest::write_tree(t / (name + "-script"), files);
  auto config = dvtest::scripted_config(t / (name + "-script"), t / (name + "-report"), t / "work");
  config.provider.script_mode = "playbook";
  return dv::cmd_scan(t / (name + "-subject"), config).report;
}

int repair_prompts(const fs::path& report_dir) {
  int n = 0;
  for (const auto& line : dv::text::split_lines(dv::fsutil::read_file(report_dir / dv::kPromptFile))) {
    if (dv::text::starts_with(json::parse(line).value("stage", ""), "repair-")) ++n;
  }
  return n;
}

void repair_budget(Check& c) {
  using SB = dvtest::ScriptBuilder;
  TempDir t;
  const std::vector<std::string> behaviors = {"inc(1) is 2"};
  const auto broken = SB::completion_response({"assert inc(1 == 2"}, behaviors);
  const auto fixed = SB::completion_response({"assert inc(1) == 2"}, behaviors);
  const auto beh = SB::behaviors_response(behaviors);

  // Never fixed: one completion plus three repairs, all broken. A sixth call
  // would exhaust the playbook and surface as GenerationFailed.
  auto never = playbook_scan(t, "never", {beh, broken, broken, broken, broken});
  const auto& d = never.detections.at(0);
  c.expect(d.verdict == dv::Verdict::Negative, "never: Negative");
  c.expect(d.reason == dv::Reason::UncompilableAfterRepairs,
           "never: reason " + std::string(dv::to_string(d.reason)));
  c.expect(d.repair_attempts == 3, "never: repair attempts " + std::to_string(d.repair_attempts));
  c.expect(repair_prompts(t / "never-report") == 3, "never: three repair prompts logged");

  auto second = playbook_scan(t, "second",
                              {beh, broken, broken, fixed, SB::code_response("fn inc(x) = x + 1")});
  const auto& s = second.detections.at(0);
  c.expect(s.repair_attempts == 2, "second: repair attempts " + std::to_string(s.repair_attempts));
  c.expect(repair_prompts(t / "second-report") == 2, "second: two repair prompts logged");
  c.expect(!s.phase1.empty(), "second: suite compiled");
  c.expect(s.verdict == dv::Verdict::Positive, "second: continues to a Positive");
  bool revision2 = false;
  for (const auto& a : s.artifacts) {
    if (dv::text::ends_with(a, "phase1-r2/outcome.txt")) {
      revision2 = dv::text::starts_with(dv::fsutil::read_file(t / "second-report" / a), "compiled");
    }
  }
  c.expect(revision2, "second: revision 2 compiled");
}

void sweep_properties(Check& c) {
  TempDir t;
  std::string lines;
  dv::RunReport prior;
  prior.command = "eval";
  auto add = [&](const std::string& id, const char* label, const std::string& pair, bool flagged) {
    json j = {{"id", id}, {"project", "synthetic"}, {"revision", "r"}, {"file", "f"},
              {"function", id}, {"label", label}, {"pair_id", pair.empty() ? json() : json(pair)}};
    lines += j.dump() + "\n";
    prior.predictions[id] = flagged ? dv::Verdict::Positive : dv::Verdict::Negative;
  };
  for (int i = 0; i < 5; ++i) {
    add("pos" + std::to_string(i), "inconsistent", "neg" + std::to_string(i), i != 2);
    add("neg" + std::to_string(i), "consistent", "pos" + std::to_string(i), i == 4);
  }
  for (int i = 5; i < 45; ++i) add("neg" + std::to_string(i), "consistent", "", i % 7 == 0);
  dv::fsutil::write_file(t / "manifest.jsonl", lines);
  dv::write_run_report(prior, t / "prior");

  dv::EvalOptions o;
  o.replay = t / "prior";
  o.sweep = true;
  o.draws = 1000;
  o.seed = 2024;
  o.provider = std::make_shared<dv::FunctionProvider>(
      [](std::string_view, const dv::ProviderParams&) -> std::string { throw std::logic_error("provider"); });
  o.report_dir = t / "a";
  auto a = dv::cmd_eval(t / "manifest.jsonl", dv::Config{}, o);
  o.report_dir = t / "b";
  dv::cmd_eval(t / "manifest.jsonl", dv::Config{}, o);

  const auto& sweep = *a.sweep;
  c.expect(sweep.rows.size() == 5 && sweep.n_draws == 1000, "five ratios of 1000 draws");
  const auto& first = sweep.rows.front().cells;
  dv::Metric last_precision;
  for (const auto& row : sweep.rows) {
    const auto tag = std::to_string(row.positive_percent) + "%: ";
    c.expect(row.cells.at("recall") == first.at("recall"), tag + "recall constant");
    c.expect(row.cells.at("pfp") == first.at("pfp"), tag + "PFP constant");
    for (const auto& [name, cell] : row.cells) {
      if (!cell.median) continue;
      c.expect(*cell.min <= *cell.median && *cell.median <= *cell.max, tag + name + " min <= median <= max");
    }
    auto precision = row.cells.at("precision").median;
    if (last_precision) c.expect(*precision <= *last_precision, tag + "precision non-increasing");
    last_precision = precision;
  }
  c.expect(report_body(t / "a") == report_body(t / "b"), "rerun identical outside the header");
  c.expect(dv::fsutil::read_file(t / "a" / dv::kSummaryFile) == dv::fsutil::read_file(t / "b" / dv::kSummaryFile),
           "summary identical");
}

void independence_guard(Check& c) {
  TempDir t;
  dvtest::write_calc_scripts(t / "scripts", false);
  auto config = dvtest::scripted_config(t / "scripts", t / "report", t / "work");
  auto adapter = dv::make_adapter("fixture");

  std::map<std::string, dv::DocumentedFunction> fns;
  for (const char* rev : {"v1", "v2"}) {
    dv::ScanOptions o;
    o.report_dir = t / rev;
    dv::cmd_scan(corpus() / "calc" / rev, config, o);
    for (auto& fn : dv::filter_eligible(dv::extract_functions(corpus() / "calc" / rev, *adapter).functions)) {
      fns[std::string(rev) + "/" + fn.id] = fn;
    }
  }

  std::map<std::string, std::set<std::string>> stages;
  int records = 0;
  for (const char* rev : {"v1", "v2"}) {
    for (const auto& line : dv::text::split_lines(dv::fsutil::read_file(t / rev / dv::kPromptFile))) {
      auto j = json::parse(line);
      const auto key = std::string(rev) + "/" + j.at("function_id").get<std::string>();
      const auto& fn = fns.at(key);
      const auto prompt = j.at("prompt").get<std::string>();
      const auto stage = j.at("stage").get<std::string>();
      c.expect(dv::text::contains(prompt, fn.doc_text), key + " " + stage + " prompt lacks the doc");
      c.expect(!dv::text::contains(prompt, dv::text::trim(fn.body_text)), key + " " + stage + " prompt leaks the body");
      stages[key].insert(stage);
      ++records;
    }
  }
  int synthesized = 0;
  for (const auto& [key, fn] : fns) {
    c.expect(stages[key].count("behaviors") && stages[key].count("complete"), key + " has test prompts");
    synthesized += static_cast<int>(stages[key].count("synthesize"));
    // Functions that stop after phase 1 never log a code prompt; build it anyway.
    auto code_prompt = dv::synthesis_prompt(fn, *adapter);
    c.expect(dv::text::contains(code_prompt, fn.doc_text), key + " code prompt lacks the doc");
    c.expect(!dv::text::contains(code_prompt, dv::text::trim(fn.body_text)), key + " code prompt leaks the body");
  }
  std::cout << "  " << fns.size() << " functions, " << records << " logged prompts, " << synthesized
            << " code prompts\n";
  c.expect(fns.size() == 22, "22 fixture functions");
  c.expect(synthesized > 0, "code prompts were logged");
}

void subject_immutability(Check& c) {
  TempDir t;
  dvtest::write_calc_scripts(t / "scripts", true);
  auto config = dvtest::scripted_config(t / "scripts", t / "report", t / "work");
  for (const char* rev : {"v1", "v2"}) {
    const auto root = corpus() / "calc" / rev;
    const auto before = dv::fsutil::fingerprint_tree(root);
    dv::ScanOptions o;
    o.report_dir = t / rev;
    dv::cmd_scan(root, config, o);
    c.expect(dv::fsutil::fingerprint_tree(root) == before, std::string(rev) + " fingerprint changed");
  }
}

struct Criterion {
  int number;
  std::string title;
  std::function<void(Check&)> run;
  std::chrono::milliseconds budget;
};

}  // namespace

int main() {
  using namespace std::chrono_literals;
  const std::vector<Criterion> criteria = {
      {1, "verdict oracle equivalence over 256 tallies", verdict_oracle, 1s},
      {2, "metric golden values", metric_goldens, 1s},
      {3, "phase dominance", phase_dominance, 30s},
      {4, "hermetic end-to-end detection", hermetic_detection, 60s},
      {5, "repair-loop budget", repair_budget, 10s},
      {6, "imbalance sweep properties", sweep_properties, 60s},
      {7, "prompt independence", independence_guard, 0ms},
      {8, "subject immutability", subject_immutability, 0ms},
  };

  int failed = 0;
  for (const auto& cr : criteria) {
    Check check;
    const auto start = std::chrono::steady_clock::now();
    try {
      cr.run(check);
    } catch (const std::exception& e) {
      check.failures.push_back(std::string("exception: ") + e.what());
    }
    const auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - start);
    if (cr.budget.count() > 0 && ms > cr.budget) {
      check.failures.push_back("took " + std::to_string(ms.count()) + " ms, budget " +
                               std::to_string(cr.budget.count()) + " ms");
    }
    std::cout << (check.ok() ? "PASS" : "FAIL") << " criterion " << cr.number << ": " << cr.title << " ("
              << ms.count() << " ms)\n";
    for (const auto& f : check.failures) std::cout << "  - " << f << "\n";
    failed += !check.ok();
  }
  std::cout << (failed == 0 ? "all criteria passed" : std::to_string(failed) + " criteria failed") << "\n";
  return failed == 0 ? 0 : 1;
}
