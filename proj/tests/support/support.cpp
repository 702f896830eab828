#include "support.hpp"

#include <stdexcept>

#include "docverify/core/fs.hpp"
#include "docverify/core/text.hpp"
#include "docverify/corpus/corpus.hpp"
#include "docverify/generation/generator.hpp"
#include "docverify/generation/provider.hpp"

namespace dvtest {

namespace dv = docverify;

fs::path fixtures() { return DVTEST_FIXTURES; }

TempDir::TempDir(const std::string& prefix)
    : path_(dv::fsutil::make_scratch_dir(fs::temp_directory_path() / "dvtest", prefix)) {}

TempDir::~TempDir() {
  std::error_code ec;
  fs::remove_all(path_, ec);
}

void write_tree(const fs::path& root, const std::map<std::string, std::string>& files) {
  fs::create_directories(root);
  for (const auto& [rel, content] : files) dv::fsutil::write_file(root / rel, content);
}

ScriptBuilder::ScriptBuilder(fs::path dir, const dv::SubjectAdapter& adapter)
    : dir_(std::move(dir)), adapter_(adapter) {
  fs::create_directories(dir_);
}

void ScriptBuilder::add_raw(const std::string& prompt, const std::string& response) {
  auto file = dir_ / (dv::ScriptedProvider::key_for(prompt) + ".txt");
  std::error_code ec;
  if (fs::exists(file, ec)) {
    if (dv::fsutil::read_file(file) != response) {
      throw std::logic_error("two different responses scripted for one prompt: " + file.string());
    }
    return;
  }
  dv::fsutil::write_file(file, response);
}

std::string ScriptBuilder::behaviors_response(const std::vector<std::string>& behaviors) {
  std::string out = "Testable behaviors:\n\n";
  for (const auto& b : behaviors) out += "- " + b + "\n";
  return out;
}

std::string ScriptBuilder::completion_response(const std::vector<std::string>& tests,
                                               const std::vector<std::string>& behaviors) {
  std::string out = "Here are the completed tests.\n\n```fx\n";
  for (std::size_t i = 0; i < tests.size(); ++i) {
    out += "test " + dv::test_name_for(static_cast<int>(i) + 1) + " {\n";
    if (i < behaviors.size()) out += "  # " + behaviors[i] + "\n";
    for (const auto& line : dv::text::split_lines(tests[i])) out += "  " + line + "\n";
    out += "}\n\n";
  }
  out += "```\n";
  return out;
}

std::string ScriptBuilder::code_response(const std::string& impl) {
  return "```fx\n" + impl + "\n```\n";
}

void ScriptBuilder::add(const dv::DocumentedFunction& fn, const FunctionScript& script) {
  if (script.behaviors.size() != script.tests.size()) {
    throw std::logic_error("behaviors and tests differ in length for " + fn.id);
  }
  const auto behaviors = behaviors_response(script.behaviors);
  add_raw(dv::behaviors_prompt(fn, adapter_), behaviors);
  auto items = dv::parse_behaviors(behaviors, 20);
  auto skeleton = dv::build_test_skeleton(items, fn, adapter_);
  add_raw(dv::completion_prompt(skeleton, fn, adapter_),
          completion_response(script.tests, script.behaviors));
  if (!script.impl.empty()) {
    add_raw(dv::synthesis_prompt(fn, adapter_), code_response(script.impl));
  }
}

dv::DocumentedFunction find_function(const fs::path& root, const dv::SubjectAdapter& adapter,
                                     const std::string& name) {
  for (const auto& fn : dv::extract_functions(root, adapter).functions) {
    if (fn.qualified_name == name) return fn;
  }
  throw std::logic_error("no function " + name + " under " + root.string());
}

namespace {

// Tests shared by both revisions when only the body changed between them.
FunctionScript shared(std::vector<std::string> behaviors, std::vector<std::string> tests,
                      std::string impl) {
  return FunctionScript{std::move(behaviors), std::move(tests), std::move(impl)};
}

}  // namespace

std::map<std::string, FunctionScript> calc_scripts(bool noisy) {
  std::map<std::string, FunctionScript> s;

  auto both = [&](const std::string& name, const FunctionScript& fs1, const FunctionScript& fs2) {
    s["v1/" + name] = fs1;
    s["v2/" + name] = fs2;
  };

  {
    auto f = shared({"if x is positive then returns x", "if x is negative then returns -x",
                     "if x is zero then returns 0"},
                    {"assert abs_value(5) == 5", "assert abs_value(-3) == 3",
                     "assert abs_value(0) == 0"},
                    "fn abs_value(x) = if x < 0 then 0 - x else x");
    both("abs_value", f, f);
  }
  s["v1/sign"] = {{"if x is negative then returns -1", "if x is positive then returns 1",
                   "if x is zero then returns 0"},
                  {"assert sign(-7) == -1", "assert sign(4) == 1", "assert sign(0) == 0"},
                  "fn sign(x) = if x < 0 then -1 else if x > 0 then 1 else 0"};
  s["v2/sign"] = {{"if x is negative then returns -1", "if x is zero then returns 1",
                   "if x is positive then returns 1"},
                  {"assert sign(-7) == -1", "assert sign(0) == 1", "assert sign(9) == 1"},
                  "fn sign(x) = if x < 0 then -1 else 1"};
  {
    auto f = shared({"if x is below lo then returns lo", "if x is above hi then returns hi",
                     "if x lies in [lo, hi] then returns x", "if lo equals hi then returns lo"},
                    {"assert clamp(-5, 0, 10) == 0", "assert clamp(15, 0, 10) == 10",
                     "let v = clamp(7, 0, 10)\nassert v == 7", "assert clamp(3, 3, 3) == 3"},
                    "fn clamp(x, lo, hi) = if x < lo then lo else if x > hi then hi else x");
    both("clamp", f, f);
  }
  {
    // The generated tests never make c the largest, so the seeded defect in
    // v1 goes unnoticed.
    FunctionScript f{{"if a is the largest then returns a", "if b is the largest then returns b"},
                     {"assert max3(9, 2, 1) == 9", "assert max3(1, 8, 3) == 8"},
                     "fn max3(a, b, c) = if a >= b && a >= c then a else if b >= c then b else c"};
    if (noisy) {
      f.behaviors.push_back("if two arguments tie then returns the first argument");
      f.tests.push_back("assert max3(2, 2, 5) == 2");
    }
    both("max3", f, f);
  }
  {
    auto f = shared({"if n is a positive even number then returns true",
                     "if n is odd then returns false",
                     "if n is a negative even number then returns true",
                     "if n is zero then returns true"},
                    {"assert is_even(4)", "assert !is_even(7)", "assert is_even(-6)",
                     "assert is_even(0) == true"},
                    "fn is_even(n) = n % 2 == 0");
    both("is_even", f, f);
  }
  {
    auto f = shared({"if n is 4 then returns 10", "if n is 1 then returns 1",
                     "if n is 0 then returns 0", "if n is negative then returns 0"},
                    {"assert sum_to(4) == 10", "assert sum_to(1) == 1", "assert sum_to(0) == 0",
                     "assert sum_to(-3) == 0"},
                    "fn sum_to(n) = if n < 1 then 0 else n + sum_to(n - 1)");
    both("sum_to", f, f);
  }
  {
    FunctionScript f{{"if k is 0 then returns 1", "if k is 1 then returns 2",
                      "if k is 10 then returns 1024"},
                     {"assert pow2(0) == 1", "assert pow2(1) == 2", "assert pow2(10) == 1024"},
                     "fn pow2(k) = if k == 0 then 1 else 2 * pow2(k - 1)"};
    FunctionScript v1 = f;
    // Right on the failing test, wrong elsewhere: f2p and p2f together.
    if (noisy) v1.impl = "fn pow2(k) = if k == 0 then 1 else 2 * k";
    both("pow2", v1, f);
  }
  {
    auto f = shared({"if a and b share factors then returns the largest one",
                     "if b is zero then returns a", "if a and b are coprime then returns 1"},
                    {"assert gcd(12, 18) == 6", "assert gcd(7, 0) == 7", "assert gcd(9, 28) == 1"},
                    "fn gcd(a, b) = if b == 0 then a else gcd(b, a % b)");
    both("gcd", f, f);
  }
  {
    auto f = shared({"if b is non-zero then returns a divided by b", "if b is zero then returns 0",
                     "if a is negative then the quotient is negative"},
                    {"assert safe_div(7, 2) == 3", "assert safe_div(5, 0) == 0",
                     "assert safe_div(-9, 3) == -3"},
                    "fn safe_div(a, b) = if b == 0 then 0 else a / b");
    both("safe_div", f, f);
  }
  s["v1/days_in_month"] = {
      {"if m is 2 then returns 29", "if m is 1 then returns 31", "if m is 4 then returns 30"},
      {"assert days_in_month(2) == 29", "assert days_in_month(1) == 31",
       "assert days_in_month(4) == 30"},
      "fn days_in_month(m) =\n  if m == 2 then 29\n  else if m == 4 || m == 6 || m == 9 || m == 11 "
      "then 30\n  else 31"};
  s["v2/days_in_month"] = {
      {"if m is 2 then returns 28", "if m is 1 then returns 31", "if m is 4 then returns 30",
       "if m is 12 then returns 31"},
      {"assert days_in_month(2) == 28", "assert days_in_month(1) == 31",
       "assert days_in_month(4) == 30", "assert days_in_month(12) == 31"},
      "fn days_in_month(m) =\n  if m == 2 then 28\n  else if m == 4 || m == 6 || m == 9 || m == 11 "
      "then 30\n  else 31"};
  if (noisy) {
    // Tests and code share one wrong reading of the documentation.
    auto& d = s["v2/days_in_month"];
    d.tests[0] = "assert days_in_month(2) == 29";
    d.impl = s["v1/days_in_month"].impl;
  }
  {
    auto f = shared({"if x is 3 then returns 9", "if x is negative then returns a positive square"},
                    {"assert square(3) == 9", "assert square(-4) == 16"}, "fn square(x) = x * x");
    both("square", f, f);
  }
  return s;
}

void write_calc_scripts(const fs::path& dir, bool noisy) {
  auto adapter = dv::make_adapter("fixture");
  ScriptBuilder builder(dir, *adapter);
  auto scripts = calc_scripts(noisy);
  for (const char* rev : {"v1", "v2"}) {
    auto root = fixtures() / "corpus" / "calc" / rev;
    for (const auto& fn : dv::filter_eligible(dv::extract_functions(root, *adapter).functions)) {
      auto it = scripts.find(std::string(rev) + "/" + fn.qualified_name);
      if (it == scripts.end()) throw std::logic_error("no script for " + fn.id);
      builder.add(fn, it->second);
    }
  }
}

dv::Config scripted_config(const fs::path& script_dir, const fs::path& report_dir,
                           const fs::path& work_dir) {
  dv::Config c;
  c.subject_language = "fixture";
  c.provider.kind = "scripted";
  c.provider.script_dir = script_dir.string();
  c.report_dir = report_dir.string();
  c.work_dir = work_dir.string();
  c.limits.per_test_timeout_ms = 2000;
  return c;
}

}  // namespace dvtest
