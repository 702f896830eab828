#include "docverify/execution/outcome.hpp"

namespace docverify {

std::string Diagnostic::render() const {
  std::string out;
  if (location) out += location->file + ":" + std::to_string(location->line) + ": ";
  out += kind == DiagnosticKind::CompileError ? "error: " : "warning: ";
  out += message;
  return out;
}

std::string_view to_string(TestStatus s) {
  switch (s) {
    case TestStatus::Pass: return "pass";
    case TestStatus::Fail: return "fail";
    case TestStatus::Timeout: return "timeout";
    case TestStatus::Crash: return "crash";
  }
  return "fail";
}

std::optional<TestStatus> test_status_from_string(std::string_view s) {
  if (s == "pass") return TestStatus::Pass;
  if (s == "fail") return TestStatus::Fail;
  if (s == "timeout") return TestStatus::Timeout;
  if (s == "crash") return TestStatus::Crash;
  return std::nullopt;
}

std::vector<std::string> ExecutionOutcome::failed() const {
  std::vector<std::string> out;
  for (const auto& [name, status] : results) {
    if (!is_passing(status)) out.push_back(name);
  }
  return out;
}

std::vector<std::string> ExecutionOutcome::passed() const {
  std::vector<std::string> out;
  for (const auto& [name, status] : results) {
    if (is_passing(status)) out.push_back(name);
  }
  return out;
}

bool ExecutionOutcome::has_compile_error() const {
  if (!compiled) return true;
  for (const auto& d : diagnostics) {
    if (d.kind == DiagnosticKind::CompileError) return true;
  }
  return false;
}

}  // namespace docverify
