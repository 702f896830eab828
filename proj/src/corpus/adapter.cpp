#include "docverify/corpus/adapter.hpp"

#include <algorithm>
#include <thread>

#include "docverify/core/error.hpp"
#include "docverify/core/text.hpp"

namespace docverify {

std::unique_ptr<SubjectAdapter> make_fixture_adapter();
std::unique_ptr<SubjectAdapter> make_cpp_adapter(const AdapterOptions& options);

unsigned SubjectAdapter::max_parallelism() const {
  return std::max(1u, std::thread::hardware_concurrency());
}

bool SubjectAdapter::same_signature(std::string_view a, std::string_view b) const {
  return text::normalize_whitespace(a) == text::normalize_whitespace(b);
}

std::string replace_definition(std::string_view file_text, const DocumentedFunction& fn,
                               std::string_view replacement) {
  for (auto sig = file_text.find(fn.signature); sig != std::string_view::npos;
       sig = file_text.find(fn.signature, sig + 1)) {
    auto after = sig + fn.signature.size();
    auto body = file_text.find(fn.body_text, after);
    if (body == std::string_view::npos) break;
    if (!text::trim(file_text.substr(after, body - after)).empty()) continue;
    std::string out(file_text.substr(0, sig));
    out += replacement;
    out += file_text.substr(body + fn.body_text.size());
    return out;
  }
  throw Error(ErrorCode::SandboxError,
              "definition of " + fn.qualified_name + " not found in " + fn.file_path);
}

void complete_results(ExecutionOutcome& outcome, const RawRunArtifacts& raw) {
  if (!outcome.compiled) {
    outcome.results.clear();
    return;
  }
  for (const auto& name : raw.expected_tests) {
    if (outcome.results.count(name)) continue;
    outcome.results[name] = raw.timed_out.count(name) ? TestStatus::Timeout : TestStatus::Crash;
  }
}

std::unique_ptr<SubjectAdapter> make_adapter(std::string_view name, const AdapterOptions& options) {
  if (name == "fixture") return make_fixture_adapter();
  if (name == "cpp") return make_cpp_adapter(options);
  throw Error(ErrorCode::ConfigError, "unknown subject_language '" + std::string(name) +
                                          "' (known: " + text::join(adapter_names(), ", ") + ")");
}

std::vector<std::string> adapter_names() { return {"cpp", "fixture"}; }

}  // namespace docverify
