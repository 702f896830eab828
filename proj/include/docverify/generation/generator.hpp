#pragma once

#include <mutex>
#include <string>
#include <vector>

#include "docverify/corpus/adapter.hpp"
#include "docverify/corpus/function.hpp"
#include "docverify/execution/outcome.hpp"
#include "docverify/generation/provider.hpp"
#include "docverify/generation/suite.hpp"

namespace docverify {

struct GenerationLimits {
  int max_tests = 20;
  int max_repair_attempts = 3;
};

struct PromptRecord {
  std::string function_id;
  std::string stage;
  std::string prompt;
  std::string response;
};

// Append-only, thread-safe record of every provider exchange.
class PromptLog {
 public:
  void add(PromptRecord record);
  std::vector<PromptRecord> records() const;
  std::size_t count_stage_prefix(const std::string& function_id, const std::string& prefix) const;

 private:
  mutable std::mutex mu_;
  std::vector<PromptRecord> records_;
};

struct GenerationContext {
  Provider& provider;
  ProviderParams params;
  const SubjectAdapter& adapter;
  GenerationLimits limits;
  PromptLog* log = nullptr;
};

// ---- prompt construction (exposed for fixture authoring and audits)
std::string behaviors_prompt(const DocumentedFunction& fn, const SubjectAdapter& adapter);
std::string completion_prompt(const GeneratedTestSuite& skeleton, const DocumentedFunction& fn,
                              const SubjectAdapter& adapter);
std::string repair_prompt(const GeneratedTestSuite& suite, const std::vector<Diagnostic>& diagnostics,
                          const DocumentedFunction& fn, const SubjectAdapter& adapter);
std::string synthesis_prompt(const DocumentedFunction& fn, const SubjectAdapter& adapter);

// Bullet or line items of a behavior-list response, capped at `max_items`.
std::vector<BehaviorItem> parse_behaviors(std::string_view response, int max_items);

// "test_001", "test_002", ...
std::string test_name_for(int index);

// ---- stages
std::vector<BehaviorItem> extract_behaviors(const DocumentedFunction& fn, GenerationContext& ctx);
GeneratedTestSuite build_test_skeleton(const std::vector<BehaviorItem>& behaviors,
                                       const DocumentedFunction& fn, const SubjectAdapter& adapter);
GeneratedTestSuite complete_tests(const GeneratedTestSuite& skeleton, const DocumentedFunction& fn,
                                  GenerationContext& ctx);
GeneratedTestSuite repair_tests(const GeneratedTestSuite& suite,
                                const std::vector<Diagnostic>& diagnostics,
                                const DocumentedFunction& fn, GenerationContext& ctx);
SynthesizedImpl synthesize_code(const DocumentedFunction& fn, GenerationContext& ctx);

}  // namespace docverify
