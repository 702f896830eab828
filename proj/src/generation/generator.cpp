#include "docverify/generation/generator.hpp"

#include <cstdio>
#include <map>
#include <regex>
#include <stdexcept>

#include "docverify/core/error.hpp"
#include "docverify/core/text.hpp"
#include "docverify/corpus/corpus.hpp"
#include "docverify/generation/templates.hpp"

namespace docverify {

void PromptLog::add(PromptRecord record) {
  std::lock_guard lock(mu_);
  records_.push_back(std::move(record));
}

std::vector<PromptRecord> PromptLog::records() const {
  std::lock_guard lock(mu_);
  return records_;
}

std::size_t PromptLog::count_stage_prefix(const std::string& function_id,
                                          const std::string& prefix) const {
  std::lock_guard lock(mu_);
  std::size_t n = 0;
  for (const auto& r : records_) {
    if (r.function_id == function_id && text::starts_with(r.stage, prefix)) ++n;
  }
  return n;
}

namespace {

std::string ask(GenerationContext& ctx, const DocumentedFunction& fn, const std::string& stage,
                const std::string& prompt) {
  auto response = ctx.provider.generate(prompt, ctx.params);
  if (ctx.log) ctx.log->add({fn.id, stage, prompt, response});
  return response;
}

std::string render_tests(const GeneratedTestSuite& suite) {
  std::string out;
  if (!suite.preamble.empty()) out += suite.preamble + "\n\n";
  for (std::size_t i = 0; i < suite.tests.size(); ++i) {
    if (i) out += "\n";
    out += suite.tests[i].source_text;
    if (!out.empty() && out.back() != '\n') out += "\n";
  }
  return out;
}

std::vector<std::pair<std::string, std::string>> common_fields(const DocumentedFunction& fn,
                                                               const SubjectAdapter& adapter) {
  return {{"language", std::string(adapter.language())},
          {"dialect", std::string(adapter.test_dialect_notes())},
          {"fence", std::string(adapter.code_fence_tag())},
          {"signature", fn.signature},
          {"doc", fn.doc_text}};
}

// Maps provider output back onto the suite's test names.
GeneratedTestSuite merge_completion(const GeneratedTestSuite& base, std::string_view response,
                                    const SubjectAdapter& adapter, int revision) {
  auto split = adapter.split_tests(text::code_from_response(response));
  std::map<std::string, const ParsedTest*> by_name;
  for (const auto& t : split.tests) {
    if (!by_name.emplace(t.name, &t).second) {
      throw Error(ErrorCode::MalformedCompletion, "test '" + t.name + "' appears twice");
    }
  }
  GeneratedTestSuite out;
  out.revision = revision;
  out.preamble = split.preamble;
  for (const auto& t : base.tests) {
    auto it = by_name.find(t.name);
    if (it == by_name.end()) {
      throw Error(ErrorCode::MalformedCompletion, "response has no test named '" + t.name + "'");
    }
    if (!it->second->has_statements) {
      throw Error(ErrorCode::MalformedCompletion, "test '" + t.name + "' was left empty");
    }
    out.tests.push_back({t.name, t.behavior, it->second->source});
  }
  return out;
}

}  // namespace

std::string test_name_for(int index) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "test_%03d", index);
  return buf;
}

std::string behaviors_prompt(const DocumentedFunction& fn, const SubjectAdapter& adapter) {
  return text::substitute(templates::behaviors(), common_fields(fn, adapter));
}

std::string completion_prompt(const GeneratedTestSuite& skeleton, const DocumentedFunction& fn,
                              const SubjectAdapter& adapter) {
  auto fields = common_fields(fn, adapter);
  fields.emplace_back("context", build_prompt_context(fn));
  fields.emplace_back("skeleton", render_tests(skeleton));
  return text::substitute(templates::complete_tests(), fields);
}

std::string repair_prompt(const GeneratedTestSuite& suite, const std::vector<Diagnostic>& diagnostics,
                          const DocumentedFunction& fn, const SubjectAdapter& adapter) {
  std::string diag_text;
  for (const auto& d : diagnostics) diag_text += d.render() + "\n";
  auto fields = common_fields(fn, adapter);
  fields.emplace_back("context", build_prompt_context(fn));
  fields.emplace_back("tests", render_tests(suite));
  fields.emplace_back("diagnostics", diag_text);
  return text::substitute(templates::repair_tests(), fields);
}

std::string synthesis_prompt(const DocumentedFunction& fn, const SubjectAdapter& adapter) {
  auto fields = common_fields(fn, adapter);
  fields.emplace_back("container", fn.context.hollowed_container);
  return text::substitute(templates::synthesize_code(), fields);
}

std::vector<BehaviorItem> parse_behaviors(std::string_view response, int max_items) {
  static const std::regex bullet(R"(^\s*(?:[-*+•]|\d+[.)])\s+(.*\S)\s*$)");
  std::vector<std::string> bullets;
  std::vector<std::string> plain;
  for (const auto& line : text::split_lines(response)) {
    auto t = text::trim(line);
    if (t.empty() || text::starts_with(t, "```")) continue;
    std::smatch m;
    if (std::regex_match(line, m, bullet)) {
      bullets.push_back(m[1]);
    } else {
      plain.emplace_back(t);
    }
  }
  const auto& chosen = bullets.empty() ? plain : bullets;
  std::vector<BehaviorItem> out;
  for (const auto& d : chosen) {
    if (static_cast<int>(out.size()) >= max_items) break;
    out.push_back({static_cast<int>(out.size()) + 1, d});
  }
  return out;
}

std::vector<BehaviorItem> extract_behaviors(const DocumentedFunction& fn, GenerationContext& ctx) {
  if (text::trim(fn.doc_text).empty()) {
    throw std::invalid_argument("extract_behaviors requires documentation");
  }
  auto response = ask(ctx, fn, "behaviors", behaviors_prompt(fn, ctx.adapter));
  auto items = parse_behaviors(response, ctx.limits.max_tests);
  if (items.empty()) {
    throw Error(ErrorCode::GenerationEmpty, "no testable behaviors in response for " + fn.id);
  }
  return items;
}

GeneratedTestSuite build_test_skeleton(const std::vector<BehaviorItem>& behaviors,
                                       const DocumentedFunction&, const SubjectAdapter& adapter) {
  if (behaviors.empty()) throw std::invalid_argument("build_test_skeleton needs behaviors");
  GeneratedTestSuite suite;
  for (const auto& b : behaviors) {
    auto name = test_name_for(b.index);
    suite.tests.push_back({name, b, adapter.render_test_stub(name, b.description)});
  }
  return suite;
}

GeneratedTestSuite complete_tests(const GeneratedTestSuite& skeleton, const DocumentedFunction& fn,
                                  GenerationContext& ctx) {
  auto response = ask(ctx, fn, "complete", completion_prompt(skeleton, fn, ctx.adapter));
  return merge_completion(skeleton, response, ctx.adapter, 0);
}

GeneratedTestSuite repair_tests(const GeneratedTestSuite& suite,
                                const std::vector<Diagnostic>& diagnostics,
                                const DocumentedFunction& fn, GenerationContext& ctx) {
  if (diagnostics.empty()) throw std::invalid_argument("repair_tests needs diagnostics");
  if (suite.revision >= ctx.limits.max_repair_attempts) {
    throw std::invalid_argument("repair budget exhausted");
  }
  auto stage = "repair-" + std::to_string(suite.revision + 1);
  auto response = ask(ctx, fn, stage, repair_prompt(suite, diagnostics, fn, ctx.adapter));
  return merge_completion(suite, response, ctx.adapter, suite.revision + 1);
}

SynthesizedImpl synthesize_code(const DocumentedFunction& fn, GenerationContext& ctx) {
  auto response = ask(ctx, fn, "synthesize", synthesis_prompt(fn, ctx.adapter));
  auto code = text::code_from_response(response);
  auto parts = ctx.adapter.find_definition(code, fn);
  if (!parts) {
    throw Error(ErrorCode::SignatureMismatch, "response defines no function named " + fn.name());
  }
  if (!ctx.adapter.same_signature(parts->signature, fn.signature)) {
    throw Error(ErrorCode::SignatureMismatch,
                "expected '" + fn.signature + "' but got '" + parts->signature + "'");
  }
  return SynthesizedImpl{fn.signature + " " + parts->body, fn.signature};
}

}  // namespace docverify
