#pragma once

#include <chrono>
#include <filesystem>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "docverify/corpus/function.hpp"
#include "docverify/execution/outcome.hpp"
#include "docverify/generation/suite.hpp"

namespace docverify {

enum class InjectionKind { TestsOnly, TestsWithImplOverride };

struct Workspace {
  std::filesystem::path root;
  std::string subject_fingerprint;
  InjectionKind injected = InjectionKind::TestsOnly;
  // Test names in the order the runner should execute them.
  std::vector<std::string> test_names;
};

struct RunLimits {
  std::chrono::milliseconds per_test_timeout{30'000};
  std::chrono::milliseconds build_timeout{300'000};
};

struct RawRunArtifacts {
  bool build_ok = false;
  std::string build_log;
  // Per-test output in the harness's native format.
  std::string test_log;
  std::vector<std::string> expected_tests;
  std::set<std::string> timed_out;
};

// A test block recovered from generated source.
struct ParsedTest {
  std::string name;
  std::string source;
  bool has_statements = false;
};

struct SplitTests {
  std::vector<ParsedTest> tests;
  std::string preamble;
};

// The pieces of a function definition returned by a provider.
struct DefinitionParts {
  std::string signature;
  std::string body;
  std::string source;
};

/// Subject-language plug-in: extraction, test dialect, and toolchain.
///
/// Implementations are stateless from the caller's point of view and must
/// never write below the subject root.
class SubjectAdapter {
 public:
  virtual ~SubjectAdapter() = default;

  virtual std::string_view name() const = 0;
  // Human-readable language/test framework, used in prompts.
  virtual std::string_view language() const = 0;
  virtual std::string_view code_fence_tag() const = 0;
  virtual std::string_view test_dialect_notes() const = 0;

  virtual bool parallel_safe() const { return true; }
  virtual unsigned max_parallelism() const;

  // ---- extraction
  virtual std::vector<DocumentedFunction> list_documented_functions(
      const std::filesystem::path& root, std::vector<std::string>& warnings) const = 0;

  // ---- test dialect
  virtual std::string render_test_stub(const std::string& name,
                                       const std::string& description) const = 0;
  virtual SplitTests split_tests(std::string_view code) const = 0;
  virtual std::string render_suite(const GeneratedTestSuite& suite,
                                   const DocumentedFunction& fn) const = 0;
  // Locates the definition of `fn` (by name) in provider output.
  virtual std::optional<DefinitionParts> find_definition(std::string_view code,
                                                         const DocumentedFunction& fn) const = 0;
  // Whether two declaration heads denote the same signature.
  virtual bool same_signature(std::string_view a, std::string_view b) const;

  // ---- toolchain
  // Empty when the subject compiles on its own for this function's unit.
  virtual std::vector<Diagnostic> check_subject(const std::filesystem::path& subject_root,
                                                const DocumentedFunction& fn,
                                                const RunLimits& limits) const = 0;
  virtual Workspace materialize_test_workspace(const std::filesystem::path& subject_root,
                                               const DocumentedFunction& fn,
                                               const GeneratedTestSuite& suite,
                                               const std::optional<SynthesizedImpl>& impl_override,
                                               const std::filesystem::path& scratch_base) const = 0;
  virtual RawRunArtifacts run(const Workspace& workspace, const RunLimits& limits) const = 0;
  virtual ExecutionOutcome parse_run(const RawRunArtifacts& raw) const = 0;
};

// Replaces the definition of `fn` (signature through end of body) inside
// `file_text` with `replacement`. Throws SandboxError when it is not found.
std::string replace_definition(std::string_view file_text, const DocumentedFunction& fn,
                               std::string_view replacement);

// Fills results for expected tests that produced no verdict line: Timeout when
// the runner recorded one, Crash otherwise.
void complete_results(ExecutionOutcome& outcome, const RawRunArtifacts& raw);

// Toolchain settings for adapters that shell out to a native compiler.
struct AdapterOptions {
  std::string compiler = "c++";
  std::vector<std::string> compile_flags = {"-std=c++20", "-O0"};
  // Header-only test framework copied into each workspace.
  std::filesystem::path doctest_header;
};

// Throws ConfigError for unknown names.
std::unique_ptr<SubjectAdapter> make_adapter(std::string_view name,
                                             const AdapterOptions& options = {});
std::vector<std::string> adapter_names();

}  // namespace docverify
