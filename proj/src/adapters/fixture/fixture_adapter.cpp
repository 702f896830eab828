#include <regex>

#include "docverify/adapters/fixture_lang.hpp"
#include "docverify/core/error.hpp"
#include "docverify/core/fs.hpp"
#include "docverify/core/text.hpp"
#include "docverify/corpus/adapter.hpp"

namespace docverify {

namespace {

namespace fs = std::filesystem;

constexpr std::string_view kTestFile = "__generated_tests__.fxt";
const std::vector<std::string> kSkipDirs = {".git", "build"};

bool is_module_file(const fs::path& p) { return p.extension() == ".fx"; }

std::vector<fixture::Module> load_modules(const fs::path& root) {
  std::vector<fixture::Module> modules;
  for (const auto& rel : fsutil::list_files(root, kSkipDirs)) {
    if (!is_module_file(rel)) continue;
    modules.push_back(fixture::parse_module(rel.generic_string(), fsutil::read_file(root / rel)));
  }
  return modules;
}

std::string render_issue(const fixture::CheckIssue& i) {
  return i.file + ":" + std::to_string(i.line) + ": error: " + i.message;
}

std::vector<Diagnostic> parse_diagnostics(std::string_view log) {
  static const std::regex re(R"(^(.*?):(\d+): (error|warning): (.*)$)");
  std::vector<Diagnostic> out;
  for (const auto& line : text::split_lines(log)) {
    std::smatch m;
    if (!std::regex_match(line, m, re)) continue;
    Diagnostic d;
    d.kind = m[3] == "error" ? DiagnosticKind::CompileError : DiagnosticKind::Warning;
    d.message = m[4];
    d.location = SourceLocation{m[1], std::stoi(m[2])};
    out.push_back(std::move(d));
  }
  return out;
}

class FixtureAdapter final : public SubjectAdapter {
 public:
  std::string_view name() const override { return "fixture"; }
  std::string_view language() const override { return "the fixture expression language"; }
  std::string_view code_fence_tag() const override { return "fx"; }
  std::string_view test_dialect_notes() const override {
    return "Functions are declared as `fn name(a, b) = expr`; values are 64-bit integers and "
           "booleans; expressions support + - * / % comparisons && || ! and "
           "`if c then a else b`. A test is a block `test NAME {` ... `}` whose lines are "
           "`let x = expr`, `assert expr` (must evaluate to true) or `assert_error expr` "
           "(evaluation must fail, e.g. division by zero). Lines starting with # are comments.";
  }

  std::vector<DocumentedFunction> list_documented_functions(
      const fs::path& root, std::vector<std::string>& warnings) const override {
    std::vector<DocumentedFunction> out;
    for (const auto& rel : fsutil::list_files(root, kSkipDirs)) {
      if (!is_module_file(rel)) continue;
      const auto file = rel.generic_string();
      std::string source;
      try {
        source = fsutil::read_file(root / rel);
      } catch (const Error& e) {
        warnings.push_back(e.what());
        continue;
      }
      auto module = fixture::parse_module(file, source);
      for (const auto& e : module.errors) {
        warnings.push_back(file + ":" + std::to_string(e.line) + ": " + e.message);
      }
      std::string decl = "module " + rel.stem().string() + "\n";
      for (const auto& d : module.fns) decl += "  " + d.signature + "\n";
      std::vector<std::string> imports;
      for (const auto& imp : module.imports) imports.push_back("import " + imp);

      for (const auto& d : module.fns) {
        if (d.doc.empty()) continue;
        DocumentedFunction fn;
        fn.file_path = file;
        fn.qualified_name = d.name;
        fn.id = make_function_id(file, d.name, d.param_text);
        fn.signature = d.signature;
        fn.doc_text = d.doc;
        fn.body_text = d.body_text;
        fn.visibility = d.is_private ? Visibility::NonPublic : Visibility::Public;
        fn.kind = d.is_abstract ? FunctionKind::Abstract
                  : d.is_ctor   ? FunctionKind::Constructor
                                : FunctionKind::Ordinary;
        fn.context.enclosing_declaration = decl;
        fn.context.imports = imports;
        if (!d.is_abstract) {
          fn.context.hollowed_container =
              replace_definition(source, fn, d.signature + " = ?  # body removed");
        } else {
          fn.context.hollowed_container = source;
        }
        out.push_back(std::move(fn));
      }
    }
    return out;
  }

  std::string render_test_stub(const std::string& test_name,
                               const std::string& description) const override {
    std::string out = "test " + test_name + " {\n";
    for (const auto& line : text::split_lines(description)) out += "  # " + line + "\n";
    out += "}\n";
    return out;
  }

  SplitTests split_tests(std::string_view code) const override {
    static const std::regex header(R"(^\s*test\s+([A-Za-z_][A-Za-z0-9_]*)\s*\{\s*$)");
    SplitTests out;
    auto lines = text::split_lines(code);
    for (std::size_t i = 0; i < lines.size(); ++i) {
      std::smatch m;
      if (!std::regex_match(lines[i], m, header)) {
        out.preamble += lines[i] + "\n";
        continue;
      }
      ParsedTest t;
      t.name = m[1];
      t.source = lines[i] + "\n";
      for (++i; i < lines.size(); ++i) {
        t.source += lines[i] + "\n";
        auto s = text::trim(lines[i]);
        if (s == "}") break;
        if (!s.empty() && !text::starts_with(s, "#")) t.has_statements = true;
      }
      out.tests.push_back(std::move(t));
    }
    out.preamble = text::trim_copy(out.preamble);
    return out;
  }

  std::string render_suite(const GeneratedTestSuite& suite,
                           const DocumentedFunction& fn) const override {
    std::string out = "# generated tests for " + fn.id + " (revision " +
                      std::to_string(suite.revision) + ")\n";
    if (!suite.preamble.empty()) out += suite.preamble + "\n";
    for (const auto& t : suite.tests) {
      out += "\n" + t.source_text;
      if (!t.source_text.empty() && t.source_text.back() != '\n') out += "\n";
    }
    return out;
  }

  std::optional<DefinitionParts> find_definition(std::string_view code,
                                                 const DocumentedFunction& fn) const override {
    auto module = fixture::parse_module("response", std::string(code));
    for (const auto& d : module.fns) {
      if (d.name != fn.name()) continue;
      return DefinitionParts{d.signature, d.body_text, d.signature + " " + d.body_text};
    }
    // Fall back to a lexical match so an unparsable body still reports its head.
    static const std::regex head(R"(^\s*((?:(?:private|ctor|abstract)\s+)*fn\s+([A-Za-z_]\w*)\s*\([^)]*\)))");
    for (const auto& line : text::split_lines(code)) {
      std::smatch m;
      if (std::regex_search(line, m, head) && m[2] == fn.name()) {
        auto rest = text::trim_copy(std::string_view(line).substr(
            static_cast<std::size_t>(m.position(0) + m.length(0))));
        return DefinitionParts{m[1], rest, text::trim_copy(line)};
      }
    }
    return std::nullopt;
  }

  std::vector<Diagnostic> check_subject(const fs::path& subject_root, const DocumentedFunction&,
                                        const RunLimits&) const override {
    auto modules = load_modules(subject_root);
    std::vector<Diagnostic> out;
    for (const auto& issue : fixture::check_program(modules)) {
      out.push_back(Diagnostic{DiagnosticKind::CompileError, issue.message,
                               SourceLocation{issue.file, issue.line}});
    }
    return out;
  }

  Workspace materialize_test_workspace(const fs::path& subject_root, const DocumentedFunction& fn,
                                       const GeneratedTestSuite& suite,
                                       const std::optional<SynthesizedImpl>& impl_override,
                                       const fs::path& scratch_base) const override {
    Workspace ws;
    ws.root = fsutil::make_scratch_dir(scratch_base, "fx-ws");
    if (fsutil::is_within(ws.root, subject_root) || fsutil::is_within(subject_root, ws.root)) {
      throw Error(ErrorCode::SandboxError, "scratch directory overlaps the subject root");
    }
    ws.subject_fingerprint = fsutil::fingerprint_tree(subject_root);
    fsutil::copy_tree(subject_root, ws.root, kSkipDirs);
    if (impl_override) {
      auto target = ws.root / fn.file_path;
      auto replaced = replace_definition(fsutil::read_file(target), fn, impl_override->source_text);
      fsutil::write_file(target, replaced);
      ws.injected = InjectionKind::TestsWithImplOverride;
    }
    fsutil::write_file(ws.root / kTestFile, render_suite(suite, fn));
    ws.test_names = suite.names();
    return ws;
  }

  RawRunArtifacts run(const Workspace& ws, const RunLimits& limits) const override {
    RawRunArtifacts raw;
    raw.expected_tests = ws.test_names;
    auto modules = load_modules(ws.root);
    auto tests = fixture::parse_test_file(std::string(kTestFile),
                                          fsutil::read_file(ws.root / kTestFile));
    auto issues = fixture::check_program(modules, &tests);
    if (!issues.empty()) {
      for (const auto& i : issues) raw.build_log += render_issue(i) + "\n";
      return raw;
    }
    raw.build_ok = true;
    fixture::Interpreter interp(modules, &tests);
    for (const auto& t : tests.tests) {
      auto r = interp.run_test(t, limits.per_test_timeout);
      if (r.timed_out) {
        raw.timed_out.insert(t.name);
        raw.test_log += "  " + t.name + ": " + r.message + "\n";
        continue;
      }
      raw.test_log += t.name + (r.passed ? " PASS\n" : " FAIL\n");
      if (!r.passed) raw.test_log += "  " + r.message + "\n";
    }
    return raw;
  }

  ExecutionOutcome parse_run(const RawRunArtifacts& raw) const override {
    ExecutionOutcome out;
    if (!raw.build_ok) {
      out.diagnostics = parse_diagnostics(raw.build_log);
      if (out.diagnostics.empty()) {
        out.diagnostics.push_back({DiagnosticKind::CompileError,
                                   raw.build_log.empty() ? "build failed" : raw.build_log, {}});
      }
      return out;
    }
    out.compiled = true;
    static const std::regex line_re(R"(^(\S+) (PASS|FAIL)$)");
    for (const auto& line : text::split_lines(raw.test_log)) {
      std::smatch m;
      if (!std::regex_match(line, m, line_re)) continue;
      out.results[m[1]] = m[2] == "PASS" ? TestStatus::Pass : TestStatus::Fail;
    }
    complete_results(out, raw);
    return out;
  }
};

}  // namespace

std::unique_ptr<SubjectAdapter> make_fixture_adapter() { return std::make_unique<FixtureAdapter>(); }

}  // namespace docverify
