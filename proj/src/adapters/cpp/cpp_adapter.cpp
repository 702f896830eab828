#include <algorithm>
#include <map>
#include <mutex>
#include <regex>
#include <set>

#include "docverify/adapters/cpp_scanner.hpp"
#include "docverify/core/error.hpp"
#include "docverify/core/fs.hpp"
#include "docverify/core/hash.hpp"
#include "docverify/core/subprocess.hpp"
#include "docverify/core/text.hpp"
#include "docverify/corpus/adapter.hpp"

#ifndef DOCVERIFY_DEFAULT_DOCTEST_HEADER
#define DOCVERIFY_DEFAULT_DOCTEST_HEADER "doctest.h"
#endif

namespace docverify {

namespace {

namespace fs = std::filesystem;

constexpr std::string_view kTestSource = "__docverify_tests__.cpp";
constexpr std::string_view kTestBinary = "__docverify_tests__";
constexpr std::string_view kSectionMarker = "[docverify] test ";
const std::vector<std::string> kSkipDirs = {".git", "build", "cmake-build-debug", "cmake-build-release"};

bool is_header(const fs::path& p) {
  static const std::set<std::string> ext = {".h", ".hh", ".hpp", ".hxx", ".h++", ".ipp"};
  return ext.count(p.extension().string()) > 0;
}

bool is_source(const fs::path& p) {
  static const std::set<std::string> ext = {".cpp", ".cc", ".cxx", ".c++"};
  return ext.count(p.extension().string()) > 0;
}

bool defines_main(const std::string& src) {
  static const std::regex re(R"(\bint\s+main\s*\()");
  return std::regex_search(src, re);
}

std::string hollow(std::string_view source, const cpp::ScanResult& scan, const cpp::FunctionDef& fn) {
  const auto& scope = scan.scopes[static_cast<std::size_t>(fn.scope)];
  std::size_t begin = 0;
  std::size_t end = source.size();
  if (scope.kind == cpp::ScopeKind::Class) {
    begin = scope.begin;
    end = scope.end;
  }
  std::string out(source.substr(begin, fn.body_begin - begin));
  out += "{\n    // implementation removed\n}";
  out += source.substr(fn.body_end, end - fn.body_end);
  return out;
}

std::vector<Diagnostic> parse_compiler_output(std::string_view log) {
  static const std::regex re(R"(^(.*?):(\d+):(?:\d+:)? (fatal error|error|warning): (.*)$)");
  std::vector<Diagnostic> out;
  for (const auto& line : text::split_lines(log)) {
    std::smatch m;
    if (!std::regex_match(line, m, re)) continue;
    Diagnostic d;
    d.kind = m[3] == "warning" ? DiagnosticKind::Warning : DiagnosticKind::CompileError;
    d.message = m[4];
    d.location = SourceLocation{m[1], std::stoi(m[2])};
    out.push_back(std::move(d));
  }
  return out;
}

class CppAdapter final : public SubjectAdapter {
 public:
  explicit CppAdapter(AdapterOptions options) : options_(std::move(options)) {
    if (options_.doctest_header.empty()) options_.doctest_header = DOCVERIFY_DEFAULT_DOCTEST_HEADER;
  }

  std::string_view name() const override { return "cpp"; }
  std::string_view language() const override { return "C++20 with the doctest framework"; }
  std::string_view code_fence_tag() const override { return "cpp"; }
  std::string_view test_dialect_notes() const override {
    return "Each test is a doctest block `TEST_CASE(\"NAME\") { ... }` using CHECK/REQUIRE/"
           "CHECK_THROWS_AS. The header under test and doctest.h are already included; add any "
           "other standard headers you need above the tests. Do not define main().";
  }

  std::vector<DocumentedFunction> list_documented_functions(
      const fs::path& root, std::vector<std::string>& warnings) const override {
    std::vector<DocumentedFunction> out;
    for (const auto& rel : fsutil::list_files(root, kSkipDirs)) {
      if (!is_header(rel) && !is_source(rel)) continue;
      const auto file = rel.generic_string();
      std::string source;
      try {
        source = fsutil::read_file(root / rel);
      } catch (const Error& e) {
        warnings.push_back(e.what());
        continue;
      }
      auto scan = cpp::scan(source);
      for (const auto& w : scan.warnings) warnings.push_back(file + ": " + w);
      for (const auto& f : scan.functions) {
        if (f.doc.empty()) continue;
        DocumentedFunction fn;
        fn.file_path = file;
        fn.qualified_name = f.qualified_name;
        fn.id = make_function_id(file, f.qualified_name, f.param_text);
        fn.signature = f.signature;
        fn.doc_text = f.doc;
        fn.body_text = f.body;
        fn.visibility = f.visibility;
        fn.kind = f.kind;
        fn.context.enclosing_declaration = cpp::render_scope(scan, f.scope);
        fn.context.imports = scan.includes;
        fn.context.enclosing_doc = scan.scopes[static_cast<std::size_t>(f.scope)].doc;
        fn.context.hollowed_container =
            f.kind == FunctionKind::Abstract ? std::string() : hollow(source, scan, f);
        out.push_back(std::move(fn));
      }
    }
    return out;
  }

  std::string render_test_stub(const std::string& test_name,
                               const std::string& description) const override {
    std::string out = "TEST_CASE(\"" + test_name + "\") {\n";
    for (const auto& line : text::split_lines(description)) out += "    // " + line + "\n";
    out += "}\n";
    return out;
  }

  SplitTests split_tests(std::string_view code) const override {
    static const std::regex header(R"re(TEST_CASE\s*\(\s*"([^"]+)"\s*\))re");
    static const std::regex dropped(
        R"re(^\s*#\s*(include\s*"doctest\.h"|include\s*<doctest/doctest\.h>|define\s+DOCTEST_CONFIG_IMPLEMENT\w*).*$)re");
    SplitTests out;
    std::string code_s(code);
    std::size_t cursor = 0;
    std::string preamble;
    auto it = std::sregex_iterator(code_s.begin(), code_s.end(), header);
    for (; it != std::sregex_iterator(); ++it) {
      auto start = static_cast<std::size_t>(it->position(0));
      if (start < cursor) continue;
      auto open = code_s.find('{', start + static_cast<std::size_t>(it->length(0)));
      if (open == std::string::npos) break;
      auto close = cpp::match_brace(code_s, open);
      if (close == std::string::npos) close = code_s.size();
      preamble += code_s.substr(cursor, start - cursor);
      ParsedTest t;
      t.name = (*it)[1];
      t.source = code_s.substr(start, close - start) + "\n";
      auto body = code_s.substr(open + 1, close > open + 1 ? close - open - 2 : 0);
      std::string stripped;
      for (const auto& line : text::split_lines(body)) {
        auto l = text::trim(line);
        if (text::starts_with(l, "//")) continue;
        stripped += l;
      }
      t.has_statements = !text::trim(stripped).empty();
      out.tests.push_back(std::move(t));
      cursor = close;
    }
    preamble += code_s.substr(std::min(cursor, code_s.size()));
    std::string kept;
    for (const auto& line : text::split_lines(preamble)) {
      if (std::regex_match(line, dropped)) continue;
      kept += line + "\n";
    }
    out.preamble = text::trim_copy(kept);
    return out;
  }

  std::string render_suite(const GeneratedTestSuite& suite,
                           const DocumentedFunction& fn) const override {
    std::string out = "// generated tests for " + fn.id + " (revision " +
                      std::to_string(suite.revision) + ")\n";
    out += "#include \"doctest.h\"\n";
    out += "#include \"" + fn.file_path + "\"\n";
    if (!suite.preamble.empty()) out += "\n" + suite.preamble + "\n";
    for (const auto& t : suite.tests) {
      out += "\n" + t.source_text;
      if (!t.source_text.empty() && t.source_text.back() != '\n') out += "\n";
    }
    return out;
  }

  std::optional<DefinitionParts> find_definition(std::string_view code,
                                                 const DocumentedFunction& fn) const override {
    auto scan = cpp::scan(code);
    const cpp::FunctionDef* by_name = nullptr;
    const auto wanted = cpp::canonical_signature(fn.signature);
    for (const auto& f : scan.functions) {
      if (f.body.empty()) continue;
      auto unqualified = f.name.substr(f.name.rfind("::") == std::string::npos ? 0 : f.name.rfind("::") + 2);
      if (unqualified != fn.name()) continue;
      if (cpp::canonical_signature(f.signature) == wanted) {
        return DefinitionParts{f.signature, f.body,
                               std::string(code.substr(f.head_begin, f.body_end - f.head_begin))};
      }
      if (!by_name) by_name = &f;
    }
    if (by_name) {
      return DefinitionParts{by_name->signature, by_name->body,
                             std::string(code.substr(by_name->head_begin,
                                                     by_name->body_end - by_name->head_begin))};
    }
    return std::nullopt;
  }

  bool same_signature(std::string_view a, std::string_view b) const override {
    return cpp::canonical_signature(a) == cpp::canonical_signature(b);
  }

  std::vector<Diagnostic> check_subject(const fs::path& subject_root, const DocumentedFunction& fn,
                                        const RunLimits& limits) const override {
    GeneratedTestSuite empty;
    auto ws = materialize_test_workspace(subject_root, fn, empty, std::nullopt, {});
    auto raw = run(ws, limits);
    std::error_code ec;
    fs::remove_all(ws.root, ec);
    if (raw.build_ok) return {};
    auto diags = parse_compiler_output(raw.build_log);
    if (diags.empty()) diags.push_back({DiagnosticKind::CompileError, raw.build_log, {}});
    return diags;
  }

  Workspace materialize_test_workspace(const fs::path& subject_root, const DocumentedFunction& fn,
                                       const GeneratedTestSuite& suite,
                                       const std::optional<SynthesizedImpl>& impl_override,
                                       const fs::path& scratch_base) const override {
    Workspace ws;
    ws.root = fsutil::make_scratch_dir(scratch_base, "cpp-ws");
    if (fsutil::is_within(ws.root, subject_root) || fsutil::is_within(subject_root, ws.root)) {
      throw Error(ErrorCode::SandboxError, "scratch directory overlaps the subject root");
    }
    ws.subject_fingerprint = fsutil::fingerprint_tree(subject_root);
    fsutil::copy_tree(subject_root, ws.root, kSkipDirs);
    if (impl_override) {
      auto target = ws.root / fn.file_path;
      fsutil::write_file(target, replace_definition(fsutil::read_file(target), fn,
                                                    impl_override->source_text));
      ws.injected = InjectionKind::TestsWithImplOverride;
    }
    std::error_code ec;
    fs::copy_file(options_.doctest_header, ws.root / "doctest.h",
                  fs::copy_options::overwrite_existing, ec);
    if (ec) {
      throw Error(ErrorCode::ToolchainError,
                  "cannot copy doctest header " + options_.doctest_header.string() + ": " + ec.message());
    }
    fsutil::write_file(ws.root / kTestSource, render_suite(suite, fn));
    fsutil::write_file(ws.root / "__docverify_target__", fn.file_path);
    ws.test_names = suite.names();
    return ws;
  }

  RawRunArtifacts run(const Workspace& ws, const RunLimits& limits) const override {
    RawRunArtifacts raw;
    raw.expected_tests = ws.test_names;
    const auto target = fsutil::read_file(ws.root / "__docverify_target__");

    std::vector<std::string> cmd = {options_.compiler};
    cmd.insert(cmd.end(), options_.compile_flags.begin(), options_.compile_flags.end());
    for (const char* inc : {".", "include", "src"}) cmd.push_back(std::string("-I") + inc);
    cmd.emplace_back(kTestSource);
    for (const auto& rel : fsutil::list_files(ws.root, kSkipDirs)) {
      auto rel_s = rel.generic_string();
      if (!is_source(rel) || rel_s == kTestSource || rel_s == target) continue;
      if (defines_main(fsutil::read_file(ws.root / rel))) continue;
      cmd.push_back(rel_s);
    }
    cmd.push_back(doctest_main_object().string());
    cmd.emplace_back("-o");
    cmd.emplace_back(kTestBinary);

    auto build = run_process(cmd, ws.root, limits.build_timeout);
    raw.build_log = build.output;
    if (build.timed_out) raw.build_log += "\nerror: build timed out\n";
    if (!build.ok()) return raw;
    raw.build_ok = true;

    const auto binary = (ws.root / kTestBinary).string();
    for (const auto& test : ws.test_names) {
      auto r = run_process({binary, "--test-case=" + test, "--no-colors=true"}, ws.root,
                           limits.per_test_timeout);
      raw.test_log += std::string(kSectionMarker) + test + "\n" + r.output;
      if (!r.output.empty() && r.output.back() != '\n') raw.test_log += "\n";
      if (r.timed_out) {
        raw.timed_out.insert(test);
        raw.test_log += "[docverify] status timeout\n";
      } else if (r.signaled) {
        raw.test_log += "[docverify] status signal " + std::to_string(r.signal) + "\n";
      } else {
        raw.test_log += "[docverify] status exit " + std::to_string(r.exit_code) + "\n";
      }
    }
    return raw;
  }

  ExecutionOutcome parse_run(const RawRunArtifacts& raw) const override {
    ExecutionOutcome out;
    if (!raw.build_ok) {
      out.diagnostics = parse_compiler_output(raw.build_log);
      bool has_error = std::any_of(out.diagnostics.begin(), out.diagnostics.end(), [](const auto& d) {
        return d.kind == DiagnosticKind::CompileError;
      });
      if (!has_error) {
        out.diagnostics.push_back({DiagnosticKind::CompileError,
                                   raw.build_log.empty() ? "build failed" : raw.build_log, {}});
      }
      return out;
    }
    out.compiled = true;
    // doctest prints one summary per process:
    // [doctest] test cases: 1 | 1 passed | 0 failed | 0 skipped
    static const std::regex summary(
        R"(^\[doctest\] test cases:\s*(\d+)\s*\|\s*(\d+) passed\s*\|\s*(\d+) failed.*$)");
    std::string current;
    for (const auto& line : text::split_lines(raw.test_log)) {
      if (text::starts_with(line, kSectionMarker)) {
        current = line.substr(kSectionMarker.size());
        continue;
      }
      if (current.empty()) continue;
      std::smatch m;
      if (std::regex_match(line, m, summary)) {
        int total = std::stoi(m[1]);
        int failed = std::stoi(m[3]);
        if (failed > 0) {
          out.results[current] = TestStatus::Fail;
        } else if (total > 0) {
          out.results[current] = TestStatus::Pass;
        }
        continue;
      }
      if (text::starts_with(line, "[docverify] status signal")) {
        out.results[current] = TestStatus::Crash;
      }
    }
    complete_results(out, raw);
    return out;
  }

 private:
  // doctest's runner is compiled once per toolchain configuration and reused.
  fs::path doctest_main_object() const {
    Sha256 h;
    h.update_field(options_.compiler);
    for (const auto& f : options_.compile_flags) h.update_field(f);
    h.update_field(fsutil::read_file(options_.doctest_header));
    auto key = h.hex_digest().substr(0, 16);
    auto dir = fs::temp_directory_path() / "docverify-toolchain";
    auto obj = dir / ("doctest-main-" + key + ".o");

    static std::mutex mu;
    std::lock_guard lock(mu);
    if (fs::exists(obj)) return obj;
    fs::create_directories(dir);
    auto scratch = fsutil::make_scratch_dir(dir, "build");
    fs::copy_file(options_.doctest_header, scratch / "doctest.h");
    fsutil::write_file(scratch / "main.cpp",
                       "#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN\n#include \"doctest.h\"\n");
    std::vector<std::string> cmd = {options_.compiler};
    cmd.insert(cmd.end(), options_.compile_flags.begin(), options_.compile_flags.end());
    cmd.insert(cmd.end(), {"-c", "main.cpp", "-o", "main.o"});
    auto r = run_process(cmd, scratch, std::chrono::minutes(5));
    if (!r.ok()) {
      throw Error(ErrorCode::ToolchainError, "cannot build doctest runner: " + r.output);
    }
    // Rename is atomic; concurrent processes converge on one object.
    fs::rename(scratch / "main.o", obj);
    std::error_code ec;
    fs::remove_all(scratch, ec);
    return obj;
  }

  AdapterOptions options_;
};

}  // namespace

std::unique_ptr<SubjectAdapter> make_cpp_adapter(const AdapterOptions& options) {
  return std::make_unique<CppAdapter>(options);
}

}  // namespace docverify
