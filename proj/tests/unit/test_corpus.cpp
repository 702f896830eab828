#include <doctest.h>

#include "docverify/core/error.hpp"
#include "docverify/core/fs.hpp"
#include "docverify/core/text.hpp"
#include "docverify/corpus/corpus.hpp"
#include "support.hpp"

using namespace docverify;
using dvtest::TempDir;

namespace {

const std::string kIncSource =
    "import basic\n"
    "\n"
    "#doc returns x plus one\n"
    "fn inc(x) = x + 1\n"
    "\n"
    "fn helper(y) = y * 7\n";

DocumentedFunction make_fn(Visibility v, FunctionKind k, std::string doc, std::string id) {
  DocumentedFunction fn;
  fn.id = std::move(id);
  fn.qualified_name = fn.id;
  fn.visibility = v;
  fn.kind = k;
  fn.doc_text = std::move(doc);
  return fn;
}

}  // namespace

TEST_CASE("empty directory extracts nothing") {
  TempDir t;
  auto adapter = make_adapter("fixture");
  auto r = extract_functions(t.path(), *adapter);
  CHECK(r.functions.empty());
  CHECK(r.warnings.empty());
}

TEST_CASE("the inc fixture yields one documented function") {
  TempDir t;
  dvtest::write_tree(t.path(), {{"inc.fx", kIncSource}});
  auto adapter = make_adapter("fixture");
  auto r = extract_functions(t.path(), *adapter);
  REQUIRE(r.functions.size() == 1);
  const auto& fn = r.functions[0];
  CHECK(fn.qualified_name == "inc");
  CHECK(fn.name() == "inc");
  CHECK(fn.file_path == "inc.fx");
  CHECK(fn.id == "inc.fx::inc(x)");
  CHECK(fn.doc_text == "returns x plus one");
  CHECK(fn.signature == "fn inc(x)");
  CHECK(fn.body_text == "= x + 1");
  CHECK(fn.visibility == Visibility::Public);
  CHECK(fn.kind == FunctionKind::Ordinary);
  CHECK(fn.context.imports == std::vector<std::string>{"import basic"});
  CHECK(text::contains(fn.context.enclosing_declaration, "fn helper(y)"));
  CHECK_FALSE(text::contains(fn.context.enclosing_declaration, "y * 7"));
  CHECK_FALSE(text::contains(fn.context.hollowed_container, "x + 1"));
  CHECK(text::contains(fn.context.hollowed_container, "fn inc(x)"));
  CHECK(text::contains(fn.context.hollowed_container, "y * 7"));
}

TEST_CASE("unparsable files become warnings") {
  TempDir t;
  dvtest::write_tree(t.path(), {{"a.fx", kIncSource}, {"b.fx", "#doc broken\nfn ( = 1\n"}});
  auto adapter = make_adapter("fixture");
  auto r = extract_functions(t.path(), *adapter);
  CHECK(r.functions.size() == 1);
  REQUIRE(r.warnings.size() == 1);
  CHECK(text::starts_with(r.warnings[0], "b.fx:2"));
}

TEST_CASE("a missing root is an IoError") {
  TempDir t;
  auto adapter = make_adapter("fixture");
  try {
    extract_functions(t / "nope", *adapter);
    FAIL("expected IoError");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::IoError);
  }
  dvtest::write_tree(t.path(), {{"file.fx", kIncSource}});
  CHECK_THROWS_AS(extract_functions(t / "file.fx", *adapter), Error);
}

TEST_CASE("extraction over the calc corpus is sorted, unique and idempotent") {
  auto adapter = make_adapter("fixture");
  auto root = dvtest::fixtures() / "corpus" / "calc" / "v1";
  auto a = extract_functions(root, *adapter);
  auto b = extract_functions(root, *adapter);
  CHECK(a.functions == b.functions);
  std::set<std::string> ids;
  for (std::size_t i = 0; i < a.functions.size(); ++i) {
    ids.insert(a.functions[i].id);
    if (i > 0) CHECK(a.functions[i - 1].id < a.functions[i].id);
  }
  CHECK(ids.size() == a.functions.size());
  for (const auto& fn : a.functions) {
    CAPTURE(fn.id);
    CHECK_FALSE(text::trim(fn.doc_text).empty());
    CHECK(fn.body_text.empty() == (fn.kind == FunctionKind::Abstract));
    auto source = fsutil::read_file(root / fn.file_path);
    CHECK(text::contains(source, fn.signature));
    CHECK(text::count_occurrences(fn.context.enclosing_declaration, fn.signature) == 1);
  }
}

TEST_CASE("the calc corpus holds eleven eligible functions per revision") {
  auto adapter = make_adapter("fixture");
  for (const char* rev : {"v1", "v2"}) {
    auto root = dvtest::fixtures() / "corpus" / "calc" / rev;
    auto all = extract_functions(root, *adapter).functions;
    auto eligible = filter_eligible(all);
    CHECK(eligible.size() == 11);
    CHECK(all.size() == 14);
  }
}

TEST_CASE("filter_eligible truth table") {
  CHECK(filter_eligible({}).empty());
  auto ok = make_fn(Visibility::Public, FunctionKind::Ordinary, "doc", "ok");
  CHECK(filter_eligible({ok}).size() == 1);

  std::vector<DocumentedFunction> mixed = {
      make_fn(Visibility::Public, FunctionKind::Constructor, "doc", "ctor"),
      make_fn(Visibility::Public, FunctionKind::Abstract, "doc", "abstract"),
      make_fn(Visibility::NonPublic, FunctionKind::Ordinary, "doc", "private"),
      ok,
      make_fn(Visibility::Public, FunctionKind::Ordinary, "  \n", "blank"),
  };
  auto kept = filter_eligible(mixed);
  REQUIRE(kept.size() == 1);
  CHECK(kept[0].id == "ok");

  // Every combination of the three predicates.
  for (auto v : {Visibility::Public, Visibility::NonPublic}) {
    for (auto k : {FunctionKind::Ordinary, FunctionKind::Constructor, FunctionKind::Abstract}) {
      for (std::string doc : {"", "d"}) {
        auto fn = make_fn(v, k, doc, "x");
        bool expected = v == Visibility::Public && k == FunctionKind::Ordinary && !doc.empty();
        CHECK(is_eligible(fn) == expected);
      }
    }
  }
}

TEST_CASE("filter_eligible is idempotent and order preserving") {
  auto adapter = make_adapter("fixture");
  auto all = extract_functions(dvtest::fixtures() / "corpus" / "calc" / "v2", *adapter).functions;
  auto once = filter_eligible(all);
  CHECK(filter_eligible(once) == once);
  std::size_t j = 0;
  for (const auto& fn : all) {
    if (j < once.size() && fn.id == once[j].id) ++j;
  }
  CHECK(j == once.size());
}

TEST_CASE("prompt context carries imports, siblings and the doc") {
  TempDir t;
  dvtest::write_tree(t.path(), {{"inc.fx", kIncSource}});
  auto adapter = make_adapter("fixture");
  auto fn = extract_functions(t.path(), *adapter).functions.at(0);
  auto block = build_prompt_context(fn);
  CHECK(text::contains(block, "returns x plus one"));
  CHECK(text::contains(block, "import basic"));
  CHECK(text::contains(block, "fn helper(y)"));
  CHECK_FALSE(text::contains(block, fn.body_text));
  CHECK(build_prompt_context(fn) == block);

  fn.context.imports.clear();
  auto no_imports = build_prompt_context(fn);
  CHECK_FALSE(text::contains(no_imports, "import"));
}

TEST_CASE("function ids normalise whitespace") {
  CHECK(make_function_id("a.fx", "f", "x,   y") == make_function_id("a.fx", "f", "x, y"));
  CHECK(make_function_id("a.fx", "f", "x") != make_function_id("a.fx", "f", "y"));
}

TEST_CASE("adapters are discoverable by name") {
  auto names = adapter_names();
  CHECK(std::find(names.begin(), names.end(), "fixture") != names.end());
  CHECK(std::find(names.begin(), names.end(), "cpp") != names.end());
  try {
    make_adapter("cobol");
    FAIL("expected ConfigError");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::ConfigError);
  }
}
