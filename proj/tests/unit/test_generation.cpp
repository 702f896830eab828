#include <doctest.h>

#include <httplib.h>
#include <json.hpp>

#include <atomic>
#include <cstdlib>
#include <thread>

#include "docverify/core/error.hpp"
#include "docverify/core/fs.hpp"
#include "docverify/core/parallel.hpp"
#include "docverify/core/text.hpp"
#include "docverify/corpus/corpus.hpp"
#include "docverify/generation/generator.hpp"
#include "docverify/generation/templates.hpp"
#include "support.hpp"

using namespace docverify;
using dvtest::TempDir;

namespace {

const std::string kIncSource =
    "#doc returns x plus one\n"
    "fn inc(x) = x - 1\n"
    "\n"
    "#doc returns twice y\n"
    "fn dbl(y) = y * 2\n";

struct IncFixture {
  TempDir dir;
  std::unique_ptr<SubjectAdapter> adapter = make_adapter("fixture");
  DocumentedFunction fn;

  IncFixture() {
    dvtest::write_tree(dir / "subject", {{"inc.fx", kIncSource}});
    fn = dvtest::find_function(dir / "subject", *adapter, "inc");
  }
};

// Answers every prompt with `reply(prompt)` and counts the calls.
struct Canned {
  std::function<std::string(std::string_view)> reply;
  std::atomic<int> calls{0};
  FunctionProvider provider{[this](std::string_view p, const ProviderParams&) {
    ++calls;
    return reply(p);
  }};
};

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("no docverify::Error thrown");
  return ErrorCode::IoError;
}

std::string fenced(const std::string& body) { return "```fx\n" + body + "```\n"; }

}  // namespace

TEST_CASE("behavior lists parse bullets, numbers and plain lines") {
  auto items = parse_behaviors("Here you go:\n- if a then b\n* if c then d\n3. if e then f\n", 20);
  REQUIRE(items.size() == 3);
  CHECK(items[0].index == 1);
  CHECK(items[0].description == "if a then b");
  CHECK(items[2].index == 3);
  CHECK(items[2].description == "if e then f");

  auto plain = parse_behaviors("first behavior\n\nsecond behavior\n", 20);
  CHECK(plain.size() == 2);
  CHECK(parse_behaviors("- a\n- b\n- c\n- d\n- e\n", 3).size() == 3);
  CHECK(parse_behaviors("```\n- inside fence\n```\n", 20).size() == 1);
  CHECK(parse_behaviors("", 20).empty());
}

TEST_CASE("extract_behaviors follows the provider's bullets") {
  IncFixture f;
  Canned c;
  c.reply = [](std::string_view) { return std::string("- if given x then returns x+1\n"); };
  PromptLog log;
  GenerationContext ctx{c.provider, {}, *f.adapter, {}, &log};
  auto items = extract_behaviors(f.fn, ctx);
  REQUIRE(items.size() == 1);
  CHECK(items[0] == BehaviorItem{1, "if given x then returns x+1"});
  REQUIRE(log.records().size() == 1);
  CHECK(log.records()[0].stage == "behaviors");
  CHECK(text::contains(log.records()[0].prompt, "returns x plus one"));

  c.reply = [](std::string_view) { return std::string("- a\n- b\n- c\n- d\n- e\n"); };
  items = extract_behaviors(f.fn, ctx);
  REQUIRE(items.size() == 5);
  for (int i = 0; i < 5; ++i) CHECK(items[static_cast<std::size_t>(i)].index == i + 1);

  c.reply = [](std::string_view) { return std::string(); };
  CHECK(code_of([&] { extract_behaviors(f.fn, ctx); }) == ErrorCode::GenerationEmpty);

  auto undocumented = f.fn;
  undocumented.doc_text.clear();
  CHECK_THROWS_AS(extract_behaviors(undocumented, ctx), std::invalid_argument);
}

TEST_CASE("max_tests caps the behavior list") {
  IncFixture f;
  Canned c;
  c.reply = [](std::string_view) { return std::string("- a\n- b\n- c\n- d\n"); };
  GenerationContext ctx{c.provider, {}, *f.adapter, {2, 3}, nullptr};
  CHECK(extract_behaviors(f.fn, ctx).size() == 2);
}

TEST_CASE("skeletons are deterministic and embed each behavior") {
  IncFixture f;
  CHECK(test_name_for(1) == "test_001");
  CHECK(test_name_for(42) == "test_042");

  auto one = build_test_skeleton({{1, "if given x then returns x+1"}}, f.fn, *f.adapter);
  REQUIRE(one.tests.size() == 1);
  CHECK(one.tests[0].name == "test_001");
  CHECK(one.revision == 0);

  std::vector<BehaviorItem> three = {{1, "alpha"}, {2, "beta"}, {3, "gamma"}};
  auto s = build_test_skeleton(three, f.fn, *f.adapter);
  CHECK(s.names() == std::vector<std::string>{"test_001", "test_002", "test_003"});
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(text::contains(s.tests[i].source_text, three[i].description));
    CHECK(s.tests[i].behavior == three[i]);
  }
  CHECK(build_test_skeleton(three, f.fn, *f.adapter) == s);
}

TEST_CASE("complete_tests fills stubs and keeps names") {
  IncFixture f;
  auto skel = build_test_skeleton({{1, "if given x then returns x+1"}}, f.fn, *f.adapter);
  Canned c;
  std::string seen;
  c.reply = [&](std::string_view p) {
    seen = p;
    return fenced("test test_001 {\n  assert inc(1) == 2\n}\n");
  };
  GenerationContext ctx{c.provider, {}, *f.adapter, {}, nullptr};
  auto done = complete_tests(skel, f.fn, ctx);
  CHECK(done.names() == skel.names());
  CHECK(done.revision == 0);
  CHECK(text::contains(done.tests[0].source_text, "assert inc(1) == 2"));
  CHECK(done.tests[0].behavior == skel.tests[0].behavior);
  CHECK(text::contains(seen, build_prompt_context(f.fn)));
  CHECK(text::contains(seen, skel.tests[0].source_text));
  CHECK(seen == completion_prompt(skel, f.fn, *f.adapter));
}

TEST_CASE("completions that lose, repeat or empty a stub are malformed") {
  IncFixture f;
  auto skel = build_test_skeleton({{1, "a"}, {2, "b"}}, f.fn, *f.adapter);
  Canned c;
  GenerationContext ctx{c.provider, {}, *f.adapter, {}, nullptr};

  c.reply = [](std::string_view) { return fenced("test test_001 {\n  assert inc(1) == 2\n}\n"); };
  CHECK(code_of([&] { complete_tests(skel, f.fn, ctx); }) == ErrorCode::MalformedCompletion);

  c.reply = [](std::string_view) {
    return fenced("test test_001 {\n  assert true\n}\ntest test_001 {\n  assert true\n}\n"
                  "test test_002 {\n  assert true\n}\n");
  };
  CHECK(code_of([&] { complete_tests(skel, f.fn, ctx); }) == ErrorCode::MalformedCompletion);

  c.reply = [](std::string_view) {
    return fenced("test test_001 {\n  # still empty\n}\ntest test_002 {\n  assert true\n}\n");
  };
  CHECK(code_of([&] { complete_tests(skel, f.fn, ctx); }) == ErrorCode::MalformedCompletion);
}

TEST_CASE("repair_tests bumps the revision and quotes diagnostics") {
  IncFixture f;
  GeneratedTestSuite broken;
  broken.tests.push_back({"test_001", {1, "b"}, "test test_001 {\n  assert inc(1 == 2\n}\n"});
  Diagnostic d{DiagnosticKind::CompileError, "expected ')'",
               SourceLocation{"__generated_tests__.fxt", 2}};

  Canned c;
  std::string seen;
  c.reply = [&](std::string_view p) {
    seen = p;
    return fenced("test test_001 {\n  assert inc(1) == 2\n}\n");
  };
  PromptLog log;
  GenerationContext ctx{c.provider, {}, *f.adapter, {}, &log};
  auto fixed = repair_tests(broken, {d}, f.fn, ctx);
  CHECK(fixed.revision == 1);
  CHECK(fixed.names() == broken.names());
  CHECK_FALSE(text::contains(fixed.tests[0].source_text, "inc(1 =="));
  CHECK(text::contains(seen, d.render()));
  CHECK(log.records().at(0).stage == "repair-1");

  auto again = repair_tests(fixed, {d}, f.fn, ctx);
  CHECK(again.revision == 2);

  c.reply = [](std::string_view) { return fenced("test renamed {\n  assert inc(1) == 2\n}\n"); };
  CHECK(code_of([&] { repair_tests(broken, {d}, f.fn, ctx); }) == ErrorCode::MalformedCompletion);

  CHECK_THROWS_AS(repair_tests(broken, {}, f.fn, ctx), std::invalid_argument);
  auto exhausted = fixed;
  exhausted.revision = 3;
  CHECK_THROWS_AS(repair_tests(exhausted, {d}, f.fn, ctx), std::invalid_argument);
}

TEST_CASE("synthesize_code hollows the body and checks the signature") {
  IncFixture f;
  Canned c;
  std::string seen;
  c.reply = [&](std::string_view p) {
    seen = p;
    return fenced("fn inc(x) = x + 1\n");
  };
  GenerationContext ctx{c.provider, {}, *f.adapter, {}, nullptr};
  auto impl = synthesize_code(f.fn, ctx);
  CHECK(impl.signature == f.fn.signature);
  CHECK(impl.source_text == "fn inc(x) = x + 1");
  CHECK(text::contains(seen, f.fn.signature));
  CHECK(text::contains(seen, f.fn.doc_text));
  CHECK_FALSE(text::contains(seen, f.fn.body_text));
  // The sibling stays visible.
  CHECK(text::contains(seen, "y * 2"));

  c.reply = [](std::string_view) { return fenced("fn inc(x, y) = x + 1\n"); };
  CHECK(code_of([&] { synthesize_code(f.fn, ctx); }) == ErrorCode::SignatureMismatch);
  c.reply = [](std::string_view) { return fenced("fn other(x) = x + 1\n"); };
  CHECK(code_of([&] { synthesize_code(f.fn, ctx); }) == ErrorCode::SignatureMismatch);
}

TEST_CASE("test-generation prompts never carry the body under analysis") {
  IncFixture f;
  auto skel = build_test_skeleton({{1, "a"}}, f.fn, *f.adapter);
  Diagnostic d{DiagnosticKind::CompileError, "oops", std::nullopt};
  for (const auto& p : {behaviors_prompt(f.fn, *f.adapter), completion_prompt(skel, f.fn, *f.adapter),
                        repair_prompt(skel, {d}, f.fn, *f.adapter), synthesis_prompt(f.fn, *f.adapter)}) {
    CHECK(text::contains(p, f.fn.doc_text));
    CHECK_FALSE(text::contains(p, f.fn.body_text));
  }
}

TEST_CASE("scripted provider by hash replays and records misses") {
  TempDir t;
  fsutil::write_file(t / (ScriptedProvider::key_for("hello") + ".txt"), "world");
  ScriptedProvider p(t.path(), ScriptMode::ByHash);
  CHECK(p.generate("hello", {}) == "world");
  CHECK(code_of([&] { p.generate("unknown", {}); }) == ErrorCode::ProviderError);
  CHECK(fsutil::read_file(t / "pending" / (ScriptedProvider::key_for("unknown") + ".prompt")) ==
        "unknown");
  CHECK(p.calls() == 2);
  CHECK(code_of([&] { ScriptedProvider(t / "missing", ScriptMode::ByHash); }) ==
        ErrorCode::ConfigError);
}

TEST_CASE("scripted playbook hands out files in order") {
  TempDir t;
  dvtest::write_tree(t.path(), {{"01.txt", "one"}, {"02.txt", "two"}, {"notes.md", "skip"}});
  ScriptedProvider p(t.path(), ScriptMode::Playbook);
  CHECK(p.generate("x", {}) == "one");
  CHECK(p.generate("x", {}) == "two");
  CHECK(code_of([&] { p.generate("x", {}); }) == ErrorCode::ProviderError);
}

TEST_CASE("the cache keys on template version, prompt, model and temperature") {
  TempDir t;
  auto inner = std::make_shared<FunctionProvider>([](std::string_view p, const ProviderParams&) {
    return "r:" + std::string(p);
  });
  CachingProvider a(inner, t / "cache", "v1");
  CachingProvider b(inner, t / "cache", "v2");
  ProviderParams p1;
  ProviderParams p2 = p1;
  p2.model = "other";
  ProviderParams p3 = p1;
  p3.temperature = 0.5;
  std::set<std::string> keys = {a.cache_key("x", p1), a.cache_key("y", p1), a.cache_key("x", p2),
                                a.cache_key("x", p3), b.cache_key("x", p1)};
  CHECK(keys.size() == 5);
  CHECK(a.cache_key("x", p1) == a.cache_key("x", p1));
}

TEST_CASE("a warm cache issues no provider calls") {
  TempDir t;
  std::atomic<int> calls{0};
  auto inner = std::make_shared<FunctionProvider>([&](std::string_view p, const ProviderParams&) {
    ++calls;
    return "r:" + std::string(p) + ":" + std::to_string(calls.load());
  });
  std::vector<std::string> first;
  {
    CachingProvider c(inner, t / "cache", "v1");
    for (int i = 0; i < 5; ++i) first.push_back(c.generate("p" + std::to_string(i), {}));
    CHECK(c.misses() == 5);
  }
  CachingProvider warm(inner, t / "cache", "v1");
  for (int i = 0; i < 5; ++i) CHECK(warm.generate("p" + std::to_string(i), {}) == first[i]);
  CHECK(calls.load() == 5);
  CHECK(warm.hits() == 5);
}

TEST_CASE("concurrent writers of one key converge on one value") {
  TempDir t;
  std::atomic<int> calls{0};
  auto inner = std::make_shared<FunctionProvider>([&](std::string_view, const ProviderParams&) {
    return "value-" + std::to_string(++calls);
  });
  CachingProvider c(inner, t / "cache", "v1");
  std::vector<std::string> got(16);
  parallel_for(got.size(), 8, [&](std::size_t i) { got[i] = c.generate("same", {}); });
  auto later = c.generate("same", {});
  for (const auto& g : got) CHECK(g == later);
}

TEST_CASE("remote request and response shapes") {
  ProviderParams params;
  params.model = "m";
  params.temperature = 0;
  auto body = nlohmann::json::parse(RemoteProvider::request_body("hi", params));
  CHECK(body["model"] == "m");
  CHECK(body["temperature"] == 0.0);
  CHECK(body["messages"][0]["role"] == "user");
  CHECK(body["messages"][0]["content"] == "hi");

  CHECK(RemoteProvider::parse_response(R"({"choices":[{"message":{"content":"ok"}}]})") == "ok");
  CHECK(code_of([] { RemoteProvider::parse_response("not json"); }) == ErrorCode::ProviderError);
  CHECK(code_of([] { RemoteProvider::parse_response(R"({"choices":[]})"); }) ==
        ErrorCode::ProviderError);
}

TEST_CASE("remote provider sends a bearer token and retries server errors") {
  httplib::Server server;
  std::atomic<int> hits{0};
  std::string auth;
  std::mutex mu;
  server.Post("/v1/chat/completions", [&](const httplib::Request& req, httplib::Response& res) {
    {
      std::lock_guard lock(mu);
      auth = req.get_header_value("Authorization");
    }
    if (++hits == 1) {
      res.status = 503;
      return;
    }
    auto in = nlohmann::json::parse(req.body);
    nlohmann::json out = {
        {"choices", {{{"message", {{"content", "echo:" + in["messages"][0]["content"].get<std::string>()}}}}}}};
    res.set_content(out.dump(), "application/json");
  });
  server.Post("/bad", [](const httplib::Request&, httplib::Response& res) { res.status = 400; });
  int port = server.bind_to_any_port("127.0.0.1");
  std::thread th([&] { server.listen_after_bind(); });
  server.wait_until_ready();

  ::setenv("DVTEST_TOKEN", "secret", 1);
  RemoteProviderOptions opts;
  opts.base_url = "http://127.0.0.1:" + std::to_string(port);
  opts.auth_env_var = "DVTEST_TOKEN";
  opts.max_retries = 2;
  opts.timeout_seconds = 5;
  RemoteProvider p(opts);
  CHECK(p.generate("hello", {}) == "echo:hello");
  CHECK(hits.load() == 2);
  {
    std::lock_guard lock(mu);
    CHECK(auth == "Bearer secret");
  }

  opts.path = "/bad";
  RemoteProvider bad(opts);
  CHECK(code_of([&] { bad.generate("x", {}); }) == ErrorCode::ProviderError);

  server.stop();
  th.join();
  CHECK(code_of([] { RemoteProvider(RemoteProviderOptions{}); }) == ErrorCode::ConfigError);
}

TEST_CASE("template version tracks template text") {
  const auto& v = templates::version();
  CHECK(text::starts_with(v, "t1-"));
  CHECK(v.size() > 3);
  CHECK(templates::version() == v);
  for (auto t : {templates::behaviors(), templates::complete_tests(), templates::repair_tests(),
                 templates::synthesize_code()}) {
    CHECK_FALSE(t.empty());
  }
  CHECK(text::contains(templates::repair_tests(), "{diagnostics}"));
  CHECK(text::contains(templates::complete_tests(), "{skeleton}"));
  CHECK(text::contains(templates::synthesize_code(), "{container}"));
}
