#include "docverify/cli/config.hpp"

#include <algorithm>
#include <set>

#include "docverify/core/error.hpp"
#include "docverify/core/fs.hpp"
#include "docverify/generation/templates.hpp"

namespace docverify {

using nlohmann::json;

namespace {

[[noreturn]] void config_error(const std::string& msg) { throw Error(ErrorCode::ConfigError, msg); }

void check_keys(const json& obj, const std::string& where, const std::set<std::string>& allowed) {
  if (!obj.is_object()) config_error(where + " must be an object");
  for (const auto& [key, _] : obj.items()) {
    if (!allowed.count(key)) config_error("unknown key '" + key + "' in " + where);
  }
}

template <typename T>
void read(const json& obj, const char* key, T& out, const std::string& where) {
  auto it = obj.find(key);
  if (it == obj.end()) return;
  try {
    out = it->get<T>();
  } catch (const json::exception&) {
    config_error(where + "." + key + " has the wrong type");
  }
}

}  // namespace

Config config_from_json(const json& j) {
  Config c;
  check_keys(j, "config",
             {"subject_language", "provider", "limits", "mode", "report_dir", "seed", "work_dir",
              "keep_workspaces", "host"});
  read(j, "subject_language", c.subject_language, "config");
  read(j, "report_dir", c.report_dir, "config");
  read(j, "seed", c.seed, "config");
  read(j, "work_dir", c.work_dir, "config");
  read(j, "keep_workspaces", c.keep_workspaces, "config");
  if (j.contains("mode")) {
    std::string m;
    read(j, "mode", m, "config");
    auto mode = mode_from_string(m);
    if (!mode) config_error("mode must be full, no_p2f_gate or phase1_only, got '" + m + "'");
    c.mode = *mode;
  }
  if (j.contains("provider")) {
    const auto& p = j["provider"];
    check_keys(p, "provider",
               {"kind", "base_url", "path", "model", "temperature", "auth_env_var", "cache_dir",
                "script_dir", "script_mode", "max_retries", "timeout_seconds"});
    auto& o = c.provider;
    read(p, "kind", o.kind, "provider");
    read(p, "base_url", o.base_url, "provider");
    read(p, "path", o.path, "provider");
    read(p, "model", o.model, "provider");
    read(p, "temperature", o.temperature, "provider");
    read(p, "auth_env_var", o.auth_env_var, "provider");
    read(p, "cache_dir", o.cache_dir, "provider");
    read(p, "script_dir", o.script_dir, "provider");
    read(p, "script_mode", o.script_mode, "provider");
    read(p, "max_retries", o.max_retries, "provider");
    read(p, "timeout_seconds", o.timeout_seconds, "provider");
  }
  if (j.contains("limits")) {
    const auto& l = j["limits"];
    check_keys(l, "limits",
               {"max_repair_attempts", "max_tests", "per_test_timeout_ms", "build_timeout_ms",
                "parallelism"});
    read(l, "max_repair_attempts", c.limits.max_repair_attempts, "limits");
    read(l, "max_tests", c.limits.max_tests, "limits");
    read(l, "per_test_timeout_ms", c.limits.per_test_timeout_ms, "limits");
    read(l, "build_timeout_ms", c.limits.build_timeout_ms, "limits");
    read(l, "parallelism", c.limits.parallelism, "limits");
  }
  if (j.contains("host")) {
    const auto& h = j["host"];
    check_keys(h, "host", {"compiler", "compile_flags", "doctest_header"});
    read(h, "compiler", c.host.compiler, "host");
    read(h, "compile_flags", c.host.compile_flags, "host");
    read(h, "doctest_header", c.host.doctest_header, "host");
  }
  validate(c);
  return c;
}

void validate(const Config& c) {
  auto names = adapter_names();
  if (std::find(names.begin(), names.end(), c.subject_language) == names.end()) {
    config_error("unknown subject_language '" + c.subject_language + "'");
  }
  const auto& p = c.provider;
  if (p.kind != "scripted" && p.kind != "remote") {
    config_error("provider.kind must be scripted or remote");
  }
  if (p.kind == "scripted" && p.script_dir.empty()) config_error("provider.script_dir is required");
  if (p.kind == "remote" && p.base_url.empty()) config_error("provider.base_url is required");
  if (p.script_mode != "by_hash" && p.script_mode != "playbook") {
    config_error("provider.script_mode must be by_hash or playbook");
  }
  if (!(p.temperature >= 0.0)) config_error("provider.temperature must be >= 0");
  if (p.max_retries < 0) config_error("provider.max_retries must be >= 0");
  if (p.timeout_seconds <= 0) config_error("provider.timeout_seconds must be positive");
  if (c.limits.max_repair_attempts < 0) config_error("limits.max_repair_attempts must be >= 0");
  if (c.limits.max_tests < 1) config_error("limits.max_tests must be >= 1");
  if (c.limits.per_test_timeout_ms <= 0) config_error("limits.per_test_timeout_ms must be positive");
  if (c.limits.build_timeout_ms <= 0) config_error("limits.build_timeout_ms must be positive");
  if (c.report_dir.empty()) config_error("report_dir is empty");
}

Config load_config(const std::filesystem::path& file) {
  std::error_code ec;
  if (!std::filesystem::is_regular_file(file, ec)) {
    config_error("config file not found: " + file.string());
  }
  json j;
  try {
    j = json::parse(fsutil::read_file(file));
  } catch (const json::parse_error& e) {
    config_error(file.string() + ": " + e.what());
  }
  return config_from_json(j);
}

json config_to_json(const Config& c) {
  const auto& p = c.provider;
  return json{{"subject_language", c.subject_language},
              {"provider",
               {{"kind", p.kind},
                {"base_url", p.base_url},
                {"path", p.path},
                {"model", p.model},
                {"temperature", p.temperature},
                {"auth_env_var", p.auth_env_var},
                {"cache_dir", p.cache_dir},
                {"script_dir", p.script_dir},
                {"script_mode", p.script_mode},
                {"max_retries", p.max_retries},
                {"timeout_seconds", p.timeout_seconds}}},
              {"limits",
               {{"max_repair_attempts", c.limits.max_repair_attempts},
                {"max_tests", c.limits.max_tests},
                {"per_test_timeout_ms", c.limits.per_test_timeout_ms},
                {"build_timeout_ms", c.limits.build_timeout_ms},
                {"parallelism", c.limits.parallelism}}},
              {"mode", std::string(to_string(c.mode))},
              {"report_dir", c.report_dir},
              {"seed", c.seed},
              {"work_dir", c.work_dir},
              {"keep_workspaces", c.keep_workspaces},
              {"host",
               {{"compiler", c.host.compiler},
                {"compile_flags", c.host.compile_flags},
                {"doctest_header", c.host.doctest_header}}}};
}

RunLimits run_limits(const Config& c) {
  RunLimits r;
  r.per_test_timeout = std::chrono::milliseconds(c.limits.per_test_timeout_ms);
  r.build_timeout = std::chrono::milliseconds(c.limits.build_timeout_ms);
  return r;
}

GenerationLimits generation_limits(const Config& c) {
  return GenerationLimits{c.limits.max_tests, c.limits.max_repair_attempts};
}

AdapterOptions adapter_options(const Config& c) {
  AdapterOptions o;
  o.compiler = c.host.compiler;
  o.compile_flags = c.host.compile_flags;
  if (!c.host.doctest_header.empty()) o.doctest_header = c.host.doctest_header;
  return o;
}

std::shared_ptr<Provider> make_provider(const Config& c) {
  std::shared_ptr<Provider> p;
  if (c.provider.kind == "scripted") {
    p = std::make_shared<ScriptedProvider>(
        c.provider.script_dir,
        c.provider.script_mode == "playbook" ? ScriptMode::Playbook : ScriptMode::ByHash);
  } else {
    RemoteProviderOptions o;
    o.base_url = c.provider.base_url;
    o.path = c.provider.path;
    o.auth_env_var = c.provider.auth_env_var;
    o.max_retries = c.provider.max_retries;
    o.timeout_seconds = c.provider.timeout_seconds;
    p = std::make_shared<RemoteProvider>(o);
  }
  if (!c.provider.cache_dir.empty()) {
    p = std::make_shared<CachingProvider>(p, c.provider.cache_dir, templates::version());
  }
  return p;
}

}  // namespace docverify
