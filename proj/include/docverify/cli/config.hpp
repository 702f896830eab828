#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <string>
#include <vector>

#include <json.hpp>

#include "docverify/corpus/adapter.hpp"
#include "docverify/generation/provider.hpp"
#include "docverify/verdict/verdict.hpp"

namespace docverify {

struct ProviderConfig {
  std::string kind = "scripted";  // scripted | remote
  std::string base_url;
  std::string path = "/v1/chat/completions";
  std::string model = "gpt-4.1-mini";
  double temperature = 0.0;
  std::string auth_env_var = "OPENAI_API_KEY";
  std::string cache_dir;  // no cache when empty
  std::string script_dir;
  std::string script_mode = "by_hash";  // by_hash | playbook
  int max_retries = 2;
  int timeout_seconds = 120;
};

struct LimitsConfig {
  int max_repair_attempts = 3;
  int max_tests = 20;
  std::int64_t per_test_timeout_ms = 30'000;
  std::int64_t build_timeout_ms = 300'000;
  unsigned parallelism = 0;  // 0: one worker per processor
};

struct HostConfig {
  std::string compiler = "c++";
  std::vector<std::string> compile_flags = {"-std=c++20", "-O0"};
  std::string doctest_header;  // bundled copy when empty
};

struct Config {
  std::string subject_language = "fixture";
  ProviderConfig provider;
  LimitsConfig limits;
  DetectionMode mode = DetectionMode::Full;
  std::string report_dir = "docverify-report";
  std::uint64_t seed = 0;
  std::string work_dir;  // scratch parent; system temp dir when empty
  bool keep_workspaces = false;
  HostConfig host;
};

// Unknown keys, wrong types and out-of-range values raise ConfigError.
Config config_from_json(const nlohmann::json& j);
Config load_config(const std::filesystem::path& file);
nlohmann::json config_to_json(const Config& c);
void validate(const Config& c);

RunLimits run_limits(const Config& c);
GenerationLimits generation_limits(const Config& c);
AdapterOptions adapter_options(const Config& c);

// The configured provider, wrapped in a disk cache when cache_dir is set.
std::shared_ptr<Provider> make_provider(const Config& c);

}  // namespace docverify
