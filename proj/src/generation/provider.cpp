#include "docverify/generation/provider.hpp"

#include <httplib.h>
#include <json.hpp>

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <optional>
#include <thread>

#include "docverify/core/error.hpp"
#include "docverify/core/fs.hpp"
#include "docverify/core/hash.hpp"

namespace docverify {

namespace fs = std::filesystem;
using json = nlohmann::json;

// ---------------------------------------------------------------- scripted

ScriptedProvider::ScriptedProvider(fs::path dir, ScriptMode mode) : dir_(std::move(dir)), mode_(mode) {
  std::error_code ec;
  if (!fs::is_directory(dir_, ec)) {
    throw Error(ErrorCode::ConfigError, "script directory does not exist: " + dir_.string());
  }
  if (mode_ == ScriptMode::Playbook) {
    for (const auto& rel : fsutil::list_files(dir_, {"pending"})) {
      if (rel.extension() == ".txt") playbook_.push_back(dir_ / rel);
    }
  }
}

std::string ScriptedProvider::key_for(std::string_view prompt) { return sha256_hex(prompt); }

std::string ScriptedProvider::generate(std::string_view prompt, const ProviderParams&) {
  ++calls_;
  if (mode_ == ScriptMode::Playbook) {
    fs::path file;
    {
      std::lock_guard lock(mu_);
      if (next_ >= playbook_.size()) {
        throw Error(ErrorCode::ProviderError,
                    "playbook exhausted after " + std::to_string(playbook_.size()) + " responses");
      }
      file = playbook_[next_++];
    }
    return fsutil::read_file(file);
  }
  const auto key = key_for(prompt);
  const auto file = dir_ / (key + ".txt");
  std::error_code ec;
  if (!fs::exists(file, ec)) {
    try {
      fsutil::write_file(dir_ / "pending" / (key + ".prompt"), prompt);
    } catch (const Error&) {
      // Read-only script directories are fine; the error below still names the key.
    }
    throw Error(ErrorCode::ProviderError, "no scripted response for prompt " + key);
  }
  return fsutil::read_file(file);
}

// ---------------------------------------------------------------- remote

RemoteProvider::RemoteProvider(RemoteProviderOptions options) : options_(std::move(options)) {
  if (options_.base_url.empty()) throw Error(ErrorCode::ConfigError, "provider.base_url is empty");
}

std::string RemoteProvider::request_body(std::string_view prompt, const ProviderParams& params) {
  json body = {{"model", params.model},
               {"temperature", params.temperature},
               {"messages", json::array({{{"role", "user"}, {"content", std::string(prompt)}}})}};
  return body.dump();
}

std::string RemoteProvider::parse_response(std::string_view body) {
  json j;
  try {
    j = json::parse(body);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ProviderError, std::string("response is not JSON: ") + e.what());
  }
  try {
    if (j.contains("choices") && !j["choices"].empty()) {
      const auto& choice = j["choices"][0];
      if (choice.contains("message")) return choice["message"]["content"].get<std::string>();
      if (choice.contains("text")) return choice["text"].get<std::string>();
    }
    if (j.contains("content") && j["content"].is_string()) return j["content"].get<std::string>();
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ProviderError, std::string("unexpected response shape: ") + e.what());
  }
  throw Error(ErrorCode::ProviderError, "response carries no generated text");
}

std::string RemoteProvider::generate(std::string_view prompt, const ProviderParams& params) {
  httplib::Client client(options_.base_url);
  client.set_read_timeout(options_.timeout_seconds, 0);
  client.set_write_timeout(options_.timeout_seconds, 0);
  httplib::Headers headers;
  if (!options_.auth_env_var.empty()) {
    if (const char* token = std::getenv(options_.auth_env_var.c_str()); token && *token) {
      headers.emplace("Authorization", std::string("Bearer ") + token);
    }
  }
  const auto body = request_body(prompt, params);
  std::string last_error;
  for (int attempt = 0; attempt <= options_.max_retries; ++attempt) {
    if (attempt > 0) std::this_thread::sleep_for(std::chrono::milliseconds(500 << attempt));
    auto res = client.Post(options_.path, headers, body, "application/json");
    if (!res) {
      last_error = "transport error: " + httplib::to_string(res.error());
      continue;
    }
    if (res->status == 429 || res->status >= 500) {
      last_error = "HTTP " + std::to_string(res->status);
      continue;
    }
    if (res->status != 200) {
      throw Error(ErrorCode::ProviderError, "HTTP " + std::to_string(res->status) + ": " + res->body);
    }
    return parse_response(res->body);
  }
  throw Error(ErrorCode::ProviderError, last_error);
}

// ---------------------------------------------------------------- cache

CachingProvider::CachingProvider(std::shared_ptr<Provider> inner, fs::path cache_dir,
                                 std::string template_version)
    : inner_(std::move(inner)), dir_(std::move(cache_dir)),
      template_version_(std::move(template_version)) {
  std::error_code ec;
  fs::create_directories(dir_, ec);
  if (ec) throw Error(ErrorCode::ConfigError, "cannot create cache dir " + dir_.string());
}

std::string CachingProvider::cache_key(std::string_view prompt, const ProviderParams& params) const {
  Sha256 h;
  h.update_field(template_version_);
  h.update_field(prompt);
  h.update_field(params.model);
  // Fixed formatting so the key is stable across platforms.
  char temp[64];
  std::snprintf(temp, sizeof temp, "%.6f", params.temperature);
  h.update_field(temp);
  return h.hex_digest();
}

std::string CachingProvider::generate(std::string_view prompt, const ProviderParams& params) {
  const auto key = cache_key(prompt, params);
  const auto file = dir_ / (key + ".json");
  auto read_entry = [&]() -> std::optional<std::string> {
    std::error_code ec;
    if (!fs::exists(file, ec)) return std::nullopt;
    try {
      return json::parse(fsutil::read_file(file)).at("response").get<std::string>();
    } catch (const std::exception&) {
      return std::nullopt;
    }
  };
  if (auto hit = read_entry()) {
    ++hits_;
    return *hit;
  }
  ++misses_;
  auto response = inner_->generate(prompt, params);
  json entry = {{"template_version", template_version_},
                {"model", params.model},
                {"temperature", params.temperature},
                {"prompt", std::string(prompt)},
                {"response", response}};
  auto tmp = fsutil::make_scratch_dir(dir_, ".tmp") / "entry.json";
  fsutil::write_file(tmp, entry.dump(2));
  std::error_code ec;
  // Linking fails when another writer won; its value is then authoritative.
  fs::create_hard_link(tmp, file, ec);
  fs::remove_all(tmp.parent_path(), ec);
  if (auto stored = read_entry()) return *stored;
  return response;
}

}  // namespace docverify
