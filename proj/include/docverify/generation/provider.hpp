#pragma once

#include <atomic>
#include <filesystem>
#include <functional>
#include <memory>
#include <mutex>
#include <string>
#include <string_view>
#include <vector>

namespace docverify {

struct ProviderParams {
  std::string model = "gpt-4.1-mini";
  double temperature = 0.0;
};

/// A text-generation backend. Implementations must be safe to call from
/// several threads at once.
class Provider {
 public:
  virtual ~Provider() = default;
  // Throws Error{ProviderError} on transport or protocol failure.
  virtual std::string generate(std::string_view prompt, const ProviderParams& params) = 0;
};

enum class ScriptMode { ByHash, Playbook };

// Replays canned responses from a directory.
//
// ByHash: the response to a prompt lives in `<dir>/<sha256(prompt)>.txt`.
// A missing response is an error; the prompt is written to
// `<dir>/pending/<hash>.prompt` so fixtures can be authored from real runs.
//
// Playbook: responses are files in lexicographic order, handed out one per
// call regardless of the prompt.
class ScriptedProvider final : public Provider {
 public:
  ScriptedProvider(std::filesystem::path dir, ScriptMode mode);

  std::string generate(std::string_view prompt, const ProviderParams& params) override;

  static std::string key_for(std::string_view prompt);
  std::size_t calls() const { return calls_.load(); }

 private:
  std::filesystem::path dir_;
  ScriptMode mode_;
  std::vector<std::filesystem::path> playbook_;
  std::size_t next_ = 0;
  std::mutex mu_;
  std::atomic<std::size_t> calls_{0};
};

struct RemoteProviderOptions {
  std::string base_url;               // e.g. https://api.openai.com
  std::string path = "/v1/chat/completions";
  std::string auth_env_var = "OPENAI_API_KEY";
  int max_retries = 2;
  int timeout_seconds = 120;
};

// Chat-completion style HTTP endpoint:
//   POST {base_url}{path}
//   {"model": ..., "temperature": ..., "messages": [{"role": "user", "content": ...}]}
// The reply's choices[0].message.content is returned.
class RemoteProvider final : public Provider {
 public:
  explicit RemoteProvider(RemoteProviderOptions options);
  std::string generate(std::string_view prompt, const ProviderParams& params) override;

  static std::string request_body(std::string_view prompt, const ProviderParams& params);
  // Throws ProviderError when the body carries no generated text.
  static std::string parse_response(std::string_view body);

 private:
  RemoteProviderOptions options_;
};

// Disk cache in front of another provider. Entries are keyed by
// sha256(template version, prompt, model, temperature); concurrent writers of
// one key converge on the first value written.
class CachingProvider final : public Provider {
 public:
  CachingProvider(std::shared_ptr<Provider> inner, std::filesystem::path cache_dir,
                  std::string template_version);

  std::string generate(std::string_view prompt, const ProviderParams& params) override;

  std::string cache_key(std::string_view prompt, const ProviderParams& params) const;
  std::size_t hits() const { return hits_.load(); }
  std::size_t misses() const { return misses_.load(); }

 private:
  std::shared_ptr<Provider> inner_;
  std::filesystem::path dir_;
  std::string template_version_;
  std::atomic<std::size_t> hits_{0};
  std::atomic<std::size_t> misses_{0};
};

// Adapts a callable; handy for tests and embedding.
class FunctionProvider final : public Provider {
 public:
  using Fn = std::function<std::string(std::string_view, const ProviderParams&)>;
  explicit FunctionProvider(Fn fn) : fn_(std::move(fn)) {}
  std::string generate(std::string_view prompt, const ProviderParams& params) override {
    return fn_(prompt, params);
  }

 private:
  Fn fn_;
};

}  // namespace docverify
