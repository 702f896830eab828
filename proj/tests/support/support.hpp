#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "docverify/cli/config.hpp"
#include "docverify/corpus/adapter.hpp"
#include "docverify/corpus/function.hpp"

namespace dvtest {

namespace fs = std::filesystem;

// Directory of the checked-in fixtures.
fs::path fixtures();

// Fresh directory below the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& prefix = "dvtest");
  ~TempDir();
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const fs::path& path() const { return path_; }
  fs::path operator/(const std::string& rel) const { return path_ / rel; }

 private:
  fs::path path_;
};

// Writes every (relative path, content) pair below `root`.
void write_tree(const fs::path& root, const std::map<std::string, std::string>& files);

// What a well-behaved model would answer for one function.
struct FunctionScript {
  std::vector<std::string> behaviors;
  // Statement lines per test, index-aligned with behaviors.
  std::vector<std::string> tests;
  // Full replacement definition; omitted when empty.
  std::string impl;
};

// Writes by-hash scripted responses. Prompts are computed with the same
// builders the detector uses, so a changed template only needs a rerun.
class ScriptBuilder {
 public:
  ScriptBuilder(fs::path dir, const docverify::SubjectAdapter& adapter);

  void add(const docverify::DocumentedFunction& fn, const FunctionScript& script);
  // Adds a raw response for an exact prompt.
  void add_raw(const std::string& prompt, const std::string& response);

  const fs::path& dir() const { return dir_; }

  static std::string behaviors_response(const std::vector<std::string>& behaviors);
  static std::string completion_response(const std::vector<std::string>& tests,
                                         const std::vector<std::string>& behaviors);
  static std::string code_response(const std::string& impl);

 private:
  fs::path dir_;
  const docverify::SubjectAdapter& adapter_;
};

docverify::DocumentedFunction find_function(const fs::path& root,
                                            const docverify::SubjectAdapter& adapter,
                                            const std::string& name);

// Scripts for the paired calc corpus, keyed by "<revision>/<function>".
// The noisy variant seeds the failure modes the second phase exists to
// filter: wrong tests, shared wrong assumptions, and partly wrong code.
std::map<std::string, FunctionScript> calc_scripts(bool noisy);

// Writes scripts for every eligible function of calc/v1 and calc/v2.
void write_calc_scripts(const fs::path& dir, bool noisy);

// A config using the fixture adapter and a by-hash script directory.
docverify::Config scripted_config(const fs::path& script_dir, const fs::path& report_dir,
                                  const fs::path& work_dir);

}  // namespace dvtest
