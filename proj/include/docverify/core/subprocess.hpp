#pragma once

#include <chrono>
#include <filesystem>
#include <string>
#include <vector>

namespace docverify {

struct ProcessResult {
  int exit_code = -1;
  bool signaled = false;
  int signal = 0;
  bool timed_out = false;
  // stdout and stderr interleaved as the child wrote them.
  std::string output;

  bool ok() const { return !signaled && !timed_out && exit_code == 0; }
};

// Runs argv[0] (looked up on PATH) in its own process group. On timeout the
// whole group is killed. Throws Error{ToolchainError} when the program cannot
// be launched at all.
ProcessResult run_process(const std::vector<std::string>& argv,
                          const std::filesystem::path& cwd,
                          std::chrono::milliseconds timeout);

}  // namespace docverify
