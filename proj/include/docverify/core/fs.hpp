#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace docverify::fsutil {

namespace fs = std::filesystem;

std::string read_file(const fs::path& path);
void write_file(const fs::path& path, std::string_view content);
void append_file(const fs::path& path, std::string_view content);

// Regular files under `root`, relative paths in lexicographic order.
// Directories named in `skip_dirs` are not descended into.
std::vector<fs::path> list_files(const fs::path& root,
                                 const std::vector<std::string>& skip_dirs = {});

// Copies the tree rooted at `from` into `to` (created if missing).
void copy_tree(const fs::path& from, const fs::path& to,
               const std::vector<std::string>& skip_dirs = {});

// SHA-256 over every (relative path, bytes) pair in the tree.
std::string fingerprint_tree(const fs::path& root);

// True when `inner` equals `outer` or lies below it.
bool is_within(const fs::path& inner, const fs::path& outer);

// A fresh, uniquely named directory below `base` (or the system temp dir).
fs::path make_scratch_dir(const fs::path& base, std::string_view prefix);

}  // namespace docverify::fsutil
