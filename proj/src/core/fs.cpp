#include "docverify/core/fs.hpp"

#include <unistd.h>

#include <algorithm>
#include <atomic>
#include <fstream>
#include <sstream>

#include "docverify/core/error.hpp"
#include "docverify/core/hash.hpp"

namespace docverify::fsutil {

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const fs::path& path, std::string_view content) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
}

void append_file(const fs::path& path, std::string_view content) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::app);
  if (!out) throw Error(ErrorCode::IoError, "cannot append to " + path.string());
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
}

std::vector<fs::path> list_files(const fs::path& root, const std::vector<std::string>& skip_dirs) {
  std::error_code ec;
  if (!fs::is_directory(root, ec)) {
    throw Error(ErrorCode::IoError, "not a readable directory: " + root.string());
  }
  std::vector<fs::path> files;
  fs::recursive_directory_iterator it(root, fs::directory_options::skip_permission_denied, ec);
  if (ec) throw Error(ErrorCode::IoError, "cannot read " + root.string() + ": " + ec.message());
  for (auto end = fs::recursive_directory_iterator(); it != end; it.increment(ec)) {
    if (ec) throw Error(ErrorCode::IoError, "cannot walk " + root.string() + ": " + ec.message());
    const auto& entry = *it;
    if (entry.is_directory()) {
      auto name = entry.path().filename().string();
      if (std::find(skip_dirs.begin(), skip_dirs.end(), name) != skip_dirs.end()) {
        it.disable_recursion_pending();
      }
      continue;
    }
    if (entry.is_regular_file()) files.push_back(fs::relative(entry.path(), root));
  }
  std::sort(files.begin(), files.end());
  return files;
}

void copy_tree(const fs::path& from, const fs::path& to, const std::vector<std::string>& skip_dirs) {
  try {
    fs::create_directories(to);
    for (const auto& rel : list_files(from, skip_dirs)) {
      fs::create_directories((to / rel).parent_path());
      fs::copy_file(from / rel, to / rel, fs::copy_options::overwrite_existing);
    }
  } catch (const fs::filesystem_error& e) {
    throw Error(ErrorCode::SandboxError, e.what());
  }
}

std::string fingerprint_tree(const fs::path& root) {
  Sha256 h;
  for (const auto& rel : list_files(root)) {
    h.update_field(rel.generic_string());
    h.update_field(read_file(root / rel));
  }
  return h.hex_digest();
}

bool is_within(const fs::path& inner, const fs::path& outer) {
  auto a = fs::weakly_canonical(inner);
  auto b = fs::weakly_canonical(outer);
  auto [ia, ib] = std::mismatch(a.begin(), a.end(), b.begin(), b.end());
  return ib == b.end();
}

fs::path make_scratch_dir(const fs::path& base, std::string_view prefix) {
  static std::atomic<unsigned long> counter{0};
  fs::path dir_base = base.empty() ? fs::temp_directory_path() : base;
  std::error_code ec;
  fs::create_directories(dir_base, ec);
  for (int attempt = 0; attempt < 1000; ++attempt) {
    auto name = std::string(prefix) + "-" + std::to_string(::getpid()) + "-" +
                std::to_string(counter.fetch_add(1));
    auto dir = dir_base / name;
    if (fs::create_directory(dir, ec)) return dir;
  }
  throw Error(ErrorCode::SandboxError, "cannot create scratch directory under " + dir_base.string());
}

}  // namespace docverify::fsutil
