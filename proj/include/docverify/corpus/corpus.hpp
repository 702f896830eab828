#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "docverify/corpus/adapter.hpp"
#include "docverify/corpus/function.hpp"

namespace docverify {

struct Extraction {
  std::vector<DocumentedFunction> functions;
  // Per-file parse problems; they never abort extraction.
  std::vector<std::string> warnings;
};

// Every documented function the adapter can parse, sorted by id.
// Throws IoError when `root` is not a readable directory.
Extraction extract_functions(const std::filesystem::path& root, const SubjectAdapter& adapter);

bool is_eligible(const DocumentedFunction& fn);

// Public, ordinary, documented functions; input order preserved.
std::vector<DocumentedFunction> filter_eligible(const std::vector<DocumentedFunction>& fns);

// Imports, the enclosing declaration and the target's doc + signature.
std::string build_prompt_context(const DocumentedFunction& fn);

}  // namespace docverify
