#include "docverify/corpus/corpus.hpp"

#include <algorithm>
#include <set>

#include "docverify/core/error.hpp"
#include "docverify/core/text.hpp"

namespace docverify {

Extraction extract_functions(const std::filesystem::path& root, const SubjectAdapter& adapter) {
  std::error_code ec;
  if (!std::filesystem::is_directory(root, ec)) {
    throw Error(ErrorCode::IoError, "subject root is not a readable directory: " + root.string());
  }
  Extraction out;
  auto all = adapter.list_documented_functions(root, out.warnings);
  std::set<std::string> seen;
  for (auto& fn : all) {
    if (text::trim(fn.doc_text).empty()) continue;
    if (!seen.insert(fn.id).second) {
      out.warnings.push_back("duplicate function id skipped: " + fn.id);
      continue;
    }
    out.functions.push_back(std::move(fn));
  }
  std::sort(out.functions.begin(), out.functions.end(),
            [](const auto& a, const auto& b) { return a.id < b.id; });
  return out;
}

bool is_eligible(const DocumentedFunction& fn) {
  return fn.visibility == Visibility::Public && fn.kind == FunctionKind::Ordinary &&
         !text::trim(fn.doc_text).empty();
}

std::vector<DocumentedFunction> filter_eligible(const std::vector<DocumentedFunction>& fns) {
  std::vector<DocumentedFunction> out;
  std::copy_if(fns.begin(), fns.end(), std::back_inserter(out), is_eligible);
  return out;
}

std::string build_prompt_context(const DocumentedFunction& fn) {
  std::string out;
  if (!fn.context.imports.empty()) {
    out += "Imports:\n";
    for (const auto& imp : fn.context.imports) out += imp + "\n";
    out += "\n";
  }
  if (!fn.context.enclosing_doc.empty()) {
    out += "Enclosing documentation:\n" + fn.context.enclosing_doc + "\n\n";
  }
  out += "Enclosing declaration (" + fn.file_path + "):\n";
  out += fn.context.enclosing_declaration;
  if (!out.empty() && out.back() != '\n') out += '\n';
  out += "\nFunction under test: " + fn.qualified_name + "\n";
  out += "Documentation:\n" + fn.doc_text + "\n";
  out += "Signature:\n" + fn.signature + "\n";
  return out;
}

}  // namespace docverify
