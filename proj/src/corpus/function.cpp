#include "docverify/corpus/function.hpp"

#include "docverify/core/text.hpp"

namespace docverify {

std::string_view to_string(Visibility v) {
  return v == Visibility::Public ? "public" : "non-public";
}

std::string_view to_string(FunctionKind k) {
  switch (k) {
    case FunctionKind::Ordinary: return "ordinary";
    case FunctionKind::Constructor: return "constructor";
    case FunctionKind::Abstract: return "abstract";
  }
  return "ordinary";
}

std::string DocumentedFunction::name() const {
  auto pos = qualified_name.rfind("::");
  return pos == std::string::npos ? qualified_name : qualified_name.substr(pos + 2);
}

std::string make_function_id(const std::string& file_path, const std::string& qualified_name,
                             const std::string& parameter_text) {
  return file_path + "::" + qualified_name + "(" + text::normalize_whitespace(parameter_text) + ")";
}

}  // namespace docverify
