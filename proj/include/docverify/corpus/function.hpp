#pragma once

#include <string>
#include <vector>

namespace docverify {

enum class Visibility { Public, NonPublic };
enum class FunctionKind { Ordinary, Constructor, Abstract };

std::string_view to_string(Visibility v);
std::string_view to_string(FunctionKind k);

struct DeclarationContext {
  // The surrounding type/module rendered with sibling member signatures,
  // constructors and fields. Never carries member bodies.
  std::string enclosing_declaration;
  std::vector<std::string> imports;
  std::string enclosing_doc;
  // Verbatim source of the enclosing container with the target body removed.
  std::string hollowed_container;

  friend bool operator==(const DeclarationContext&, const DeclarationContext&) = default;
};

struct DocumentedFunction {
  std::string id;
  std::string file_path;  // relative to the subject root, generic separators
  std::string qualified_name;
  std::string signature;
  std::string doc_text;
  std::string body_text;
  Visibility visibility = Visibility::Public;
  FunctionKind kind = FunctionKind::Ordinary;
  DeclarationContext context;

  // Unqualified name (last component of qualified_name).
  std::string name() const;

  friend bool operator==(const DocumentedFunction&, const DocumentedFunction&) = default;
};

// "<file>::<qualified name>(<parameter text>)" with whitespace normalised.
std::string make_function_id(const std::string& file_path, const std::string& qualified_name,
                             const std::string& parameter_text);

}  // namespace docverify
