#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "docverify/corpus/function.hpp"

namespace docverify::cpp {

enum class ScopeKind { File, Namespace, Class };

struct Scope {
  ScopeKind kind = ScopeKind::File;
  std::string name;
  std::string qualified_prefix;  // "ns::Outer::" style, empty at file scope
  std::string head;              // "class Foo : public Bar"
  std::string doc;
  bool anonymous = false;
  std::size_t begin = 0;  // offset of the head (or 0 for the file)
  std::size_t end = 0;    // one past the closing brace (or ';' for classes)
  int parent = -1;
  // Rendered member declarations in source order (no bodies).
  std::vector<std::string> members;
};

struct FunctionDef {
  std::string name;            // as written before '(' (may be qualified: Foo::bar)
  std::string qualified_name;  // scope prefix + name
  std::string signature;       // verbatim head
  std::string param_text;
  std::string body;            // verbatim "{ ... }", empty for pure virtuals
  std::string doc;             // comment markers stripped
  Visibility visibility = Visibility::Public;
  FunctionKind kind = FunctionKind::Ordinary;
  std::size_t head_begin = 0;
  std::size_t body_begin = 0;
  std::size_t body_end = 0;
  int scope = 0;
};

struct ScanResult {
  std::vector<Scope> scopes;  // scopes[0] is the file
  std::vector<FunctionDef> functions;
  std::vector<std::string> includes;
  std::vector<std::string> warnings;
};

// Brace-level scan of one translation unit. Function bodies are skipped, so
// local functions and lambdas never appear in the result.
ScanResult scan(std::string_view source);

// Strips `///`, `//!`, `/** */` and `/*! */` markers and leading `*` columns.
std::string strip_doc_comment(std::string_view raw);

// Text rendering of a scope: its head plus member declarations.
std::string render_scope(const ScanResult& r, int scope);

// Normalises a declaration head for comparison: comments and specifiers
// such as `virtual`/`override` dropped, default arguments and the class
// qualifier before the name removed, whitespace canonicalised.
std::string canonical_signature(std::string_view head);

// Index just past the brace matching the one at `open`, skipping comments
// and literals; npos when unbalanced.
std::size_t match_brace(std::string_view s, std::size_t open);

}  // namespace docverify::cpp
