#include "docverify/adapters/cpp_scanner.hpp"

#include <cctype>
#include <regex>
#include <set>

#include "docverify/core/text.hpp"

namespace docverify::cpp {

namespace {

bool ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }
bool space(char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }

// Index past a string/char literal starting at i (raw strings included).
std::size_t skip_literal(std::string_view s, std::size_t i) {
  if (s[i] == 'R' && i + 1 < s.size() && s[i + 1] == '"') {
    auto open = s.find('(', i + 2);
    if (open == std::string_view::npos) return s.size();
    std::string close = ")" + std::string(s.substr(i + 2, open - i - 2)) + "\"";
    auto end = s.find(close, open + 1);
    return end == std::string_view::npos ? s.size() : end + close.size();
  }
  char q = s[i];
  for (std::size_t j = i + 1; j < s.size(); ++j) {
    if (s[j] == '\\') {
      ++j;
    } else if (s[j] == q || s[j] == '\n') {
      return j + 1;
    }
  }
  return s.size();
}

bool is_raw_string_start(std::string_view s, std::size_t i) {
  if (s[i] != 'R' || i + 1 >= s.size() || s[i + 1] != '"') return false;
  if (i == 0) return true;
  // Allow encoding prefixes (u8R, LR, uR, UR); reject identifiers ending in R.
  std::size_t k = i;
  while (k > 0 && ident_char(s[k - 1])) --k;
  auto prefix = s.substr(k, i - k);
  return prefix.empty() || prefix == "u8" || prefix == "L" || prefix == "u" || prefix == "U";
}

bool is_char_literal_start(std::string_view s, std::size_t i) {
  // Digit separators (1'000) are not literals.
  return s[i] == '\'' && !(i > 0 && std::isxdigit(static_cast<unsigned char>(s[i - 1])) &&
                           i + 1 < s.size() && std::isxdigit(static_cast<unsigned char>(s[i + 1])));
}

// Index past a comment at i, or i when there is none.
std::size_t skip_comment(std::string_view s, std::size_t i) {
  if (i + 1 >= s.size() || s[i] != '/') return i;
  if (s[i + 1] == '/') {
    auto nl = s.find('\n', i);
    return nl == std::string_view::npos ? s.size() : nl;
  }
  if (s[i + 1] == '*') {
    auto end = s.find("*/", i + 2);
    return end == std::string_view::npos ? s.size() : end + 2;
  }
  return i;
}

std::string strip_comments(std::string_view s) {
  std::string out;
  for (std::size_t i = 0; i < s.size();) {
    auto c = skip_comment(s, i);
    if (c != i) {
      out += ' ';
      i = c;
      continue;
    }
    if (s[i] == '"' || is_char_literal_start(s, i) || is_raw_string_start(s, i)) {
      auto e = skip_literal(s, i);
      out += s.substr(i, e - i);
      i = e;
      continue;
    }
    out += s[i++];
  }
  return out;
}

std::size_t match_paren(std::string_view s, std::size_t open) {
  int depth = 0;
  for (std::size_t i = open; i < s.size(); ++i) {
    auto c = skip_comment(s, i);
    if (c != i) {
      i = c - 1;
      continue;
    }
    if (s[i] == '"' || is_char_literal_start(s, i)) {
      i = skip_literal(s, i) - 1;
      continue;
    }
    if (s[i] == '(') ++depth;
    if (s[i] == ')' && --depth == 0) return i;
  }
  return std::string_view::npos;
}

// Removes a leading `template <...>` clause and attributes.
std::string_view strip_prefix_clauses(std::string_view h) {
  for (;;) {
    h = text::trim(h);
    if (text::starts_with(h, "template")) {
      auto lt = h.find('<');
      if (lt == std::string_view::npos) return h;
      int depth = 0;
      std::size_t i = lt;
      for (; i < h.size(); ++i) {
        if (h[i] == '<') ++depth;
        if (h[i] == '>' && --depth == 0) break;
      }
      h = h.substr(std::min(i + 1, h.size()));
      continue;
    }
    if (text::starts_with(h, "[[")) {
      auto e = h.find("]]");
      if (e == std::string_view::npos) return h;
      h = h.substr(e + 2);
      continue;
    }
    return h;
  }
}

std::string first_word(std::string_view h) {
  std::size_t i = 0;
  while (i < h.size() && ident_char(h[i])) ++i;
  return std::string(h.substr(0, i));
}

const std::set<std::string>& paren_keywords() {
  static const std::set<std::string> k = {"decltype", "alignas", "__attribute__", "__declspec",
                                          "noexcept", "sizeof",  "typeof",        "alignof"};
  return k;
}

struct ParamList {
  std::size_t open = std::string_view::npos;
  std::size_t close = std::string_view::npos;
  std::size_t name_begin = 0;
};

// Finds the parameter list of a function head: the first '(' that follows the
// function name, skipping decltype(...) and similar, and template arguments.
ParamList find_params(std::string_view h) {
  ParamList p;
  static const std::regex op_re(R"(\boperator\s*(\(\s*\)|\[\s*\]|[^\s(]+)\s*\()");
  std::string hs(h);
  std::smatch m;
  if (std::regex_search(hs, m, op_re)) {
    p.name_begin = static_cast<std::size_t>(m.position(0));
    p.open = p.name_begin + static_cast<std::size_t>(m.length(0)) - 1;
    p.close = match_paren(h, p.open);
    return p;
  }
  int angle = 0;
  for (std::size_t i = 0; i < h.size(); ++i) {
    auto c = skip_comment(h, i);
    if (c != i) {
      i = c - 1;
      continue;
    }
    char ch = h[i];
    if (ch == '"' || is_char_literal_start(h, i)) {
      i = skip_literal(h, i) - 1;
      continue;
    }
    if (ch == '<') {
      ++angle;
    } else if (ch == '>' && angle > 0) {
      --angle;
    } else if (ch == '(' && angle == 0) {
      std::size_t k = i;
      while (k > 0 && space(h[k - 1])) --k;
      std::size_t e = k;
      while (k > 0 && (ident_char(h[k - 1]) || h[k - 1] == ':' || h[k - 1] == '~')) --k;
      std::string word(h.substr(k, e - k));
      auto last = word.rfind("::");
      std::string tail = last == std::string::npos ? word : word.substr(last + 2);
      auto close = match_paren(h, i);
      if (paren_keywords().count(tail) || word.empty()) {
        if (close == std::string_view::npos) return p;
        i = close;
        continue;
      }
      p.open = i;
      p.close = close;
      p.name_begin = k;
      return p;
    }
  }
  return p;
}

bool has_top_level_char(std::string_view s, char target) {
  int depth = 0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    char c = s[i];
    if (c == '(' || c == '[' || c == '{') ++depth;
    if (c == ')' || c == ']' || c == '}') --depth;
    if (c == '<' || c == '>') continue;
    if (depth == 0 && c == target) {
      if (target == '=' && i + 1 < s.size() && s[i + 1] == '=') {
        ++i;
        continue;
      }
      if (target == '=' && i > 0 && std::string_view("!<>=").find(s[i - 1]) != std::string_view::npos) {
        continue;
      }
      return true;
    }
  }
  return false;
}

bool starts_ctor_init(std::string_view tail) {
  tail = text::trim(tail);
  // Skip qualifiers such as noexcept before the initializer list.
  return !tail.empty() && tail.front() == ':' && !(tail.size() > 1 && tail[1] == ':');
}

bool has_static_specifier(std::string_view pre) {
  static const std::regex re(R"((^|[^\w:])static\b)");
  return std::regex_search(std::string(pre), re);
}

class Scanner {
 public:
  explicit Scanner(std::string_view src) : src_(src) {}

  ScanResult run() {
    Scope file;
    file.kind = ScopeKind::File;
    file.end = src_.size();
    r_.scopes.push_back(file);
    std::size_t pos = 0;
    parse_body(0, pos, false, Visibility::Public);
    return std::move(r_);
  }

 private:
  struct Head {
    std::size_t start = std::string_view::npos;
    std::string doc;
    bool active() const { return start != std::string_view::npos; }
    void reset() {
      start = std::string_view::npos;
      doc.clear();
    }
  };

  void parse_body(int scope, std::size_t& pos, bool until_close, Visibility access) {
    const std::size_t n = src_.size();
    Head head;
    std::string pending_doc;
    bool doc_gap = false;
    bool line_blank = true;
    int paren = 0;
    std::size_t i = pos;
    while (i < n) {
      char c = src_[i];
      if (c == '\n') {
        if (line_blank && !pending_doc.empty()) doc_gap = true;
        line_blank = true;
        ++i;
        continue;
      }
      if (space(c)) {
        ++i;
        continue;
      }
      if (c == '/' && i + 1 < n && (src_[i + 1] == '/' || src_[i + 1] == '*')) {
        auto end = skip_comment(src_, i);
        if (!head.active()) {
          auto raw = src_.substr(i, end - i);
          bool doc = (text::starts_with(raw, "///") && !text::starts_with(raw, "////")) ||
                     text::starts_with(raw, "//!") ||
                     (text::starts_with(raw, "/**") && raw != "/**/") || text::starts_with(raw, "/*!");
          if (doc) {
            if (doc_gap) pending_doc.clear();
            pending_doc += std::string(raw) + "\n";
            doc_gap = false;
          } else if (!pending_doc.empty()) {
            doc_gap = true;
          }
        }
        line_blank = false;
        i = end;
        continue;
      }
      if (c == '#' && line_blank && !head.active()) {
        std::size_t e = i;
        for (;;) {
          auto nl = src_.find('\n', e);
          if (nl == std::string_view::npos) {
            e = n;
            break;
          }
          std::size_t k = nl;
          while (k > i && (src_[k - 1] == '\r')) --k;
          if (k > i && src_[k - 1] == '\\') {
            e = nl + 1;
            continue;
          }
          e = nl;
          break;
        }
        auto directive = text::trim(src_.substr(i, e - i));
        static const std::regex inc(R"(^#\s*include\s*([<"][^>"]+[>"]))");
        std::string d(directive);
        std::smatch m;
        if (std::regex_search(d, m, inc)) r_.includes.push_back("#include " + m[1].str());
        pending_doc.clear();
        doc_gap = false;
        line_blank = false;
        i = e;
        continue;
      }
      line_blank = false;
      if (!head.active()) {
        head.start = i;
        head.doc = pending_doc;
        pending_doc.clear();
        doc_gap = false;
        paren = 0;
      }
      if (c == '"' || is_char_literal_start(src_, i) || is_raw_string_start(src_, i)) {
        i = skip_literal(src_, i);
        continue;
      }
      switch (c) {
        case '(':
          ++paren;
          break;
        case ')':
          --paren;
          break;
        case '{':
          if (paren > 0) {
            auto e = match_brace(src_, i);
            i = e == std::string_view::npos ? n : e;
            continue;
          }
          i = on_open_brace(scope, head, i, access);
          continue;
        case ';':
          if (paren <= 0) {
            on_declaration(scope, head, i);
            head.reset();
          }
          break;
        case '}':
          if (until_close) {
            if (head.active() && !text::trim(src_.substr(head.start, i - head.start)).empty()) {
              r_.warnings.push_back("unterminated declaration before '}' at offset " +
                                    std::to_string(i));
            }
            pos = i + 1;
            return;
          }
          r_.warnings.push_back("unbalanced '}' at offset " + std::to_string(i));
          head.reset();
          break;
        case ':':
          if (paren == 0 && !(i + 1 < n && src_[i + 1] == ':') && !(i > 0 && src_[i - 1] == ':')) {
            auto h = text::trim(src_.substr(head.start, i - head.start));
            if (h == "public" || h == "private" || h == "protected") {
              access = h == "public" ? Visibility::Public : Visibility::NonPublic;
              r_.scopes[scope].members.push_back(std::string(h) + ":");
              head.reset();
            }
          }
          break;
        default:
          break;
      }
      ++i;
    }
    if (until_close) r_.warnings.push_back("unexpected end of file inside a block");
    pos = n;
  }

  // Returns the index to continue from. Resets `head` unless the block is part
  // of a longer declaration (initializers, enums).
  std::size_t on_open_brace(int scope, Head& head, std::size_t brace, Visibility& access) {
    const std::size_t n = src_.size();
    std::string_view h = src_.substr(head.start, brace - head.start);
    std::string_view hs = strip_prefix_clauses(h);
    std::string kw = first_word(hs);
    auto skip_block = [&]() {
      auto e = match_brace(src_, brace);
      return e == std::string_view::npos ? n : e;
    };

    if (kw == "namespace" || (kw == "inline" && text::starts_with(text::trim(hs.substr(6)), "namespace"))) {
      auto after = hs.substr(hs.find("namespace") + 9);
      std::string name = text::normalize_whitespace(after);
      Scope ns;
      ns.kind = ScopeKind::Namespace;
      ns.name = name;
      ns.anonymous = name.empty();
      ns.qualified_prefix = r_.scopes[scope].qualified_prefix + (name.empty() ? "" : name + "::");
      ns.head = text::trim_copy(h);
      ns.doc = strip_doc_comment(head.doc);
      ns.begin = head.start;
      ns.parent = scope;
      int idx = static_cast<int>(r_.scopes.size());
      r_.scopes.push_back(ns);
      r_.scopes[scope].members.push_back(text::trim_copy(h) + " { ... }");
      std::size_t pos = brace + 1;
      parse_body(idx, pos, true, Visibility::Public);
      r_.scopes[idx].end = pos;
      head.reset();
      return pos;
    }
    if (kw == "extern" && text::contains(hs, "\"C")) {
      std::size_t pos = brace + 1;
      parse_body(scope, pos, true, access);
      head.reset();
      return pos;
    }
    if ((kw == "class" || kw == "struct" || kw == "union") && hs.find('(') == std::string_view::npos) {
      static const std::regex name_re(
          R"(^(class|struct|union)\s+(?:\[\[[^\]]*\]\]\s*)?(?:alignas\s*\([^)]*\)\s*)?([A-Za-z_]\w*))");
      std::string hstr(hs);
      std::smatch m;
      Scope cls;
      cls.kind = ScopeKind::Class;
      if (std::regex_search(hstr, m, name_re) && m[2] != "final") cls.name = m[2];
      cls.qualified_prefix = r_.scopes[scope].qualified_prefix + (cls.name.empty() ? "" : cls.name + "::");
      cls.head = text::trim_copy(h);
      cls.doc = strip_doc_comment(head.doc);
      cls.begin = head.start;
      cls.parent = scope;
      int idx = static_cast<int>(r_.scopes.size());
      r_.scopes.push_back(cls);
      r_.scopes[scope].members.push_back(text::trim_copy(h) + " { ... };");
      std::size_t pos = brace + 1;
      parse_body(idx, pos, true, kw == "class" ? Visibility::NonPublic : Visibility::Public);
      // Declarators after the closing brace, up to ';'.
      auto semi = src_.find(';', pos);
      pos = semi == std::string_view::npos ? n : semi + 1;
      r_.scopes[idx].end = pos;
      head.reset();
      return pos;
    }
    if (kw == "enum") return skip_block();

    auto params = find_params(h);
    if (params.open == std::string_view::npos || params.close == std::string_view::npos) {
      return skip_block();
    }
    auto pre = h.substr(0, params.name_begin);
    if (has_top_level_char(pre, '=')) return skip_block();
    auto tail = h.substr(params.close + 1);
    bool ctor_init = starts_ctor_init(tail);
    if (ctor_init) {
      auto t = text::trim(h);
      if (!t.empty() && (ident_char(t.back()) || t.back() == '>')) return skip_block();
    } else if (has_top_level_char(tail, '=')) {
      return skip_block();
    }

    auto body_end = match_brace(src_, brace);
    if (body_end == std::string_view::npos) {
      r_.warnings.push_back("unbalanced function body at offset " + std::to_string(brace));
      head.reset();
      return n;
    }
    FunctionDef fn;
    fn.name = text::normalize_whitespace(h.substr(params.name_begin, params.open - params.name_begin));
    fn.qualified_name = r_.scopes[scope].qualified_prefix + fn.name;
    fn.signature = text::trim_copy(h);
    fn.param_text = std::string(h.substr(params.open + 1, params.close - params.open - 1));
    fn.body = std::string(src_.substr(brace, body_end - brace));
    fn.doc = strip_doc_comment(head.doc);
    fn.head_begin = head.start;
    fn.body_begin = brace;
    fn.body_end = body_end;
    fn.scope = scope;
    classify(fn, scope, access, pre, ctor_init);
    r_.functions.push_back(fn);
    r_.scopes[scope].members.push_back(fn.signature + ";");
    head.reset();
    return body_end;
  }

  void on_declaration(int scope, Head& head, std::size_t semi) {
    if (!head.active()) return;
    auto h = text::trim(src_.substr(head.start, semi - head.start));
    if (h.empty()) return;
    static const std::regex pure_re(R"(=\s*0\s*$)");
    std::string hstr(h);
    auto params = find_params(h);
    if (params.open != std::string_view::npos && params.close != std::string_view::npos &&
        std::regex_search(hstr, pure_re)) {
      FunctionDef fn;
      fn.name = text::normalize_whitespace(h.substr(params.name_begin, params.open - params.name_begin));
      fn.qualified_name = r_.scopes[scope].qualified_prefix + fn.name;
      auto eq = hstr.rfind('=');
      fn.signature = text::trim_copy(std::string_view(hstr).substr(0, eq));
      fn.param_text = std::string(h.substr(params.open + 1, params.close - params.open - 1));
      fn.doc = strip_doc_comment(head.doc);
      fn.head_begin = head.start;
      fn.body_begin = fn.body_end = semi;
      fn.scope = scope;
      fn.kind = FunctionKind::Abstract;
      fn.visibility = current_access_is_public(scope) ? Visibility::Public : Visibility::NonPublic;
      r_.functions.push_back(fn);
    }
    r_.scopes[scope].members.push_back(hstr + ";");
  }

  bool current_access_is_public(int scope) const {
    // Access labels are recorded as members in order; the last one wins.
    const auto& s = r_.scopes[scope];
    for (auto it = s.members.rbegin(); it != s.members.rend(); ++it) {
      if (*it == "public:") return true;
      if (*it == "private:" || *it == "protected:") return false;
    }
    return !text::starts_with(strip_prefix_clauses(s.head), "class");
  }

  void classify(FunctionDef& fn, int scope, Visibility access, std::string_view pre, bool ctor_init) {
    const Scope& s = r_.scopes[scope];
    bool hidden = false;
    for (int k = scope; k >= 0; k = r_.scopes[k].parent) {
      if (r_.scopes[k].kind == ScopeKind::Namespace && r_.scopes[k].anonymous) hidden = true;
    }
    if (s.kind == ScopeKind::Class) {
      hidden = hidden || access != Visibility::Public;
    } else if (has_static_specifier(pre) && fn.name.find("::") == std::string::npos) {
      hidden = true;
    }
    fn.visibility = hidden ? Visibility::NonPublic : Visibility::Public;

    std::string unqualified = fn.name;
    std::string owner = s.kind == ScopeKind::Class ? s.name : "";
    if (auto pos = fn.name.rfind("::"); pos != std::string::npos) {
      unqualified = fn.name.substr(pos + 2);
      auto outer = fn.name.substr(0, pos);
      auto p2 = outer.rfind("::");
      owner = p2 == std::string::npos ? outer : outer.substr(p2 + 2);
    }
    if (ctor_init || (!owner.empty() && (unqualified == owner || unqualified == "~" + owner))) {
      fn.kind = FunctionKind::Constructor;
    }
  }

  std::string_view src_;
  ScanResult r_;
};

std::vector<std::string> tokenize(std::string_view s) {
  std::vector<std::string> out;
  static const char* kMulti[] = {"::", "->", "&&", "||", "==", "!=", "<=", ">=", "...", "<<", ">>"};
  for (std::size_t i = 0; i < s.size();) {
    if (space(s[i])) {
      ++i;
      continue;
    }
    if (ident_char(s[i])) {
      std::size_t j = i;
      while (j < s.size() && ident_char(s[j])) ++j;
      out.emplace_back(s.substr(i, j - i));
      i = j;
      continue;
    }
    if (s[i] == '"' || s[i] == '\'') {
      auto e = skip_literal(s, i);
      out.emplace_back(s.substr(i, e - i));
      i = e;
      continue;
    }
    bool matched = false;
    for (const char* m : kMulti) {
      std::string_view mv(m);
      if (s.substr(i, mv.size()) == mv) {
        out.emplace_back(mv);
        i += mv.size();
        matched = true;
        break;
      }
    }
    if (!matched) out.emplace_back(1, s[i++]);
  }
  return out;
}

}  // namespace

std::size_t match_brace(std::string_view s, std::size_t open) {
  int depth = 0;
  for (std::size_t i = open; i < s.size(); ++i) {
    auto c = skip_comment(s, i);
    if (c != i) {
      i = c - 1;
      continue;
    }
    if (s[i] == '"' || is_char_literal_start(s, i) || is_raw_string_start(s, i)) {
      i = skip_literal(s, i) - 1;
      continue;
    }
    if (s[i] == '{') ++depth;
    if (s[i] == '}' && --depth == 0) return i + 1;
  }
  return std::string_view::npos;
}

ScanResult scan(std::string_view source) { return Scanner(source).run(); }

std::string strip_doc_comment(std::string_view raw) {
  std::vector<std::string> lines;
  for (auto line : text::split_lines(raw)) {
    std::string_view l = text::trim(line);
    bool block_start = false;
    if (text::starts_with(l, "///") || text::starts_with(l, "//!")) {
      l.remove_prefix(3);
    } else if (text::starts_with(l, "/**") || text::starts_with(l, "/*!")) {
      l.remove_prefix(3);
      block_start = true;
    } else if (text::starts_with(l, "//")) {
      l.remove_prefix(2);
    }
    if (text::ends_with(l, "*/")) l.remove_suffix(2);
    if (!block_start && text::starts_with(l, "*") && !text::starts_with(l, "*/")) l.remove_prefix(1);
    if (!l.empty() && l.front() == ' ') l.remove_prefix(1);
    lines.emplace_back(text::trim(l));
  }
  while (!lines.empty() && lines.front().empty()) lines.erase(lines.begin());
  while (!lines.empty() && lines.back().empty()) lines.pop_back();
  return text::join(lines, "\n");
}

std::string render_scope(const ScanResult& r, int scope) {
  const Scope& s = r.scopes[static_cast<std::size_t>(scope)];
  std::string out;
  std::string indent;
  if (s.kind != ScopeKind::File) {
    out += s.head + " {\n";
    indent = "  ";
  }
  for (const auto& m : s.members) out += indent + m + "\n";
  if (s.kind == ScopeKind::Class) out += "};\n";
  if (s.kind == ScopeKind::Namespace) out += "}\n";
  return out;
}

std::string canonical_signature(std::string_view head) {
  auto toks = tokenize(strip_comments(head));
  static const std::set<std::string> dropped = {"virtual", "static", "inline", "explicit",
                                                "friend",  "override", "final", "extern"};
  std::vector<std::string> kept;
  for (auto& t : toks) {
    if (!dropped.count(t)) kept.push_back(t);
  }
  // Locate the parameter list: first '(' whose preceding token is a name that
  // is not decltype-like.
  std::size_t open = kept.size();
  for (std::size_t i = 1; i < kept.size(); ++i) {
    if (kept[i] == "(" && (ident_char(kept[i - 1][0]) || kept[i - 1] == ">") &&
        !paren_keywords().count(kept[i - 1])) {
      open = i;
      break;
    }
  }
  std::vector<std::string> out;
  if (open == kept.size()) return text::join(kept, " ");
  // Drop `Qualifier ::` pairs directly before the name.
  std::size_t name = open - 1;
  std::size_t start = name;
  while (start >= 2 && kept[start - 1] == "::" && ident_char(kept[start - 2][0])) start -= 2;
  out.assign(kept.begin(), kept.begin() + static_cast<long>(start));
  out.push_back(kept[name]);
  // Parameters without default arguments.
  int depth = 0;
  bool skipping = false;
  std::size_t i = open;
  for (; i < kept.size(); ++i) {
    const auto& t = kept[i];
    if (t == "(" || t == "[" || t == "{" || t == "<") ++depth;
    if (t == ")" || t == "]" || t == "}" || t == ">") --depth;
    if (depth == 1 && t == "=") skipping = true;
    if (depth == 1 && t == ",") skipping = false;
    if (depth == 0) {
      out.push_back(t);
      ++i;
      break;
    }
    if (!skipping) out.push_back(t);
  }
  for (; i < kept.size(); ++i) out.push_back(kept[i]);
  return text::join(out, " ");
}

}  // namespace docverify::cpp
