#include "docverify/adapters/fixture_lang.hpp"

#include <algorithm>
#include <cctype>
#include <set>

#include "docverify/core/text.hpp"

namespace docverify::fixture {

namespace {

enum class Tok { Int, Ident, Punct, End };

struct Token {
  Tok kind = Tok::End;
  std::string text;
  std::int64_t value = 0;
  int line = 0;
};

struct SyntaxError : std::runtime_error {
  int line;
  SyntaxError(int l, const std::string& m) : std::runtime_error(m), line(l) {}
};

std::vector<Token> lex(std::string_view src, int first_line) {
  std::vector<Token> out;
  int line = first_line;
  std::size_t i = 0;
  while (i < src.size()) {
    char c = src[i];
    if (c == '\n') {
      ++line;
      ++i;
      continue;
    }
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
      continue;
    }
    if (c == '#') {  // trailing comment
      while (i < src.size() && src[i] != '\n') ++i;
      continue;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      std::size_t j = i;
      while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) ++j;
      Token t{Tok::Int, std::string(src.substr(i, j - i)), 0, line};
      try {
        t.value = std::stoll(t.text);
      } catch (const std::out_of_range&) {
        throw SyntaxError(line, "integer literal out of range: " + t.text);
      }
      out.push_back(t);
      i = j;
      continue;
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t j = i;
      while (j < src.size() &&
             (std::isalnum(static_cast<unsigned char>(src[j])) || src[j] == '_')) {
        ++j;
      }
      out.push_back({Tok::Ident, std::string(src.substr(i, j - i)), 0, line});
      i = j;
      continue;
    }
    static const char* kTwo[] = {"==", "!=", "<=", ">=", "&&", "||"};
    bool matched = false;
    for (const char* op : kTwo) {
      if (src.substr(i, 2) == op) {
        out.push_back({Tok::Punct, op, 0, line});
        i += 2;
        matched = true;
        break;
      }
    }
    if (matched) continue;
    if (std::string_view("()+-*/%<>!,={}").find(c) != std::string_view::npos) {
      out.push_back({Tok::Punct, std::string(1, c), 0, line});
      ++i;
      continue;
    }
    throw SyntaxError(line, std::string("unexpected character '") + c + "'");
  }
  out.push_back({Tok::End, "", 0, line});
  return out;
}

const std::set<std::string>& keywords() {
  static const std::set<std::string> k = {"fn",    "if",     "then",        "else",
                                          "true",  "false",  "let",         "assert",
                                          "test",  "private", "ctor",       "abstract",
                                          "import", "assert_error"};
  return k;
}

class ExprParser {
 public:
  explicit ExprParser(std::vector<Token> toks) : toks_(std::move(toks)) {}

  ExprPtr parse_all() {
    auto e = parse_expr();
    if (peek().kind != Tok::End) throw SyntaxError(peek().line, "unexpected '" + peek().text + "'");
    return e;
  }

  const Token& peek() const { return toks_[pos_]; }
  Token next() { return toks_[pos_++]; }
  bool accept(std::string_view p) {
    if ((peek().kind == Tok::Punct || peek().kind == Tok::Ident) && peek().text == p) {
      ++pos_;
      return true;
    }
    return false;
  }
  void expect(std::string_view p) {
    if (!accept(p)) {
      throw SyntaxError(peek().line, "expected '" + std::string(p) + "' but found '" +
                                         (peek().kind == Tok::End ? "end of input" : peek().text) +
                                         "'");
    }
  }
  std::string expect_ident() {
    if (peek().kind != Tok::Ident || keywords().count(peek().text)) {
      throw SyntaxError(peek().line, "expected identifier but found '" + peek().text + "'");
    }
    return next().text;
  }

  ExprPtr parse_expr() {
    if (peek().kind == Tok::Ident && peek().text == "if") {
      int line = next().line;
      auto c = parse_expr();
      expect("then");
      auto t = parse_expr();
      expect("else");
      auto f = parse_expr();
      return make(ExprKind::If, "if", {c, t, f}, line);
    }
    return parse_binary(0);
  }

 private:
  static int precedence(const std::string& op) {
    if (op == "||") return 1;
    if (op == "&&") return 2;
    if (op == "==" || op == "!=") return 3;
    if (op == "<" || op == "<=" || op == ">" || op == ">=") return 4;
    if (op == "+" || op == "-") return 5;
    if (op == "*" || op == "/" || op == "%") return 6;
    return -1;
  }

  static std::shared_ptr<Expr> make(ExprKind k, std::string name, std::vector<ExprPtr> args, int line) {
    auto e = std::make_shared<Expr>();
    e->kind = k;
    e->name = std::move(name);
    e->args = std::move(args);
    e->line = line;
    return e;
  }

  ExprPtr parse_binary(int min_prec) {
    auto lhs = parse_unary();
    for (;;) {
      const Token& t = peek();
      if (t.kind != Tok::Punct) break;
      int p = precedence(t.text);
      if (p < 0 || p <= min_prec) break;
      Token op = next();
      auto rhs = parse_binary(p);
      lhs = make(ExprKind::Binary, op.text, {lhs, rhs}, op.line);
    }
    return lhs;
  }

  ExprPtr parse_unary() {
    if (peek().kind == Tok::Punct && (peek().text == "-" || peek().text == "!")) {
      Token op = next();
      return make(ExprKind::Unary, op.text, {parse_unary()}, op.line);
    }
    return parse_primary();
  }

  ExprPtr parse_primary() {
    Token t = peek();
    if (t.kind == Tok::Int) {
      next();
      auto e = make(ExprKind::Int, "", {}, t.line);
      e->int_value = t.value;
      return e;
    }
    if (t.kind == Tok::Ident && (t.text == "true" || t.text == "false")) {
      next();
      auto e = make(ExprKind::Bool, "", {}, t.line);
      e->bool_value = t.text == "true";
      return e;
    }
    if (t.kind == Tok::Ident && t.text == "if") return parse_expr();
    if (t.kind == Tok::Ident) {
      auto name = expect_ident();
      if (accept("(")) {
        std::vector<ExprPtr> args;
        if (!accept(")")) {
          do {
            args.push_back(parse_expr());
          } while (accept(","));
          expect(")");
        }
        return make(ExprKind::Call, name, std::move(args), t.line);
      }
      return make(ExprKind::Var, name, {}, t.line);
    }
    if (accept("(")) {
      auto e = parse_expr();
      expect(")");
      return e;
    }
    throw SyntaxError(t.line, t.kind == Tok::End ? "unexpected end of expression"
                                                 : "unexpected '" + t.text + "'");
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
};

bool is_blank(std::string_view s) { return text::trim(s).empty(); }

bool starts_with_ws(std::string_view s) {
  return !s.empty() && (s.front() == ' ' || s.front() == '\t');
}

bool looks_like_decl(std::string_view t) {
  std::string_view s = t;
  for (std::string_view mod : {"private ", "ctor ", "abstract "}) {
    while (text::starts_with(s, mod)) s = text::trim(s.substr(mod.size()));
  }
  return text::starts_with(s, "fn ") || text::starts_with(s, "fn\t");
}

// Parses one declaration whose text begins at `first_line`.
FnDecl parse_decl(const std::string& decl_text, int first_line) {
  FnDecl d;
  d.line = first_line;
  auto close = decl_text.find(')');
  if (close == std::string::npos) throw SyntaxError(first_line, "missing ')' in declaration");
  d.signature = text::trim_copy(std::string_view(decl_text).substr(0, close + 1));
  std::string rest = decl_text.substr(close + 1);
  auto rest_trim = text::trim(rest);

  ExprParser head(lex(d.signature, first_line));
  for (;;) {
    if (head.accept("private")) {
      d.is_private = true;
    } else if (head.accept("ctor")) {
      d.is_ctor = true;
    } else if (head.accept("abstract")) {
      d.is_abstract = true;
    } else {
      break;
    }
  }
  head.expect("fn");
  d.name = head.expect_ident();
  head.expect("(");
  auto open = d.signature.find('(');
  d.param_text = d.signature.substr(open + 1, d.signature.size() - open - 2);
  if (!head.accept(")")) {
    do {
      d.params.push_back(head.expect_ident());
    } while (head.accept(","));
    head.expect(")");
  }
  if (head.peek().kind != Tok::End) throw SyntaxError(first_line, "unexpected text in declaration head");
  std::set<std::string> uniq(d.params.begin(), d.params.end());
  if (uniq.size() != d.params.size()) throw SyntaxError(first_line, "duplicate parameter name");

  if (rest_trim.empty()) {
    if (!d.is_abstract) throw SyntaxError(first_line, "function '" + d.name + "' has no body");
    return d;
  }
  if (d.is_abstract) throw SyntaxError(first_line, "abstract function '" + d.name + "' has a body");
  if (rest_trim.front() != '=') throw SyntaxError(first_line, "expected '=' after declaration head");
  d.body_text = std::string(rest_trim);
  // Count newlines before the '=' so expression line numbers stay accurate.
  auto eq = rest.find('=');
  int line_of_eq = first_line + static_cast<int>(std::count(rest.begin(), rest.begin() + eq, '\n'));
  ExprParser body(lex(std::string_view(rest).substr(eq + 1), line_of_eq));
  d.body = body.parse_all();
  return d;
}

struct LineCursor {
  const std::vector<std::string>& lines;
  std::size_t i = 0;

  // Joins the declaration starting at line i with its indented continuations.
  std::string take_decl() {
    std::string text = std::string(text::trim(lines[i]));
    ++i;
    while (i < lines.size() && starts_with_ws(lines[i]) && !is_blank(lines[i]) &&
           !text::starts_with(text::trim(lines[i]), "#")) {
      text += "\n" + lines[i];
      ++i;
    }
    // Keep the verbatim right-trimmed text.
    while (!text.empty() && std::isspace(static_cast<unsigned char>(text.back()))) text.pop_back();
    return text;
  }
};

}  // namespace

ExprPtr parse_expression(const std::string& source) {
  try {
    ExprParser p(lex(source, 1));
    return p.parse_all();
  } catch (const SyntaxError& e) {
    throw std::runtime_error(e.what());
  }
}

Module parse_module(const std::string& file, const std::string& source) {
  Module m;
  m.file = file;
  auto lines = text::split_lines(source);
  LineCursor cur{lines};
  std::vector<std::string> pending_doc;
  bool gap = false;
  while (cur.i < lines.size()) {
    auto t = text::trim(lines[cur.i]);
    int line_no = static_cast<int>(cur.i) + 1;
    if (t.empty()) {
      gap = true;
      ++cur.i;
      continue;
    }
    if (text::starts_with(t, "#doc")) {
      auto body = t.substr(4);
      if (!body.empty() && body.front() == ' ') body.remove_prefix(1);
      if (gap) pending_doc.clear();
      pending_doc.emplace_back(text::trim(body));
      gap = false;
      ++cur.i;
      continue;
    }
    if (text::starts_with(t, "#")) {
      gap = true;
      ++cur.i;
      continue;
    }
    gap = false;
    if (text::starts_with(t, "import ")) {
      m.imports.push_back(text::trim_copy(t.substr(7)));
      pending_doc.clear();
      ++cur.i;
      continue;
    }
    if (looks_like_decl(t)) {
      auto decl_text = cur.take_decl();
      try {
        auto d = parse_decl(decl_text, line_no);
        d.doc = text::trim_copy(text::join(pending_doc, "\n"));
        m.fns.push_back(std::move(d));
      } catch (const SyntaxError& e) {
        m.errors.push_back({e.line, e.what()});
      }
      pending_doc.clear();
      continue;
    }
    m.errors.push_back({line_no, "unexpected line: " + std::string(t)});
    pending_doc.clear();
    ++cur.i;
  }
  return m;
}

TestFile parse_test_file(const std::string& file, const std::string& source) {
  TestFile tf;
  tf.file = file;
  auto lines = text::split_lines(source);
  LineCursor cur{lines};
  while (cur.i < lines.size()) {
    auto t = text::trim(lines[cur.i]);
    int line_no = static_cast<int>(cur.i) + 1;
    if (t.empty() || text::starts_with(t, "#")) {
      ++cur.i;
      continue;
    }
    if (looks_like_decl(t)) {
      auto decl_text = cur.take_decl();
      try {
        tf.helpers.push_back(parse_decl(decl_text, line_no));
      } catch (const SyntaxError& e) {
        tf.errors.push_back({e.line, e.what()});
      }
      continue;
    }
    if (text::starts_with(t, "test ") || text::starts_with(t, "test\t")) {
      TestBlock block;
      block.line = line_no;
      std::string head(t.substr(5));
      auto brace = head.find('{');
      if (brace == std::string::npos || !text::trim(std::string_view(head).substr(brace + 1)).empty()) {
        tf.errors.push_back({line_no, "test header must be 'test NAME {'"});
        ++cur.i;
        continue;
      }
      block.name = text::trim_copy(std::string_view(head).substr(0, brace));
      block.source = std::string(lines[cur.i]) + "\n";
      ++cur.i;
      bool closed = false;
      while (cur.i < lines.size()) {
        const auto& raw = lines[cur.i];
        auto s = text::trim(raw);
        int ln = static_cast<int>(cur.i) + 1;
        block.source += raw + "\n";
        ++cur.i;
        if (s == "}") {
          closed = true;
          break;
        }
        if (s.empty() || text::starts_with(s, "#")) continue;
        try {
          Statement st;
          st.line = ln;
          if (text::starts_with(s, "let ")) {
            ExprParser p(lex(s.substr(4), ln));
            st.kind = StmtKind::Let;
            st.name = p.expect_ident();
            p.expect("=");
            st.expr = p.parse_expr();
            if (p.peek().kind != Tok::End) throw SyntaxError(ln, "unexpected '" + p.peek().text + "'");
          } else if (text::starts_with(s, "assert_error ")) {
            st.kind = StmtKind::AssertError;
            st.expr = ExprParser(lex(s.substr(13), ln)).parse_all();
          } else if (text::starts_with(s, "assert ")) {
            st.kind = StmtKind::Assert;
            st.expr = ExprParser(lex(s.substr(7), ln)).parse_all();
          } else {
            throw SyntaxError(ln, "unknown statement: " + std::string(s));
          }
          block.statements.push_back(std::move(st));
        } catch (const SyntaxError& e) {
          tf.errors.push_back({e.line, e.what()});
        }
      }
      if (!closed) tf.errors.push_back({block.line, "test '" + block.name + "' is not closed"});
      if (block.name.empty() || keywords().count(block.name)) {
        tf.errors.push_back({block.line, "invalid test name"});
      }
      tf.tests.push_back(std::move(block));
      continue;
    }
    tf.errors.push_back({line_no, "unexpected line: " + std::string(t)});
    ++cur.i;
  }
  return tf;
}

// ---------------------------------------------------------------- checking

namespace {

struct Checker {
  std::map<std::string, const FnDecl*> fns;
  std::vector<CheckIssue> issues;

  void check(const ExprPtr& e, const std::set<std::string>& env, const std::string& file) {
    switch (e->kind) {
      case ExprKind::Int:
      case ExprKind::Bool:
        return;
      case ExprKind::Var:
        if (!env.count(e->name)) issues.push_back({file, e->line, "unbound variable '" + e->name + "'"});
        return;
      case ExprKind::Call: {
        auto it = fns.find(e->name);
        if (it == fns.end()) {
          issues.push_back({file, e->line, "call to undefined function '" + e->name + "'"});
        } else if (it->second->is_abstract) {
          issues.push_back({file, e->line, "call to abstract function '" + e->name + "'"});
        } else if (it->second->params.size() != e->args.size()) {
          issues.push_back({file, e->line,
                            "function '" + e->name + "' expects " +
                                std::to_string(it->second->params.size()) + " argument(s), got " +
                                std::to_string(e->args.size())});
        }
        for (const auto& a : e->args) check(a, env, file);
        return;
      }
      default:
        for (const auto& a : e->args) check(a, env, file);
    }
  }

  void add(const FnDecl& d, const std::string& file) {
    if (!fns.emplace(d.name, &d).second) {
      issues.push_back({file, d.line, "duplicate function '" + d.name + "'"});
    }
  }

  void check_fn(const FnDecl& d, const std::string& file) {
    if (!d.body) return;
    std::set<std::string> env(d.params.begin(), d.params.end());
    check(d.body, env, file);
  }
};

}  // namespace

std::vector<CheckIssue> check_program(const std::vector<Module>& modules, const TestFile* tests) {
  Checker c;
  for (const auto& m : modules) {
    for (const auto& e : m.errors) c.issues.push_back({m.file, e.line, e.message});
    for (const auto& d : m.fns) c.add(d, m.file);
  }
  if (tests) {
    for (const auto& e : tests->errors) c.issues.push_back({tests->file, e.line, e.message});
    for (const auto& d : tests->helpers) c.add(d, tests->file);
  }
  for (const auto& m : modules) {
    for (const auto& d : m.fns) c.check_fn(d, m.file);
  }
  if (tests) {
    for (const auto& d : tests->helpers) c.check_fn(d, tests->file);
    std::set<std::string> names;
    for (const auto& t : tests->tests) {
      if (!names.insert(t.name).second) {
        c.issues.push_back({tests->file, t.line, "duplicate test '" + t.name + "'"});
      }
      std::set<std::string> env;
      for (const auto& st : t.statements) {
        c.check(st.expr, env, tests->file);
        if (st.kind == StmtKind::Let) env.insert(st.name);
      }
    }
  }
  return c.issues;
}

// ---------------------------------------------------------------- evaluation

std::string render_value(const Value& v) {
  if (std::holds_alternative<bool>(v)) return std::get<bool>(v) ? "true" : "false";
  return std::to_string(std::get<std::int64_t>(v));
}

struct Interpreter::Frame {
  std::optional<std::chrono::steady_clock::time_point> deadline;
  std::uint64_t steps = 0;

  void tick() {
    if (deadline && (++steps & 1023u) == 0 && std::chrono::steady_clock::now() > *deadline) {
      throw DeadlineExceeded();
    }
  }
};

namespace {

constexpr int kMaxDepth = 2000;

std::int64_t as_int(const Value& v, int line) {
  if (!std::holds_alternative<std::int64_t>(v)) {
    throw RuntimeError("line " + std::to_string(line) + ": expected integer, got " + render_value(v));
  }
  return std::get<std::int64_t>(v);
}

bool as_bool(const Value& v, int line) {
  if (!std::holds_alternative<bool>(v)) {
    throw RuntimeError("line " + std::to_string(line) + ": expected boolean, got " + render_value(v));
  }
  return std::get<bool>(v);
}

Value arith(const std::string& op, std::int64_t a, std::int64_t b, int line) {
  std::int64_t r = 0;
  auto overflow = [&] { return RuntimeError("line " + std::to_string(line) + ": integer overflow"); };
  if (op == "+") {
    if (__builtin_add_overflow(a, b, &r)) throw overflow();
    return r;
  }
  if (op == "-") {
    if (__builtin_sub_overflow(a, b, &r)) throw overflow();
    return r;
  }
  if (op == "*") {
    if (__builtin_mul_overflow(a, b, &r)) throw overflow();
    return r;
  }
  if (op == "/" || op == "%") {
    if (b == 0) throw RuntimeError("line " + std::to_string(line) + ": division by zero");
    if (a == INT64_MIN && b == -1) throw overflow();
    return op == "/" ? a / b : a % b;
  }
  if (op == "<") return a < b;
  if (op == "<=") return a <= b;
  if (op == ">") return a > b;
  if (op == ">=") return a >= b;
  throw RuntimeError("unknown operator " + op);
}

}  // namespace

Interpreter::Interpreter(const std::vector<Module>& modules, const TestFile* tests) {
  for (const auto& m : modules) {
    for (const auto& d : m.fns) fns_.emplace(d.name, std::make_shared<const FnDecl>(d));
  }
  if (tests) {
    for (const auto& d : tests->helpers) fns_.emplace(d.name, std::make_shared<const FnDecl>(d));
  }
}

Value Interpreter::eval_impl(ExprPtr e, std::map<std::string, Value> env, Frame& frame,
                             int depth) const {
  if (depth > kMaxDepth) throw RuntimeError("stack overflow");
  for (;;) {
    frame.tick();
    switch (e->kind) {
      case ExprKind::Int:
        return e->int_value;
      case ExprKind::Bool:
        return e->bool_value;
      case ExprKind::Var: {
        auto it = env.find(e->name);
        if (it == env.end()) throw RuntimeError("unbound variable " + e->name);
        return it->second;
      }
      case ExprKind::Unary: {
        Value v = eval_impl(e->args[0], env, frame, depth + 1);
        if (e->name == "!") return !as_bool(v, e->line);
        return arith("-", 0, as_int(v, e->line), e->line);
      }
      case ExprKind::If: {
        bool c = as_bool(eval_impl(e->args[0], env, frame, depth + 1), e->line);
        e = c ? e->args[1] : e->args[2];
        continue;
      }
      case ExprKind::Binary: {
        const auto& op = e->name;
        Value lhs = eval_impl(e->args[0], env, frame, depth + 1);
        if (op == "&&" || op == "||") {
          bool l = as_bool(lhs, e->line);
          if (op == "&&" && !l) return false;
          if (op == "||" && l) return true;
          Value r = eval_impl(e->args[1], env, frame, depth + 1);
          return as_bool(r, e->line);
        }
        Value rhs = eval_impl(e->args[1], env, frame, depth + 1);
        if (op == "==") return lhs == rhs;
        if (op == "!=") return lhs != rhs;
        return arith(op, as_int(lhs, e->line), as_int(rhs, e->line), e->line);
      }
      case ExprKind::Call: {
        auto it = fns_.find(e->name);
        if (it == fns_.end() || !it->second->body) {
          throw RuntimeError("line " + std::to_string(e->line) + ": cannot call " + e->name);
        }
        const FnDecl& fn = *it->second;
        if (fn.params.size() != e->args.size()) throw RuntimeError("arity mismatch calling " + fn.name);
        std::map<std::string, Value> callee_env;
        for (std::size_t i = 0; i < fn.params.size(); ++i) {
          callee_env[fn.params[i]] = eval_impl(e->args[i], env, frame, depth + 1);
        }
        // Tail position: iterate instead of recursing.
        env = std::move(callee_env);
        e = fn.body;
        continue;
      }
    }
  }
}

Value Interpreter::eval(const ExprPtr& expr, const std::map<std::string, Value>& env,
                        std::optional<std::chrono::steady_clock::time_point> deadline) const {
  Frame frame{deadline};
  return eval_impl(expr, env, frame, 0);
}

Value Interpreter::call(const std::string& fn, const std::vector<Value>& args,
                        std::optional<std::chrono::steady_clock::time_point> deadline) const {
  auto it = fns_.find(fn);
  if (it == fns_.end() || !it->second->body) throw RuntimeError("cannot call " + fn);
  if (it->second->params.size() != args.size()) throw RuntimeError("arity mismatch calling " + fn);
  std::map<std::string, Value> env;
  for (std::size_t i = 0; i < args.size(); ++i) env[it->second->params[i]] = args[i];
  return eval(it->second->body, env, deadline);
}

Interpreter::TestResult Interpreter::run_test(const TestBlock& test,
                                              std::chrono::milliseconds timeout) const {
  TestResult r;
  Frame frame{std::chrono::steady_clock::now() + timeout};
  std::map<std::string, Value> env;
  try {
    for (const auto& st : test.statements) {
      switch (st.kind) {
        case StmtKind::Let:
          env[st.name] = eval_impl(st.expr, env, frame, 0);
          break;
        case StmtKind::Assert: {
          Value v = eval_impl(st.expr, env, frame, 0);
          if (v != Value{true}) {
            r.message = "assertion failed at line " + std::to_string(st.line) + " (value " +
                        render_value(v) + ")";
            return r;
          }
          break;
        }
        case StmtKind::AssertError: {
          bool raised = false;
          try {
            eval_impl(st.expr, env, frame, 0);
          } catch (const RuntimeError&) {
            raised = true;
          }
          if (!raised) {
            r.message = "expected an error at line " + std::to_string(st.line);
            return r;
          }
          break;
        }
      }
    }
  } catch (const DeadlineExceeded&) {
    r.timed_out = true;
    r.message = "timed out";
    return r;
  } catch (const RuntimeError& e) {
    r.message = e.what();
    return r;
  }
  r.passed = true;
  return r;
}

}  // namespace docverify::fixture
