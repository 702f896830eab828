#pragma once

// A tiny expression language used for hermetic end-to-end runs.
//
//   #doc returns x plus one
//   fn inc(x) = x + 1
//
// Modules are `.fx` files. A declaration is
//   [private] [ctor|abstract] fn NAME(P, ...) [= EXPR]
// where EXPR may continue on following indented lines. Values are 64-bit
// integers and booleans. Test files hold blocks of the form
//   test NAME {
//     let y = inc(1)
//     assert y == 2
//     assert_error 1 / 0
//   }

#include <chrono>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace docverify::fixture {

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

enum class ExprKind { Int, Bool, Var, Call, Unary, Binary, If };

struct Expr {
  ExprKind kind = ExprKind::Int;
  std::int64_t int_value = 0;
  bool bool_value = false;
  std::string name;  // Var / Call target / operator
  std::vector<ExprPtr> args;  // Call args, Unary operand, Binary lhs/rhs, If cond/then/else
  int line = 0;
};

struct FnDecl {
  std::string name;
  std::vector<std::string> params;
  bool is_private = false;
  bool is_ctor = false;
  bool is_abstract = false;
  ExprPtr body;  // null when abstract
  std::string doc;
  std::string signature;  // verbatim head, e.g. "private fn f(a, b)"
  std::string body_text;  // verbatim "= expr" text, empty when abstract
  std::string param_text;
  int line = 0;
};

struct ParseIssue {
  int line = 0;
  std::string message;
};

struct Module {
  std::string file;
  std::vector<std::string> imports;
  std::vector<FnDecl> fns;
  std::vector<ParseIssue> errors;
};

enum class StmtKind { Let, Assert, AssertError };

struct Statement {
  StmtKind kind = StmtKind::Assert;
  std::string name;
  ExprPtr expr;
  int line = 0;
};

struct TestBlock {
  std::string name;
  std::vector<Statement> statements;
  int line = 0;
  std::string source;
};

struct TestFile {
  std::string file;
  std::vector<FnDecl> helpers;
  std::vector<TestBlock> tests;
  std::vector<ParseIssue> errors;
};

Module parse_module(const std::string& file, const std::string& source);
TestFile parse_test_file(const std::string& file, const std::string& source);
ExprPtr parse_expression(const std::string& source);  // throws std::runtime_error

struct CheckIssue {
  std::string file;
  int line = 0;
  std::string message;
};

// Static checks: unique function names, calls resolve with matching arity,
// no calls to abstract functions, every variable bound.
std::vector<CheckIssue> check_program(const std::vector<Module>& modules,
                                      const TestFile* tests = nullptr);

using Value = std::variant<std::int64_t, bool>;
std::string render_value(const Value& v);

struct RuntimeError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct DeadlineExceeded : std::runtime_error {
  DeadlineExceeded() : std::runtime_error("deadline exceeded") {}
};

class Interpreter {
 public:
  Interpreter(const std::vector<Module>& modules, const TestFile* tests = nullptr);

  Value call(const std::string& fn, const std::vector<Value>& args,
             std::optional<std::chrono::steady_clock::time_point> deadline = std::nullopt) const;
  Value eval(const ExprPtr& expr, const std::map<std::string, Value>& env,
             std::optional<std::chrono::steady_clock::time_point> deadline = std::nullopt) const;

  struct TestResult {
    bool passed = false;
    bool timed_out = false;
    std::string message;
  };
  TestResult run_test(const TestBlock& test, std::chrono::milliseconds timeout) const;

 private:
  struct Frame;
  Value eval_impl(ExprPtr expr, std::map<std::string, Value> env, Frame& frame, int depth) const;

  // Owned copies; expression trees are shared, so this is cheap.
  std::map<std::string, std::shared_ptr<const FnDecl>> fns_;
};

}  // namespace docverify::fixture
