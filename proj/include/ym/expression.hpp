#pragma once

#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace ym {

// Names visible to an expression, each bound to a slot of the argument
// vector passed to Expression::evaluate.
class Symbols {
 public:
  Symbols() = default;

  // x1..xd, plus the alias x when d == 1.
  static Symbols domain(int d);
  // `stem`1..`stem`l, plus the bare stem when l == 1 (e.g. y, s).
  static Symbols indexed(std::string_view stem, int l);
  // Domain variables followed by the codomain variable(s) s / s1..sl.
  static Symbols domain_and_codomain(int d, int l);

  // Returns -1 when the name is not bound.
  int slot(std::string_view name) const;
  // Canonical printed name of a slot.
  const std::string& name(int slot) const { return canonical_[slot]; }
  int size() const { return static_cast<int>(canonical_.size()); }

 private:
  void bind(std::string name, int slot);

  std::vector<std::string> canonical_;
  std::vector<std::pair<std::string, int>> aliases_;
};

enum class Func { sin, cos, exp, log, sqrt, abs, floor };

// Immutable arithmetic expression tree. Copies share the tree.
class Expression {
 public:
  struct Node;

  Expression() = default;

  static Expression number(double v);
  static Expression named_constant(std::string_view name);  // pi, e
  static Expression variable(int slot);
  static Expression negate(Expression a);
  static Expression binary(char op, Expression a, Expression b);
  static Expression call(Func f, Expression a);

  // Throws EvaluationError for log/sqrt outside their domain, division by
  // zero, and any other non-finite result.
  double evaluate(std::span<const double> args) const;
  double evaluate(double arg) const { return evaluate(std::span(&arg, 1)); }

  // True when no variable occurs in the tree.
  bool is_constant() const;
  // Highest slot referenced, or -1.
  int max_slot() const;

  // Minimal-parenthesis rendering that parses back to the same tree.
  std::string to_string(const Symbols& symbols) const;

  bool empty() const { return root_ == nullptr; }
  const Node* root() const { return root_.get(); }

  friend bool operator==(const Expression& a, const Expression& b);

 private:
  explicit Expression(std::shared_ptr<const Node> n) : root_(std::move(n)) {}
  std::shared_ptr<const Node> root_;
};

struct Expression::Node {
  enum class Kind { number, constant, variable, negate, binary, call };
  Kind kind;
  double value = 0.0;  // number / constant
  char constant = 0;   // 'p' for pi, 'e' for e
  int slot = -1;
  char op = 0;  // + - * / ^
  Func func = Func::sin;
  std::shared_ptr<const Node> lhs;
  std::shared_ptr<const Node> rhs;
};

// Grammar, loosest first:
//   sum   := prod (('+'|'-') prod)*
//   prod  := unary (('*'|'/') unary)*
//   unary := '-' unary | power
//   power := atom ('^' unary)?          (right-associative)
//   atom  := number | pi | e | variable | func '(' sum ')' | '(' sum ')'
// There is no implicit multiplication.
Expression parse_expression(std::string_view text, const Symbols& symbols);
Expression parse_expression(std::string_view text, int d);

const char* func_name(Func f);

}  // namespace ym
