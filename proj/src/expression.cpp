#include "ym/expression.hpp"

#include <algorithm>
#include <charconv>
#include <cctype>
#include <cmath>
#include <numbers>

#include "ym/error.hpp"

namespace ym {

// ---------------------------------------------------------------------------
// Symbols

void Symbols::bind(std::string name, int slot) {
  aliases_.emplace_back(std::move(name), slot);
}

Symbols Symbols::domain(int d) { return indexed("x", d); }

Symbols Symbols::indexed(std::string_view stem, int l) {
  Symbols s;
  for (int i = 0; i < l; ++i) {
    std::string name = std::string(stem) + std::to_string(i + 1);
    s.canonical_.push_back(l == 1 ? std::string(stem) : name);
    s.bind(name, i);
  }
  if (l == 1) s.bind(std::string(stem), 0);
  return s;
}

Symbols Symbols::domain_and_codomain(int d, int l) {
  Symbols s = domain(d);
  Symbols c = indexed("s", l);
  for (const auto& [name, slot] : c.aliases_) s.bind(name, slot + d);
  for (const auto& name : c.canonical_) s.canonical_.push_back(name);
  return s;
}

int Symbols::slot(std::string_view name) const {
  for (const auto& [alias, slot] : aliases_) {
    if (alias == name) return slot;
  }
  return -1;
}

// ---------------------------------------------------------------------------
// Construction

namespace {

using NodePtr = std::shared_ptr<const Expression::Node>;
using Kind = Expression::Node::Kind;

constexpr int kSumPrec = 1;
constexpr int kProdPrec = 2;
constexpr int kNegPrec = 3;
constexpr int kPowPrec = 4;
constexpr int kAtomPrec = 5;

int precedence(const Expression::Node& n) {
  switch (n.kind) {
    case Kind::binary:
      if (n.op == '+' || n.op == '-') return kSumPrec;
      if (n.op == '*' || n.op == '/') return kProdPrec;
      return kPowPrec;
    case Kind::negate:
      return kNegPrec;
    default:
      return kAtomPrec;
  }
}

}  // namespace

Expression Expression::number(double v) {
  if (!std::isfinite(v)) throw InputError("non-finite literal");
  if (std::signbit(v)) return negate(number(-v));
  auto n = std::make_shared<Node>();
  n->kind = Node::Kind::number;
  n->value = v;
  return Expression(std::move(n));
}

Expression Expression::named_constant(std::string_view name) {
  auto n = std::make_shared<Node>();
  n->kind = Node::Kind::constant;
  if (name == "pi") {
    n->constant = 'p';
    n->value = std::numbers::pi;
  } else if (name == "e") {
    n->constant = 'e';
    n->value = std::numbers::e;
  } else {
    throw InputError("unknown constant '" + std::string(name) + "'");
  }
  return Expression(std::move(n));
}

Expression Expression::variable(int slot) {
  auto n = std::make_shared<Node>();
  n->kind = Node::Kind::variable;
  n->slot = slot;
  return Expression(std::move(n));
}

Expression Expression::negate(Expression a) {
  auto n = std::make_shared<Node>();
  n->kind = Node::Kind::negate;
  n->lhs = std::move(a.root_);
  return Expression(std::move(n));
}

Expression Expression::binary(char op, Expression a, Expression b) {
  auto n = std::make_shared<Node>();
  n->kind = Node::Kind::binary;
  n->op = op;
  n->lhs = std::move(a.root_);
  n->rhs = std::move(b.root_);
  return Expression(std::move(n));
}

Expression Expression::call(Func f, Expression a) {
  auto n = std::make_shared<Node>();
  n->kind = Node::Kind::call;
  n->func = f;
  n->lhs = std::move(a.root_);
  return Expression(std::move(n));
}

const char* func_name(Func f) {
  switch (f) {
    case Func::sin: return "sin";
    case Func::cos: return "cos";
    case Func::exp: return "exp";
    case Func::log: return "log";
    case Func::sqrt: return "sqrt";
    case Func::abs: return "abs";
    case Func::floor: return "floor";
  }
  return "?";
}

// ---------------------------------------------------------------------------
// Evaluation

namespace {

double checked(double v, const char* what) {
  if (!std::isfinite(v)) {
    throw EvaluationError(std::string("non-finite result in ") + what);
  }
  return v;
}

double eval_node(const Expression::Node& n, std::span<const double> args) {
  switch (n.kind) {
    case Kind::number:
    case Kind::constant:
      return n.value;
    case Kind::variable:
      if (n.slot >= static_cast<int>(args.size())) {
        throw EvaluationError("missing argument for variable slot " +
                              std::to_string(n.slot));
      }
      return args[n.slot];
    case Kind::negate:
      return -eval_node(*n.lhs, args);
    case Kind::binary: {
      const double a = eval_node(*n.lhs, args);
      const double b = eval_node(*n.rhs, args);
      switch (n.op) {
        case '+': return checked(a + b, "+");
        case '-': return checked(a - b, "-");
        case '*': return checked(a * b, "*");
        case '/':
          if (b == 0.0) throw EvaluationError("division by zero");
          return checked(a / b, "/");
        default: return checked(std::pow(a, b), "^");
      }
    }
    case Kind::call: {
      const double a = eval_node(*n.lhs, args);
      switch (n.func) {
        case Func::sin: return std::sin(a);
        case Func::cos: return std::cos(a);
        case Func::exp: return checked(std::exp(a), "exp");
        case Func::log:
          if (!(a > 0.0)) {
            throw EvaluationError("log of non-positive argument " +
                                  std::to_string(a));
          }
          return std::log(a);
        case Func::sqrt:
          if (a < 0.0) {
            throw EvaluationError("sqrt of negative argument " +
                                  std::to_string(a));
          }
          return std::sqrt(a);
        case Func::abs: return std::abs(a);
        case Func::floor: return std::floor(a);
      }
    }
  }
  return 0.0;
}

bool uses_variable(const Expression::Node& n) {
  if (n.kind == Kind::variable) return true;
  if (n.lhs && uses_variable(*n.lhs)) return true;
  return n.rhs && uses_variable(*n.rhs);
}

int max_slot_of(const Expression::Node& n) {
  int m = n.kind == Kind::variable ? n.slot : -1;
  if (n.lhs) m = std::max(m, max_slot_of(*n.lhs));
  if (n.rhs) m = std::max(m, max_slot_of(*n.rhs));
  return m;
}

bool same_tree(const Expression::Node* a, const Expression::Node* b) {
  if (a == b) return true;
  if (!a || !b) return false;
  if (a->kind != b->kind) return false;
  switch (a->kind) {
    case Kind::number: return a->value == b->value;
    case Kind::constant: return a->constant == b->constant;
    case Kind::variable: return a->slot == b->slot;
    case Kind::negate: return same_tree(a->lhs.get(), b->lhs.get());
    case Kind::binary:
      return a->op == b->op && same_tree(a->lhs.get(), b->lhs.get()) &&
             same_tree(a->rhs.get(), b->rhs.get());
    case Kind::call:
      return a->func == b->func && same_tree(a->lhs.get(), b->lhs.get());
  }
  return false;
}

void print(const Expression::Node& n, const Symbols& sym, std::string& out);

void print_wrapped(const Expression::Node& n, bool parens, const Symbols& sym,
                   std::string& out) {
  if (parens) out += '(';
  print(n, sym, out);
  if (parens) out += ')';
}

void print(const Expression::Node& n, const Symbols& sym, std::string& out) {
  switch (n.kind) {
    case Kind::number: {
      char buf[32];
      auto res = std::to_chars(buf, buf + sizeof buf, n.value);
      out.append(buf, res.ptr);
      return;
    }
    case Kind::constant:
      out += n.constant == 'p' ? "pi" : "e";
      return;
    case Kind::variable:
      out += sym.name(n.slot);
      return;
    case Kind::negate:
      out += '-';
      print_wrapped(*n.lhs, precedence(*n.lhs) < kNegPrec, sym, out);
      return;
    case Kind::call:
      out += func_name(n.func);
      print_wrapped(*n.lhs, true, sym, out);
      return;
    case Kind::binary: {
      const int p = precedence(n);
      if (n.op == '^') {
        print_wrapped(*n.lhs, precedence(*n.lhs) <= kPowPrec, sym, out);
        out += '^';
        print_wrapped(*n.rhs, precedence(*n.rhs) < kNegPrec, sym, out);
      } else {
        print_wrapped(*n.lhs, precedence(*n.lhs) < p, sym, out);
        out += ' ';
        out += n.op;
        out += ' ';
        print_wrapped(*n.rhs, precedence(*n.rhs) <= p, sym, out);
      }
      return;
    }
  }
}

}  // namespace

double Expression::evaluate(std::span<const double> args) const {
  if (!root_) throw EvaluationError("empty expression");
  return eval_node(*root_, args);
}

bool Expression::is_constant() const { return root_ && !uses_variable(*root_); }

int Expression::max_slot() const { return root_ ? max_slot_of(*root_) : -1; }

std::string Expression::to_string(const Symbols& symbols) const {
  std::string out;
  if (root_) print(*root_, symbols, out);
  return out;
}

bool operator==(const Expression& a, const Expression& b) {
  return same_tree(a.root_.get(), b.root_.get());
}

// ---------------------------------------------------------------------------
// Parsing

namespace {

class Parser {
 public:
  Parser(std::string_view text, const Symbols& symbols)
      : text_(text), symbols_(symbols) {}

  Expression parse() {
    skip_space();
    if (pos_ == text_.size()) throw ParseError("empty expression", pos_);
    Expression e = sum();
    skip_space();
    if (pos_ != text_.size()) {
      throw ParseError(std::string("unexpected '") + text_[pos_] + "'", pos_);
    }
    return e;
  }

 private:
  void skip_space() {
    while (pos_ < text_.size() &&
           std::isspace(static_cast<unsigned char>(text_[pos_]))) {
      ++pos_;
    }
  }

  bool accept(char c) {
    skip_space();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  void expect(char c) {
    if (!accept(c)) {
      throw ParseError(std::string("expected '") + c + "'", pos_);
    }
  }

  Expression sum() {
    Expression lhs = product();
    for (;;) {
      if (accept('+')) {
        lhs = Expression::binary('+', lhs, product());
      } else if (accept('-')) {
        lhs = Expression::binary('-', lhs, product());
      } else {
        return lhs;
      }
    }
  }

  Expression product() {
    Expression lhs = unary();
    for (;;) {
      if (accept('*')) {
        lhs = Expression::binary('*', lhs, unary());
      } else if (accept('/')) {
        lhs = Expression::binary('/', lhs, unary());
      } else {
        return lhs;
      }
    }
  }

  Expression unary() {
    if (accept('-')) return Expression::negate(unary());
    return power();
  }

  Expression power() {
    Expression base = atom();
    if (accept('^')) return Expression::binary('^', base, unary());
    return base;
  }

  Expression atom() {
    skip_space();
    if (pos_ == text_.size()) throw ParseError("unexpected end of input", pos_);
    const char c = text_[pos_];
    if (c == '(') {
      ++pos_;
      Expression inner = sum();
      expect(')');
      return inner;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      return number();
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      return identifier();
    }
    throw ParseError(std::string("unexpected '") + c + "'", pos_);
  }

  Expression number() {
    const std::size_t start = pos_;
    auto digits = [&] {
      std::size_t n = 0;
      while (pos_ < text_.size() &&
             std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
        ++pos_;
        ++n;
      }
      return n;
    };
    std::size_t mantissa = digits();
    if (pos_ < text_.size() && text_[pos_] == '.') {
      ++pos_;
      mantissa += digits();
    }
    if (mantissa == 0) throw ParseError("malformed number", start);
    // An exponent is only consumed when digits follow, so "2e" stays a
    // literal followed by the constant e (and then fails as a syntax error).
    if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
      std::size_t look = pos_ + 1;
      if (look < text_.size() && (text_[look] == '+' || text_[look] == '-')) {
        ++look;
      }
      if (look < text_.size() &&
          std::isdigit(static_cast<unsigned char>(text_[look]))) {
        pos_ = look;
        digits();
      }
    }
    double v = 0.0;
    auto res = std::from_chars(text_.data() + start, text_.data() + pos_, v);
    if (res.ec != std::errc() || res.ptr != text_.data() + pos_) {
      throw ParseError("malformed number", start);
    }
    if (!std::isfinite(v)) throw ParseError("number out of range", start);
    return Expression::number(v);
  }

  Expression identifier() {
    const std::size_t start = pos_;
    while (pos_ < text_.size() &&
           (std::isalnum(static_cast<unsigned char>(text_[pos_])) ||
            text_[pos_] == '_')) {
      ++pos_;
    }
    const std::string_view name = text_.substr(start, pos_ - start);

    skip_space();
    if (pos_ < text_.size() && text_[pos_] == '(') {
      static constexpr Func kFuncs[] = {Func::sin,  Func::cos, Func::exp,
                                        Func::log,  Func::sqrt, Func::abs,
                                        Func::floor};
      for (Func f : kFuncs) {
        if (name == func_name(f)) {
          ++pos_;
          Expression arg = sum();
          expect(')');
          return Expression::call(f, arg);
        }
      }
      throw ParseError("unknown function '" + std::string(name) + "'", start);
    }

    if (const int slot = symbols_.slot(name); slot >= 0) {
      return Expression::variable(slot);
    }
    if (name == "pi" || name == "e") return Expression::named_constant(name);

    // x7 where only x1..x3 exist is a different mistake from a stray name.
    const auto stem_end = name.find_last_not_of("0123456789");
    if (stem_end != std::string_view::npos && stem_end + 1 < name.size()) {
      const std::string_view stem = name.substr(0, stem_end + 1);
      if (symbols_.slot(std::string(stem) + "1") >= 0) {
        throw ParseError("variable index out of range in '" +
                             std::string(name) + "'",
                         start);
      }
    }
    throw ParseError("unknown identifier '" + std::string(name) + "'", start);
  }

  std::string_view text_;
  const Symbols& symbols_;
  std::size_t pos_ = 0;
};

}  // namespace

Expression parse_expression(std::string_view text, const Symbols& symbols) {
  return Parser(text, symbols).parse();
}

Expression parse_expression(std::string_view text, int d) {
  return parse_expression(text, Symbols::domain(d));
}

}  // namespace ym
