#include "contactmoc/expression.hpp"

#include <cctype>
#include <cmath>
#include <numbers>
#include <vector>

#include "contactmoc/error.hpp"

namespace contactmoc {

namespace {

// Taylor coefficients c_k with f(x+h) = sum c_k h^k, truncated after h^3.
using Jet = std::array<double, 4>;

Jet jet_const(double c) { return {c, 0, 0, 0}; }

Jet operator+(const Jet& a, const Jet& b) { return {a[0] + b[0], a[1] + b[1], a[2] + b[2], a[3] + b[3]}; }
Jet operator-(const Jet& a, const Jet& b) { return {a[0] - b[0], a[1] - b[1], a[2] - b[2], a[3] - b[3]}; }
Jet operator-(const Jet& a) { return {-a[0], -a[1], -a[2], -a[3]}; }

Jet operator*(const Jet& a, const Jet& b) {
  Jet c{};
  for (int k = 0; k < 4; ++k)
    for (int j = 0; j <= k; ++j) c[k] += a[j] * b[k - j];
  return c;
}

Jet operator/(const Jet& a, const Jet& b) {
  if (b[0] == 0.0) throw Error(ErrorKind::InvalidArgument, "expression divides by zero");
  Jet c{};
  for (int k = 0; k < 4; ++k) {
    double s = a[k];
    for (int j = 1; j <= k; ++j) s -= b[j] * c[k - j];
    c[k] = s / b[0];
  }
  return c;
}

Jet jet_exp(const Jet& a) {
  Jet e{};
  e[0] = std::exp(a[0]);
  for (int k = 1; k < 4; ++k) {
    double s = 0;
    for (int j = 1; j <= k; ++j) s += j * a[j] * e[k - j];
    e[k] = s / k;
  }
  return e;
}

Jet jet_log(const Jet& a) {
  if (a[0] <= 0.0) throw Error(ErrorKind::InvalidArgument, "expression takes log of a nonpositive value");
  Jet l{};
  l[0] = std::log(a[0]);
  for (int k = 1; k < 4; ++k) {
    double s = a[k];
    for (int j = 1; j < k; ++j) s -= double(j) / k * l[j] * a[k - j];
    l[k] = s / a[0];
  }
  return l;
}

std::pair<Jet, Jet> jet_sincos(const Jet& a) {
  Jet s{}, c{};
  s[0] = std::sin(a[0]);
  c[0] = std::cos(a[0]);
  for (int k = 1; k < 4; ++k) {
    double ss = 0, cc = 0;
    for (int j = 1; j <= k; ++j) {
      ss += j * a[j] * c[k - j];
      cc -= j * a[j] * s[k - j];
    }
    s[k] = ss / k;
    c[k] = cc / k;
  }
  return {s, c};
}

Jet jet_pow(const Jet& a, double r) {
  if (r == std::floor(r) && std::abs(r) <= 64) {
    auto n = static_cast<long>(std::abs(r));
    Jet result = jet_const(1.0), base = a;
    while (n > 0) {
      if (n & 1) result = result * base;
      base = base * base;
      n >>= 1;
    }
    return r < 0 ? jet_const(1.0) / result : result;
  }
  if (a[0] <= 0.0) throw Error(ErrorKind::InvalidArgument, "expression raises a nonpositive value to a fractional power");
  return jet_exp(jet_const(r) * jet_log(a));
}

enum class Op { Num, Var, Add, Sub, Mul, Div, Neg, Pow, Sin, Cos, Tan, Exp, Log, Sqrt };

}  // namespace

struct Expression::Node {
  Op op;
  double value = 0;
  std::shared_ptr<const Node> lhs, rhs;

  Jet eval(const Jet& x) const {
    switch (op) {
      case Op::Num: return jet_const(value);
      case Op::Var: return x;
      case Op::Add: return lhs->eval(x) + rhs->eval(x);
      case Op::Sub: return lhs->eval(x) - rhs->eval(x);
      case Op::Mul: return lhs->eval(x) * rhs->eval(x);
      case Op::Div: return lhs->eval(x) / rhs->eval(x);
      case Op::Neg: return -lhs->eval(x);
      case Op::Pow: return jet_pow(lhs->eval(x), value);
      case Op::Sin: return jet_sincos(lhs->eval(x)).first;
      case Op::Cos: return jet_sincos(lhs->eval(x)).second;
      case Op::Tan: {
        auto [s, c] = jet_sincos(lhs->eval(x));
        return s / c;
      }
      case Op::Exp: return jet_exp(lhs->eval(x));
      case Op::Log: return jet_log(lhs->eval(x));
      case Op::Sqrt: return jet_pow(lhs->eval(x), 0.5);
    }
    return jet_const(0);
  }

  double eval_scalar(double x) const {
    switch (op) {
      case Op::Num: return value;
      case Op::Var: return x;
      case Op::Add: return lhs->eval_scalar(x) + rhs->eval_scalar(x);
      case Op::Sub: return lhs->eval_scalar(x) - rhs->eval_scalar(x);
      case Op::Mul: return lhs->eval_scalar(x) * rhs->eval_scalar(x);
      case Op::Div: return lhs->eval_scalar(x) / rhs->eval_scalar(x);
      case Op::Neg: return -lhs->eval_scalar(x);
      case Op::Pow: return jet_pow(jet_const(lhs->eval_scalar(x)), value)[0];
      case Op::Sin: return std::sin(lhs->eval_scalar(x));
      case Op::Cos: return std::cos(lhs->eval_scalar(x));
      case Op::Tan: return std::tan(lhs->eval_scalar(x));
      case Op::Exp: return std::exp(lhs->eval_scalar(x));
      case Op::Log: return std::log(lhs->eval_scalar(x));
      case Op::Sqrt: return std::sqrt(lhs->eval_scalar(x));
    }
    return 0;
  }

  bool uses_variable() const {
    if (op == Op::Var) return true;
    return (lhs && lhs->uses_variable()) || (rhs && rhs->uses_variable());
  }
};

namespace {

using NodePtr = std::shared_ptr<const Expression::Node>;

NodePtr make(Op op, NodePtr l = nullptr, NodePtr r = nullptr, double v = 0) {
  auto n = std::make_shared<Expression::Node>();
  n->op = op;
  n->lhs = std::move(l);
  n->rhs = std::move(r);
  n->value = v;
  return n;
}

class Parser {
 public:
  Parser(const std::string& text, const std::string& var) : s_(text), var_(var) {}

  NodePtr parse() {
    auto n = expr();
    skip();
    if (pos_ != s_.size()) fail("unexpected '" + std::string(1, s_[pos_]) + "'");
    return n;
  }

 private:
  [[noreturn]] void fail(const std::string& msg) const {
    throw Error(ErrorKind::Parse, "expression '" + s_ + "' column " + std::to_string(pos_ + 1) + ": " + msg);
  }

  void skip() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip();
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  NodePtr expr() {
    auto n = term();
    for (;;) {
      if (accept('+')) n = make(Op::Add, n, term());
      else if (accept('-')) n = make(Op::Sub, n, term());
      else return n;
    }
  }

  NodePtr term() {
    auto n = unary();
    for (;;) {
      if (accept('*')) n = make(Op::Mul, n, unary());
      else if (accept('/')) n = make(Op::Div, n, unary());
      else return n;
    }
  }

  NodePtr unary() {
    if (accept('-')) return make(Op::Neg, unary());
    if (accept('+')) return unary();
    return power();
  }

  NodePtr power() {
    auto base = primary();
    if (accept('^')) {
      const std::size_t at = pos_;
      auto exponent = unary();
      if (exponent->uses_variable()) {
        pos_ = at;
        fail("exponent must not depend on " + var_);
      }
      return make(Op::Pow, base, nullptr, exponent->eval_scalar(0.0));
    }
    return base;
  }

  NodePtr primary() {
    skip();
    if (pos_ >= s_.size()) fail("unexpected end of expression");
    const char c = s_[pos_];
    if (accept('(')) {
      auto n = expr();
      if (!accept(')')) fail("expected ')'");
      return n;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      const char* begin = s_.c_str() + pos_;
      char* end = nullptr;
      const double v = std::strtod(begin, &end);
      if (end == begin) fail("bad number");
      pos_ += static_cast<std::size_t>(end - begin);
      return make(Op::Num, nullptr, nullptr, v);
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      const std::size_t start = pos_;
      while (pos_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_')) ++pos_;
      const std::string name = s_.substr(start, pos_ - start);
      if (name == var_) return make(Op::Var);
      if (name == "pi") return make(Op::Num, nullptr, nullptr, std::numbers::pi);
      if (name == "e") return make(Op::Num, nullptr, nullptr, std::numbers::e);
      static const std::pair<const char*, Op> funcs[] = {{"sin", Op::Sin}, {"cos", Op::Cos}, {"tan", Op::Tan},
                                                         {"exp", Op::Exp}, {"log", Op::Log}, {"sqrt", Op::Sqrt}};
      for (const auto& [fname, op] : funcs) {
        if (name == fname) {
          if (!accept('(')) fail("expected '(' after " + name);
          auto arg = expr();
          if (!accept(')')) fail("expected ')'");
          return make(op, arg);
        }
      }
      pos_ = start;
      fail("unknown identifier '" + name + "'");
    }
    fail("unexpected '" + std::string(1, c) + "'");
  }

  std::string s_;
  std::string var_;
  std::size_t pos_ = 0;
};

}  // namespace

Expression Expression::parse(const std::string& text, const std::string& variable) {
  Expression e;
  e.root_ = Parser(text, variable).parse();
  e.source_ = text;
  e.variable_ = variable;
  return e;
}

double Expression::operator()(double x) const {
  if (!root_) throw Error(ErrorKind::Internal, "evaluating an empty expression");
  return root_->eval_scalar(x);
}

std::array<double, 4> Expression::derivatives(double x) const {
  if (!root_) throw Error(ErrorKind::Internal, "evaluating an empty expression");
  const Jet j = root_->eval(Jet{x, 1, 0, 0});
  return {j[0], j[1], 2.0 * j[2], 6.0 * j[3]};
}

bool Expression::is_constant() const { return root_ && !root_->uses_variable(); }

}  // namespace contactmoc
