#pragma once

#include <array>
#include <memory>
#include <string>

namespace contactmoc {

// Closed-form curve f(var) from a small grammar: numbers, the variable, pi, e,
// + - * / ^ (constant exponent), parentheses, sin cos tan exp log sqrt.
// Derivatives up to third order come from truncated Taylor arithmetic, so they
// are exact up to rounding.
class Expression {
 public:
  struct Node;

  Expression() = default;
  // Throws Error(Parse) with the column of the offending token.
  static Expression parse(const std::string& text, const std::string& variable);

  double operator()(double x) const;
  // (f, f', f'', f''') at x.
  std::array<double, 4> derivatives(double x) const;

  const std::string& source() const { return source_; }
  const std::string& variable() const { return variable_; }
  bool valid() const { return root_ != nullptr; }
  // True when the expression does not reference the variable.
  bool is_constant() const;

 private:
  std::shared_ptr<const Node> root_;
  std::string source_;
  std::string variable_;
};

}  // namespace contactmoc
