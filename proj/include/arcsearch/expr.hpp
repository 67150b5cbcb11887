#pragma once

#include <memory>
#include <string>
#include <vector>

#include "arcsearch/model.hpp"

namespace arcsearch::expr {

enum class Op { constant, variable, add, mul, neg, div, pow, exp, log, sin, cos, sqrt };

struct Node;
using NodePtr = std::shared_ptr<const Node>;

/// Immutable expression tree over variables x1..xn (stored 0-based).
class Expr {
 public:
  Expr();  // the constant 0
  explicit Expr(NodePtr node) : node_(std::move(node)) {}

  static Expr constant(double c);
  static Expr variable(int index);

  Op op() const;
  bool is_constant() const;
  bool is_zero() const;
  double constant_value() const;  // only for constants
  const NodePtr& node() const { return node_; }

  double eval(const Vec& x) const;
  /// Largest variable index used plus one (0 for constants).
  int arity() const;
  std::string str() const;

 private:
  NodePtr node_;
};

Expr operator+(const Expr& a, const Expr& b);
Expr operator-(const Expr& a, const Expr& b);
Expr operator*(const Expr& a, const Expr& b);
Expr operator/(const Expr& a, const Expr& b);
Expr operator-(const Expr& a);
Expr pow(const Expr& a, const Expr& b);
Expr apply(Op fn, const Expr& a);  // exp, log, sin, cos, sqrt

Expr diff(const Expr& e, int var);

/// Infix grammar with + - * / ^, unary minus, parentheses, numbers, the
/// variables x1..xn and the functions exp log sin cos sqrt. Throws ParseError.
Expr parse(const std::string& text, int n);

/// Wraps an expression as a ScalarFunction with symbolic gradient, Hessian
/// and contracted third derivative.
ScalarFunction compile(const Expr& e, int n);

}  // namespace arcsearch::expr
