#include "arcsearch/expr.hpp"

#include <cctype>
#include <cmath>
#include <sstream>

#include "arcsearch/errors.hpp"

namespace arcsearch::expr {

struct Node {
  Op op;
  double value = 0.0;  // constant value or variable index
  NodePtr a;
  NodePtr b;
};

namespace {

NodePtr make(Op op, NodePtr a, NodePtr b = nullptr) {
  return std::make_shared<const Node>(Node{op, 0.0, std::move(a), std::move(b)});
}

bool is_const(const NodePtr& n, double v) { return n->op == Op::constant && n->value == v; }

double eval_node(const Node& n, const Vec& x) {
  switch (n.op) {
    case Op::constant: return n.value;
    case Op::variable: return x(static_cast<Eigen::Index>(n.value));
    case Op::add: return eval_node(*n.a, x) + eval_node(*n.b, x);
    case Op::mul: return eval_node(*n.a, x) * eval_node(*n.b, x);
    case Op::neg: return -eval_node(*n.a, x);
    case Op::div: return eval_node(*n.a, x) / eval_node(*n.b, x);
    case Op::pow: {
      const double base = eval_node(*n.a, x);
      if (n.b->op == Op::constant) {
        const double e = n.b->value;
        if (e == 2.0) return base * base;
        if (e == 3.0) return base * base * base;
        return std::pow(base, e);
      }
      return std::pow(base, eval_node(*n.b, x));
    }
    case Op::exp: return std::exp(eval_node(*n.a, x));
    case Op::log: return std::log(eval_node(*n.a, x));
    case Op::sin: return std::sin(eval_node(*n.a, x));
    case Op::cos: return std::cos(eval_node(*n.a, x));
    case Op::sqrt: return std::sqrt(eval_node(*n.a, x));
  }
  return 0.0;
}

int arity_node(const Node& n) {
  if (n.op == Op::variable) return static_cast<int>(n.value) + 1;
  int r = 0;
  if (n.a) r = std::max(r, arity_node(*n.a));
  if (n.b) r = std::max(r, arity_node(*n.b));
  return r;
}

const char* fn_name(Op op) {
  switch (op) {
    case Op::exp: return "exp";
    case Op::log: return "log";
    case Op::sin: return "sin";
    case Op::cos: return "cos";
    case Op::sqrt: return "sqrt";
    default: return "?";
  }
}

void print(const Node& n, std::ostream& os) {
  switch (n.op) {
    case Op::constant: {
      std::ostringstream t;
      t.precision(17);
      t << n.value;
      os << (n.value < 0 ? "(" + t.str() + ")" : t.str());
      return;
    }
    case Op::variable: os << 'x' << static_cast<int>(n.value) + 1; return;
    case Op::add: os << '('; print(*n.a, os); os << " + "; print(*n.b, os); os << ')'; return;
    case Op::mul: os << '('; print(*n.a, os); os << " * "; print(*n.b, os); os << ')'; return;
    case Op::div: os << '('; print(*n.a, os); os << " / "; print(*n.b, os); os << ')'; return;
    case Op::pow: os << '('; print(*n.a, os); os << " ^ "; print(*n.b, os); os << ')'; return;
    case Op::neg: os << "(-"; print(*n.a, os); os << ')'; return;
    default: os << fn_name(n.op) << '('; print(*n.a, os); os << ')'; return;
  }
}

}  // namespace

Expr::Expr() : node_(std::make_shared<const Node>(Node{Op::constant, 0.0, nullptr, nullptr})) {}

Expr Expr::constant(double c) {
  return Expr(std::make_shared<const Node>(Node{Op::constant, c, nullptr, nullptr}));
}

Expr Expr::variable(int index) {
  if (index < 0) throw ContractViolation("variable index must be non-negative");
  return Expr(std::make_shared<const Node>(
      Node{Op::variable, static_cast<double>(index), nullptr, nullptr}));
}

Op Expr::op() const { return node_->op; }
bool Expr::is_constant() const { return node_->op == Op::constant; }
bool Expr::is_zero() const { return is_const(node_, 0.0); }
double Expr::constant_value() const {
  if (!is_constant()) throw ContractViolation("expression is not a constant");
  return node_->value;
}
double Expr::eval(const Vec& x) const { return eval_node(*node_, x); }
int Expr::arity() const { return arity_node(*node_); }
std::string Expr::str() const {
  std::ostringstream os;
  print(*node_, os);
  return os.str();
}

Expr operator+(const Expr& a, const Expr& b) {
  if (a.is_constant() && b.is_constant())
    return Expr::constant(a.constant_value() + b.constant_value());
  if (a.is_zero()) return b;
  if (b.is_zero()) return a;
  return Expr(make(Op::add, a.node(), b.node()));
}

Expr operator-(const Expr& a) {
  if (a.is_constant()) return Expr::constant(-a.constant_value());
  if (a.op() == Op::neg) return Expr(a.node()->a);
  return Expr(make(Op::neg, a.node()));
}

Expr operator-(const Expr& a, const Expr& b) { return a + (-b); }

Expr operator*(const Expr& a, const Expr& b) {
  if (a.is_constant() && b.is_constant())
    return Expr::constant(a.constant_value() * b.constant_value());
  if (a.is_zero() || b.is_zero()) return Expr::constant(0.0);
  if (is_const(a.node(), 1.0)) return b;
  if (is_const(b.node(), 1.0)) return a;
  if (is_const(a.node(), -1.0)) return -b;
  if (is_const(b.node(), -1.0)) return -a;
  if (b.is_constant()) return Expr(make(Op::mul, b.node(), a.node()));
  return Expr(make(Op::mul, a.node(), b.node()));
}

Expr operator/(const Expr& a, const Expr& b) {
  if (a.is_constant() && b.is_constant())
    return Expr::constant(a.constant_value() / b.constant_value());
  if (a.is_zero()) return Expr::constant(0.0);
  if (is_const(b.node(), 1.0)) return a;
  return Expr(make(Op::div, a.node(), b.node()));
}

Expr pow(const Expr& a, const Expr& b) {
  if (a.is_constant() && b.is_constant())
    return Expr::constant(std::pow(a.constant_value(), b.constant_value()));
  if (is_const(b.node(), 0.0)) return Expr::constant(1.0);
  if (is_const(b.node(), 1.0)) return a;
  return Expr(make(Op::pow, a.node(), b.node()));
}

Expr apply(Op fn, const Expr& a) {
  switch (fn) {
    case Op::exp: case Op::log: case Op::sin: case Op::cos: case Op::sqrt: break;
    default: throw ContractViolation("apply: not a unary function");
  }
  if (a.is_constant()) return Expr::constant(Expr(make(fn, a.node())).eval(Vec()));
  return Expr(make(fn, a.node()));
}

Expr diff(const Expr& e, int var) {
  const Node& n = *e.node();
  const Expr a = n.a ? Expr(n.a) : Expr();
  const Expr b = n.b ? Expr(n.b) : Expr();
  switch (n.op) {
    case Op::constant: return Expr::constant(0.0);
    case Op::variable: return Expr::constant(static_cast<int>(n.value) == var ? 1.0 : 0.0);
    case Op::add: return diff(a, var) + diff(b, var);
    case Op::neg: return -diff(a, var);
    case Op::mul: return diff(a, var) * b + a * diff(b, var);
    case Op::div: {
      const Expr da = diff(a, var), db = diff(b, var);
      if (db.is_zero()) return da / b;
      return (da * b - a * db) / pow(b, Expr::constant(2.0));
    }
    case Op::pow: {
      const Expr da = diff(a, var);
      if (b.is_constant()) {
        const double c = b.constant_value();
        return Expr::constant(c) * pow(a, Expr::constant(c - 1.0)) * da;
      }
      const Expr db = diff(b, var);
      return e * (db * apply(Op::log, a) + b * da / a);
    }
    case Op::exp: return e * diff(a, var);
    case Op::log: return diff(a, var) / a;
    case Op::sin: return apply(Op::cos, a) * diff(a, var);
    case Op::cos: return -(apply(Op::sin, a) * diff(a, var));
    case Op::sqrt: return diff(a, var) / (Expr::constant(2.0) * e);
  }
  return Expr::constant(0.0);
}

namespace {

class Parser {
 public:
  Parser(const std::string& text, int n) : s_(text), n_(n) {}

  Expr run() {
    Expr e = expression();
    skip();
    if (pos_ != s_.size()) fail("unexpected '" + std::string(1, s_[pos_]) + "'");
    return e;
  }

 private:
  [[noreturn]] void fail(const std::string& msg) const {
    throw ParseError(msg + " at column " + std::to_string(pos_ + 1) + " in \"" + s_ + "\"");
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

  Expr expression() {
    Expr e = term();
    for (;;) {
      if (accept('+')) e = e + term();
      else if (accept('-')) e = e - term();
      else return e;
    }
  }

  Expr term() {
    Expr e = unary();
    for (;;) {
      if (accept('*')) e = e * unary();
      else if (accept('/')) e = e / unary();
      else return e;
    }
  }

  Expr unary() {
    if (accept('-')) return -unary();
    if (accept('+')) return unary();
    return power();
  }

  Expr power() {
    Expr base = primary();
    skip();
    if (accept('^')) return pow(base, unary());
    if (pos_ + 1 < s_.size() && s_[pos_] == '*' && s_[pos_ + 1] == '*') {
      pos_ += 2;
      return pow(base, unary());
    }
    return base;
  }

  Expr primary() {
    skip();
    if (pos_ >= s_.size()) fail("unexpected end of expression");
    const char c = s_[pos_];
    if (c == '(') {
      ++pos_;
      Expr e = expression();
      if (!accept(')')) fail("expected ')'");
      return e;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
    if (std::isalpha(static_cast<unsigned char>(c))) return identifier();
    fail("unexpected '" + std::string(1, c) + "'");
  }

  Expr number() {
    const char* begin = s_.c_str() + pos_;
    char* end = nullptr;
    const double v = std::strtod(begin, &end);
    if (end == begin) fail("bad number");
    pos_ += static_cast<size_t>(end - begin);
    return Expr::constant(v);
  }

  Expr identifier() {
    const size_t start = pos_;
    while (pos_ < s_.size() &&
           (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_'))
      ++pos_;
    const std::string id = s_.substr(start, pos_ - start);
    if (id.size() > 1 && id[0] == 'x' &&
        id.find_first_not_of("0123456789", 1) == std::string::npos) {
      const int k = std::stoi(id.substr(1));
      if (k < 1 || k > n_) fail("variable " + id + " out of range 1.." + std::to_string(n_));
      return Expr::variable(k - 1);
    }
    static const std::pair<const char*, Op> fns[] = {
        {"exp", Op::exp}, {"log", Op::log}, {"sin", Op::sin}, {"cos", Op::cos},
        {"sqrt", Op::sqrt}};
    for (const auto& [name, op] : fns) {
      if (id == name) {
        if (!accept('(')) fail("expected '(' after " + id);
        Expr arg = expression();
        if (!accept(')')) fail("expected ')'");
        return apply(op, arg);
      }
    }
    if (id == "pi") return Expr::constant(std::acos(-1.0));
    fail("unknown identifier '" + id + "'");
  }

  std::string s_;
  int n_;
  size_t pos_ = 0;
};

struct Compiled {
  int n;
  Expr f;
  std::vector<Expr> grad;          // n
  std::vector<Expr> hess;          // n*n, symmetric
  std::vector<Expr> third;         // n*n*n, fully symmetric
  std::vector<int> third_nonzero;  // flat indices with non-zero entries
};

}  // namespace

Expr parse(const std::string& text, int n) {
  if (n < 1) throw ContractViolation("parse: n must be positive");
  return Parser(text, n).run();
}

ScalarFunction compile(const Expr& e, int n) {
  if (e.arity() > n) throw ContractViolation("compile: expression uses more than n variables");
  auto c = std::make_shared<Compiled>();
  c->n = n;
  c->f = e;
  c->grad.resize(n);
  c->hess.resize(static_cast<size_t>(n) * n);
  c->third.resize(static_cast<size_t>(n) * n * n);
  for (int j = 0; j < n; ++j) c->grad[j] = diff(e, j);
  for (int j = 0; j < n; ++j)
    for (int k = j; k < n; ++k)
      c->hess[j * n + k] = c->hess[k * n + j] = diff(c->grad[j], k);
  for (int j = 0; j < n; ++j)
    for (int k = j; k < n; ++k)
      for (int l = k; l < n; ++l) {
        const Expr t = diff(c->hess[j * n + k], l);
        const int idx[6][3] = {{j, k, l}, {j, l, k}, {k, j, l},
                               {k, l, j}, {l, j, k}, {l, k, j}};
        for (const auto& p : idx) c->third[(p[0] * n + p[1]) * n + p[2]] = t;
      }
  for (int i = 0; i < n * n * n; ++i)
    if (!c->third[i].is_zero()) c->third_nonzero.push_back(i);

  ScalarFunction fn;
  fn.value = [c](const Vec& x) { return c->f.eval(x); };
  fn.gradient = [c](const Vec& x) {
    Vec g(c->n);
    for (int j = 0; j < c->n; ++j) g(j) = c->grad[j].eval(x);
    return g;
  };
  fn.hessian = [c](const Vec& x) {
    const int n = c->n;
    Mat H(n, n);
    for (int j = 0; j < n; ++j)
      for (int k = j; k < n; ++k) H(j, k) = H(k, j) = c->hess[j * n + k].eval(x);
    return H;
  };
  fn.third = [c](const Vec& x, const Vec& d) {
    const int n = c->n;
    Vec out = Vec::Zero(n);
    for (int idx : c->third_nonzero) {
      const int l = idx % n, k = (idx / n) % n, j = idx / (n * n);
      out(j) += c->third[idx].eval(x) * d(k) * d(l);
    }
    return out;
  };
  return fn;
}

}  // namespace arcsearch::expr
