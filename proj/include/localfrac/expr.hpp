#pragma once

#include <array>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <initializer_list>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <utility>

#include "errors.hpp"

namespace localfrac::expr {

enum class UnaryOp { Neg, Sin, Cos, Tan, Exp, Ln, Sqrt, Abs };
enum class BinaryOp { Add, Sub, Mul, Div, Pow };

// Variable bindings for evaluation.  Holds views of the caller's names; the
// usual call sites pass string literals.
class Bindings {
 public:
  Bindings() = default;
  Bindings(std::initializer_list<std::pair<std::string_view, double>> items) {
    for (const auto& it : items) set(it.first, it.second);
  }

  void set(std::string_view name, double value) {
    for (std::size_t i = 0; i < n_; ++i)
      if (items_[i].first == name) {
        items_[i].second = value;
        return;
      }
    if (n_ == items_.size()) throw DomainError("Bindings: too many variables");
    items_[n_++] = {name, value};
  }

  const double* find(std::string_view name) const {
    for (std::size_t i = 0; i < n_; ++i)
      if (items_[i].first == name) return &items_[i].second;
    return nullptr;
  }

 private:
  std::array<std::pair<std::string_view, double>, 4> items_{};
  std::size_t n_ = 0;
};

// Immutable expression tree over one or more real variables.  Construction
// goes through smart constructors that apply light simplification
// (0*x -> 0, x+0 -> x, 1*x -> x, constant folding) so derivative trees stay
// readable.
class Expression {
  struct Node;
  using NodePtr = std::shared_ptr<const Node>;

  struct Node {
    enum class Kind { Constant, Variable, Unary, Binary };
    Kind kind;
    double value = 0.0;   // Constant
    std::string name;     // Variable
    UnaryOp uop = UnaryOp::Neg;
    BinaryOp bop = BinaryOp::Add;
    NodePtr a, b;  // Unary uses a only
  };

 public:
  Expression() : root_(make_constant_node(0.0)) {}

  static Expression constant(double v) { return Expression(make_constant_node(v)); }

  static Expression variable(std::string name) {
    auto n = std::make_shared<Node>();
    n->kind = Node::Kind::Variable;
    n->name = std::move(name);
    return Expression(std::move(n));
  }

  static Expression unary(UnaryOp op, Expression child) {
    return Expression(make_unary(op, child.root_));
  }

  static Expression binary(BinaryOp op, Expression lhs, Expression rhs) {
    return Expression(make_binary(op, lhs.root_, rhs.root_));
  }

  bool is_constant(double* value = nullptr) const {
    if (root_->kind != Node::Kind::Constant) return false;
    if (value) *value = root_->value;
    return true;
  }

  bool depends_on(std::string_view var) const { return node_depends_on(root_.get(), var); }

  double eval(double t) const { return eval(Bindings{{"t", t}}); }

  double eval(const Bindings& env) const { return eval_node(root_.get(), env); }

  // Exact derivative with respect to `var`; other variables are treated as
  // constants.  Throws UnsupportedFormError for u^v with v depending on `var`
  // (the derivative of abs surfaces its 0-point failure at evaluation time).
  Expression diff(std::string_view var = "t") const {
    return Expression(diff_node(root_, var));
  }

  Expression substitute(std::string_view var, const Expression& replacement) const {
    return Expression(substitute_node(root_, var, replacement.root_));
  }

  std::string render() const {
    std::string out;
    render_node(root_.get(), 0, out);
    return out;
  }

  friend Expression operator-(Expression e) {
    return Expression(make_unary(UnaryOp::Neg, e.root_));
  }
  friend Expression operator+(Expression a, Expression b) {
    return binary(BinaryOp::Add, std::move(a), std::move(b));
  }
  friend Expression operator-(Expression a, Expression b) {
    return binary(BinaryOp::Sub, std::move(a), std::move(b));
  }
  friend Expression operator*(Expression a, Expression b) {
    return binary(BinaryOp::Mul, std::move(a), std::move(b));
  }
  friend Expression operator/(Expression a, Expression b) {
    return binary(BinaryOp::Div, std::move(a), std::move(b));
  }

 private:
  explicit Expression(NodePtr root) : root_(std::move(root)) {}

  static NodePtr make_constant_node(double v) {
    auto n = std::make_shared<Node>();
    n->kind = Node::Kind::Constant;
    n->value = v;
    return n;
  }

  static const double* constant_of(const NodePtr& n) {
    return n->kind == Node::Kind::Constant ? &n->value : nullptr;
  }

  static NodePtr make_unary(UnaryOp op, NodePtr child) {
    if (const double* c = constant_of(child)) {
      double v = std::numeric_limits<double>::quiet_NaN();
      switch (op) {
        case UnaryOp::Neg: v = -*c; break;
        case UnaryOp::Sin: v = std::sin(*c); break;
        case UnaryOp::Cos: v = std::cos(*c); break;
        case UnaryOp::Tan: v = std::tan(*c); break;
        case UnaryOp::Exp: v = std::exp(*c); break;
        case UnaryOp::Ln: v = *c > 0.0 ? std::log(*c) : v; break;
        case UnaryOp::Sqrt: v = *c >= 0.0 ? std::sqrt(*c) : v; break;
        case UnaryOp::Abs: v = std::abs(*c); break;
      }
      if (std::isfinite(v)) return make_constant_node(v);
    }
    if (op == UnaryOp::Neg && child->kind == Node::Kind::Unary &&
        child->uop == UnaryOp::Neg)
      return child->a;
    auto n = std::make_shared<Node>();
    n->kind = Node::Kind::Unary;
    n->uop = op;
    n->a = std::move(child);
    return n;
  }

  static NodePtr make_binary(BinaryOp op, NodePtr lhs, NodePtr rhs) {
    const double* ca = constant_of(lhs);
    const double* cb = constant_of(rhs);
    if (ca && cb) {
      double v = std::numeric_limits<double>::quiet_NaN();
      switch (op) {
        case BinaryOp::Add: v = *ca + *cb; break;
        case BinaryOp::Sub: v = *ca - *cb; break;
        case BinaryOp::Mul: v = *ca * *cb; break;
        case BinaryOp::Div: v = *cb != 0.0 ? *ca / *cb : v; break;
        case BinaryOp::Pow: v = pow_checked_quiet(*ca, *cb); break;
      }
      if (std::isfinite(v)) return make_constant_node(v);
    }
    switch (op) {
      case BinaryOp::Add:
        if (ca && *ca == 0.0) return rhs;
        if (cb && *cb == 0.0) return lhs;
        break;
      case BinaryOp::Sub:
        if (cb && *cb == 0.0) return lhs;
        if (ca && *ca == 0.0) return make_unary(UnaryOp::Neg, rhs);
        break;
      case BinaryOp::Mul:
        if ((ca && *ca == 0.0) || (cb && *cb == 0.0)) return make_constant_node(0.0);
        if (ca && *ca == 1.0) return rhs;
        if (cb && *cb == 1.0) return lhs;
        break;
      case BinaryOp::Div:
        if (ca && *ca == 0.0) return make_constant_node(0.0);
        if (cb && *cb == 1.0) return lhs;
        break;
      case BinaryOp::Pow:
        if (cb && *cb == 1.0) return lhs;
        if (cb && *cb == 0.0) return make_constant_node(1.0);
        if (ca && *ca == 1.0) return make_constant_node(1.0);
        break;
    }
    auto n = std::make_shared<Node>();
    n->kind = Node::Kind::Binary;
    n->bop = op;
    n->a = std::move(lhs);
    n->b = std::move(rhs);
    return n;
  }

  // pow for constant folding: returns NaN instead of throwing on bad domains
  // so the node survives to evaluation, where the error is reported.
  static double pow_checked_quiet(double a, double b) {
    if (a == 0.0 && b < 0.0) return std::numeric_limits<double>::quiet_NaN();
    if (a < 0.0 && b != std::floor(b)) return std::numeric_limits<double>::quiet_NaN();
    return std::pow(a, b);
  }

  static bool node_depends_on(const Node* n, std::string_view var) {
    switch (n->kind) {
      case Node::Kind::Constant: return false;
      case Node::Kind::Variable: return n->name == var;
      case Node::Kind::Unary: return node_depends_on(n->a.get(), var);
      case Node::Kind::Binary:
        return node_depends_on(n->a.get(), var) || node_depends_on(n->b.get(), var);
    }
    return false;
  }

  [[noreturn]] static void eval_fail(const Node* n, const std::string& what) {
    std::string repr;
    render_node(n, 0, repr);
    throw DomainError(what + " in '" + repr + "'");
  }

  static double eval_node(const Node* n, const Bindings& env) {
    switch (n->kind) {
      case Node::Kind::Constant:
        return n->value;
      case Node::Kind::Variable: {
        const double* v = env.find(n->name);
        if (!v) eval_fail(n, "unbound variable '" + n->name + "'");
        return *v;
      }
      case Node::Kind::Unary: {
        const double c = eval_node(n->a.get(), env);
        double v;
        switch (n->uop) {
          case UnaryOp::Neg: return -c;
          case UnaryOp::Sin: return std::sin(c);
          case UnaryOp::Cos: return std::cos(c);
          case UnaryOp::Tan:
            v = std::tan(c);
            if (!std::isfinite(v)) eval_fail(n, "tan at a pole");
            return v;
          case UnaryOp::Exp:
            v = std::exp(c);
            if (!std::isfinite(v)) eval_fail(n, "exp overflow");
            return v;
          case UnaryOp::Ln:
            if (c <= 0.0) eval_fail(n, "ln of non-positive value");
            return std::log(c);
          case UnaryOp::Sqrt:
            if (c < 0.0) eval_fail(n, "sqrt of negative value");
            return std::sqrt(c);
          case UnaryOp::Abs: return std::abs(c);
        }
        break;
      }
      case Node::Kind::Binary: {
        const double x = eval_node(n->a.get(), env);
        const double y = eval_node(n->b.get(), env);
        double v = 0.0;
        switch (n->bop) {
          case BinaryOp::Add: v = x + y; break;
          case BinaryOp::Sub: v = x - y; break;
          case BinaryOp::Mul: v = x * y; break;
          case BinaryOp::Div:
            if (y == 0.0) eval_fail(n, "division by zero");
            v = x / y;
            break;
          case BinaryOp::Pow:
            if (x == 0.0 && y < 0.0) eval_fail(n, "0 raised to a negative power");
            if (x < 0.0 && y != std::floor(y))
              eval_fail(n, "negative base with non-integer exponent");
            v = std::pow(x, y);
            break;
        }
        if (!std::isfinite(v)) eval_fail(n, "non-finite result");
        return v;
      }
    }
    eval_fail(n, "corrupt node");
  }

  static NodePtr diff_node(const NodePtr& n, std::string_view var) {
    switch (n->kind) {
      case Node::Kind::Constant:
        return make_constant_node(0.0);
      case Node::Kind::Variable:
        return make_constant_node(n->name == var ? 1.0 : 0.0);
      case Node::Kind::Unary: {
        const NodePtr du = diff_node(n->a, var);
        const NodePtr& u = n->a;
        switch (n->uop) {
          case UnaryOp::Neg: return make_unary(UnaryOp::Neg, du);
          case UnaryOp::Sin: return make_binary(BinaryOp::Mul, make_unary(UnaryOp::Cos, u), du);
          case UnaryOp::Cos:
            return make_binary(BinaryOp::Mul,
                               make_unary(UnaryOp::Neg, make_unary(UnaryOp::Sin, u)), du);
          case UnaryOp::Tan:
            return make_binary(
                BinaryOp::Div, du,
                make_binary(BinaryOp::Pow, make_unary(UnaryOp::Cos, u), make_constant_node(2.0)));
          case UnaryOp::Exp:
            return make_binary(BinaryOp::Mul, make_unary(UnaryOp::Exp, u), du);
          case UnaryOp::Ln: return make_binary(BinaryOp::Div, du, u);
          case UnaryOp::Sqrt:
            return make_binary(BinaryOp::Div, du,
                               make_binary(BinaryOp::Mul, make_constant_node(2.0),
                                           make_unary(UnaryOp::Sqrt, u)));
          case UnaryOp::Abs:
            // u/|u| * u'; evaluation reports the 0-point as division by zero
            return make_binary(BinaryOp::Mul,
                               make_binary(BinaryOp::Div, u, make_unary(UnaryOp::Abs, u)), du);
        }
        break;
      }
      case Node::Kind::Binary: {
        const NodePtr& u = n->a;
        const NodePtr& v = n->b;
        switch (n->bop) {
          case BinaryOp::Add:
            return make_binary(BinaryOp::Add, diff_node(u, var), diff_node(v, var));
          case BinaryOp::Sub:
            return make_binary(BinaryOp::Sub, diff_node(u, var), diff_node(v, var));
          case BinaryOp::Mul:
            return make_binary(BinaryOp::Add,
                               make_binary(BinaryOp::Mul, diff_node(u, var), v),
                               make_binary(BinaryOp::Mul, u, diff_node(v, var)));
          case BinaryOp::Div:
            return make_binary(
                BinaryOp::Div,
                make_binary(BinaryOp::Sub, make_binary(BinaryOp::Mul, diff_node(u, var), v),
                            make_binary(BinaryOp::Mul, u, diff_node(v, var))),
                make_binary(BinaryOp::Pow, v, make_constant_node(2.0)));
          case BinaryOp::Pow: {
            if (node_depends_on(v.get(), var)) {
              std::string repr;
              render_node(n.get(), 0, repr);
              throw UnsupportedFormError(
                  "cannot differentiate '" + repr + "': exponent depends on '" +
                  std::string(var) + "'");
            }
            // v * u^(v-1) * u'
            return make_binary(
                BinaryOp::Mul,
                make_binary(BinaryOp::Mul, v,
                            make_binary(BinaryOp::Pow, u,
                                        make_binary(BinaryOp::Sub, v, make_constant_node(1.0)))),
                diff_node(u, var));
          }
        }
        break;
      }
    }
    throw UnsupportedFormError("corrupt node in diff");
  }

  static NodePtr substitute_node(const NodePtr& n, std::string_view var,
                                 const NodePtr& repl) {
    switch (n->kind) {
      case Node::Kind::Constant: return n;
      case Node::Kind::Variable: return n->name == var ? repl : n;
      case Node::Kind::Unary: return make_unary(n->uop, substitute_node(n->a, var, repl));
      case Node::Kind::Binary:
        return make_binary(n->bop, substitute_node(n->a, var, repl),
                           substitute_node(n->b, var, repl));
    }
    return n;
  }

  // shortest decimal that round-trips the value
  static std::string format_constant(double v) {
    char buf[40];
    for (int prec = 15; prec <= 17; ++prec) {
      std::snprintf(buf, sizeof buf, "%.*g", prec, v);
      double back = 0.0;
      std::from_chars(buf, buf + std::strlen(buf), back);
      if (back == v) break;
    }
    return buf;
  }

  // precedence for the printer: add/sub 1, mul/div 2, unary minus 3, pow 4,
  // atoms 5; negative literals print like a unary minus
  static int effective_prec(const Node* n) {
    switch (n->kind) {
      case Node::Kind::Constant: return n->value < 0.0 ? 3 : 5;
      case Node::Kind::Variable: return 5;
      case Node::Kind::Unary: return n->uop == UnaryOp::Neg ? 3 : 5;
      case Node::Kind::Binary:
        switch (n->bop) {
          case BinaryOp::Add:
          case BinaryOp::Sub: return 1;
          case BinaryOp::Mul:
          case BinaryOp::Div: return 2;
          case BinaryOp::Pow: return 4;
        }
    }
    return 5;
  }

  static void render_child(const Node* child, int min_prec, std::string& out) {
    const bool parens = effective_prec(child) < min_prec;
    if (parens) out += '(';
    render_node(child, 0, out);
    if (parens) out += ')';
  }

  static void render_node(const Node* n, int, std::string& out) {
    switch (n->kind) {
      case Node::Kind::Constant:
        out += format_constant(n->value);
        return;
      case Node::Kind::Variable:
        out += n->name;
        return;
      case Node::Kind::Unary:
        if (n->uop == UnaryOp::Neg) {
          out += '-';
          render_child(n->a.get(), 3, out);
          return;
        }
        switch (n->uop) {
          case UnaryOp::Sin: out += "sin"; break;
          case UnaryOp::Cos: out += "cos"; break;
          case UnaryOp::Tan: out += "tan"; break;
          case UnaryOp::Exp: out += "exp"; break;
          case UnaryOp::Ln: out += "ln"; break;
          case UnaryOp::Sqrt: out += "sqrt"; break;
          case UnaryOp::Abs: out += "abs"; break;
          case UnaryOp::Neg: break;
        }
        out += '(';
        render_node(n->a.get(), 0, out);
        out += ')';
        return;
      case Node::Kind::Binary: {
        const int p = effective_prec(n);
        char op = 0;
        int lmin = p, rmin = p;
        switch (n->bop) {
          case BinaryOp::Add: op = '+'; rmin = p; break;
          case BinaryOp::Sub: op = '-'; rmin = p + 1; break;
          case BinaryOp::Mul: op = '*'; break;
          case BinaryOp::Div: op = '/'; rmin = p + 1; break;
          case BinaryOp::Pow:
            op = '^';
            lmin = p + 1;
            rmin = 3;  // exponent position admits a unary minus unparenthesized
            break;
        }
        render_child(n->a.get(), lmin, out);
        out += op;
        render_child(n->b.get(), rmin, out);
        return;
      }
    }
  }

  NodePtr root_;

  friend class Parser;
};

inline Expression sin(Expression e) { return Expression::unary(UnaryOp::Sin, std::move(e)); }
inline Expression cos(Expression e) { return Expression::unary(UnaryOp::Cos, std::move(e)); }
inline Expression tan(Expression e) { return Expression::unary(UnaryOp::Tan, std::move(e)); }
inline Expression exp(Expression e) { return Expression::unary(UnaryOp::Exp, std::move(e)); }
inline Expression ln(Expression e) { return Expression::unary(UnaryOp::Ln, std::move(e)); }
inline Expression sqrt(Expression e) { return Expression::unary(UnaryOp::Sqrt, std::move(e)); }
inline Expression abs(Expression e) { return Expression::unary(UnaryOp::Abs, std::move(e)); }
inline Expression pow(Expression base, Expression exponent) {
  return Expression::binary(BinaryOp::Pow, std::move(base), std::move(exponent));
}
inline Expression pow(Expression base, double exponent) {
  return pow(std::move(base), Expression::constant(exponent));
}

// Recursive-descent parser for the expression grammar:
//   expr    := term (('+'|'-') term)*
//   term    := unary (('*'|'/') unary)*
//   unary   := '-' unary | power
//   power   := primary ('^' unary)?        (right-associative)
//   primary := number | name '(' expr ')' | variable | '(' expr ')'
// Whitespace is insignificant.  `variables` lists the admissible symbols.
class Parser {
 public:
  Parser(std::string_view text, std::span<const std::string_view> variables)
      : s_(text), vars_(variables) {}

  Expression run() {
    Expression e = parse_expr();
    skip_ws();
    if (pos_ != s_.size()) throw ParseError(pos_, "end of input");
    return e;
  }

 private:
  void skip_ws() {
    while (pos_ < s_.size() && (s_[pos_] == ' ' || s_[pos_] == '\t' || s_[pos_] == '\n' ||
                                s_[pos_] == '\r'))
      ++pos_;
  }

  bool peek(char c) {
    skip_ws();
    return pos_ < s_.size() && s_[pos_] == c;
  }

  bool accept(char c) {
    if (peek(c)) {
      ++pos_;
      return true;
    }
    return false;
  }

  void expect(char c, const char* what) {
    if (!accept(c)) throw ParseError(pos_, what);
  }

  Expression parse_expr() {
    Expression e = parse_term();
    for (;;) {
      if (accept('+'))
        e = e + parse_term();
      else if (accept('-'))
        e = e - parse_term();
      else
        return e;
    }
  }

  Expression parse_term() {
    Expression e = parse_unary();
    for (;;) {
      if (accept('*'))
        e = e * parse_unary();
      else if (accept('/'))
        e = e / parse_unary();
      else
        return e;
    }
  }

  Expression parse_unary() {
    if (accept('-')) return -parse_unary();
    return parse_power();
  }

  Expression parse_power() {
    Expression base = parse_primary();
    if (accept('^')) return pow(std::move(base), parse_unary());
    return base;
  }

  Expression parse_primary() {
    skip_ws();
    if (pos_ >= s_.size())
      throw ParseError(pos_, "a number, variable, function call, or '('");
    const char c = s_[pos_];
    if (c == '(') {
      ++pos_;
      Expression e = parse_expr();
      expect(')', "')'");
      return e;
    }
    if ((c >= '0' && c <= '9') || c == '.') return parse_number();
    if ((c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_')
      return parse_identifier();
    throw ParseError(pos_, "a number, variable, function call, or '('");
  }

  Expression parse_number() {
    double v = 0.0;
    const char* begin = s_.data() + pos_;
    const char* end = s_.data() + s_.size();
    auto [ptr, ec] = std::from_chars(begin, end, v);
    if (ec != std::errc{}) throw ParseError(pos_, "a numeric literal");
    pos_ += static_cast<std::size_t>(ptr - begin);
    return Expression::constant(v);
  }

  Expression parse_identifier() {
    const std::size_t start = pos_;
    while (pos_ < s_.size() &&
           ((s_[pos_] >= 'a' && s_[pos_] <= 'z') || (s_[pos_] >= 'A' && s_[pos_] <= 'Z') ||
            (s_[pos_] >= '0' && s_[pos_] <= '9') || s_[pos_] == '_'))
      ++pos_;
    const std::string_view name = s_.substr(start, pos_ - start);

    static constexpr std::pair<std::string_view, UnaryOp> kFunctions[] = {
        {"sin", UnaryOp::Sin}, {"cos", UnaryOp::Cos},   {"tan", UnaryOp::Tan},
        {"exp", UnaryOp::Exp}, {"ln", UnaryOp::Ln},     {"sqrt", UnaryOp::Sqrt},
        {"abs", UnaryOp::Abs}};
    for (const auto& [fname, op] : kFunctions) {
      if (name == fname) {
        expect('(', "'(' after function name");
        Expression arg = parse_expr();
        expect(')', "')'");
        return Expression::unary(op, std::move(arg));
      }
    }
    for (std::string_view v : vars_)
      if (name == v) return Expression::variable(std::string(name));
    throw ParseError(start, "a known function or variable (got '" + std::string(name) + "')");
  }

  std::string_view s_;
  std::size_t pos_ = 0;
  std::span<const std::string_view> vars_;
};

inline Expression parse(std::string_view text,
                        std::span<const std::string_view> variables) {
  return Parser(text, variables).run();
}

inline Expression parse(std::string_view text) {
  static constexpr std::string_view kDefaultVars[] = {"t"};
  return parse(text, kDefaultVars);
}

}  // namespace localfrac::expr
