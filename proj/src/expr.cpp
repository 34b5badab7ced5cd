#include "obstructa/expr.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>

namespace obstructa {

namespace {

enum class Kind {
  Constant,
  Variable,
  Sum,
  Difference,
  Product,
  Quotient,
  Power,
  Neg,
  Sin,
  Cos,
  Sqrt,
};

double ipow(double base, int n) {
  if (n < 0) {
    if (base == 0.0) throw EvalError("zero raised to a negative power");
    return 1.0 / ipow(base, -n);
  }
  double acc = 1.0, b = base;
  unsigned e = static_cast<unsigned>(n);
  while (e != 0) {
    if (e & 1u) acc *= b;
    b *= b;
    e >>= 1;
  }
  return acc;
}

std::string format_double(double v) {
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

}  // namespace

struct ScalarExpr::Node {
  Kind kind;
  double value = 0.0;        // Constant
  std::string name;          // Variable
  std::shared_ptr<const Node> a, b;
  int exponent = 0;          // Power
};

namespace {

using NodePtr = std::shared_ptr<const ScalarExpr::Node>;
using MutNode = std::shared_ptr<ScalarExpr::Node>;

MutNode make_node(Kind k) {
  auto n = std::make_shared<ScalarExpr::Node>();
  n->kind = k;
  return n;
}

NodePtr make_constant(double v) {
  auto n = make_node(Kind::Constant);
  n->value = v;
  return n;
}

bool is_const(const NodePtr& n, double v) {
  return n->kind == Kind::Constant && n->value == v;
}

NodePtr make_sum(NodePtr a, NodePtr b) {
  if (a->kind == Kind::Constant && b->kind == Kind::Constant)
    return make_constant(a->value + b->value);
  if (is_const(a, 0.0)) return b;
  if (is_const(b, 0.0)) return a;
  auto n = make_node(Kind::Sum);
  n->a = std::move(a);
  n->b = std::move(b);
  return n;
}

NodePtr make_neg(NodePtr a);

NodePtr make_difference(NodePtr a, NodePtr b) {
  if (a->kind == Kind::Constant && b->kind == Kind::Constant)
    return make_constant(a->value - b->value);
  if (is_const(b, 0.0)) return a;
  if (is_const(a, 0.0)) return make_neg(std::move(b));
  auto n = make_node(Kind::Difference);
  n->a = std::move(a);
  n->b = std::move(b);
  return n;
}

NodePtr make_product(NodePtr a, NodePtr b) {
  if (a->kind == Kind::Constant && b->kind == Kind::Constant)
    return make_constant(a->value * b->value);
  if (is_const(a, 0.0) || is_const(b, 0.0)) return make_constant(0.0);
  if (is_const(a, 1.0)) return b;
  if (is_const(b, 1.0)) return a;
  auto n = make_node(Kind::Product);
  n->a = std::move(a);
  n->b = std::move(b);
  return n;
}

NodePtr make_quotient(NodePtr a, NodePtr b) {
  if (a->kind == Kind::Constant && b->kind == Kind::Constant &&
      b->value != 0.0)
    return make_constant(a->value / b->value);
  if (is_const(b, 1.0)) return a;
  auto n = make_node(Kind::Quotient);
  n->a = std::move(a);
  n->b = std::move(b);
  return n;
}

NodePtr make_neg(NodePtr a) {
  if (a->kind == Kind::Constant) return make_constant(-a->value);
  if (a->kind == Kind::Neg) return a->a;
  auto n = make_node(Kind::Neg);
  n->a = std::move(a);
  return n;
}

NodePtr make_power(NodePtr a, int e) {
  if (e == 0) return make_constant(1.0);
  if (e == 1) return a;
  if (a->kind == Kind::Constant) return make_constant(ipow(a->value, e));
  auto n = make_node(Kind::Power);
  n->a = std::move(a);
  n->exponent = e;
  return n;
}

NodePtr make_fn(Kind k, NodePtr a) {
  if (a->kind == Kind::Constant) {
    switch (k) {
      case Kind::Sin:
        return make_constant(std::sin(a->value));
      case Kind::Cos:
        return make_constant(std::cos(a->value));
      case Kind::Sqrt:
        if (a->value < 0.0)
          throw EvalError("sqrt of negative constant");
        return make_constant(std::sqrt(a->value));
      default:
        break;
    }
  }
  auto n = make_node(k);
  n->a = std::move(a);
  return n;
}

double eval_node(const ScalarExpr::Node& n, const VarAssignment& a) {
  switch (n.kind) {
    case Kind::Constant:
      return n.value;
    case Kind::Variable: {
      const double* v = a.find(n.name);
      if (!v) throw EvalError("unbound variable: " + n.name);
      return *v;
    }
    case Kind::Sum:
      return eval_node(*n.a, a) + eval_node(*n.b, a);
    case Kind::Difference:
      return eval_node(*n.a, a) - eval_node(*n.b, a);
    case Kind::Product:
      return eval_node(*n.a, a) * eval_node(*n.b, a);
    case Kind::Quotient: {
      double den = eval_node(*n.b, a);
      if (den == 0.0) throw EvalError("division by zero");
      return eval_node(*n.a, a) / den;
    }
    case Kind::Power:
      return ipow(eval_node(*n.a, a), n.exponent);
    case Kind::Neg:
      return -eval_node(*n.a, a);
    case Kind::Sin:
      return std::sin(eval_node(*n.a, a));
    case Kind::Cos:
      return std::cos(eval_node(*n.a, a));
    case Kind::Sqrt: {
      double v = eval_node(*n.a, a);
      if (v < 0.0) throw EvalError("sqrt of negative value");
      return std::sqrt(v);
    }
  }
  throw EvalError("corrupt expression node");
}

NodePtr diff_node(const NodePtr& n, std::string_view var) {
  switch (n->kind) {
    case Kind::Constant:
      return make_constant(0.0);
    case Kind::Variable:
      return make_constant(n->name == var ? 1.0 : 0.0);
    case Kind::Sum:
      return make_sum(diff_node(n->a, var), diff_node(n->b, var));
    case Kind::Difference:
      return make_difference(diff_node(n->a, var), diff_node(n->b, var));
    case Kind::Product:
      return make_sum(make_product(diff_node(n->a, var), n->b),
                      make_product(n->a, diff_node(n->b, var)));
    case Kind::Quotient:
      // (u'v - uv') / v^2
      return make_quotient(
          make_difference(make_product(diff_node(n->a, var), n->b),
                          make_product(n->a, diff_node(n->b, var))),
          make_power(n->b, 2));
    case Kind::Power:
      // n * u^(n-1) * u'
      return make_product(
          make_product(make_constant(static_cast<double>(n->exponent)),
                       make_power(n->a, n->exponent - 1)),
          diff_node(n->a, var));
    case Kind::Neg:
      return make_neg(diff_node(n->a, var));
    case Kind::Sin:
      return make_product(make_fn(Kind::Cos, n->a), diff_node(n->a, var));
    case Kind::Cos:
      return make_neg(
          make_product(make_fn(Kind::Sin, n->a), diff_node(n->a, var)));
    case Kind::Sqrt:
      // u' / (2*sqrt(u))
      return make_quotient(
          diff_node(n->a, var),
          make_product(make_constant(2.0), make_fn(Kind::Sqrt, n->a)));
  }
  throw EvalError("corrupt expression node");
}

void collect_vars(const ScalarExpr::Node& n, std::set<std::string>& out) {
  switch (n.kind) {
    case Kind::Variable:
      out.insert(n.name);
      return;
    case Kind::Constant:
      return;
    default:
      if (n.a) collect_vars(*n.a, out);
      if (n.b) collect_vars(*n.b, out);
  }
}

// Precedence levels for printing: sum < product < unary < power < atom.
enum Prec { kAdd = 1, kMul = 2, kUnary = 3, kPow = 4, kAtom = 5 };

void print_node(const ScalarExpr::Node& n, std::string& out, int parent_prec);

void print_child(const ScalarExpr::Node& n, std::string& out, int child_prec,
                 int required) {
  if (child_prec < required) {
    out += '(';
    print_node(n, out, kAdd);
    out += ')';
  } else {
    print_node(n, out, required);
  }
}

int node_prec(const ScalarExpr::Node& n) {
  switch (n.kind) {
    case Kind::Sum:
    case Kind::Difference:
      return kAdd;
    case Kind::Product:
    case Kind::Quotient:
      return kMul;
    case Kind::Neg:
      return kUnary;
    case Kind::Power:
      return kPow;
    case Kind::Constant:
      return n.value < 0.0 ? kUnary : kAtom;
    default:
      return kAtom;
  }
}

void print_node(const ScalarExpr::Node& n, std::string& out,
                int /*parent_prec*/) {
  switch (n.kind) {
    case Kind::Constant:
      out += format_double(n.value);
      return;
    case Kind::Variable:
      out += n.name;
      return;
    case Kind::Sum:
      print_child(*n.a, out, node_prec(*n.a), kAdd);
      out += " + ";
      print_child(*n.b, out, node_prec(*n.b), kAdd);
      return;
    case Kind::Difference:
      print_child(*n.a, out, node_prec(*n.a), kAdd);
      out += " - ";
      // right operand of '-' needs parens when it is itself a sum/difference
      print_child(*n.b, out, node_prec(*n.b), kMul);
      return;
    case Kind::Product:
      print_child(*n.a, out, node_prec(*n.a), kMul);
      out += "*";
      print_child(*n.b, out, node_prec(*n.b), kMul);
      return;
    case Kind::Quotient:
      print_child(*n.a, out, node_prec(*n.a), kMul);
      out += "/";
      // denominator binds tighter: a/(b*c) must not print as a/b*c
      print_child(*n.b, out, node_prec(*n.b), kUnary);
      return;
    case Kind::Neg:
      out += "-";
      print_child(*n.a, out, node_prec(*n.a), kUnary);
      return;
    case Kind::Power: {
      print_child(*n.a, out, node_prec(*n.a), kAtom);
      out += "^";
      char buf[16];
      std::snprintf(buf, sizeof(buf), "%d", n.exponent);
      out += buf;
      return;
    }
    case Kind::Sin:
      out += "sin(";
      print_node(*n.a, out, kAdd);
      out += ')';
      return;
    case Kind::Cos:
      out += "cos(";
      print_node(*n.a, out, kAdd);
      out += ')';
      return;
    case Kind::Sqrt:
      out += "sqrt(";
      print_node(*n.a, out, kAdd);
      out += ')';
      return;
  }
}

// --- parser -----------------------------------------------------------

class Parser {
 public:
  explicit Parser(std::string_view text) : text_(text) {}

  NodePtr parse() {
    NodePtr e = parse_sum();
    skip_ws();
    if (pos_ != text_.size())
      throw ParseError("unexpected trailing input", pos_);
    return e;
  }

 private:
  std::string_view text_;
  std::size_t pos_ = 0;

  void skip_ws() {
    while (pos_ < text_.size() &&
           std::isspace(static_cast<unsigned char>(text_[pos_])))
      ++pos_;
  }

  bool peek(char c) {
    skip_ws();
    return pos_ < text_.size() && text_[pos_] == c;
  }

  bool accept(char c) {
    if (peek(c)) {
      ++pos_;
      return true;
    }
    return false;
  }

  void expect(char c) {
    if (!accept(c))
      throw ParseError(std::string("expected '") + c + "'", pos_);
  }

  NodePtr parse_sum() {
    NodePtr left = parse_term();
    for (;;) {
      if (accept('+'))
        left = make_sum(std::move(left), parse_term());
      else if (accept('-'))
        left = make_difference(std::move(left), parse_term());
      else
        return left;
    }
  }

  NodePtr parse_term() {
    NodePtr left = parse_factor();
    for (;;) {
      if (accept('*'))
        left = make_product(std::move(left), parse_factor());
      else if (accept('/'))
        left = make_quotient(std::move(left), parse_factor());
      else
        return left;
    }
  }

  NodePtr parse_factor() {
    if (accept('-')) return make_neg(parse_factor());
    return parse_power();
  }

  NodePtr parse_power() {
    NodePtr base = parse_atom();
    if (accept('^')) return make_power(std::move(base), parse_int());
    return base;
  }

  int parse_int() {
    skip_ws();
    std::size_t start = pos_;
    bool neg = false;
    if (pos_ < text_.size() && text_[pos_] == '-') {
      neg = true;
      ++pos_;
    }
    if (pos_ >= text_.size() ||
        !std::isdigit(static_cast<unsigned char>(text_[pos_])))
      throw ParseError("expected integer exponent", pos_);
    long v = 0;
    while (pos_ < text_.size() &&
           std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
      v = v * 10 + (text_[pos_] - '0');
      if (v > 1000000) throw ParseError("exponent too large", start);
      ++pos_;
    }
    return static_cast<int>(neg ? -v : v);
  }

  NodePtr parse_atom() {
    skip_ws();
    if (pos_ >= text_.size())
      throw ParseError("unexpected end of input", pos_);
    char c = text_[pos_];
    if (c == '(') {
      ++pos_;
      NodePtr e = parse_sum();
      expect(')');
      return e;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.')
      return parse_number();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_')
      return parse_identifier();
    throw ParseError(std::string("unexpected character '") + c + "'", pos_);
  }

  NodePtr parse_number() {
    std::size_t start = pos_;
    while (pos_ < text_.size() &&
           (std::isdigit(static_cast<unsigned char>(text_[pos_])) ||
            text_[pos_] == '.'))
      ++pos_;
    // exponent part of a literal, e.g. 1e-3
    if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
      std::size_t mark = pos_;
      ++pos_;
      if (pos_ < text_.size() && (text_[pos_] == '+' || text_[pos_] == '-'))
        ++pos_;
      if (pos_ < text_.size() &&
          std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
        while (pos_ < text_.size() &&
               std::isdigit(static_cast<unsigned char>(text_[pos_])))
          ++pos_;
      } else {
        pos_ = mark;  // 'e' was the start of an identifier, not an exponent
      }
    }
    double v = 0.0;
    auto res = std::from_chars(text_.data() + start, text_.data() + pos_, v);
    if (res.ec != std::errc() || res.ptr != text_.data() + pos_)
      throw ParseError("malformed numeric literal", start);
    return make_constant(v);
  }

  NodePtr parse_identifier() {
    std::size_t start = pos_;
    while (pos_ < text_.size() &&
           (std::isalnum(static_cast<unsigned char>(text_[pos_])) ||
            text_[pos_] == '_'))
      ++pos_;
    std::string name(text_.substr(start, pos_ - start));
    if (peek('(')) {
      Kind k;
      if (name == "sin")
        k = Kind::Sin;
      else if (name == "cos")
        k = Kind::Cos;
      else if (name == "sqrt")
        k = Kind::Sqrt;
      else
        throw ParseError("unknown function: " + name, start);
      expect('(');
      NodePtr arg = parse_sum();
      expect(')');
      return make_fn(k, std::move(arg));
    }
    auto n = make_node(Kind::Variable);
    n->name = std::move(name);
    return n;
  }
};

}  // namespace

// --- VarAssignment ----------------------------------------------------

void VarAssignment::set(std::string name, double value) {
  for (auto& e : entries_) {
    if (e.first == name) {
      e.second = value;
      return;
    }
  }
  entries_.emplace_back(std::move(name), value);
}

const double* VarAssignment::find(std::string_view name) const {
  for (const auto& e : entries_)
    if (e.first == name) return &e.second;
  return nullptr;
}

// --- ScalarExpr -------------------------------------------------------

ScalarExpr::ScalarExpr() : node_(make_constant(0.0)) {}

ScalarExpr ScalarExpr::constant(double value) {
  return ScalarExpr(make_constant(value));
}

ScalarExpr ScalarExpr::variable(std::string name) {
  auto n = make_node(Kind::Variable);
  n->name = std::move(name);
  return ScalarExpr(std::move(n));
}

ScalarExpr operator+(const ScalarExpr& a, const ScalarExpr& b) {
  return ScalarExpr(make_sum(a.node_, b.node_));
}
ScalarExpr operator-(const ScalarExpr& a, const ScalarExpr& b) {
  return ScalarExpr(make_difference(a.node_, b.node_));
}
ScalarExpr operator*(const ScalarExpr& a, const ScalarExpr& b) {
  return ScalarExpr(make_product(a.node_, b.node_));
}
ScalarExpr operator/(const ScalarExpr& a, const ScalarExpr& b) {
  return ScalarExpr(make_quotient(a.node_, b.node_));
}
ScalarExpr operator-(const ScalarExpr& a) {
  return ScalarExpr(make_neg(a.node_));
}

ScalarExpr ScalarExpr::pow(int exponent) const {
  return ScalarExpr(make_power(node_, exponent));
}

ScalarExpr sin(const ScalarExpr& e) {
  return ScalarExpr(make_fn(Kind::Sin, e.node_));
}
ScalarExpr cos(const ScalarExpr& e) {
  return ScalarExpr(make_fn(Kind::Cos, e.node_));
}
ScalarExpr sqrt(const ScalarExpr& e) {
  return ScalarExpr(make_fn(Kind::Sqrt, e.node_));
}

double ScalarExpr::eval(const VarAssignment& a) const {
  return eval_node(*node_, a);
}

ScalarExpr ScalarExpr::derivative(std::string_view var) const {
  return ScalarExpr(diff_node(node_, var));
}

namespace {
NodePtr substitute_impl(const NodePtr& n,
                        const std::map<std::string, ScalarExpr>& repl,
                        const std::map<std::string, NodePtr>& nodes) {
  switch (n->kind) {
    case Kind::Constant:
      return n;
    case Kind::Variable: {
      auto it = nodes.find(n->name);
      return it != nodes.end() ? it->second : n;
    }
    case Kind::Sum:
      return make_sum(substitute_impl(n->a, repl, nodes),
                      substitute_impl(n->b, repl, nodes));
    case Kind::Difference:
      return make_difference(substitute_impl(n->a, repl, nodes),
                             substitute_impl(n->b, repl, nodes));
    case Kind::Product:
      return make_product(substitute_impl(n->a, repl, nodes),
                          substitute_impl(n->b, repl, nodes));
    case Kind::Quotient:
      return make_quotient(substitute_impl(n->a, repl, nodes),
                           substitute_impl(n->b, repl, nodes));
    case Kind::Power:
      return make_power(substitute_impl(n->a, repl, nodes), n->exponent);
    case Kind::Neg:
      return make_neg(substitute_impl(n->a, repl, nodes));
    case Kind::Sin:
      return make_fn(Kind::Sin, substitute_impl(n->a, repl, nodes));
    case Kind::Cos:
      return make_fn(Kind::Cos, substitute_impl(n->a, repl, nodes));
    case Kind::Sqrt:
      return make_fn(Kind::Sqrt, substitute_impl(n->a, repl, nodes));
  }
  throw EvalError("corrupt expression node");
}
}  // namespace

ScalarExpr ScalarExpr::substitute(
    const std::map<std::string, ScalarExpr>& repl) const {
  std::map<std::string, NodePtr> nodes;
  for (const auto& kv : repl) nodes.emplace(kv.first, kv.second.node_);
  return ScalarExpr(substitute_impl(node_, repl, nodes));
}

std::set<std::string> ScalarExpr::free_variables() const {
  std::set<std::string> out;
  collect_vars(*node_, out);
  return out;
}

std::string ScalarExpr::str() const {
  std::string out;
  print_node(*node_, out, kAdd);
  return out;
}

bool ScalarExpr::is_constant() const {
  return node_->kind == Kind::Constant;
}

bool ScalarExpr::is_zero() const {
  return node_->kind == Kind::Constant && node_->value == 0.0;
}

ScalarExpr parse_expr(std::string_view text) {
  return ScalarExpr(Parser(text).parse());
}

std::vector<ScalarExpr> parse_exprs(const std::vector<std::string>& texts) {
  std::vector<ScalarExpr> out;
  out.reserve(texts.size());
  for (const auto& t : texts) out.push_back(parse_expr(t));
  return out;
}

}  // namespace obstructa
