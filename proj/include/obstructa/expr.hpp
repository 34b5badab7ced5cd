#ifndef OBSTRUCTA_EXPR_HPP
#define OBSTRUCTA_EXPR_HPP

#include <initializer_list>
#include <map>
#include <memory>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace obstructa {

/// Evaluation failure: unbound variable, division by zero, sqrt of a
/// negative number, or zero raised to a negative power.
class EvalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Parse failure, with the byte offset of the offending token.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, std::size_t position)
      : std::runtime_error(what), position_(position) {}
  std::size_t position() const { return position_; }

 private:
  std::size_t position_;
};

/// Variable bindings for evaluation. Stored flat; expressions here have a
/// handful of variables, so linear scan beats any associative container.
class VarAssignment {
 public:
  VarAssignment() = default;
  VarAssignment(std::initializer_list<std::pair<std::string, double>> init) {
    for (auto& kv : init) set(kv.first, kv.second);
  }

  void set(std::string name, double value);
  const double* find(std::string_view name) const;
  std::size_t size() const { return entries_.size(); }

 private:
  std::vector<std::pair<std::string, double>> entries_;
};

/// Immutable scalar expression tree over named variables.
///
/// Node kinds: constants, variables, +, -, *, /, integer powers, unary
/// minus, sin, cos, sqrt. Construction folds constant subtrees and elides
/// additive/multiplicative identities, nothing more; equivalence of
/// expressions is always checked by evaluation, never by shape.
class ScalarExpr {
 public:
  struct Node;  // defined in expr.cpp; opaque to callers

  /// The zero constant.
  ScalarExpr();

  static ScalarExpr constant(double value);
  static ScalarExpr variable(std::string name);

  friend ScalarExpr operator+(const ScalarExpr&, const ScalarExpr&);
  friend ScalarExpr operator-(const ScalarExpr&, const ScalarExpr&);
  friend ScalarExpr operator*(const ScalarExpr&, const ScalarExpr&);
  friend ScalarExpr operator/(const ScalarExpr&, const ScalarExpr&);
  friend ScalarExpr operator-(const ScalarExpr&);

  /// Integer power; fractional powers go through sqrt().
  ScalarExpr pow(int exponent) const;

  double eval(const VarAssignment& a) const;

  /// Exact symbolic partial derivative with respect to `var`.
  ScalarExpr derivative(std::string_view var) const;

  /// Replace variables by expressions (used to close control loops and to
  /// restrict fields to parametrized curves).
  ScalarExpr substitute(const std::map<std::string, ScalarExpr>& repl) const;

  std::set<std::string> free_variables() const;

  /// Render to text; parse_expr(str()) evaluates identically.
  std::string str() const;

  bool is_constant() const;
  bool is_zero() const;

 private:
  explicit ScalarExpr(std::shared_ptr<const Node> node)
      : node_(std::move(node)) {}
  std::shared_ptr<const Node> node_;

  friend ScalarExpr sin(const ScalarExpr&);
  friend ScalarExpr cos(const ScalarExpr&);
  friend ScalarExpr sqrt(const ScalarExpr&);
  friend ScalarExpr parse_expr(std::string_view);
};

ScalarExpr sin(const ScalarExpr& e);
ScalarExpr cos(const ScalarExpr& e);
ScalarExpr sqrt(const ScalarExpr& e);

/// Parse an expression. Grammar (documented in docs/formats.md):
/// identifiers [a-zA-Z_][a-zA-Z0-9_]*, numeric literals, + - * / ^ with
/// '^' binding tightest (integer exponents only), then '*' '/', then
/// '+' '-'; unary minus; functions sin, cos, sqrt; parentheses.
ScalarExpr parse_expr(std::string_view text);

/// Convenience: parse several expressions at once.
std::vector<ScalarExpr> parse_exprs(const std::vector<std::string>& texts);

}  // namespace obstructa

#endif
