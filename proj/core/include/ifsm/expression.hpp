#pragma once

// Small arithmetic-expression language for potentials, densities and
// non-affine maps.
//
//   expr    := term (('+' | '-') term)*
//   term    := unary (('*' | '/') unary)*
//   unary   := '-' unary | power
//   power   := primary ('^' unary)?          right associative
//   primary := number | 'x' | 'y' | 'pi' | 'e'
//            | func '(' expr ')' | '(' expr ')'
//   func    := exp | ln | sin | cos | abs
//
// Precedence is therefore ^ > unary minus > * / > + -, so "-x^2" is -(x^2)
// and "2^-1" is 0.5.

#include <memory>
#include <string>
#include <string_view>

namespace ifsm {

class Expression {
 public:
  enum class Kind { Constant, VarX, VarY, Add, Sub, Mul, Div, Pow, Neg, Exp, Ln, Sin, Cos, Abs };

  struct Node;

  /// Parses `text`. Throws Error{SyntaxError} with the byte offset, or
  /// Error{UnknownIdentifier}.
  static Expression parse(std::string_view text);
  static Expression constant(double value);

  /// Evaluates at (x, y). Throws Error{DomainError} for ln of a non-positive
  /// argument, division by zero, or a non-finite result.
  double evaluate(double x, double y = 0.0) const;

  /// Fully parenthesized text that parses back to an equivalent tree.
  std::string to_string() const;

  /// True when the expression mentions `y`.
  bool uses_y() const;

  const Node& root() const { return *root_; }

 private:
  explicit Expression(std::shared_ptr<const Node> root) : root_(std::move(root)) {}
  std::shared_ptr<const Node> root_;
};

struct Expression::Node {
  Kind kind = Kind::Constant;
  double value = 0.0;
  std::shared_ptr<const Node> lhs;
  std::shared_ptr<const Node> rhs;
};

/// Structural equality of two trees (constants compared exactly).
bool equivalent(const Expression& a, const Expression& b);

}  // namespace ifsm
