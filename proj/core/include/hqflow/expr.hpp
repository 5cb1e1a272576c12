#pragma once

// Scalar expressions for f(x,u), phi(x,u) and u0(x) in configuration files.
//
// Grammar (whitespace is ignored; "^" is right-associative and binds tighter
// than unary minus, so -2^2 = -4):
//
//   expr    := term (('+' | '-') term)*
//   term    := unary (('*' | '/') unary)*
//   unary   := ('-' | '+') unary | power
//   power   := primary ('^' unary)?
//   primary := number | identifier | identifier '(' expr ')' | '(' expr ')'
//
// Variables: x1, x2, u, t. Constants: pi, e. Functions: sin cos exp log
// sqrt abs tanh. U+2212 is accepted as a minus sign.

#include <cstddef>
#include <memory>
#include <stdexcept>
#include <string>
#include <string_view>

#include "hqflow/errors.hpp"

namespace hqflow {

/// Which variables an expression may reference.
enum class ExprSlot {
  initial,  ///< u0: x1, x2
  data,     ///< f, phi: x1, x2, u
  free,     ///< anything
};

enum class Var { x1, x2, u, t };

struct ExprEnv {
  double x1 = 0.0;
  double x2 = 0.0;
  double u = 0.0;
  double t = 0.0;
};

/// Syntax error, unknown identifier or illegal variable. offset() is the
/// 1-based byte position of the offending token (one past the end for
/// premature end of input).
class ParseError : public ArgumentError {
 public:
  ParseError(const std::string& what, std::size_t offset)
      : ArgumentError(what + " at offset " + std::to_string(offset)), offset_(offset) {}
  [[nodiscard]] std::size_t offset() const noexcept { return offset_; }

 private:
  std::size_t offset_;
};

/// log/sqrt of a negative, division by zero, or a non-finite result.
class EvalDomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

struct ExprNode;

/// Immutable parsed expression; cheap to copy.
class Expr {
 public:
  Expr() = default;
  explicit Expr(std::shared_ptr<const ExprNode> root) : root_(std::move(root)) {}

  [[nodiscard]] bool empty() const noexcept { return root_ == nullptr; }
  [[nodiscard]] const ExprNode* root() const noexcept { return root_.get(); }

  [[nodiscard]] double eval(const ExprEnv& env) const;
  [[nodiscard]] bool references(Var v) const;
  /// Fully parenthesized form; reparses to a structurally identical tree.
  [[nodiscard]] std::string to_string() const;

 private:
  std::shared_ptr<const ExprNode> root_;
};

[[nodiscard]] Expr parse_expr(std::string_view src, ExprSlot slot = ExprSlot::free);

[[nodiscard]] inline double eval(const Expr& e, const ExprEnv& env) { return e.eval(env); }

/// Central difference in u with step h.
[[nodiscard]] double partial_u(const Expr& e, ExprEnv env, double h = 1e-6);

/// Same tree shape, operators, variables and bit-identical constants.
[[nodiscard]] bool structurally_equal(const Expr& a, const Expr& b);

}  // namespace hqflow
