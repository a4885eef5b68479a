#pragma once

#include <memory>
#include <span>
#include <string>
#include <string_view>

namespace pxmp {

/// A parsed scalar arithmetic expression in up to two named variables.
///
/// Grammar (EBNF):
///   expr   := term {("+"|"-") term}
///   term   := factor {("*"|"/") factor}
///   factor := ["-"] power
///   power  := atom ["^" factor]
///   atom   := number | ident | ident "(" expr {"," expr} ")" | "(" expr ")"
///
/// `^` is right-associative and binds tighter than unary minus.
/// Built-in calls: sin, cos, exp, log, abs (unary), min, max (binary).
///
/// Expressions are immutable after parsing and cheap to copy; evaluation is a
/// pure function of the inputs and may run concurrently from many threads.
class Expr {
 public:
  Expr() = default;

  /// Parse over the default variables {x, y}.
  static Expr parse(std::string_view src);
  /// Parse over a caller-chosen variable list (slot 0 binds the first eval
  /// argument, slot 1 the second). At most two variables.
  static Expr parse(std::string_view src, std::span<const std::string_view> variables);
  static Expr constant(double value);

  /// Evaluate at (x, y). Division by zero, log of a non-positive value, and
  /// non-finite results raise DomainError instead of returning NaN/inf.
  double eval(double x, double y = 0.0) const;
  double operator()(double x, double y = 0.0) const { return eval(x, y); }

  /// Parseable text form; parse(str()) evaluates bit-for-bit identically.
  std::string str() const;

  bool empty() const { return root_ == nullptr; }

  struct Node;  // AST node; opaque outside the implementation

 private:
  explicit Expr(std::shared_ptr<const Node> root) : root_(std::move(root)) {}
  std::shared_ptr<const Node> root_;
};

}  // namespace pxmp
