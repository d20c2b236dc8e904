#pragma once

#include <memory>
#include <span>
#include <string>
#include <string_view>

namespace plevy {

namespace expr_detail {
struct Node;
}

/// A parsed scalar expression over the variables x (and y in 2D).
///
/// Grammar, loosest to tightest binding:
///   sum     := product (('+' | '-') product)*
///   product := unary (('*' | '/') unary)*
///   unary   := '-' unary | power
///   power   := primary ('^' unary)?          (right associative)
///   primary := number | 'pi' | 'x' | 'y' | func '(' args ')' | '(' sum ')'
/// with func one of sin cos exp abs sqrt min max.
///
/// Expressions are immutable and cheap to copy. Symbolic derivatives are
/// exact for the whole grammar (abs/min/max are differentiated piecewise).
class Expression {
 public:
  /// Parses `text`; throws Error(Parse) with the byte offset on failure.
  static Expression parse(std::string_view text);
  static Expression constant(double value);

  /// Evaluates at the point `coords` (x first, then y). Throws
  /// Error(Evaluation) on division by zero or a non-finite result.
  double evaluate(std::span<const double> coords) const;
  double operator()(double x) const;
  double operator()(double x, double y) const;

  /// d/d(var) where var = 0 for x and 1 for y.
  Expression derivative(int var) const;

  /// Number of spatial variables referenced (0, 1 or 2).
  int arity() const;

  const std::string& source() const { return source_; }

 private:
  explicit Expression(std::shared_ptr<const expr_detail::Node> root, std::string source);
  std::shared_ptr<const expr_detail::Node> root_;
  std::string source_;
};

}  // namespace plevy
