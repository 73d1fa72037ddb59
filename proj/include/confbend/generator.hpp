#pragma once

#include <memory>
#include <span>
#include <string>
#include <string_view>

namespace confbend {

/// Closed-form scalar function of grid coordinates (x0, x1, ...).
///
/// Built from constants, coordinates, +, -, *, integer powers, sin, cos and
/// exp. Supports exact differentiation, so fields sampled from an Expr can be
/// resampled on finer grids and compared against analytic derivatives.
class Expr {
 public:
  struct Node;

  Expr();  // the constant 0
  Expr(double value);  // NOLINT(google-explicit-constructor)

  static Expr coord(int axis);

  double eval(std::span<const double> x) const;
  Expr diff(int axis) const;

  bool is_constant() const;
  /// Constant value; only meaningful when is_constant().
  double constant_value() const;

  std::string str() const;

  /// Parses e.g. "0.1*sin(x0)*cos(2*x1) + exp(-x2^2)".
  /// Throws std::invalid_argument on malformed input.
  static Expr parse(std::string_view text);

  const Node& node() const { return *node_; }

 private:
  friend struct ExprBuilder;
  explicit Expr(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
  std::shared_ptr<const Node> node_;
};

Expr operator+(const Expr& a, const Expr& b);
Expr operator-(const Expr& a, const Expr& b);
Expr operator*(const Expr& a, const Expr& b);
Expr operator-(const Expr& a);
Expr sin(const Expr& a);
Expr cos(const Expr& a);
Expr exp(const Expr& a);
Expr pow(const Expr& a, int p);

}  // namespace confbend
