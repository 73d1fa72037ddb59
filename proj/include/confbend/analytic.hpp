#pragma once

#include <vector>

#include "confbend/cone.hpp"
#include "confbend/grid.hpp"

namespace confbend {

/// Pointwise geometry of a closed-form metric, using exact symbolic derivatives.
struct PointGeometry {
  Mat g;
  Mat ginv;
  std::vector<double> gamma;  // Γ^k_ij at index (k*n + i)*n + j
  Mat ricci;
  double scalar = 0.0;

  double christoffel(int k, int i, int j) const {
    const int n = static_cast<int>(g.rows());
    return gamma[static_cast<std::size_t>((k * n + i) * n + j)];
  }
};

class AnalyticMetric {
 public:
  /// Entries in upper-triangle row-major order.
  AnalyticMetric(int n, std::vector<Expr> entries);

  int dim() const { return n_; }
  const std::vector<Expr>& entries() const { return g_; }
  PointGeometry at(std::span<const double> x) const;

 private:
  int n_;
  std::vector<Expr> g_;
  std::vector<std::vector<Expr>> dg_;                // [a][c]
  std::vector<std::vector<std::vector<Expr>>> ddg_;  // [a][b][c], a <= b
};

/// Exact value, gradient and Hessian of a closed-form scalar.
struct PointJet {
  double value = 0.0;
  Vec grad;
  Mat hess;
};

class AnalyticScalar {
 public:
  AnalyticScalar(int n, Expr e);
  PointJet at(std::span<const double> x) const;
  const Expr& expr() const { return e_; }

 private:
  int n_;
  Expr e_;
  std::vector<Expr> d_;
  std::vector<std::vector<Expr>> dd_;
};

/// Exact V[u*] at a point: Δu g − ρ∇²u + γ|∇u|² g + ρ du⊗du + A.
Mat exact_V(const PointGeometry& geo, const PointJet& u, const Mat& A, const EquationParams& params);

/// ψ := f(λ(g⁻¹V[u*])) e^{−2ς u*}/c from exact derivatives of u*, the metric and A,
/// so the continuum u* solves the equation exactly. A entries are upper-triangle row-major.
ScalarField manufactured_psi(const Grid& grid, const AnalyticMetric& metric, const std::vector<Expr>& A,
                             const Expr& u_star, const EquationParams& params);

}  // namespace confbend
