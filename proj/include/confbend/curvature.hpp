#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "confbend/grid.hpp"

namespace confbend {

/// Cholesky pivots at or below this value count as a degenerate metric.
inline constexpr double kSpdFloor = 1e-10;

class SpdFailure : public std::runtime_error {
 public:
  SpdFailure(Index point, double pivot)
      : std::runtime_error("metric is not positive definite at grid point " + std::to_string(point) +
                           " (pivot " + std::to_string(pivot) + ")"),
        point_(point),
        pivot_(pivot) {}
  Index point() const { return point_; }
  double pivot() const { return pivot_; }

 private:
  Index point_;
  double pivot_;
};

/// Riemannian metric sampled on a periodic grid.
///
/// Construction validates positive definiteness at every point and caches
/// the inverse, the lower Cholesky factor and the Christoffel symbols
/// Γ^k_ij = ½ g^kl (∂_i g_jl + ∂_j g_il − ∂_l g_ij) from stencil derivatives.
/// Immutable afterwards.
class MetricField {
 public:
  MetricField() = default;
  explicit MetricField(SymTensorField g, int order = 2);

  /// Metric sampled from closed-form entries; the entries are kept so exact
  /// derivatives stay available (manufactured solutions, refinement).
  static MetricField from_generators(const Grid& grid, std::vector<Expr> entries, int order = 2);

  static MetricField flat(const Grid& grid, int order = 2);

  const Grid& grid() const { return g_.grid(); }
  int dim() const { return g_.grid().dim(); }
  int order() const { return order_; }

  const SymTensorField& tensor() const { return g_; }
  const SymTensorField& inverse() const { return ginv_; }

  Mat matrix(Index p) const { return g_.matrix(p); }
  Mat inverse_matrix(Index p) const { return ginv_.matrix(p); }
  /// Lower-triangular L with g = L Lᵀ.
  Mat cholesky(Index p) const;

  double christoffel(Index p, int k, int i, int j) const {
    const int n = dim();
    return gamma_[static_cast<std::size_t>(((p * n + k) * n + i) * n + j)];
  }
  /// All symbols, n³ per point, index order (k, i, j).
  std::span<const double> christoffel_values() const { return gamma_; }

  const std::vector<Expr>& generators() const { return generators_; }
  bool has_generators() const { return !generators_.empty(); }

 private:
  SymTensorField g_;
  SymTensorField ginv_;
  std::vector<double> chol_;
  std::vector<double> gamma_;
  std::vector<Expr> generators_;
  int order_ = 2;
};

struct CurvaturePack {
  SymTensorField ricci;
  ScalarField scalar;
};

/// Ricci tensor from the coordinate Riemann tensor
/// R^l_ikj = ∂_k Γ^l_ij − ∂_j Γ^l_ik + Γ^l_km Γ^m_ij − Γ^l_jm Γ^m_ik, contracted on (l, k).
SymTensorField ricci(const MetricField& g);
ScalarField scalar_curvature(const MetricField& g, const SymTensorField& ricci);
CurvaturePack curvature(const MetricField& g);

/// (α/(n−2)) (Ric − τ/(2(n−1)) R g).
SymTensorField modified_schouten(const MetricField& g, const CurvaturePack& curv, double tau, int alpha);
SymTensorField modified_schouten(const MetricField& g, double tau, int alpha);

/// First and second covariant derivatives of a scalar with respect to g.
struct CovariantDerivatives {
  CovectorField du;
  SymTensorField hessian;  // ∇²u = ∂²u − Γ^k ∂_k u
  ScalarField laplacian;   // g^ij ∇²_ij u
  ScalarField grad_norm2;  // g^ij ∂_i u ∂_j u
};

CovariantDerivatives covariant_derivatives(const MetricField& g, const ScalarField& u);
SymTensorField covariant_hessian(const MetricField& g, const ScalarField& u);

/// Modified Schouten tensor of e^{2u} g through the conformal transformation law:
/// A_g + α(τ−1)/(n−2) Δu g − α ∇²u + α(τ−2)/2 |∇u|² g + α du⊗du.
SymTensorField conformal_schouten(const MetricField& g, const ScalarField& u, double tau, int alpha);
SymTensorField conformal_schouten(const MetricField& g, const SymTensorField& schouten_g, const ScalarField& u,
                                  double tau, int alpha);

/// The metric e^{2u} g sampled pointwise.
MetricField conformal_metric(const MetricField& g, const ScalarField& u);

}  // namespace confbend
