#pragma once

#include <stdexcept>
#include <vector>

#include "confbend/cone.hpp"
#include "confbend/curvature.hpp"

namespace confbend {

/// Data of the reduced equation f(λ(g⁻¹V[u])) = c ψ e^{2ςu}.
struct OperatorContext {
  MetricField g;
  SymTensorField A;
  EquationParams params;
  ScalarField psi;

  OperatorContext() = default;
  OperatorContext(MetricField g, SymTensorField A, EquationParams params, ScalarField psi);

  const Grid& grid() const { return g.grid(); }
  int dim() const { return g.dim(); }
  const ConeSpec& cone() const { return params.cone; }
  /// Same context with a different right-hand side.
  OperatorContext with_psi(ScalarField psi) const;
};

/// A = (n−2)/(α(τ−1)) A^{τ,α}_g from the background curvature.
SymTensorField reduced_A(const MetricField& g, const EquationParams& params);

SymTensorField assemble_V(const OperatorContext& ctx, const ScalarField& u);
SymTensorField assemble_V(const OperatorContext& ctx, const CovariantDerivatives& d);

/// Generalized eigenpairs at one point: ascending λ and g-orthonormal columns X.
struct PointEigen {
  Vec lambda;
  Mat frame;
};
PointEigen point_eigen(const Mat& V, const Mat& chol);

struct EigenField {
  int n = 0;
  std::vector<double> lambdas;  // n per point, ascending
  std::vector<double> frames;   // n*n per point, column-major, columns g-orthonormal

  Vec lambda(Index p) const;
  Mat frame(Index p) const;
};

EigenField gen_eigen(const SymTensorField& V, const MetricField& g);

struct ConeViolationPoint {
  Index point = 0;
  double margin = 0.0;
};

class ConeViolation : public std::runtime_error {
 public:
  ConeViolation(std::vector<ConeViolationPoint> points, double min_margin);
  const std::vector<ConeViolationPoint>& points() const { return points_; }
  double min_margin() const { return min_margin_; }

 private:
  std::vector<ConeViolationPoint> points_;
  double min_margin_;
};

/// Everything one residual evaluation produces.
struct OperatorState {
  SymTensorField V;
  EigenField eig;
  ScalarField F;            // only valid when admissible
  std::vector<double> margin;
  double min_margin = 0.0;
  Index argmin_margin = 0;
  std::vector<ConeViolationPoint> violations;
  bool admissible() const { return violations.empty(); }
};

/// Non-throwing evaluation; F is filled at admissible points only.
OperatorState evaluate(const OperatorContext& ctx, const ScalarField& u);

/// F[u] = f(λ(g⁻¹V[u])) − c ψ e^{2ςu}; throws ConeViolation outside the cone.
ScalarField residual(const OperatorContext& ctx, const ScalarField& u);

/// f(λ(g⁻¹V[u])) e^{−2ςu}/c: the ψ for which u solves the equation exactly.
ScalarField consistent_psi(const OperatorContext& ctx, const ScalarField& u);

/// DF[u] as a variable-coefficient second-order operator
/// w ↦ Q:∂²w + b·∂w − c0 w, built with the same stencils as the residual.
class Linearization {
 public:
  Linearization(const OperatorContext& ctx, const ScalarField& u);
  Linearization(const OperatorContext& ctx, const ScalarField& u, const OperatorState& state);

  ScalarField apply(const ScalarField& w) const;
  void apply(std::span<const double> w, std::span<double> out) const;
  /// Diagonal of the discrete operator (Jacobi preconditioner).
  const std::vector<double>& diagonal() const { return diag_; }
  /// Eigenvalues Σf − ρ f_i of the principal symbol relative to g, n per point.
  const std::vector<double>& symbol_eigenvalues() const { return symbol_; }
  const Grid& grid() const { return grid_; }

 private:
  void build(const OperatorContext& ctx, const ScalarField& u, const OperatorState& state);

  Grid grid_;
  int n_ = 0;
  int order_ = 2;
  std::vector<double> Q_;   // n(n+1)/2 per point
  std::vector<double> b_;   // n per point
  std::vector<double> c0_;  // per point
  std::vector<double> diag_;
  std::vector<double> symbol_;
};

struct EllipticityReport {
  double min_eigenvalue = 0.0;
  double max_eigenvalue = 0.0;
  double ratio = 0.0;
  Index argmin = 0;
  bool uniformly_elliptic() const { return min_eigenvalue > 0.0; }
};

EllipticityReport ellipticity_probe(const OperatorContext& ctx, const ScalarField& u);
EllipticityReport ellipticity_probe(const Linearization& lin);

}  // namespace confbend
