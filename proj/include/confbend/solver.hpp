#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "confbend/conformal_operator.hpp"

namespace confbend {

struct SolverConfig {
  double newton_tol = 1e-9;
  int max_newton = 50;
  double krylov_tol = 1e-8;
  int krylov_restart = 50;
  int krylov_max = 2000;
  int homotopy_steps = 10;
  double min_step = 1.0 / 256.0;
  double guard_margin = 1e-4;
  double backtrack = 0.5;
  int max_halvings = 30;
  /// Sufficient decrease: ‖F_new‖∞ ≤ (1 − decrease·s)‖F‖∞ for step length s.
  double decrease = 0.1;

  void validate() const;
};

/// Diagnostics of one accepted iterate.
struct IterateRecord {
  double t = 0.0;
  int iteration = 0;
  double residual = 0.0;
  double step = 0.0;
  int krylov_iterations = 0;
  double min_margin = 0.0;
  double symbol_min = 0.0;
  double symbol_max = 0.0;
  double c2_sup = 0.0;  // sup(|∇²u| + |∇u|²)
  double u_min = 0.0;
  double u_max = 0.0;
};

struct HomotopyStep {
  double t = 0.0;
  double dt = 0.0;
  bool accepted = false;
  int newton_iterations = 0;
  double residual = 0.0;
  std::string note;
};

struct SolveReport {
  std::vector<HomotopyStep> homotopy;
  std::vector<IterateRecord> iterates;
  bool converged = false;
  double final_residual = 0.0;
  std::string message;

  double min_symbol() const;
  double max_c2() const;
  double min_margin() const;
};

struct NewtonResult {
  ScalarField u;
  bool converged = false;
  int iterations = 0;
  double residual = 0.0;
  std::vector<IterateRecord> iterates;
  std::string message;
};

class SolveFailure : public std::runtime_error {
 public:
  SolveFailure(const std::string& what, SolveReport report) : std::runtime_error(what), report_(std::move(report)) {}
  const SolveReport& report() const { return report_; }

 private:
  SolveReport report_;
};

/// sup over the grid of |∇²u|_g + |∇u|²_g.
double c2_diagnostic(const MetricField& g, const ScalarField& u);

/// Damped Newton–Krylov with cone-guarded backtracking. Never reports a
/// non-admissible or unconverged u as converged.
NewtonResult newton(const OperatorContext& ctx, const ScalarField& u0, const SolverConfig& cfg, double t = 1.0);

/// Continuation in ψ from ψ₀ = f(λ(g⁻¹V[u̲]))e^{−2ςu̲}/c to ctx.psi. Throws SolveFailure.
ScalarField continuity_solve(const OperatorContext& ctx, const ScalarField& u_seed, const SolverConfig& cfg,
                             SolveReport* report = nullptr);

struct UniquenessReport {
  std::vector<ScalarField> solutions;
  std::vector<SolveReport> reports;
  double max_pairwise_diff = 0.0;
  double tolerance = 0.0;
  bool passed = false;
};

UniquenessReport uniqueness_check(const OperatorContext& ctx, const std::vector<ScalarField>& seeds,
                                  const SolverConfig& cfg, double tolerance = -1.0);

struct CovarianceReport {
  double s = 1.0;
  double shift = 0.0;
  double residual = 0.0;
  double tolerance = 0.0;
  bool passed = false;
};

/// u − ln(s)/(2ς) against ψ' = sψ, evaluated without re-solving.
CovarianceReport covariance_check(const OperatorContext& ctx, const ScalarField& u, double s, double tolerance);

/// Largest C over consecutive triples in r_{k+1} ≤ C r_k² on the tail of a residual history.
double quadratic_constant(const std::vector<double>& residuals, int tail = 3);

}  // namespace confbend
