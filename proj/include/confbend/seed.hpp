#pragma once

#include <stdexcept>
#include <vector>

#include "confbend/conformal_operator.hpp"
#include "confbend/morse.hpp"

namespace confbend {

struct SeedConfig {
  Vec p0;
  double r0 = 2.0;
  std::vector<double> N_schedule = default_schedule();
  double delta = 1e-3;
  double v_floor = -1.0;

  static std::vector<double> default_schedule();  // 1, 2, 4, …, 1024
  void validate(const Grid& grid) const;
};

struct SeedAttempt {
  double N = 0.0;
  double min_margin = 0.0;
  Index argmin = -1;
  bool accepted = false;
};

struct SeedReport {
  std::vector<SeedAttempt> attempts;
  double accepted_N = 0.0;
  // Case 1: inside B̄_{r0}(p0), where A is strictly admissible.
  Index ball_points = 0;
  double ball_A_min_margin = 0.0;
  double ball_V_min_margin = 0.0;
  // Case 2: outside the ball, where |∇v|² ≥ m0 dominates.
  Index outside_points = 0;
  double outside_V_min_margin = 0.0;
  double m0 = 0.0;
  // Weak admissibility of A on the whole grid.
  double A_min_margin = 0.0;
  // (1,…,1,1−ρ) + e^{N v_floor}(γ,…,γ,γ+ρ) ∈ Γ at the accepted N.
  bool key_vector_in_cone = false;
  Vec key_vector;
};

struct SeedResult {
  ScalarField u;
  double N = 0.0;
  SymTensorField V;
  EigenField eig;
  SeedReport report;
};

class SeedFailure : public std::runtime_error {
 public:
  SeedFailure(const std::string& what, SeedReport report, Index worst_point, Vec worst_lambda)
      : std::runtime_error(what), report_(std::move(report)), point_(worst_point), lambda_(std::move(worst_lambda)) {}
  const SeedReport& report() const { return report_; }
  Index worst_point() const { return point_; }
  const Vec& worst_lambda() const { return lambda_; }

 private:
  SeedReport report_;
  Index point_;
  Vec lambda_;
};

/// V[e^{Nv}] through the chain-rule expansion
/// A + N²e^{Nv}((Δv g − ρ∇²v)/N + (1 + γe^{Nv})|∇v|² g + ρ(e^{Nv} − 1) dv⊗dv).
SymTensorField seed_V(const OperatorContext& ctx, const CovariantDerivatives& dv, const ScalarField& v, double N);

/// (1,…,1,1−ρ) + e^{N v_floor}(γ,…,γ,γ+ρ).
Vec seed_key_vector(const EquationParams& params, double N, double v_floor);

/// Escalates N through the schedule until λ(g⁻¹V[e^{Nv}]) clears the cone margin everywhere.
SeedResult seed(const OperatorContext& ctx, const SeedConfig& cfg, const MorsePack& morse);

}  // namespace confbend
