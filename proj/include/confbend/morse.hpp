#pragma once

#include <stdexcept>
#include <vector>

#include "confbend/curvature.hpp"

namespace confbend {

/// Σ cos(2π x_i / L_i) − n + v_floor: Morse, 2ⁿ critical points at {0, L/2}ⁿ, max = v_floor.
Expr base_morse_expr(const Grid& grid, double v_floor = -1.0);
ScalarField base_morse(const Grid& grid, double v_floor = -1.0);
std::vector<Vec> base_morse_critical_points(const Grid& grid);

/// Minimal-image displacement b − a on the torus.
Vec periodic_delta(const Grid& grid, const Vec& a, const Vec& b);
double periodic_distance(const Grid& grid, const Vec& a, const Vec& b);
Vec wrap(const Grid& grid, Vec x);

struct Translation {
  Vec source;
  Vec destination;
};

class CollisionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Smooth cutoff: 1 on [0, 1/2], 0 on [1, ∞).
double plateau_bump(double r);

/// Diffeomorphism h = h_m ∘ … ∘ h_1, each h_i the time-1 flow of
/// φ(dist(x, segment_i)/s)·(destination_i − source_i), which translates the
/// source to the destination and is the identity outside the s-tube.
class BumpFlow {
 public:
  BumpFlow(const Grid& grid, std::vector<Translation> moves, double support_radius, int rk4_steps = 32);

  Vec forward(const Vec& x) const;
  Vec inverse(const Vec& y) const;
  const std::vector<Translation>& moves() const { return moves_; }

 private:
  Vec field(int i, const Vec& x) const;
  Vec flow(int i, Vec x, double sign) const;

  Grid grid_;
  std::vector<Translation> moves_;
  double support_;
  int steps_;
};

/// v = w ∘ h⁻¹ on the grid for the bump-flow diffeomorphism h.
ScalarField move_points(const Grid& grid, const Expr& w, const std::vector<Translation>& moves,
                        double support_radius, int rk4_steps = 32);

/// Per-axis contraction toward a center: the time-T flow of
/// X_i = −(L_i/2π) sin(2π(x_i − c_i)/L_i) e_i.
struct ContractionFlow {
  Vec center;
  double time = 2.0;
};

Vec contraction_inverse(const Grid& grid, const ContractionFlow& flow, const Vec& y, int rk4_steps = 128);
Vec contraction_forward(const Grid& grid, const ContractionFlow& flow, const Vec& x, int rk4_steps = 128);
/// Closed form of the inverse map, used as an oracle for the integrator.
Vec contraction_inverse_exact(const Grid& grid, const ContractionFlow& flow, const Vec& y);

ScalarField contract_points(const Grid& grid, const Expr& w, const ContractionFlow& flow, int rk4_steps = 128);

struct MorsePack {
  ScalarField v;
  double m0 = 0.0;        // min |∇v|²_g outside the closed ball
  Index m0_point = -1;
  double v_max = 0.0;
};

/// Scans |∇v|²_g outside B̄_{r0}(p0) and records the bound v ≤ v_floor.
MorsePack make_morse_pack(const MetricField& g, ScalarField v, const Vec& p0, double r0, double v_floor);

}  // namespace confbend
