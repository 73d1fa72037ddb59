#include "confbend/seed.hpp"

#include <limits>

namespace confbend {

std::vector<double> SeedConfig::default_schedule() {
  std::vector<double> s;
  for (double N = 1.0; N <= 1024.0; N *= 2.0) s.push_back(N);
  return s;
}

void SeedConfig::validate(const Grid& grid) const {
  if (p0.size() != grid.dim()) throw std::invalid_argument("SeedConfig: p0 dimension differs from the grid");
  if (!(r0 > 0.0)) throw std::invalid_argument("SeedConfig: r0 must be positive");
  for (int i = 0; i < grid.dim(); ++i)
    if (!(r0 < grid.period(i) / 2.0)) throw std::invalid_argument("SeedConfig: ball does not fit the torus");
  if (N_schedule.empty()) throw std::invalid_argument("SeedConfig: empty N schedule");
  for (std::size_t i = 0; i < N_schedule.size(); ++i) {
    if (!(N_schedule[i] > 0.0)) throw std::invalid_argument("SeedConfig: N values must be positive");
    if (i > 0 && !(N_schedule[i] > N_schedule[i - 1]))
      throw std::invalid_argument("SeedConfig: N schedule must be strictly increasing");
  }
  if (!(delta >= 0.0)) throw std::invalid_argument("SeedConfig: margin must be non-negative");
  if (!(v_floor <= -1.0)) throw std::invalid_argument("SeedConfig: v_floor must be <= -1");
}

SymTensorField seed_V(const OperatorContext& ctx, const CovariantDerivatives& dv, const ScalarField& v, double N) {
  const int n = ctx.dim();
  const double rho = ctx.params.rho;
  const double gamma = ctx.params.gamma;
  SymTensorField V(ctx.grid());
  for (Index p = 0; p < ctx.grid().points(); ++p) {
    const double e = std::exp(N * v(p));
    const double s = N * N * e;
    const double iso = dv.laplacian(p) / N + (1.0 + gamma * e) * dv.grad_norm2(p);
    for (int i = 0; i < n; ++i) {
      for (int j = i; j < n; ++j) {
        const int c = sym_index(i, j, n);
        V(p, c) = ctx.A(p, c) + s * (iso * ctx.g.tensor()(p, c) - rho * dv.hessian(p, c) / N +
                                     rho * (e - 1.0) * dv.du(p, i) * dv.du(p, j));
      }
    }
  }
  return V;
}

Vec seed_key_vector(const EquationParams& params, double N, double v_floor) {
  const int n = params.n;
  Vec v = lemma_vector(n, params.rho);
  Vec g = Vec::Constant(n, params.gamma);
  g(n - 1) += params.rho;
  return v + std::exp(N * v_floor) * g;
}

SeedResult seed(const OperatorContext& ctx, const SeedConfig& cfg, const MorsePack& morse) {
  const Grid& grid = ctx.grid();
  cfg.validate(grid);
  if (!(morse.v.grid() == grid)) throw std::invalid_argument("seed: Morse function lives on a different grid");
  const ConeSpec& cone = ctx.cone();
  const Index np = grid.points();

  SeedReport rep;
  rep.m0 = morse.m0;
  std::vector<char> inside(static_cast<std::size_t>(np), 0);
  for (Index p = 0; p < np; ++p) inside[p] = periodic_distance(grid, cfg.p0, grid.position(p)) <= cfg.r0;

  // Hypotheses: λ(g⁻¹A) ∈ Γ̄ everywhere and ∈ Γ on the closed ball.
  const EigenField a_eig = gen_eigen(ctx.A, ctx.g);
  rep.A_min_margin = std::numeric_limits<double>::infinity();
  rep.ball_A_min_margin = std::numeric_limits<double>::infinity();
  Index worst_a = 0;
  for (Index p = 0; p < np; ++p) {
    const Vec lam = a_eig.lambda(p);
    const double m = lam.cwiseAbs().maxCoeff() > 0.0 ? cone.margin(lam) : 0.0;
    if (m < rep.A_min_margin) {
      rep.A_min_margin = m;
      worst_a = p;
    }
    if (inside[p]) {
      ++rep.ball_points;
      rep.ball_A_min_margin = std::min(rep.ball_A_min_margin, cone.contains(lam) ? m : 0.0);
    } else {
      ++rep.outside_points;
    }
  }
  if (rep.A_min_margin < -1e-10)
    throw SeedFailure("seed: A is not weakly admissible", rep, worst_a, a_eig.lambda(worst_a));
  if (!(rep.ball_A_min_margin > 0.0))
    throw SeedFailure("seed: A is not strictly admissible on the ball around p0", rep, worst_a, a_eig.lambda(worst_a));
  // Case 2 needs gradient dominance only where A itself is not strictly admissible.
  bool a_strict_everywhere = true;
  for (Index p = 0; p < np && a_strict_everywhere; ++p) a_strict_everywhere = cone.contains(a_eig.lambda(p));
  if (!a_strict_everywhere && !(morse.m0 > 0.0))
    throw SeedFailure("seed: |grad v|^2 vanishes outside the ball (m0 = 0)", rep, morse.m0_point, Vec());

  const CovariantDerivatives dv = covariant_derivatives(ctx.g, morse.v);
  Index worst_point = 0;
  Vec worst_lambda;
  double worst_overall = -std::numeric_limits<double>::infinity();
  for (double N : cfg.N_schedule) {
    SeedAttempt at;
    at.N = N;
    SymTensorField V = seed_V(ctx, dv, morse.v, N);
    EigenField eig = gen_eigen(V, ctx.g);
    at.min_margin = std::numeric_limits<double>::infinity();
    bool ok = true;
    double ball_min = std::numeric_limits<double>::infinity();
    double out_min = std::numeric_limits<double>::infinity();
    for (Index p = 0; p < np; ++p) {
      const Vec lam = eig.lambda(p);
      const double m = cone.contains(lam) ? cone.margin(lam) : std::min(cone.margin(lam), 0.0);
      if (m < at.min_margin) {
        at.min_margin = m;
        at.argmin = p;
      }
      if (!cone.contains(lam, cfg.delta)) ok = false;
      (inside[p] ? ball_min : out_min) = std::min(inside[p] ? ball_min : out_min, m);
    }
    at.accepted = ok;
    rep.attempts.push_back(at);
    if (at.min_margin > worst_overall || worst_lambda.size() == 0) {
      worst_overall = at.min_margin;
      worst_point = at.argmin;
      worst_lambda = eig.lambda(at.argmin);
    }
    if (ok) {
      rep.accepted_N = N;
      rep.ball_V_min_margin = ball_min;
      rep.outside_V_min_margin = out_min;
      rep.key_vector = seed_key_vector(ctx.params, N, cfg.v_floor);
      rep.key_vector_in_cone = cone.contains(rep.key_vector);
      SeedResult res;
      res.u = ScalarField(grid);
      for (Index p = 0; p < np; ++p) res.u(p) = std::exp(N * morse.v(p));
      res.N = N;
      res.V = std::move(V);
      res.eig = std::move(eig);
      res.report = std::move(rep);
      return res;
    }
  }
  throw SeedFailure("seed: N schedule exhausted without reaching the cone margin; raise N or refine the grid", rep,
                    worst_point, worst_lambda);
}

}  // namespace confbend
