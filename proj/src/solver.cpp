#include "confbend/solver.hpp"

#include <cmath>
#include <limits>

#include "confbend/krylov.hpp"

namespace confbend {

void SolverConfig::validate() const {
  if (!(newton_tol > 0.0) || !(krylov_tol > 0.0) || !(guard_margin > 0.0) || !(min_step > 0.0))
    throw std::invalid_argument("SolverConfig: tolerances must be positive");
  if (max_newton < 1 || homotopy_steps < 1 || max_halvings < 1 || krylov_restart < 1 || krylov_max < 1)
    throw std::invalid_argument("SolverConfig: iteration counts must be positive");
  if (!(backtrack > 0.0 && backtrack < 1.0)) throw std::invalid_argument("SolverConfig: backtrack must be in (0, 1)");
  if (!(decrease > 0.0 && decrease < 1.0)) throw std::invalid_argument("SolverConfig: decrease must be in (0, 1)");
}

double SolveReport::min_symbol() const {
  double m = std::numeric_limits<double>::infinity();
  for (const auto& r : iterates) m = std::min(m, r.symbol_min);
  return m;
}

double SolveReport::max_c2() const {
  double m = 0.0;
  for (const auto& r : iterates) m = std::max(m, r.c2_sup);
  return m;
}

double SolveReport::min_margin() const {
  double m = std::numeric_limits<double>::infinity();
  for (const auto& r : iterates) m = std::min(m, r.min_margin);
  return m;
}

double c2_diagnostic(const MetricField& g, const ScalarField& u) {
  const CovariantDerivatives d = covariant_derivatives(g, u);
  double sup = 0.0;
  for (Index p = 0; p < g.grid().points(); ++p) {
    const Mat gi = g.inverse_matrix(p);
    const Mat h = d.hessian.matrix(p);
    const double hn = std::sqrt(std::max(0.0, (gi * h * gi * h).trace()));
    sup = std::max(sup, hn + d.grad_norm2(p));
  }
  return sup;
}

namespace {

IterateRecord record(const OperatorContext& ctx, const ScalarField& u, const OperatorState& s,
                     const Linearization& lin, double t, int it, double res, double step, int kit) {
  IterateRecord r;
  r.t = t;
  r.iteration = it;
  r.residual = res;
  r.step = step;
  r.krylov_iterations = kit;
  r.min_margin = s.min_margin;
  const EllipticityReport e = ellipticity_probe(lin);
  r.symbol_min = e.min_eigenvalue;
  r.symbol_max = e.max_eigenvalue;
  r.c2_sup = c2_diagnostic(ctx.g, u);
  r.u_min = std::numeric_limits<double>::infinity();
  r.u_max = -std::numeric_limits<double>::infinity();
  for (double v : u.values()) {
    r.u_min = std::min(r.u_min, v);
    r.u_max = std::max(r.u_max, v);
  }
  return r;
}

}  // namespace

NewtonResult newton(const OperatorContext& ctx, const ScalarField& u0, const SolverConfig& cfg, double t) {
  cfg.validate();
  NewtonResult res;
  res.u = u0;
  OperatorState state = evaluate(ctx, res.u);
  if (!state.admissible() || state.min_margin < cfg.guard_margin) {
    res.message = "initial iterate violates the cone guard (min margin " + std::to_string(state.min_margin) + ")";
    return res;
  }
  double fnorm = max_abs(state.F);
  const Index np = ctx.grid().points();
  int kit = 0;
  double last_step = 0.0;
  for (int it = 0;; ++it) {
    const Linearization lin(ctx, res.u, state);
    res.iterates.push_back(record(ctx, res.u, state, lin, t, it, fnorm, last_step, kit));
    res.residual = fnorm;
    res.iterations = it;
    if (fnorm <= cfg.newton_tol) {
      res.converged = true;
      return res;
    }
    if (it >= cfg.max_newton) {
      res.message = "max_newton exceeded";
      return res;
    }

    Eigen::VectorXd rhs(np), w = Eigen::VectorXd::Zero(np);
    for (Index p = 0; p < np; ++p) rhs(p) = -state.F(p);
    const auto& diag = lin.diagonal();
    LinearOperator A = [&lin](const Eigen::VectorXd& in, Eigen::VectorXd& out) {
      out.resize(in.size());
      lin.apply(std::span<const double>(in.data(), static_cast<std::size_t>(in.size())),
                std::span<double>(out.data(), static_cast<std::size_t>(out.size())));
    };
    LinearOperator M = [&diag](const Eigen::VectorXd& in, Eigen::VectorXd& out) {
      out.resize(in.size());
      for (Eigen::Index i = 0; i < in.size(); ++i) out(i) = in(i) / diag[static_cast<std::size_t>(i)];
    };
    const GmresResult gr = gmres(A, M, rhs, w, {cfg.krylov_restart, cfg.krylov_max, cfg.krylov_tol});
    kit = gr.iterations;
    if (!gr.converged && gr.rel_residual > 1e-2) {
      res.message = "Krylov solve failed (relative residual " + std::to_string(gr.rel_residual) + ")";
      return res;
    }

    double s = 1.0;
    bool accepted = false;
    for (int h = 0; h <= cfg.max_halvings; ++h, s *= cfg.backtrack) {
      ScalarField trial(ctx.grid());
      for (Index p = 0; p < np; ++p) trial(p) = res.u(p) + s * w(p);
      OperatorState ts = evaluate(ctx, trial);
      if (!ts.admissible() || ts.min_margin < cfg.guard_margin) continue;
      const double tn = max_abs(ts.F);
      if (tn <= (1.0 - cfg.decrease * s) * fnorm) {
        res.u = std::move(trial);
        state = std::move(ts);
        fnorm = tn;
        accepted = true;
        break;
      }
    }
    if (!accepted) {
      res.message = "line search stalled";
      return res;
    }
    last_step = s;
  }
}

ScalarField continuity_solve(const OperatorContext& ctx, const ScalarField& u_seed, const SolverConfig& cfg,
                             SolveReport* report_out) {
  cfg.validate();
  SolveReport rep;
  const Index np = ctx.grid().points();
  ScalarField psi0;
  try {
    psi0 = consistent_psi(ctx, u_seed);
  } catch (const ConeViolation& e) {
    rep.message = std::string("seed is not admissible for the discrete operator: ") + e.what();
    if (report_out) *report_out = rep;
    throw SolveFailure(rep.message, rep);
  }
  for (Index p = 0; p < np; ++p)
    if (!(psi0(p) > 0.0)) throw SolveFailure("continuity_solve: psi_0 is not positive", rep);

  auto psi_at = [&](double t) {
    ScalarField ps(ctx.grid());
    for (Index p = 0; p < np; ++p) {
      ps(p) = (1.0 - t) * psi0(p) + t * ctx.psi(p);
      if (!(ps(p) > 0.0)) throw SolveFailure("continuity_solve: psi_t lost positivity", rep);
    }
    return ps;
  };

  ScalarField u = u_seed;
  double t = 0.0;
  double dt = 1.0 / cfg.homotopy_steps;
  {
    NewtonResult nr = newton(ctx.with_psi(psi0), u, cfg, 0.0);
    rep.homotopy.push_back({0.0, 0.0, nr.converged, nr.iterations, nr.residual, nr.message});
    rep.iterates.insert(rep.iterates.end(), nr.iterates.begin(), nr.iterates.end());
    if (!nr.converged) {
      rep.message = "t = 0 problem did not converge: " + nr.message;
      if (report_out) *report_out = rep;
      throw SolveFailure(rep.message, rep);
    }
    u = std::move(nr.u);
  }
  while (t < 1.0) {
    const double t_try = std::min(1.0, t + dt);
    NewtonResult nr = newton(ctx.with_psi(psi_at(t_try)), u, cfg, t_try);
    rep.homotopy.push_back({t_try, dt, nr.converged, nr.iterations, nr.residual, nr.message});
    if (nr.converged) {
      rep.iterates.insert(rep.iterates.end(), nr.iterates.begin(), nr.iterates.end());
      u = std::move(nr.u);
      t = t_try;
      rep.final_residual = nr.residual;
    } else {
      dt *= 0.5;
      if (dt < cfg.min_step) {
        rep.message = "homotopy step underflow at t = " + std::to_string(t) + " (" + nr.message + ")";
        if (report_out) *report_out = rep;
        throw SolveFailure(rep.message, rep);
      }
    }
  }
  rep.converged = true;
  rep.message = "converged";
  if (report_out) *report_out = rep;
  return u;
}

UniquenessReport uniqueness_check(const OperatorContext& ctx, const std::vector<ScalarField>& seeds,
                                  const SolverConfig& cfg, double tolerance) {
  if (seeds.size() < 2) throw std::invalid_argument("uniqueness_check: need at least two seeds");
  UniquenessReport rep;
  rep.tolerance = tolerance > 0.0 ? tolerance : 100.0 * cfg.newton_tol;
  for (const auto& s : seeds) {
    SolveReport r;
    rep.solutions.push_back(continuity_solve(ctx, s, cfg, &r));
    rep.reports.push_back(std::move(r));
  }
  for (std::size_t i = 0; i < rep.solutions.size(); ++i)
    for (std::size_t j = i + 1; j < rep.solutions.size(); ++j)
      rep.max_pairwise_diff = std::max(rep.max_pairwise_diff, max_abs_diff(rep.solutions[i], rep.solutions[j]));
  rep.passed = rep.max_pairwise_diff <= rep.tolerance;
  return rep;
}

CovarianceReport covariance_check(const OperatorContext& ctx, const ScalarField& u, double s, double tolerance) {
  if (!(s > 0.0)) throw std::invalid_argument("covariance_check: s must be positive");
  CovarianceReport rep;
  rep.s = s;
  rep.shift = -std::log(s) / (2.0 * ctx.params.varsigma);
  rep.tolerance = tolerance;
  ScalarField psi(ctx.grid());
  ScalarField shifted(ctx.grid());
  for (Index p = 0; p < ctx.grid().points(); ++p) {
    psi(p) = s * ctx.psi(p);
    shifted(p) = u(p) + rep.shift;
  }
  rep.residual = max_abs(residual(ctx.with_psi(std::move(psi)), shifted));
  rep.passed = rep.residual <= tolerance;
  return rep;
}

double quadratic_constant(const std::vector<double>& r, int tail) {
  double c = 0.0;
  const int n = static_cast<int>(r.size());
  for (int i = std::max(0, n - tail); i + 1 < n; ++i)
    if (r[i] > 0.0) c = std::max(c, r[i + 1] / (r[i] * r[i]));
  return c;
}

}  // namespace confbend
