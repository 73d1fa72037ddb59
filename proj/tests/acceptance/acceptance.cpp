// End-to-end acceptance run: one PASS/FAIL line per criterion.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "confbend/verify.hpp"

using namespace confbend;

namespace {

constexpr std::uint64_t kSeed = 20240611;
const double kPi = std::numbers::pi;

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

struct Outcome {
  bool passed = false;
  std::string detail;
};

int failures = 0;

void report(int id, const std::string& name, const Outcome& o, double secs) {
  std::printf("criterion %2d %s  %s: %s (%.1f s)\n", id, o.passed ? "PASS" : "FAIL", name.c_str(), o.detail.c_str(),
              secs);
  std::fflush(stdout);
  if (!o.passed) ++failures;
}

std::string fmt(const char* f, double a) {
  char buf[128];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

// Every converged continuation run, for the ellipticity audit.
std::vector<SolveReport> converged_runs;

struct Solved {
  ManufacturedInstance inst;
  ScalarField u;
  SolveReport rep;
};

Outcome criterion1() {
  const SuiteResult r = verify_conformal_identity({16, 32}, 5, kSeed);
  return {r.passed, r.summary};
}

Outcome criterion2() {
  const SuiteResult c = verify_cone_constants(kSeed);
  const SuiteResult t = verify_theorem21(10000, kSeed);
  return {c.passed && t.passed, c.summary + "; " + t.summary};
}

Outcome criterion3() {
  const SuiteResult r = verify_lemma23(200);
  return {r.passed, r.summary};
}

Outcome criterion4() {
  const SuiteResult r = verify_linearization(20, kSeed);
  return {r.passed, r.summary};
}

Outcome criterion5(std::vector<Solved>& fine) {
  Outcome o{true, ""};
  SolverConfig cfg;
  for (int k = 1; k <= 3; ++k) {
    double err[2] = {0.0, 0.0};
    double res[2] = {0.0, 0.0};
    int idx = 0;
    for (int s : {16, 32}) {
      ManufacturedInstance inst = manufactured_instance(Grid::cube(3, s), k);
      SolveReport rep;
      ScalarField u;
      try {
        u = continuity_solve(inst.ctx, strict_seed(inst.ctx), cfg, &rep);
      } catch (const std::exception& e) {
        o.passed = false;
        o.detail += "k=" + std::to_string(k) + " " + std::to_string(s) + "^3 solve failed: " + e.what() + "; ";
        break;
      }
      converged_runs.push_back(rep);
      res[idx] = max_abs(residual(inst.ctx, u));
      err[idx] = max_abs_diff(u, sample(inst.ctx.grid(), inst.u_star));
      if (s == 32) fine.push_back({std::move(inst), std::move(u), std::move(rep)});
      ++idx;
    }
    if (idx < 2) continue;
    const double ratio = err[0] / err[1];
    const bool ok = res[0] <= 1e-9 && res[1] <= 1e-9 && ratio >= 3.2 && ratio <= 5.0;
    o.passed = o.passed && ok;
    o.detail += "k=" + std::to_string(k) + fmt(" |F|=%.1e", std::max(res[0], res[1])) + fmt(" err32=%.3e", err[1]) +
                fmt(" ratio=%.3f; ", ratio);
  }
  o.detail += "required |F| <= 1e-9, ratio in [3.2, 5.0]";
  return o;
}

Outcome criterion6() {
  Outcome o{true, ""};
  const Grid grid = Grid::cube(3, 32);
  const MetricField g = MetricField::flat(grid);
  Vec p0(3);
  p0 << kPi / 2, kPi / 2, kPi / 2;
  const double r0 = 2.0;
  const ScalarField b = bump_field(grid, p0, 2.6, 1.0);
  const ScalarField v = contract_points(grid, base_morse_expr(grid, -1.0), ContractionFlow{p0, 2.0});
  const MorsePack mp = make_morse_pack(g, v, p0, r0, -1.0);

  // Independent scan of the Case-2 bound.
  const CovariantDerivatives dv = covariant_derivatives(g, v);
  double m0 = std::numeric_limits<double>::infinity();
  for (Index p = 0; p < grid.points(); ++p)
    if (periodic_distance(grid, p0, grid.position(p)) > r0) m0 = std::min(m0, dv.grad_norm2(p));
  o.passed = m0 > 0.0;
  o.detail = fmt("m0=%.4f; ", m0);

  for (int k = 1; k <= 3; ++k) {
    const EquationParams params = validate_params(3, -1, 0.0, make_cone(3, k));
    const OperatorContext ctx(g, scalar_multiple(g, b), params, ScalarField(grid, 1.0));
    SeedConfig cfg;
    cfg.p0 = p0;
    cfg.r0 = r0;
    try {
      const SeedResult s = seed(ctx, cfg, mp);
      double margin = std::numeric_limits<double>::infinity();
      for (Index p = 0; p < grid.points(); ++p) {
        const Vec lam = s.eig.lambda(p);
        margin = std::min(margin, ctx.cone().contains(lam) ? ctx.cone().margin(lam) : -1.0);
      }
      const int escalations = static_cast<int>(s.report.attempts.size());
      const bool ok = margin >= 1e-3 && escalations <= 11 && s.report.key_vector_in_cone;
      o.passed = o.passed && ok;
      o.detail += "k=" + std::to_string(k) + fmt(" N=%g", s.N) + " escalations=" + std::to_string(escalations) +
                  fmt(" margin=%.4f; ", margin);
    } catch (const SeedFailure& e) {
      o.passed = false;
      o.detail += "k=" + std::to_string(k) + " seed failed: " + e.what() + "; ";
    }
  }
  o.detail += "required margin >= 1e-3, <= 11 escalations, m0 > 0";
  return o;
}

struct WarpedSolve {
  OperatorContext ctx;
  ScalarField u;
};

Outcome criterion7(std::optional<WarpedSolve>& solved) {
  const EquationParams params = validate_params(3, -1, 0.0, make_cone(3, 3));
  BackgroundSearch search;
  search.grid = Grid::cube(3, 32);
  search.order = 4;
  for (int i = 0; i <= 12; ++i) search.K_values.push_back(2.0 * std::sqrt(2.0) + (6.0 - 2.0 * std::sqrt(2.0)) * i / 12);
  BackgroundMatch match;
  try {
    match = find_admissible_background(params, search);
  } catch (const BackgroundSearchFailure& e) {
    double best = -std::numeric_limits<double>::infinity(), best_K = 0.0;
    for (const auto& s : e.scan())
      if (s.cls.min_margin > best) {
        best = s.cls.min_margin;
        best_K = s.K;
      }
    return {false, "no warped background with lambda(-Ric) in Gamma_3 for K in [2.83, 6] at 32^3" +
                       fmt(" (best K=%.3f", best_K) + fmt(", min margin %.4f)", best)};
  }
  const OperatorContext ctx(match.g, reduced_A(match.g, params), params, ScalarField(search.grid, 1.0));
  SolveReport rep;
  ScalarField u;
  try {
    u = continuity_solve(ctx, strict_seed(ctx), SolverConfig{}, &rep);
  } catch (const std::exception& e) {
    return {false, fmt("background K=%.3f found, solve failed: ", match.K) + e.what()};
  }
  converged_runs.push_back(rep);
  const MetricField gt = conformal_metric(match.g, u);
  const CurvaturePack c = curvature(gt);
  double max_ric = -std::numeric_limits<double>::infinity(), det_err = 0.0;
  for (Index p = 0; p < search.grid.points(); ++p) {
    const Vec lam = point_eigen(c.ricci.matrix(p), gt.cholesky(p)).lambda;
    max_ric = std::max(max_ric, lam.maxCoeff());
    det_err = std::max(det_err, std::abs(sigma_k(Vec(-lam), 3) - 1.0));
  }
  solved = WarpedSolve{ctx, u};
  return {max_ric < 0.0 && det_err <= 5e-3,
          fmt("K=%.3f", match.K) + fmt(" max Ric eigenvalue %.3e", max_ric) + fmt(" |sigma_3 - 1| = %.3e", det_err)};
}

Outcome criterion8(std::vector<Solved>& fine, const std::optional<WarpedSolve>& warped) {
  Outcome o{true, ""};
  SolverConfig cfg;
  for (auto& s : fine) {
    try {
      const ScalarField seed1 = strict_seed(s.inst.ctx), seed2 = strict_seed(s.inst.ctx, 2.0);
      SolveReport rep;
      const ScalarField u2 = continuity_solve(s.inst.ctx, seed2, cfg, &rep);
      converged_runs.push_back(rep);
      const double d = max_abs_diff(u2, s.u);
      o.passed = o.passed && d <= 1e-6;
      o.detail += "k=" + std::to_string(s.inst.ctx.cone().k) + fmt(" seeds differ by %.3f,", max_abs_diff(seed1, seed2)) +
                  fmt(" solutions by %.2e; ", d);
    } catch (const std::exception& e) {
      o.passed = false;
      o.detail += std::string("second seed failed: ") + e.what() + "; ";
    }
  }
  if (warped) {
    try {
      const ScalarField u2 = continuity_solve(warped->ctx, strict_seed(warped->ctx, 2.0), cfg, nullptr);
      const double d = max_abs_diff(u2, warped->u);
      o.passed = o.passed && d <= 1e-6;
      o.detail += fmt("warped diff=%.2e; ", d);
    } catch (const std::exception& e) {
      o.passed = false;
      o.detail += std::string("warped second seed failed: ") + e.what() + "; ";
    }
  } else {
    o.passed = false;
    o.detail += "warped instance unavailable (criterion 7); ";
  }
  o.detail += "required agreement within 1e-6";
  return o;
}

Outcome criterion9(const std::vector<Solved>& fine) {
  if (fine.empty()) return {false, "no converged manufactured solution"};
  Outcome o{true, ""};
  for (const auto& s : fine) {
    const CovarianceReport r = covariance_check(s.inst.ctx, s.u, 4.0, 1e-8);
    o.passed = o.passed && r.passed;
    o.detail += "k=" + std::to_string(s.inst.ctx.cone().k) + fmt(" residual=%.2e; ", r.residual);
  }
  o.detail += "required <= 1e-8";
  return o;
}

Outcome criterion10() {
  if (converged_runs.empty()) return {false, "no converged runs"};
  double smin = std::numeric_limits<double>::infinity(), c2 = 0.0;
  std::size_t iterates = 0;
  for (const auto& r : converged_runs) {
    smin = std::min(smin, r.min_symbol());
    c2 = std::max(c2, r.max_c2());
    iterates += r.iterates.size();
  }
  return {smin > 0.0 && std::isfinite(c2), std::to_string(converged_runs.size()) + " runs, " +
                                               std::to_string(iterates) + " accepted iterates" +
                                               fmt(", min symbol eigenvalue %.4f", smin) +
                                               fmt(", sup(|D2u| + |Du|^2) = %.4f", c2)};
}

template <typename F>
void timed(int id, const std::string& name, double limit_s, F&& f) {
  const auto t0 = Clock::now();
  Outcome o = f();
  const double secs = seconds_since(t0);
  if (limit_s > 0.0 && secs > limit_s) {
    o.passed = false;
    o.detail += fmt("; runtime over the %.0f s budget", limit_s);
  }
  report(id, name, o, secs);
}

}  // namespace

int main() {
  std::vector<Solved> fine;
  std::optional<WarpedSolve> warped;
  timed(1, "conformal identity", 120.0, criterion1);
  timed(2, "cone constants", 60.0, criterion2);
  timed(3, "key-vector sweep", 10.0, criterion3);
  timed(4, "linearization", 60.0, criterion4);
  timed(5, "manufactured recovery", 600.0, [&] { return criterion5(fine); });
  timed(6, "bump seed", 180.0, criterion6);
  timed(7, "warped background", 900.0, [&] { return criterion7(warped); });
  timed(8, "uniqueness", 0.0, [&] { return criterion8(fine, warped); });
  timed(9, "covariance", 0.0, [&] { return criterion9(fine); });
  timed(10, "ellipticity", 0.0, criterion10);
  std::printf("%d of 10 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
