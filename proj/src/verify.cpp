#include "confbend/verify.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "confbend/analytic.hpp"

namespace confbend {

namespace {

Expr fourier_mode(int n, std::mt19937_64& rng, int max_wave) {
  std::uniform_int_distribution<int> wave(-max_wave, max_wave);
  std::uniform_real_distribution<double> phase(0.0, 2.0 * std::numbers::pi);
  Expr arg(phase(rng));
  bool nonzero = false;
  while (!nonzero) {
    arg = Expr(phase(rng));
    for (int i = 0; i < n; ++i) {
      const int m = wave(rng);
      if (m != 0) {
        arg = arg + Expr(static_cast<double>(m)) * Expr::coord(i);
        nonzero = true;
      }
    }
  }
  return cos(arg);
}

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(4);
  os << v;
  return os.str();
}

}  // namespace

std::vector<Expr> random_metric_entries(int n, std::mt19937_64& rng, double amplitude) {
  std::uniform_real_distribution<double> coef(-1.0, 1.0);
  std::vector<Expr> e;
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) {
      const double a = amplitude * coef(rng) * (i == j ? 1.0 : 0.5);
      e.push_back((i == j ? Expr(1.0) : Expr(0.0)) + Expr(a) * fourier_mode(n, rng, 1));
    }
  return e;
}

Expr random_scalar(int n, std::mt19937_64& rng, double amplitude, int modes) {
  std::uniform_real_distribution<double> coef(-1.0, 1.0);
  Expr u(0.0);
  for (int m = 0; m < modes; ++m) u = u + Expr(amplitude * coef(rng) / modes) * fourier_mode(n, rng, 1);
  return u;
}

SuiteResult verify_conformal_identity(const std::vector<int>& sizes, int pairs, std::uint64_t rng_seed, double tau,
                                      int alpha, double min_order, double max_order) {
  if (sizes.size() < 2) throw std::invalid_argument("verify_conformal_identity: need at least two grid sizes");
  SuiteResult res{"conformal-identity", true, "", json::array()};
  std::mt19937_64 rng(rng_seed);
  double omin = 1e300, omax = -1e300;
  for (int k = 0; k < pairs; ++k) {
    const auto ge = random_metric_entries(3, rng);
    const Expr ue = random_scalar(3, rng);
    std::vector<double> errs;
    for (int s : sizes) {
      const Grid grid = Grid::cube(3, s);
      const MetricField g = MetricField::from_generators(grid, ge);
      const ScalarField u = sample(grid, ue);
      const SymTensorField lhs = conformal_schouten(g, u, tau, alpha);
      const SymTensorField rhs = modified_schouten(conformal_metric(g, u), tau, alpha);
      errs.push_back(max_abs_diff(lhs, rhs));
    }
    json orders = json::array();
    for (std::size_t i = 1; i < errs.size(); ++i) {
      const double o = std::log(errs[i - 1] / errs[i]) / std::log(static_cast<double>(sizes[i]) / sizes[i - 1]);
      orders.push_back(o);
      omin = std::min(omin, o);
      omax = std::max(omax, o);
      if (!(o >= min_order && o <= max_order)) res.passed = false;
    }
    res.details.push_back({{"pair", k}, {"errors", errs}, {"orders", orders}});
  }
  res.summary = "observed orders in [" + fmt(omin) + ", " + fmt(omax) + "], required [" + fmt(min_order) + ", " +
                fmt(max_order) + "]";
  return res;
}

SuiteResult verify_cone_constants(std::uint64_t rng_seed) {
  SuiteResult res{"cone-constants", true, "", json::object()};
  json kap = json::array();
  for (int n = 1; n <= 6; ++n)
    for (int k = 1; k <= n; ++k) {
      if (n < 3) continue;
      const int kp = kappa_gamma(n, k);
      kap.push_back({{"n", n}, {"k", k}, {"kappa", kp}});
      if (kp != n - k) res.passed = false;
    }
  res.details["kappa"] = kap;
  json thn = json::array();
  for (int n = 3; n <= 6; ++n) {
    const ThetaResult t = theta_gamma(n, n, 1000, rng_seed);
    thn.push_back({{"n", n}, {"theta", t.theta_hat}});
    if (t.theta_hat != 1.0 / n) res.passed = false;
  }
  res.details["theta_gamma_n"] = thn;
  const ThetaResult t1 = theta_gamma(3, 1, 200000, rng_seed);
  const double recheck = theta_ratio(t1.certificate, 1, kappa_gamma(3, 1));
  res.details["theta_gamma_1_n3"] = {{"theta_hat", t1.theta_hat}, {"certificate", to_json(t1.certificate)},
                                     {"recheck", recheck}};
  if (!(t1.theta_hat >= 1.0 / 3.0 - 1e-3) || recheck != t1.theta_hat) res.passed = false;
  res.summary = "kappa = n-k for 1<=k<=n<=6 (n>=3), theta(Gamma_n) = 1/n, theta_hat(Gamma_1, n=3) = " +
                fmt(t1.theta_hat);
  return res;
}

SuiteResult verify_theorem21(long samples, std::uint64_t rng_seed) {
  SuiteResult res{"theorem21", true, "", json::array()};
  long total = 0;
  for (int n = 3; n <= 4; ++n)
    for (int k = 1; k <= n; ++k) {
      const ConeSpec cone = make_cone(n, k, 200000, rng_seed);
      const Theorem21Report r = check_theorem21(cone, samples, rng_seed + 17 * n + k);
      json j = to_json(r);
      j["n"] = n;
      j["k"] = k;
      j["theta_hat"] = cone.theta_hat;
      res.details.push_back(j);
      total += r.violations;
      if (!r.passed()) res.passed = false;
    }
  res.summary = std::to_string(total) + " violations over " + std::to_string(samples) + " samples per (n,k)";
  return res;
}

SuiteResult verify_addistruc(long samples, std::uint64_t rng_seed) {
  SuiteResult res{"addistruc", true, "", json::array()};
  long total = 0;
  for (int n = 3; n <= 4; ++n)
    for (int k = 1; k <= n; ++k) {
      ConeSpec cone;
      cone.n = n;
      cone.k = k;
      cone.kappa = kappa_gamma(n, k);
      const AddistrucReport r = check_addistruc(cone, samples, rng_seed + 31 * n + k);
      json j = to_json(r);
      j["n"] = n;
      j["k"] = k;
      res.details.push_back(j);
      total += r.violations;
      if (!r.passed()) res.passed = false;
    }
  res.summary = std::to_string(total) + " violations";
  return res;
}

SuiteResult verify_lemma23(int count) {
  SuiteResult res{"lemma23", true, "", json::array()};
  struct Combo {
    int n, k, alpha;
    double tau;
  };
  std::vector<Combo> combos;
  std::vector<ConeSpec> cones;
  const double neg[] = {-5.0, -2.0, -1.0, -0.5, 0.0, 0.25, 0.5, 0.75, 0.9, 0.99};
  const double pos[] = {0.01, 0.1, 0.25, 0.5, 1.0, 2.0, 3.0, 5.0, 8.0, 13.0};
  std::vector<std::pair<int, int>> nk;
  for (int n = 3; n <= 6; ++n)
    for (int k = 1; k <= n; ++k) {
      cones.push_back(make_cone(n, k, 50000, 1));
      nk.emplace_back(n, k);
    }
  for (std::size_t c = 0; c < cones.size(); ++c) {
    const auto [n, k] = nk[c];
    const double bound = 1.0 + (n - 2) * (1.0 - cones[c].kappa * cones[c].theta_hat);
    for (double t : neg) combos.push_back({n, k, -1, t});
    for (double d : pos) combos.push_back({n, k, 1, bound + d});
  }
  int tested = 0, gated_out = 0, failures = 0;
  const std::size_t total = combos.size();
  for (int i = 0; i < count && i < static_cast<int>(total); ++i) {
    const Combo& cb = combos[static_cast<std::size_t>(i) * total / count];
    const std::size_t ci = std::find(nk.begin(), nk.end(), std::make_pair(cb.n, cb.k)) - nk.begin();
    const EquationParams p = check_params(cb.n, cb.alpha, cb.tau, cones[ci]);
    bool gates_ok = true;
    for (const auto& g : p.gates)
      if (g.name != "lemma_vector" && !g.passed) gates_ok = false;
    if (!gates_ok) {
      ++gated_out;
      continue;
    }
    ++tested;
    const bool member = in_cone(lemma_vector(cb.n, p.rho), cb.k);
    if (!member) {
      ++failures;
      res.passed = false;
      res.details.push_back({{"n", cb.n}, {"k", cb.k}, {"alpha", cb.alpha}, {"tau", cb.tau}, {"rho", p.rho}});
    }
  }
  if (tested < count) res.passed = false;
  res.summary = std::to_string(tested) + " gate-passing combinations, " + std::to_string(failures) +
                " outside the cone, " + std::to_string(gated_out) + " rejected by the gates";
  return res;
}

SuiteResult verify_linearization(int configs, std::uint64_t rng_seed, int grid_size, double rel_tol) {
  SuiteResult res{"linearization", true, "", json::array()};
  std::mt19937_64 rng(rng_seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const Grid grid = Grid::cube(3, grid_size);
  std::vector<ConeSpec> cones;
  for (int k = 1; k <= 3; ++k) cones.push_back(make_cone(3, k, 50000, rng_seed));
  double worst = 0.0;
  int done = 0, attempts = 0;
  while (done < configs && attempts < 50 * configs) {
    ++attempts;
    const int k = 1 + static_cast<int>(unit(rng) * 3) % 3;
    const ConeSpec& cone = cones[k - 1];
    const int alpha = unit(rng) < 0.5 ? -1 : 1;
    const double bound = 1.0 + (1.0 - cone.kappa * cone.theta_hat);
    const double tau = alpha == -1 ? -2.0 + 2.8 * unit(rng) : bound + 0.1 + 3.0 * unit(rng);
    const EquationParams params = validate_params(3, alpha, tau, cone);
    const MetricField g = MetricField::from_generators(grid, random_metric_entries(3, rng));
    const Expr a_pert = random_scalar(3, rng, 0.3);
    SymTensorField A(grid);
    const auto pert = random_metric_entries(3, rng, 0.3);
    const SymTensorField P = sample_sym(grid, pert);
    for (Index p = 0; p < grid.points(); ++p)
      for (int c = 0; c < A.components(); ++c)
        A(p, c) = 2.0 * g.tensor()(p, c) + (P(p, c) - (c == 0 || c == 3 || c == 5 ? 1.0 : 0.0));
    const ScalarField psi = sample(grid, Expr(1.0) + Expr(0.5) * exp(a_pert) - Expr(0.5));
    const OperatorContext ctx(g, A, params, psi);
    const ScalarField u = sample(grid, random_scalar(3, rng, 0.1));
    const OperatorState st = evaluate(ctx, u);
    if (!st.admissible() || st.min_margin < 0.1) continue;
    const ScalarField w = sample(grid, random_scalar(3, rng, 1.0));
    const Linearization lin(ctx, u, st);
    const ScalarField dw = lin.apply(w);
    const double eps = 1e-5;
    const ScalarField fp = residual(ctx, axpby(1.0, u, eps, w));
    const ScalarField fm = residual(ctx, axpby(1.0, u, -eps, w));
    double err = 0.0;
    for (Index p = 0; p < grid.points(); ++p) err = std::max(err, std::abs((fp(p) - fm(p)) / (2 * eps) - dw(p)));
    const double rel = err / std::max(max_abs(dw), 1e-300);
    worst = std::max(worst, rel);
    if (!(rel <= rel_tol)) res.passed = false;
    res.details.push_back({{"k", k}, {"alpha", alpha}, {"tau", tau}, {"min_margin", st.min_margin}, {"rel_error", rel}});
    ++done;
  }
  if (done < configs) res.passed = false;
  res.summary = std::to_string(done) + " configurations, worst relative error " + fmt(worst) + " (tolerance " +
                fmt(rel_tol) + ")";
  return res;
}

ManufacturedInstance manufactured_instance(const Grid& grid, int k, int alpha, double tau) {
  const int n = grid.dim();
  std::vector<Expr> x;
  for (int i = 0; i < n; ++i) x.push_back(Expr::coord(i));
  std::vector<Expr> a;
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) {
      if (i == j)
        a.push_back(Expr(2.0) + Expr(0.5) * sin(x[i]) * cos(x[(i + 1) % n]));
      else if (j == i + 1)
        a.push_back(Expr(0.3) * sin(x[i] + x[j]));
      else
        a.push_back(Expr(0.2) * cos(x[i]));
    }
  Expr us(0.0);
  for (int i = 0; i < n; ++i) us = us + Expr(0.15) * sin(x[i]) * cos(x[(i + 1) % n]);
  us = us + Expr(0.1) * cos(x[n - 1]);

  const EquationParams params = validate_params(n, alpha, tau, make_cone(n, k));
  const MetricField g = MetricField::flat(grid);
  const AnalyticMetric am(n, g.generators());
  ScalarField psi = manufactured_psi(grid, am, a, us, params);
  return {OperatorContext(g, sample_sym(grid, a), params, std::move(psi)), us, a};
}

ScalarField strict_seed(const OperatorContext& ctx, double N_start, SeedReport* report) {
  const Grid& grid = ctx.grid();
  const int n = grid.dim();
  SeedConfig cfg;
  cfg.p0.resize(n);
  double lmin = grid.period(0);
  for (int i = 0; i < n; ++i) {
    cfg.p0(i) = grid.period(i) / 4.0;
    lmin = std::min(lmin, grid.period(i));
  }
  cfg.r0 = lmin / 4.0;
  cfg.N_schedule.clear();
  for (double N = N_start; N <= 1024.0 * N_start; N *= 2.0) cfg.N_schedule.push_back(N);
  const MorsePack morse = make_morse_pack(ctx.g, base_morse(grid, cfg.v_floor), cfg.p0, cfg.r0, cfg.v_floor);
  SeedResult s = seed(ctx, cfg, morse);
  if (report) *report = s.report;
  return std::move(s.u);
}

SuiteResult verify_covariance(double s, int grid_size, double tol) {
  SuiteResult res{"covariance", true, "", json::object()};
  const ManufacturedInstance inst = manufactured_instance(Grid::cube(3, grid_size), 2);
  SolverConfig cfg;
  SolveReport rep;
  const ScalarField u = continuity_solve(inst.ctx, strict_seed(inst.ctx), cfg, &rep);
  const CovarianceReport cr = covariance_check(inst.ctx, u, s, tol);
  res.passed = cr.passed && rep.converged;
  res.details = to_json(cr);
  res.details["solve_residual"] = rep.final_residual;
  res.summary = "shifted residual " + fmt(cr.residual) + " (tolerance " + fmt(tol) + ")";
  return res;
}

const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names = {"lemma23",  "theorem21",          "addistruc", "cone-constants",
                                                 "conformal-identity", "linearization", "covariance"};
  return names;
}

SuiteResult run_suite(const std::string& name, long samples, std::uint64_t rng_seed, const std::vector<int>& sizes) {
  if (name == "lemma23") return verify_lemma23(static_cast<int>(samples > 0 ? samples : 200));
  if (name == "theorem21") return verify_theorem21(samples > 0 ? samples : 10000, rng_seed);
  if (name == "addistruc") return verify_addistruc(samples > 0 ? samples : 1000, rng_seed);
  if (name == "cone-constants") return verify_cone_constants(rng_seed);
  if (name == "conformal-identity")
    return verify_conformal_identity(sizes.size() >= 2 ? sizes : std::vector<int>{16, 32},
                                     static_cast<int>(samples > 0 ? samples : 5), rng_seed);
  if (name == "linearization") return verify_linearization(static_cast<int>(samples > 0 ? samples : 20), rng_seed);
  if (name == "covariance") return verify_covariance(4.0);
  throw std::invalid_argument("unknown verify suite '" + name + "'");
}

}  // namespace confbend
