#include "confbend/cone.hpp"

#include <algorithm>
#include <sstream>

namespace confbend {

double binomial(int n, int j) {
  if (j < 0 || j > n) return 0.0;
  double b = 1.0;
  for (int i = 1; i <= j; ++i) b = b * (n - j + i) / i;
  return b;
}

int kappa_gamma(int n, int k) {
  if (k < 1 || k > n) throw std::invalid_argument("kappa_gamma: need 1 <= k <= n");
  int best = -1;
  for (int kp = 0; kp <= n - 1; ++kp) {
    Vec v = Vec::Ones(n);
    v.head(kp).setZero();
    if (in_cone(v, k)) best = kp;
  }
  return best;
}

double theta_ratio(const Vec& point, int k, int kappa) {
  const int n = static_cast<int>(point.size());
  if (kappa < 1) return -1.0;
  for (int i = 0; i < n; ++i) {
    if (i < kappa && !(point(i) < 0.0)) return -1.0;
    if (i >= kappa && !(point(i) > 0.0)) return -1.0;
  }
  if (!in_cone(point, k)) return -1.0;
  double denom = 0.0;
  for (int i = kappa; i < n; ++i) denom += point(i);
  for (int i = 1; i < kappa; ++i) denom -= -point(i);
  if (!(denom > 0.0)) return -1.0;
  return -point(0) / (n * denom);
}

namespace {

Vec point_from_logs(const Vec& y, int kappa) {
  Vec p = y.array().exp();
  p.head(kappa) *= -1.0;
  return p;
}

}  // namespace

ThetaResult theta_gamma(int n, int k, long budget, std::uint64_t rng_seed) {
  if (k < 1 || k > n) throw std::invalid_argument("theta_gamma: need 1 <= k <= n");
  ThetaResult res;
  if (k == n) {
    res.theta_hat = 1.0 / n;
    res.certificate = Vec::Ones(n);
    return res;
  }
  const int kappa = kappa_gamma(n, k);
  std::mt19937_64 rng(rng_seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const int starts = 16;
  const long per_start = std::max<long>(budget / starts, 100);
  double best = -1.0;
  Vec best_y;
  for (int s = 0; s < starts && res.evaluations < budget; ++s) {
    long used = 0;
    Vec y(n);
    double r = -1.0;
    while (used < per_start / 4) {
      for (int i = 0; i < n; ++i) y(i) = -0.5 + unit(rng);
      for (int i = 0; i < kappa; ++i) y(i) -= 1.0 + 4.0 * unit(rng);
      r = theta_ratio(point_from_logs(y, kappa), k, kappa);
      ++used;
      if (r > 0.0) break;
    }
    if (!(r > 0.0)) {
      res.evaluations += used;
      continue;
    }
    double step = 0.5;
    while (step > 1e-12 && used < per_start) {
      bool improved = false;
      for (int i = 0; i < n && used < per_start; ++i) {
        for (double dir : {1.0, -1.0}) {
          Vec trial = y;
          trial(i) += dir * step;
          const double rt = theta_ratio(point_from_logs(trial, kappa), k, kappa);
          ++used;
          if (rt > r) {
            y = trial;
            r = rt;
            improved = true;
            break;
          }
        }
      }
      step = improved ? std::min(step * 2.0, 4.0) : step * 0.5;
    }
    res.evaluations += used;
    if (r > best) {
      best = r;
      best_y = y;
    }
  }
  if (!(best > 0.0)) throw std::runtime_error("theta_gamma: no feasible point found within the evaluation budget");
  res.certificate = point_from_logs(best_y, kappa);
  res.theta_hat = theta_ratio(res.certificate, k, kappa);
  return res;
}

ConeSpec make_cone(int n, int k, long budget, std::uint64_t rng_seed) {
  ConeSpec c;
  c.n = n;
  c.k = k;
  c.kappa = kappa_gamma(n, k);
  ThetaResult t = theta_gamma(n, k, budget, rng_seed);
  c.theta_hat = t.theta_hat;
  c.theta_cert = t.certificate;
  return c;
}

ConeSampler::ConeSampler(int n, int k, std::uint64_t rng_seed) : n_(n), k_(k), rng_(rng_seed) {
  if (k < 1 || k > n) throw std::invalid_argument("ConeSampler: need 1 <= k <= n");
}

Vec ConeSampler::next() {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::exponential_distribution<double> expo(1.0);
  std::uniform_int_distribution<int> pick(0, n_ - 1);
  for (;;) {
    Vec v(n_);
    for (int i = 0; i < n_; ++i) v(i) = expo(rng_) + 1e-3;
    const double u = unit(rng_);
    if (u < 0.4) {
      v.array() -= unit(rng_) * v.maxCoeff();
    } else if (u < 0.8) {
      const int i = pick(rng_);
      v(i) -= unit(rng_) * 2.0 * v.sum();
    }
    if (in_cone(v, k_)) return v;
  }
}

Vec ConeSampler::next_sorted() {
  Vec v = next();
  std::sort(v.data(), v.data() + v.size());
  return v;
}

Theorem21Report check_theorem21(const ConeSpec& cone, long samples, std::uint64_t rng_seed) {
  ConeSampler sampler(cone.n, cone.k, rng_seed);
  Theorem21Report rep;
  rep.worst_slack = std::numeric_limits<double>::infinity();
  for (long s = 0; s < samples; ++s) {
    const Vec lam = sampler.next_sorted();
    const Vec g = cone.grad(lam);
    const double sum = g.sum();
    bool bad = !(sum > 0.0);
    for (int i = 0; i < cone.n; ++i) {
      if (g(i) < -1e-12 * std::abs(sum)) bad = true;
      if (i <= cone.kappa) {
        const double slack = g(i) / sum - cone.theta_hat;
        rep.worst_slack = std::min(rep.worst_slack, slack);
        if (slack < -1e-12) bad = true;
      }
    }
    ++rep.samples;
    if (bad) {
      if (rep.violations == 0) rep.witness = lam;
      ++rep.violations;
    }
  }
  return rep;
}

AddistrucReport check_addistruc(const ConeSpec& cone, long samples, std::uint64_t rng_seed) {
  ConeSampler sampler(cone.n, cone.k, rng_seed);
  AddistrucReport rep;
  for (long s = 0; s < samples; ++s) {
    const Vec lam = sampler.next();
    const Vec mu = sampler.next();
    const double fl = cone.f(lam);
    const double fm = cone.f(mu);
    const double t = 2.0 * std::max(1.0, fm / fl);
    const Vec tl = t * lam;
    ++rep.samples;
    if (!(cone.f(tl) > fm)) {
      if (rep.violations == 0) {
        rep.witness_lambda = lam;
        rep.witness_mu = mu;
      }
      ++rep.violations;
    }
  }
  return rep;
}

Vec lemma_vector(int n, double rho) {
  Vec v = Vec::Ones(n);
  v(n - 1) = 1.0 - rho;
  return v;
}

namespace {

std::string describe(const std::vector<GateResult>& gates) {
  std::ostringstream os;
  os << "parameter gates failed:";
  for (const auto& g : gates)
    if (!g.passed) os << " " << g.name << " (" << g.detail << ")";
  return os.str();
}

}  // namespace

GateFailure::GateFailure(std::vector<GateResult> gates)
    : std::invalid_argument(describe(gates)), gates_(std::move(gates)) {}

EquationParams check_params(int n, int alpha, double tau, const ConeSpec& cone) {
  if (n < 3) throw std::invalid_argument("check_params: n must be at least 3");
  if (cone.n != n) throw std::invalid_argument("check_params: cone dimension differs from n");
  EquationParams p;
  p.n = n;
  p.alpha = alpha;
  p.tau = tau;
  p.cone = cone;
  p.varsigma = cone.varsigma;

  const bool alpha_ok = alpha == 1 || alpha == -1;
  p.gates.push_back({"alpha", alpha_ok, "alpha must be +1 or -1"});

  const double kt = cone.kappa * cone.theta_hat;
  double tau_bound = 1.0;
  bool tau_ok = false;
  std::ostringstream td;
  if (alpha == -1) {
    tau_ok = tau < 1.0;
    td << "requires tau < 1";
  } else if (alpha == 1) {
    tau_bound = 1.0 + (n - 2) * (1.0 - kt);
    tau_ok = tau > tau_bound;
    td << "requires tau > " << tau_bound;
  }
  p.gates.push_back({"tau_condition", tau_ok, td.str()});

  const bool defined = tau != 1.0 && std::isfinite(tau);
  if (defined) {
    p.rho = (n - 2) / (tau - 1.0);
    p.gamma = (tau - 2.0) * (n - 2) / (2.0 * (tau - 1.0));
    if (alpha_ok) {
      p.a_scale = (n - 2) / (alpha * (tau - 1.0));
      p.c = p.a_scale > 0.0 ? std::pow(p.a_scale, p.varsigma) : std::numeric_limits<double>::quiet_NaN();
    }
  }
  p.gates.push_back({"rho_nonzero", defined && p.rho != 0.0 && std::isfinite(p.rho), "rho = (n-2)/(tau-1) must be defined and nonzero"});

  bool rho_ok = defined;
  std::ostringstream rd;
  if (1.0 - kt > 0.0) {
    const double bound = 1.0 / (1.0 - kt);
    rho_ok = rho_ok && p.rho < bound;
    rd << "requires rho < " << bound;
  } else {
    rd << "no upper bound (1 - kappa*theta <= 0)";
  }
  p.gates.push_back({"rho_bound", rho_ok, rd.str()});

  const bool lemma_ok = defined && in_cone(lemma_vector(n, p.rho), cone.k);
  p.gates.push_back({"lemma_vector", lemma_ok, "(1,...,1,1-rho) must lie in the cone"});
  return p;
}

EquationParams validate_params(int n, int alpha, double tau, const ConeSpec& cone) {
  EquationParams p = check_params(n, alpha, tau, cone);
  for (const auto& g : p.gates)
    if (!g.passed) throw GateFailure(p.gates);
  return p;
}

}  // namespace confbend
