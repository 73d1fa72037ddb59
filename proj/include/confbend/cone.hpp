#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "confbend/grid.hpp"

namespace confbend {

/// Thrown when f is evaluated outside the closed cone.
class ConeError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

double binomial(int n, int j);

/// e_0..e_kmax of λ by the recurrence e_j(λ_1..λ_m) = e_j(λ_1..λ_{m-1}) + λ_m e_{j-1}(λ_1..λ_{m-1}).
template <typename Derived>
VecT<typename Derived::Scalar> elementary_symmetric(const Eigen::MatrixBase<Derived>& lambda, int kmax) {
  using S = typename Derived::Scalar;
  VecT<S> e = VecT<S>::Zero(kmax + 1);
  e(0) = S(1);
  for (Eigen::Index m = 0; m < lambda.size(); ++m)
    for (int j = kmax; j >= 1; --j) e(j) += lambda(m) * e(j - 1);
  return e;
}

template <typename Derived>
typename Derived::Scalar sigma_k(const Eigen::MatrixBase<Derived>& lambda, int k) {
  if (k < 0) throw std::invalid_argument("sigma_k: k must be non-negative");
  if (k > lambda.size()) return typename Derived::Scalar(0);
  return elementary_symmetric(lambda, k)(k);
}

/// σ_k of λ with entry i removed.
template <typename Derived>
typename Derived::Scalar sigma_k_without(const Eigen::MatrixBase<Derived>& lambda, int k, int i) {
  using S = typename Derived::Scalar;
  const int n = static_cast<int>(lambda.size());
  VecT<S> rest(n - 1);
  for (int a = 0, b = 0; a < n; ++a)
    if (a != i) rest(b++) = lambda(a);
  return sigma_k(rest, k);
}

/// Open Gårding cone test (δ = 0) or margin test (δ > 0) on the
/// sup-normalized vector: σ_j(λ/‖λ‖∞) > δ·binom(n, j) for j = 1..k.
template <typename Derived>
bool in_cone(const Eigen::MatrixBase<Derived>& lambda, int k, double delta = 0.0) {
  using S = typename Derived::Scalar;
  const int n = static_cast<int>(lambda.size());
  const S scale = lambda.cwiseAbs().maxCoeff();
  if (!(scale > S(0))) return false;
  const VecT<S> e = elementary_symmetric((lambda / scale).eval(), k);
  for (int j = 1; j <= k; ++j)
    if (!(e(j) > S(delta * binomial(n, j)))) return false;
  return true;
}

/// min_j σ_j(λ/‖λ‖∞)/binom(n, j) over j = 1..k; non-positive outside the open cone.
template <typename Derived>
typename Derived::Scalar cone_margin(const Eigen::MatrixBase<Derived>& lambda, int k) {
  using S = typename Derived::Scalar;
  const int n = static_cast<int>(lambda.size());
  const S scale = lambda.cwiseAbs().maxCoeff();
  if (!(scale > S(0))) return S(0);
  const VecT<S> e = elementary_symmetric((lambda / scale).eval(), k);
  S m = e(1) / S(n);
  for (int j = 2; j <= k; ++j) m = std::min(m, S(e(j) / S(binomial(n, j))));
  return m;
}

/// f = σ_k^{1/k}; rejects points outside the closed cone Γ̄_k.
template <typename Derived>
typename Derived::Scalar f_value(const Eigen::MatrixBase<Derived>& lambda, int k) {
  using S = typename Derived::Scalar;
  const int n = static_cast<int>(lambda.size());
  const VecT<S> e = elementary_symmetric(lambda, k);
  const S scale = lambda.cwiseAbs().maxCoeff();
  for (int j = 1; j <= k; ++j) {
    const S tol = S(1e-12) * S(binomial(n, j)) * std::pow(scale, S(j));
    if (e(j) < -tol) throw ConeError("f_value: sigma_" + std::to_string(j) + " < 0, point outside the closed cone");
  }
  const S sk = std::max(e(k), S(0));
  return k == 1 ? sk : std::pow(sk, S(1) / S(k));
}

/// ∂f/∂λ_i = (1/k) σ_k^{1/k − 1} σ_{k−1}(λ | i).
template <typename Derived>
VecT<typename Derived::Scalar> f_grad(const Eigen::MatrixBase<Derived>& lambda, int k) {
  using S = typename Derived::Scalar;
  const int n = static_cast<int>(lambda.size());
  VecT<S> g(n);
  if (k == 1) {
    g.setOnes();
    return g;
  }
  const S fk = f_value(lambda, k);
  const S pre = std::pow(fk, S(1 - k)) / S(k);
  for (int i = 0; i < n; ++i) g(i) = pre * sigma_k_without(lambda, k - 1, i);
  return g;
}

/// Γ_k with f = σ_k^{1/k} (homogeneity degree ς = 1).
struct ConeSpec {
  int n = 0;
  int k = 0;
  int kappa = 0;
  double theta_hat = 0.0;
  Vec theta_cert;
  double varsigma = 1.0;

  template <typename Derived>
  typename Derived::Scalar f(const Eigen::MatrixBase<Derived>& lambda) const {
    return f_value(lambda, k);
  }
  template <typename Derived>
  VecT<typename Derived::Scalar> grad(const Eigen::MatrixBase<Derived>& lambda) const {
    return f_grad(lambda, k);
  }
  template <typename Derived>
  bool contains(const Eigen::MatrixBase<Derived>& lambda, double delta = 0.0) const {
    return in_cone(lambda, k, delta);
  }
  template <typename Derived>
  typename Derived::Scalar margin(const Eigen::MatrixBase<Derived>& lambda) const {
    return cone_margin(lambda, k);
  }
};

/// Largest k' such that (0^{k'}, 1^{n−k'}) ∈ Γ_k, by direct membership.
int kappa_gamma(int n, int k);

struct ThetaResult {
  double theta_hat = 0.0;
  Vec certificate;  // the feasible point (−α_1..−α_κ, α_{κ+1}..α_n)
  long evaluations = 0;
};

/// The sup ratio α_1 / (n(Σ_{i>κ} α_i − Σ_{i=2}^{κ} α_i)) evaluated at a feasible point,
/// or a negative value if the point is infeasible.
double theta_ratio(const Vec& point, int k, int kappa);

/// Certified lower bound ϑ̂ ≤ ϑ_Γ: exactly 1/n for Γ_n, otherwise multistart
/// coordinate ascent over feasible points within `budget` ratio evaluations.
ThetaResult theta_gamma(int n, int k, long budget = 200000, std::uint64_t rng_seed = 1);

ConeSpec make_cone(int n, int k, long budget = 200000, std::uint64_t rng_seed = 1);

/// Random members of Γ_k: positive draws shifted toward the boundary, rejected if outside.
class ConeSampler {
 public:
  ConeSampler(int n, int k, std::uint64_t rng_seed);
  Vec next();
  /// Sorted ascending.
  Vec next_sorted();

 private:
  int n_;
  int k_;
  std::mt19937_64 rng_;
};

struct Theorem21Report {
  long samples = 0;
  long violations = 0;
  double worst_slack = 0.0;  // min over samples and i ≤ κ+1 of f_i/Σf − ϑ̂
  Vec witness;
  bool passed() const { return violations == 0; }
};

/// f_i(λ) ≥ ϑ̂ Σ f_j(λ) for i ≤ κ+1 and f_i ≥ 0 for all i, on sorted samples.
Theorem21Report check_theorem21(const ConeSpec& cone, long samples, std::uint64_t rng_seed = 1);

struct AddistrucReport {
  long samples = 0;
  long violations = 0;
  Vec witness_lambda;
  Vec witness_mu;
  bool passed() const { return violations == 0; }
};

/// f(tλ) > f(μ) for t = 2·max(1, f(μ)/f(λ)) on random pairs in Γ.
AddistrucReport check_addistruc(const ConeSpec& cone, long samples, std::uint64_t rng_seed = 1);

struct GateResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

struct EquationParams {
  int n = 0;
  int alpha = -1;
  double tau = 0.0;
  double varsigma = 1.0;
  ConeSpec cone;
  double rho = 0.0;
  double gamma = 0.0;
  double a_scale = 0.0;  // (n−2)/(α(τ−1)), so A = a_scale·A^{τ,α}
  double c = 0.0;        // a_scale^ς
  std::vector<GateResult> gates;
};

class GateFailure : public std::invalid_argument {
 public:
  explicit GateFailure(std::vector<GateResult> gates);
  const std::vector<GateResult>& gates() const { return gates_; }

 private:
  std::vector<GateResult> gates_;
};

/// Evaluates every gate (alpha, tau_condition, rho_nonzero, rho_bound, lemma_vector)
/// and fills the derived constants when they are defined. Never throws on gate failure.
EquationParams check_params(int n, int alpha, double tau, const ConeSpec& cone);

/// check_params, throwing GateFailure unless every gate passes.
EquationParams validate_params(int n, int alpha, double tau, const ConeSpec& cone);

/// The vector (1, …, 1, 1 − ρ).
Vec lemma_vector(int n, double rho);

}  // namespace confbend
