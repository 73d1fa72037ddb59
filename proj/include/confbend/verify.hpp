#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "confbend/report.hpp"

namespace confbend {

struct SuiteResult {
  std::string name;
  bool passed = false;
  std::string summary;
  json details;
};

/// Random smooth metric δ + Σ small Fourier modes (SPD by construction) and scalar, as closed forms.
std::vector<Expr> random_metric_entries(int n, std::mt19937_64& rng, double amplitude = 0.15);
Expr random_scalar(int n, std::mt19937_64& rng, double amplitude = 0.3, int modes = 3);

/// Conformal transformation law vs direct curvature of e^{2u}g under refinement.
SuiteResult verify_conformal_identity(const std::vector<int>& sizes, int pairs, std::uint64_t rng_seed,
                                      double tau = 0.0, int alpha = -1, double min_order = 1.7, double max_order = 2.3);

/// κ identity for 1 ≤ k ≤ n ≤ 6, ϑ(Γ_n) = 1/n, ϑ̂(Γ_1, n = 3) ≥ 1/3 − 1e−3.
SuiteResult verify_cone_constants(std::uint64_t rng_seed);

/// Structure inequality on random cone samples for (n, k) ∈ {3, 4} × {1..n}.
SuiteResult verify_theorem21(long samples, std::uint64_t rng_seed);

SuiteResult verify_addistruc(long samples, std::uint64_t rng_seed);

/// (1,…,1,1−ρ) ∈ Γ over `count` (n, α, τ, k) combinations passing the parameter gates.
SuiteResult verify_lemma23(int count);

/// Analytic DF against central differences of F on random admissible configurations.
SuiteResult verify_linearization(int configs, std::uint64_t rng_seed, int grid_size = 12, double rel_tol = 1e-6);

/// A manufactured problem on a flat torus with a strictly admissible synthetic A.
struct ManufacturedInstance {
  OperatorContext ctx;
  Expr u_star;
  std::vector<Expr> A_entries;
};

ManufacturedInstance manufactured_instance(const Grid& grid, int k, int alpha = -1, double tau = 0.0);

/// u̲ = e^{N w} for the base Morse function with a schedule starting at N_start.
ScalarField strict_seed(const OperatorContext& ctx, double N_start = 1.0, SeedReport* report = nullptr);

/// Solves a small manufactured problem and checks the shift covariance with s.
SuiteResult verify_covariance(double s, int grid_size = 12, double tol = 1e-8);

SuiteResult run_suite(const std::string& name, long samples, std::uint64_t rng_seed, const std::vector<int>& sizes);
const std::vector<std::string>& suite_names();

}  // namespace confbend
