#include <doctest.h>

#include <random>

#include "confbend/verify.hpp"

using namespace confbend;

// Randomized checks of structural identities, run over many draws.

TEST_CASE("every gate-passing parameter set puts the key vector in the cone") {
  const SuiteResult r = verify_lemma23(200);
  CAPTURE(r.summary);
  CHECK(r.passed);
}

TEST_CASE("structure inequality for every cone with n = 3, 4") {
  const SuiteResult t = verify_theorem21(2000, 99);
  CAPTURE(t.summary);
  CHECK(t.passed);
  const SuiteResult a = verify_addistruc(500, 99);
  CAPTURE(a.summary);
  CHECK(a.passed);
}

TEST_CASE("cone constants") {
  const SuiteResult r = verify_cone_constants(5);
  CAPTURE(r.summary);
  CHECK(r.passed);
}

TEST_CASE("random metrics are positive definite and curvature is finite") {
  std::mt19937_64 rng(17);
  const Grid grid = Grid::cube(3, 8);
  for (int trial = 0; trial < 10; ++trial) {
    const MetricField g = MetricField::from_generators(grid, random_metric_entries(3, rng));
    const CurvaturePack c = curvature(g);
    for (double v : c.ricci.values()) REQUIRE(std::isfinite(v));
    for (Index p = 0; p < grid.points(); ++p) CHECK(g.matrix(p).llt().info() == Eigen::Success);
  }
}

TEST_CASE("V is invariant under constant shifts for random data") {
  std::mt19937_64 rng(23);
  const Grid grid = Grid::cube(3, 8);
  for (int k = 1; k <= 3; ++k) {
    const MetricField g = MetricField::from_generators(grid, random_metric_entries(3, rng));
    const EquationParams params = validate_params(3, -1, -0.5, make_cone(3, k));
    const OperatorContext ctx(g, reduced_A(g, params), params, ScalarField(grid, 1.0));
    const ScalarField u = sample(grid, random_scalar(3, rng));
    ScalarField v = u;
    std::uniform_real_distribution<double> shift(-5.0, 5.0);
    const double s = shift(rng);
    for (Index p = 0; p < grid.points(); ++p) v(p) += s;
    CHECK(max_abs_diff(assemble_V(ctx, u), assemble_V(ctx, v)) <= 1e-12 * (1.0 + max_abs(assemble_V(ctx, u))));
  }
}

TEST_CASE("scaling psi shifts the solution by a constant") {
  std::mt19937_64 rng(29);
  const ManufacturedInstance inst = manufactured_instance(Grid::cube(3, 8), 3);
  const ScalarField us = sample(inst.ctx.grid(), inst.u_star);
  const OperatorContext exact = inst.ctx.with_psi(consistent_psi(inst.ctx, us));
  std::uniform_real_distribution<double> scale(0.1, 10.0);
  for (int trial = 0; trial < 5; ++trial) {
    const double s = scale(rng);
    const CovarianceReport r = covariance_check(exact, us, s, 1e-10);
    CHECK(r.passed);
  }
}
