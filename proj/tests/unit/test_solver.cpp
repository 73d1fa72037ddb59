#include <doctest.h>

#include "confbend/verify.hpp"

using namespace confbend;

TEST_CASE("continuation recovers a manufactured solution") {
  const ManufacturedInstance inst = manufactured_instance(Grid::cube(3, 12), 2);
  SolverConfig cfg;
  SolveReport rep;
  const ScalarField u = continuity_solve(inst.ctx, strict_seed(inst.ctx), cfg, &rep);
  CHECK(rep.converged);
  CHECK(max_abs(residual(inst.ctx, u)) <= cfg.newton_tol);
  CHECK(max_abs_diff(u, sample(inst.ctx.grid(), inst.u_star)) < 1e-2);

  // Cone guard, ellipticity and boundedness along the accepted path.
  REQUIRE_FALSE(rep.iterates.empty());
  for (const auto& it : rep.iterates) {
    CHECK(it.min_margin >= cfg.guard_margin);
    CHECK(it.symbol_min > 0.0);
    CHECK(std::isfinite(it.c2_sup));
  }
  for (const auto& h : rep.homotopy)
    if (h.accepted) CHECK(h.residual <= cfg.newton_tol);
  CHECK(rep.homotopy.back().t == 1.0);
  CHECK(rep.min_symbol() > 0.0);
  CHECK(std::isfinite(rep.max_c2()));
}

TEST_CASE("Newton converges quadratically near the solution") {
  const ManufacturedInstance inst = manufactured_instance(Grid::cube(3, 10), 3);
  const ScalarField us = sample(inst.ctx.grid(), inst.u_star);
  const OperatorContext exact = inst.ctx.with_psi(consistent_psi(inst.ctx, us));
  ScalarField u0 = us;
  for (Index p = 0; p < u0.points(); ++p) u0(p) += 0.02 * std::sin(0.1 * static_cast<double>(p));
  SolverConfig cfg;
  cfg.newton_tol = 1e-12;
  cfg.krylov_tol = 1e-12;
  const NewtonResult nr = newton(exact, u0, cfg);
  REQUIRE(nr.converged);
  CHECK(nr.iterations <= 6);
  CHECK(max_abs_diff(nr.u, us) <= 1e-10);
  std::vector<double> r;
  for (const auto& it : nr.iterates) r.push_back(it.residual);
  CHECK(quadratic_constant(r) < 1e3);
}

TEST_CASE("two seeds reach the same solution") {
  const ManufacturedInstance inst = manufactured_instance(Grid::cube(3, 10), 1);
  SolverConfig cfg;
  const UniquenessReport u = uniqueness_check(inst.ctx, {strict_seed(inst.ctx, 1.0), strict_seed(inst.ctx, 2.0)}, cfg, 1e-6);
  CHECK(u.passed);
  CHECK(u.max_pairwise_diff <= 1e-6);
}

TEST_CASE("covariance under scaling of psi") {
  const SuiteResult r = verify_covariance(4.0, 10);
  CAPTURE(r.summary);
  CHECK(r.passed);
}

TEST_CASE("solver configuration validation and failure reporting") {
  SolverConfig bad;
  bad.newton_tol = -1.0;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad = SolverConfig{};
  bad.backtrack = 1.5;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);

  const ManufacturedInstance inst = manufactured_instance(Grid::cube(3, 8), 2);
  // A seed outside the cone is refused up front.
  ScalarField neg(inst.ctx.grid());
  for (Index p = 0; p < neg.points(); ++p) neg(p) = -3.0 * std::cos(inst.ctx.grid().coordinate(p, 0));
  const OperatorContext zeroA(inst.ctx.g, SymTensorField(inst.ctx.grid()), inst.ctx.params, inst.ctx.psi);
  try {
    continuity_solve(zeroA, neg, SolverConfig{});
    FAIL("expected a solve failure");
  } catch (const SolveFailure& e) {
    CHECK_FALSE(std::string(e.what()).empty());
  }
}
