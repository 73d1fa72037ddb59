#include <doctest.h>

#include <cmath>

#include "confbend/backgrounds.hpp"
#include "confbend/seed.hpp"

using namespace confbend;

namespace {

Vec vec3(double a, double b, double c) {
  Vec v(3);
  v << a, b, c;
  return v;
}

const double kPi = std::numbers::pi;

}  // namespace

TEST_CASE("base Morse function") {
  const Grid grid = Grid::cube(3, 12);
  const Expr v = base_morse_expr(grid, -1.5);
  const auto crit = base_morse_critical_points(grid);
  CHECK(crit.size() == 8);
  for (const Vec& p : crit)
    for (int i = 0; i < 3; ++i) CHECK(std::abs(v.diff(i).eval(std::span<const double>(p.data(), 3))) <= 1e-14);
  CHECK(max_abs(base_morse(grid, -1.5)) <= 1.5 + 6.0);
  const ScalarField s = base_morse(grid, -1.5);
  CHECK(*std::max_element(s.values().begin(), s.values().end()) <= -1.5 + 1e-14);
}

TEST_CASE("periodic geometry helpers") {
  const Grid grid = Grid::cube(3, 8);
  const Vec a = vec3(0.1, 0.2, 0.3), b = vec3(2 * kPi - 0.1, 0.2, 0.3);
  CHECK(periodic_distance(grid, a, b) == doctest::Approx(0.2));
  CHECK(periodic_distance(grid, b, a) == doctest::Approx(0.2));
  CHECK(periodic_delta(grid, a, b)(0) == doctest::Approx(-0.2));
  const Vec w = wrap(grid, vec3(-0.5, 7.0, 3.0));
  CHECK(w(0) == doctest::Approx(2 * kPi - 0.5));
  CHECK(w(1) == doctest::Approx(7.0 - 2 * kPi));
  CHECK(plateau_bump(0.3) == 1.0);
  CHECK(plateau_bump(1.2) == 0.0);
  CHECK(plateau_bump(0.75) > 0.0);
  CHECK(plateau_bump(0.75) < 1.0);
}

TEST_CASE("bump flow translates sources exactly and is the identity far away") {
  const Grid grid = Grid::cube(3, 8);
  const std::vector<Translation> moves{{vec3(1.0, 1.0, 1.0), vec3(1.8, 1.3, 0.9)},
                                       {vec3(4.5, 4.5, 4.5), vec3(4.0, 4.2, 4.6)}};
  const BumpFlow h(grid, moves, 0.5, 64);
  for (const auto& m : moves) CHECK((h.forward(m.source) - m.destination).cwiseAbs().maxCoeff() <= 1e-8);
  const Vec far = vec3(1.0, 4.0, 2.5);
  CHECK((h.forward(far) - far).cwiseAbs().maxCoeff() == 0.0);
  const Vec x = vec3(1.3, 1.1, 1.0);
  CHECK((h.inverse(h.forward(x)) - x).cwiseAbs().maxCoeff() <= 1e-8);

  const std::vector<Translation> crossing{{vec3(1.0, 1.0, 1.0), vec3(3.0, 1.0, 1.0)},
                                          {vec3(2.0, 0.0, 1.0), vec3(2.0, 2.0, 1.0)}};
  CHECK_THROWS_AS(BumpFlow(grid, crossing, 0.3), CollisionError);
}

TEST_CASE("contraction flow integrator matches its closed form") {
  const Grid grid = Grid::cube(3, 8);
  const ContractionFlow flow{vec3(kPi / 2, kPi / 2, kPi / 2), 2.0};
  for (const Vec& y : {vec3(0.3, 2.0, 5.0), vec3(1.5, 1.6, 1.7), vec3(6.0, 0.1, 3.2)}) {
    CHECK(periodic_distance(grid, contraction_inverse(grid, flow, y), contraction_inverse_exact(grid, flow, y)) <=
          1e-8);
    const Vec x = contraction_forward(grid, flow, y);
    CHECK(periodic_distance(grid, contraction_inverse(grid, flow, x), y) <= 1e-8);
  }
}

TEST_CASE("gradient lower bound outside the ball") {
  const Grid grid = Grid::cube(3, 16);
  const MetricField g = MetricField::flat(grid);
  const Vec p0 = vec3(kPi / 2, kPi / 2, kPi / 2);
  const ScalarField v = contract_points(grid, base_morse_expr(grid, -1.0), ContractionFlow{p0, 2.0});
  const MorsePack mp = make_morse_pack(g, v, p0, 2.0, -1.0);
  CHECK(mp.m0 > 0.0);
  const CovariantDerivatives d = covariant_derivatives(g, mp.v);
  for (Index p = 0; p < grid.points(); ++p)
    if (periodic_distance(grid, p0, grid.position(p)) > 2.0) CHECK(d.grad_norm2(p) >= mp.m0);
  CHECK_THROWS_AS(make_morse_pack(g, base_morse(grid, 0.5), p0, 2.0, -1.0), std::invalid_argument);
}

TEST_CASE("seed for a bump-supported A") {
  const Grid grid = Grid::cube(3, 32);
  const MetricField g = MetricField::flat(grid);
  const Vec p0 = vec3(kPi / 2, kPi / 2, kPi / 2);
  const EquationParams params = validate_params(3, -1, 0.0, make_cone(3, 2));
  const OperatorContext ctx(g, scalar_multiple(g, bump_field(grid, p0, 2.6, 1.0)), params, ScalarField(grid, 1.0));
  const MorsePack mp =
      make_morse_pack(g, contract_points(grid, base_morse_expr(grid, -1.0), ContractionFlow{p0, 2.0}), p0, 2.0, -1.0);
  SeedConfig cfg;
  cfg.p0 = p0;
  cfg.r0 = 2.0;
  const SeedResult s = seed(ctx, cfg, mp);
  CHECK(s.report.attempts.size() <= 11);
  CHECK(s.report.attempts.back().accepted);
  CHECK(s.report.key_vector_in_cone);
  CHECK(s.report.ball_V_min_margin >= cfg.delta);
  CHECK(s.report.outside_V_min_margin >= cfg.delta);
  for (Index p = 0; p < grid.points(); ++p) CHECK(ctx.cone().contains(s.eig.lambda(p), cfg.delta));
  // Rebuild the derivatives of e^{Nv} by the chain rule and push them through the general operator.
  const CovariantDerivatives dv = covariant_derivatives(g, mp.v);
  CovariantDerivatives du = dv;
  for (Index p = 0; p < grid.points(); ++p) {
    const double e = std::exp(s.N * mp.v(p));
    for (int i = 0; i < 3; ++i) du.du(p, i) = s.N * e * dv.du(p, i);
    for (int i = 0; i < 3; ++i)
      for (int j = i; j < 3; ++j)
        du.hessian(p, sym_index(i, j, 3)) = s.N * e * (dv.hessian(p, sym_index(i, j, 3)) + s.N * dv.du(p, i) * dv.du(p, j));
    du.laplacian(p) = s.N * e * (dv.laplacian(p) + s.N * dv.grad_norm2(p));
    du.grad_norm2(p) = s.N * s.N * e * e * dv.grad_norm2(p);
  }
  const EigenField eig = gen_eigen(assemble_V(ctx, du), g);
  for (Index p = 0; p < grid.points(); ++p) {
    CHECK(ctx.cone().contains(eig.lambda(p), cfg.delta));
    CHECK((eig.lambda(p) - s.eig.lambda(p)).cwiseAbs().maxCoeff() <= 1e-9 * (1.0 + s.eig.lambda(p).cwiseAbs().maxCoeff()));
  }
}

TEST_CASE("seed rejects inadmissible data") {
  const Grid grid = Grid::cube(3, 12);
  const MetricField g = MetricField::flat(grid);
  const Vec p0 = vec3(kPi / 2, kPi / 2, kPi / 2);
  const EquationParams params = validate_params(3, -1, 0.0, make_cone(3, 3));
  const MorsePack mp = make_morse_pack(g, base_morse(grid, -1.0), p0, 2.0, -1.0);
  SeedConfig cfg;
  cfg.p0 = p0;

  const OperatorContext negative(g, scalar_multiple(g, ScalarField(grid, -1.0)), params, ScalarField(grid, 1.0));
  CHECK_THROWS_AS(seed(negative, cfg, mp), SeedFailure);
  // A ≡ 0 is weakly admissible but never strict on the ball.
  const OperatorContext zero(g, SymTensorField(grid), params, ScalarField(grid, 1.0));
  CHECK_THROWS_AS(seed(zero, cfg, mp), SeedFailure);

  SeedConfig bad = cfg;
  bad.r0 = 4.0;
  CHECK_THROWS_AS(bad.validate(grid), std::invalid_argument);
  bad = cfg;
  bad.N_schedule = {4.0, 2.0};
  CHECK_THROWS_AS(bad.validate(grid), std::invalid_argument);
}
