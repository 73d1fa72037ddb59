#include <doctest.h>

#include <cmath>

#include "confbend/stencil.hpp"

using namespace confbend;

namespace {

// Rolls a field by one grid step along `axis` (value at p moves to p + e_axis).
template <FieldKind Kind>
Field<double, Kind> roll(const Field<double, Kind>& f, int axis) {
  Field<double, Kind> out(f.grid());
  for (Index p = 0; p < f.points(); ++p)
    for (int c = 0; c < f.components(); ++c) out(f.grid().neighbor(p, axis, 1), c) = f(p, c);
  return out;
}

const Expr kSmooth = Expr::parse("sin(x0)*cos(2*x1) + 0.3*exp(cos(x2)) + 0.2*sin(x0 + x1 - x2)");

}  // namespace

TEST_CASE("expressions parse, evaluate and differentiate") {
  const Expr e = Expr::parse("2*sin(x0)^2 + exp(-x1) - pi*x2");
  const double x[3] = {0.3, 0.7, 1.1};
  CHECK(e.eval(x) == doctest::Approx(2 * std::pow(std::sin(0.3), 2) + std::exp(-0.7) - std::numbers::pi * 1.1));
  const Expr d0 = e.diff(0);
  CHECK(d0.eval(x) == doctest::Approx(4 * std::sin(0.3) * std::cos(0.3)));
  CHECK(e.diff(1).eval(x) == doctest::Approx(-std::exp(-0.7)));
  CHECK(e.diff(2).eval(x) == doctest::Approx(-std::numbers::pi));
  CHECK(Expr::parse(e.str()).eval(x) == doctest::Approx(e.eval(x)).epsilon(1e-14));
  CHECK_THROWS_AS(Expr::parse("sin(x0"), std::invalid_argument);
  CHECK_THROWS_AS(Expr::parse("foo(x0)"), std::invalid_argument);
}

TEST_CASE("grid indexing is periodic and row-major") {
  const Grid g({8, 9, 10});
  CHECK(g.points() == 720);
  CHECK(g.stride(2) == 1);
  CHECK(g.stride(0) == 90);
  const int m[3] = {7, -1, 11};
  const Index p = g.index_of(m);
  CHECK(g.coord_index(p, 0) == 7);
  CHECK(g.coord_index(p, 1) == 8);
  CHECK(g.coord_index(p, 2) == 1);
  CHECK(g.neighbor(p, 0, 1) == g.index_of(std::array<int, 3>{0, 8, 1}));
  CHECK(g.neighbor(p, 2, -2) == g.index_of(std::array<int, 3>{7, 8, 9}));
  CHECK(g.refined(2).size(1) == 18);
  CHECK_THROWS_AS(Grid({8, 8}), std::invalid_argument);
  CHECK_THROWS_AS(Grid({8, 8, 4}), std::invalid_argument);
  CHECK_THROWS_AS(Grid({8, 8, 8}, {1.0, 1.0}), std::invalid_argument);
}

TEST_CASE("sampled fields keep their generator and refine") {
  const Grid g = Grid::cube(3, 8);
  const ScalarField f = sample(g, kSmooth);
  REQUIRE(f.generator());
  const ScalarField r = refine(f, 2);
  CHECK(r.grid().size(0) == 16);
  // Every coarse point is a fine point.
  for (Index p = 0; p < g.points(); p += 37) {
    const std::array<int, 3> fine{2 * g.coord_index(p, 0), 2 * g.coord_index(p, 1), 2 * g.coord_index(p, 2)};
    CHECK(r(r.grid().index_of(fine)) == f(p));
  }
}

TEST_CASE("stencils converge at their nominal order") {
  for (int order : {2, 4}) {
    double prev_g = 0.0, prev_h = 0.0;
    for (int s : {16, 32}) {
      const Grid g = Grid::cube(3, s);
      const ScalarField f = sample(g, kSmooth);
      const CovectorField df = gradient(f, order);
      const SymTensorField hf = hessian_flat(f, order);
      double eg = 0.0, eh = 0.0;
      std::vector<double> x(3);
      for (Index p = 0; p < g.points(); ++p) {
        for (int a = 0; a < 3; ++a) x[a] = g.coordinate(p, a);
        for (int i = 0; i < 3; ++i) {
          eg = std::max(eg, std::abs(df(p, i) - kSmooth.diff(i).eval(x)));
          for (int j = i; j < 3; ++j)
            eh = std::max(eh, std::abs(hf(p, sym_index(i, j, 3)) - kSmooth.diff(i).diff(j).eval(x)));
        }
      }
      if (prev_g > 0.0) {
        const double og = std::log2(prev_g / eg), oh = std::log2(prev_h / eh);
        CAPTURE(order);
        CHECK(og >= order - 0.3);
        CHECK(og <= order + 0.3);
        CHECK(oh >= order - 0.3);
        CHECK(oh <= order + 0.3);
      }
      prev_g = eg;
      prev_h = eh;
    }
  }
  CHECK_THROWS_AS(check_stencil_order(3), std::invalid_argument);
}

TEST_CASE("stencils commute with periodic shifts bit-for-bit") {
  const Grid g({8, 10, 12});
  const ScalarField f = sample(g, kSmooth);
  for (int axis = 0; axis < 3; ++axis) {
    const ScalarField rf = roll(f, axis);
    CHECK(max_abs_diff(gradient(rf), roll(gradient(f), axis)) == 0.0);
    CHECK(max_abs_diff(hessian_flat(rf, 4), roll(hessian_flat(f, 4), axis)) == 0.0);
  }
  // A full period of single-step shifts is the identity.
  ScalarField r = f;
  for (int i = 0; i < g.size(1); ++i) r = roll(r, 1);
  CHECK(max_abs_diff(r, f) == 0.0);
}

TEST_CASE("gradient is linear") {
  const Grid g = Grid::cube(3, 12);
  const ScalarField f = sample(g, kSmooth);
  const ScalarField h = sample(g, Expr::parse("cos(x0 - 2*x2) + x1*0"));
  const double a = 0.7, b = -2.3;
  const CovectorField lhs = gradient(axpby(a, f, b, h));
  const CovectorField rhs = axpby(a, gradient(f), b, gradient(h));
  CHECK(max_abs_diff(lhs, rhs) <= 1e-13 * (1.0 + max_abs(rhs)));
}
