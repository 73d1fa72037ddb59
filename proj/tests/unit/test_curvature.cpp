#include <doctest.h>

#include <cmath>

#include "confbend/analytic.hpp"
#include "confbend/backgrounds.hpp"
#include "confbend/verify.hpp"

using namespace confbend;

namespace {

std::vector<Expr> sample_metric() {
  return {Expr::parse("1 + 0.2*cos(x1)"), Expr::parse("0.1*sin(x0 + x2)"), Expr(0.0),
          Expr::parse("1 + 0.15*sin(x2)"), Expr::parse("0.05*cos(x0)"),    Expr::parse("1.2 + 0.1*cos(x0 - x1)")};
}

double ricci_error(int size) {
  const Grid grid = Grid::cube(3, size);
  const auto e = sample_metric();
  const MetricField g = MetricField::from_generators(grid, e);
  const SymTensorField ric = ricci(g);
  const AnalyticMetric am(3, e);
  double err = 0.0;
  std::vector<double> x(3);
  for (Index p = 0; p < grid.points(); ++p) {
    for (int a = 0; a < 3; ++a) x[a] = grid.coordinate(p, a);
    const PointGeometry geo = am.at(x);
    err = std::max(err, (ric.matrix(p) - geo.ricci).cwiseAbs().maxCoeff());
  }
  return err;
}

}  // namespace

TEST_CASE("flat and constant conformal factors have zero curvature") {
  const Grid grid = Grid::cube(3, 8);
  const CurvaturePack flat = curvature(MetricField::flat(grid));
  CHECK(max_abs(flat.ricci) == 0.0);
  CHECK(max_abs(flat.scalar) == 0.0);

  BackgroundSpec spec;
  spec.kind = BackgroundKind::conformally_flat;
  spec.grid = grid;
  spec.phi = Expr(0.4);
  const CurvaturePack c = curvature(make_background(spec));
  CHECK(max_abs(c.ricci) <= 1e-12);
  CHECK(max_abs(c.scalar) <= 1e-12);
}

TEST_CASE("discrete Ricci converges to the symbolic one at second order") {
  const double e16 = ricci_error(16), e32 = ricci_error(32);
  const double order = std::log2(e16 / e32);
  CAPTURE(e16);
  CAPTURE(e32);
  CHECK(order >= 1.7);
  CHECK(order <= 2.3);
}

TEST_CASE("Christoffel symbols match the symbolic ones") {
  const Grid grid = Grid::cube(3, 32);
  const auto e = sample_metric();
  const MetricField g = MetricField::from_generators(grid, e);
  const AnalyticMetric am(3, e);
  double err = 0.0;
  std::vector<double> x(3);
  for (Index p = 0; p < grid.points(); p += 7) {
    for (int a = 0; a < 3; ++a) x[a] = grid.coordinate(p, a);
    const PointGeometry geo = am.at(x);
    for (int k = 0; k < 3; ++k)
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) err = std::max(err, std::abs(g.christoffel(p, k, i, j) - geo.christoffel(k, i, j)));
  }
  CHECK(err < 2e-3);
}

TEST_CASE("scaling the metric by a constant") {
  const Grid grid = Grid::cube(3, 12);
  const auto e = sample_metric();
  const double c2 = 2.25;
  std::vector<Expr> scaled;
  for (const auto& x : e) scaled.push_back(Expr(c2) * x);
  const CurvaturePack a = curvature(MetricField::from_generators(grid, e));
  const CurvaturePack b = curvature(MetricField::from_generators(grid, scaled));
  CHECK(max_abs_diff(a.ricci, b.ricci) <= 1e-10 * max_abs(a.ricci));
  ScalarField rs = a.scalar;
  for (Index p = 0; p < grid.points(); ++p) rs(p) /= c2;
  CHECK(max_abs_diff(rs, b.scalar) <= 1e-10 * max_abs(rs));
}

TEST_CASE("scalar curvature is the trace of Ricci") {
  const Grid grid = Grid::cube(3, 12);
  const MetricField g = MetricField::from_generators(grid, sample_metric());
  const CurvaturePack c = curvature(g);
  for (Index p = 0; p < grid.points(); ++p) {
    const double tr = (g.inverse_matrix(p) * c.ricci.matrix(p)).trace();
    CHECK(std::abs(tr - c.scalar(p)) <= 1e-10 * std::max(1.0, std::abs(tr)));
  }
}

TEST_CASE("modified Schouten tensor special cases") {
  const Grid grid = Grid::cube(3, 10);
  const MetricField g = MetricField::from_generators(grid, sample_metric());
  const CurvaturePack c = curvature(g);
  // n = 3, α = −1, τ = 0 gives −Ric.
  const SymTensorField a = modified_schouten(g, c, 0.0, -1);
  CHECK(max_abs_diff(a, axpby(-1.0, c.ricci, 0.0, c.ricci)) <= 1e-14);
  // τ = 1, α = 1 is the classical Schouten tensor Ric − R g / 4.
  const SymTensorField s = modified_schouten(g, c, 1.0, 1);
  for (Index p = 0; p < grid.points(); p += 11) {
    const Mat expect = c.ricci.matrix(p) - 0.25 * c.scalar(p) * g.matrix(p);
    CHECK((s.matrix(p) - expect).cwiseAbs().maxCoeff() <= 1e-12);
  }
}

TEST_CASE("conformal transformation law converges under refinement") {
  const SuiteResult r = verify_conformal_identity({16, 32}, 1, 7);
  CAPTURE(r.summary);
  CHECK(r.passed);
}

TEST_CASE("warped scalar curvature matches the one-dimensional formula at second order") {
  const double K = 1.0;
  double prev = 0.0;
  for (int s : {32, 64}) {
    const Grid grid({s, 8, 8});
    const MetricField g = MetricField::from_generators(grid, warped_entries(K));
    const CurvaturePack c = curvature(g);
    double err = 0.0;
    for (Index p = 0; p < grid.points(); ++p) {
      const double x = grid.coordinate(p, 0);
      const double f1 = K * std::cos(x), f2 = -K * std::sin(x);
      const double h1 = K * std::sin(x), h2 = K * std::cos(x);
      const double R = -2.0 * (f2 + f1 * f1 + h2 + h1 * h1 + f1 * h1);
      err = std::max(err, std::abs(c.scalar(p) - R));
    }
    if (prev > 0.0) {
      const double order = std::log2(prev / err);
      CHECK(order >= 1.7);
      CHECK(order <= 2.3);
    }
    prev = err;
  }
}

TEST_CASE("non-positive metrics are rejected") {
  const Grid grid = Grid::cube(3, 8);
  SymTensorField t = MetricField::flat(grid).tensor();
  t(17, sym_index(1, 1, 3)) = -0.5;
  try {
    MetricField g(t);
    FAIL("expected an SPD failure");
  } catch (const SpdFailure& e) {
    CHECK(e.point() == 17);
    CHECK(e.pivot() < 0.0);
  }
}
