#include "confbend/backgrounds.hpp"

#include <limits>

#include "confbend/conformal_operator.hpp"
#include "confbend/morse.hpp"
#include "confbend/nfld.hpp"

namespace confbend {

std::vector<Expr> warped_entries(const Expr& f, const Expr& h) {
  const Expr two(2.0);
  return {Expr(1.0), Expr(0.0), Expr(0.0), exp(two * f), Expr(0.0), exp(two * h)};
}

std::vector<Expr> warped_entries(double K) {
  const Expr x = Expr::coord(0);
  return warped_entries(Expr(K) * sin(x), Expr(-K) * cos(x));
}

std::vector<Expr> conformally_flat_entries(int n, const Expr& phi) {
  const Expr factor = exp(Expr(2.0) * phi);
  std::vector<Expr> e;
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) e.push_back(i == j ? factor : Expr(0.0));
  return e;
}

MetricField make_background(const BackgroundSpec& spec) {
  const int n = spec.grid.dim();
  switch (spec.kind) {
    case BackgroundKind::flat:
      return MetricField::flat(spec.grid, spec.order);
    case BackgroundKind::conformally_flat:
      return MetricField::from_generators(spec.grid, conformally_flat_entries(n, spec.phi), spec.order);
    case BackgroundKind::warped: {
      if (n != 3) throw std::invalid_argument("make_background: the warped family is three-dimensional");
      if (spec.f_gen.has_value() != spec.h_gen.has_value())
        throw std::invalid_argument("make_background: warped generators need both f and h");
      auto e = spec.f_gen ? warped_entries(*spec.f_gen, *spec.h_gen) : warped_entries(spec.K);
      return MetricField::from_generators(spec.grid, std::move(e), spec.order);
    }
    case BackgroundKind::custom:
      return MetricField(read_field<FieldKind::sym_tensor>(spec.path, spec.grid), spec.order);
  }
  throw std::invalid_argument("make_background: unknown kind");
}

std::string to_string(AdmissibilityClass c) {
  switch (c) {
    case AdmissibilityClass::inadmissible: return "inadmissible";
    case AdmissibilityClass::weak_with_strict_point: return "weak_with_strict_point";
    case AdmissibilityClass::strict: return "strict";
  }
  return "unknown";
}

Classification classify_tensor(const MetricField& g, const SymTensorField& A, int k, double weak_tol) {
  const EigenField eig = gen_eigen(A, g);
  Classification c;
  c.min_margin = std::numeric_limits<double>::infinity();
  c.max_margin = -std::numeric_limits<double>::infinity();
  for (Index p = 0; p < g.grid().points(); ++p) {
    const Vec lam = eig.lambda(p);
    const double m = cone_margin(lam, k);
    if (in_cone(lam, k)) ++c.strict_points;
    if (m < c.min_margin) {
      c.min_margin = m;
      c.argmin = p;
    }
    if (m > c.max_margin) {
      c.max_margin = m;
      c.argmax = p;
    }
  }
  if (c.strict_points == g.grid().points())
    c.cls = AdmissibilityClass::strict;
  else if (c.min_margin >= -weak_tol && c.strict_points > 0)
    c.cls = AdmissibilityClass::weak_with_strict_point;
  else
    c.cls = AdmissibilityClass::inadmissible;
  return c;
}

Classification classify(const MetricField& g, const EquationParams& params, double weak_tol) {
  return classify_tensor(g, modified_schouten(g, params.tau, params.alpha), params.cone.k, weak_tol);
}

BackgroundMatch find_admissible_background(const EquationParams& params, const BackgroundSearch& search) {
  if (search.K_values.empty()) throw std::invalid_argument("find_admissible_background: empty K range");
  std::vector<BackgroundScanEntry> scan;
  for (double K : search.K_values) {
    BackgroundSpec spec;
    spec.kind = BackgroundKind::warped;
    spec.grid = search.grid;
    spec.K = K;
    spec.order = search.order;
    MetricField g = make_background(spec);
    const Classification c = classify(g, params);
    scan.push_back({K, c});
    const bool match = search.target == AdmissibilityClass::strict
                           ? c.cls == AdmissibilityClass::strict
                           : c.cls != AdmissibilityClass::inadmissible;
    if (match) return {std::move(g), K, c, std::move(scan)};
  }
  double best = -std::numeric_limits<double>::infinity();
  for (const auto& e : scan) best = std::max(best, e.cls.min_margin);
  throw BackgroundSearchFailure("find_admissible_background: no warped metric of class " + to_string(search.target) +
                                    " in the scanned K range (best minimum margin " + std::to_string(best) + ")",
                                std::move(scan));
}

ScalarField bump_field(const Grid& grid, const Vec& p0, double radius, double amplitude) {
  if (!(radius > 0.0)) throw std::invalid_argument("bump_field: radius must be positive");
  ScalarField b(grid);
  for (Index p = 0; p < grid.points(); ++p) {
    const double r = periodic_distance(grid, p0, grid.position(p)) / radius;
    b(p) = r < 1.0 ? amplitude * std::exp(1.0 - 1.0 / (1.0 - r * r)) : 0.0;
  }
  return b;
}

SymTensorField scalar_multiple(const MetricField& g, const ScalarField& b) {
  SymTensorField A(g.grid());
  const int sc = A.components();
  for (Index p = 0; p < g.grid().points(); ++p)
    for (int c = 0; c < sc; ++c) A(p, c) = b(p) * g.tensor()(p, c);
  return A;
}

}  // namespace confbend
