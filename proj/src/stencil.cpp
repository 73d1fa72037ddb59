#include "confbend/stencil.hpp"

#include <stdexcept>

namespace confbend {

void check_stencil_order(int order) {
  if (order != 2 && order != 4) throw std::invalid_argument("stencil order must be 2 or 4");
}

std::vector<double> partial(const Grid& grid, std::span<const double> values, int comps, int axis, int order) {
  check_stencil_order(order);
  const double h = grid.spacing(axis);
  std::vector<double> out(values.size());
  const Index np = grid.points();
  if (order == 2) {
    const double w = 1.0 / (2.0 * h);
    for (Index p = 0; p < np; ++p) {
      const Index pp = grid.neighbor(p, axis, 1) * comps;
      const Index pm = grid.neighbor(p, axis, -1) * comps;
      for (int c = 0; c < comps; ++c) out[p * comps + c] = w * (values[pp + c] - values[pm + c]);
    }
  } else {
    const double w = 1.0 / (12.0 * h);
    for (Index p = 0; p < np; ++p) {
      const Index p1 = grid.neighbor(p, axis, 1) * comps;
      const Index m1 = grid.neighbor(p, axis, -1) * comps;
      const Index p2 = grid.neighbor(p, axis, 2) * comps;
      const Index m2 = grid.neighbor(p, axis, -2) * comps;
      for (int c = 0; c < comps; ++c)
        out[p * comps + c] =
            w * (-values[p2 + c] + 8.0 * values[p1 + c] - 8.0 * values[m1 + c] + values[m2 + c]);
    }
  }
  return out;
}

ScalarField second_partial(const ScalarField& f, int axis, int order) {
  check_stencil_order(order);
  const Grid& grid = f.grid();
  const double h2 = grid.spacing(axis) * grid.spacing(axis);
  ScalarField out(grid);
  for (Index p = 0; p < grid.points(); ++p) {
    const double c0 = f(p);
    const double p1 = f(grid.neighbor(p, axis, 1));
    const double m1 = f(grid.neighbor(p, axis, -1));
    if (order == 2) {
      out(p) = (p1 - 2.0 * c0 + m1) / h2;
    } else {
      const double p2 = f(grid.neighbor(p, axis, 2));
      const double m2 = f(grid.neighbor(p, axis, -2));
      out(p) = (-p2 + 16.0 * p1 - 30.0 * c0 + 16.0 * m1 - m2) / (12.0 * h2);
    }
  }
  return out;
}

CovectorField gradient(const ScalarField& f, int order) {
  const Grid& grid = f.grid();
  const int n = grid.dim();
  CovectorField g(grid);
  for (int a = 0; a < n; ++a) {
    auto d = partial(grid, f.values(), 1, a, order);
    for (Index p = 0; p < grid.points(); ++p) g(p, a) = d[p];
  }
  return g;
}

SymTensorField hessian_flat(const ScalarField& f, int order) {
  const Grid& grid = f.grid();
  const int n = grid.dim();
  SymTensorField h(grid);
  std::vector<std::vector<double>> first(static_cast<std::size_t>(n));
  for (int a = 0; a < n; ++a) first[a] = partial(grid, f.values(), 1, a, order);
  for (int i = 0; i < n; ++i) {
    ScalarField dii = second_partial(f, i, order);
    for (Index p = 0; p < grid.points(); ++p) h(p, sym_index(i, i, n)) = dii(p);
    for (int j = i + 1; j < n; ++j) {
      auto dij = partial(grid, first[j], 1, i, order);
      for (Index p = 0; p < grid.points(); ++p) h(p, sym_index(i, j, n)) = dij[p];
    }
  }
  return h;
}

double second_derivative_center_weight(int order, double h) {
  check_stencil_order(order);
  return order == 2 ? -2.0 / (h * h) : -30.0 / (12.0 * h * h);
}

}  // namespace confbend
