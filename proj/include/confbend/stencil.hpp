#pragma once

#include "confbend/grid.hpp"

namespace confbend {

// Periodic central finite differences of order 2 (default) or 4.
//
// First derivatives use the standard central stencils. Pure second
// derivatives use the compact 3- (5-) point stencils; mixed second
// derivatives are nested first-derivative stencils. None of the stencils
// touch the center point except the pure second derivative.

void check_stencil_order(int order);

/// d/dx_axis of every component of a raw component-fastest array.
std::vector<double> partial(const Grid& grid, std::span<const double> values, int comps, int axis, int order = 2);

template <FieldKind Kind>
Field<double, Kind> partial(const Field<double, Kind>& f, int axis, int order = 2) {
  Field<double, Kind> out(f.grid());
  auto d = partial(f.grid(), f.values(), f.components(), axis, order);
  std::copy(d.begin(), d.end(), out.values().begin());
  return out;
}

/// d²/dx_axis² of a scalar field with the compact stencil.
ScalarField second_partial(const ScalarField& f, int axis, int order = 2);

CovectorField gradient(const ScalarField& f, int order = 2);
SymTensorField hessian_flat(const ScalarField& f, int order = 2);

/// Weight of the center point in the compact second-derivative stencil.
double second_derivative_center_weight(int order, double h);

}  // namespace confbend
