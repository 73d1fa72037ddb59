#include "confbend/grid.hpp"

#include <cmath>
#include <numeric>

namespace confbend {

Grid::Grid(std::vector<int> sizes, std::vector<double> periods) : sizes_(std::move(sizes)) {
  if (sizes_.size() < 3 || sizes_.size() > static_cast<std::size_t>(kMaxDim))
    throw std::invalid_argument("Grid: dimension must be in [3, " + std::to_string(kMaxDim) + "]");
  if (periods.empty()) periods.assign(sizes_.size(), 2.0 * std::numbers::pi);
  if (periods.size() != sizes_.size()) throw std::invalid_argument("Grid: periods/sizes length mismatch");
  periods_ = std::move(periods);
  for (std::size_t a = 0; a < sizes_.size(); ++a) {
    if (sizes_[a] < 8) throw std::invalid_argument("Grid: every axis needs at least 8 points");
    if (!(periods_[a] > 0.0) || !std::isfinite(periods_[a]))
      throw std::invalid_argument("Grid: periods must be positive and finite");
  }
  strides_.assign(sizes_.size(), 1);
  for (int a = dim() - 2; a >= 0; --a) strides_[a] = strides_[a + 1] * sizes_[a + 1];
  points_ = strides_[0] * sizes_[0];
}

Grid Grid::cube(int n, int size, double period) {
  return Grid(std::vector<int>(static_cast<std::size_t>(n), size),
              std::vector<double>(static_cast<std::size_t>(n), period));
}

Index Grid::index_of(std::span<const int> multi) const {
  Index p = 0;
  for (int a = 0; a < dim(); ++a) {
    int c = multi[a] % sizes_[a];
    if (c < 0) c += sizes_[a];
    p += c * strides_[a];
  }
  return p;
}

Vec Grid::position(Index p) const {
  Vec x(dim());
  for (int a = 0; a < dim(); ++a) x(a) = coordinate(p, a);
  return x;
}

Grid Grid::refined(int factor) const {
  std::vector<int> s = sizes_;
  for (int& v : s) v *= factor;
  return Grid(std::move(s), periods_);
}

ScalarField sample(const Grid& grid, const Expr& generator) {
  ScalarField f(grid);
  std::vector<double> x(static_cast<std::size_t>(grid.dim()));
  for (Index p = 0; p < grid.points(); ++p) {
    for (int a = 0; a < grid.dim(); ++a) x[a] = grid.coordinate(p, a);
    f(p) = generator.eval(x);
  }
  f.set_generator(generator);
  return f;
}

ScalarField refine(const ScalarField& f, int factor) {
  if (factor < 2) throw std::invalid_argument("refine: factor must be >= 2");
  if (!f.generator()) throw std::invalid_argument("refine: field has no closed-form generator");
  return sample(f.grid().refined(factor), *f.generator());
}

SymTensorField sample_sym(const Grid& grid, std::span<const Expr> entries) {
  const int n = grid.dim();
  if (static_cast<int>(entries.size()) != n * (n + 1) / 2)
    throw std::invalid_argument("sample_sym: expected n(n+1)/2 entries");
  SymTensorField f(grid);
  std::vector<double> x(static_cast<std::size_t>(n));
  for (Index p = 0; p < grid.points(); ++p) {
    for (int a = 0; a < n; ++a) x[a] = grid.coordinate(p, a);
    for (std::size_t c = 0; c < entries.size(); ++c) f(p, static_cast<int>(c)) = entries[c].eval(x);
  }
  return f;
}

double max_abs(std::span<const double> values) {
  double m = 0.0;
  for (double v : values) m = std::max(m, std::abs(v));
  return m;
}

double max_abs_diff(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw std::invalid_argument("max_abs_diff: size mismatch");
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

}  // namespace confbend
