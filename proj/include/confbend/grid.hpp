#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <numbers>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "confbend/generator.hpp"

namespace confbend {

using Index = std::ptrdiff_t;

/// Largest spatial dimension supported by the per-point dense types.
inline constexpr int kMaxDim = 6;

template <typename Scalar>
using MatT = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, 0, kMaxDim, kMaxDim>;
template <typename Scalar>
using VecT = Eigen::Matrix<Scalar, Eigen::Dynamic, 1, 0, kMaxDim, 1>;
using Mat = MatT<double>;
using Vec = VecT<double>;

/// Periodic structured lattice on a box of the given periods.
/// Points are numbered row-major (last axis fastest).
class Grid {
 public:
  Grid() = default;
  Grid(std::vector<int> sizes, std::vector<double> periods = {});

  static Grid cube(int n, int size, double period = 2.0 * std::numbers::pi);

  int dim() const { return static_cast<int>(sizes_.size()); }
  int size(int axis) const { return sizes_[axis]; }
  double period(int axis) const { return periods_[axis]; }
  double spacing(int axis) const { return periods_[axis] / sizes_[axis]; }
  Index stride(int axis) const { return strides_[axis]; }
  Index points() const { return points_; }
  const std::vector<int>& sizes() const { return sizes_; }
  const std::vector<double>& periods() const { return periods_; }

  /// Multi-index component along one axis.
  int coord_index(Index p, int axis) const {
    return static_cast<int>((p / strides_[axis]) % sizes_[axis]);
  }

  /// Neighbor `offset` steps along `axis`, wrapping periodically.
  Index neighbor(Index p, int axis, int offset) const {
    const int s = sizes_[axis];
    const int c = coord_index(p, axis);
    int m = (c + offset) % s;
    if (m < 0) m += s;
    return p + static_cast<Index>(m - c) * strides_[axis];
  }

  Index index_of(std::span<const int> multi) const;
  double coordinate(Index p, int axis) const { return coord_index(p, axis) * spacing(axis); }
  Vec position(Index p) const;

  /// Grid with every axis size multiplied by `factor`.
  Grid refined(int factor) const;

  bool operator==(const Grid& other) const { return sizes_ == other.sizes_ && periods_ == other.periods_; }

 private:
  std::vector<int> sizes_;
  std::vector<double> periods_;
  std::vector<Index> strides_;
  Index points_ = 0;
};

enum class FieldKind { scalar, covector, sym_tensor };

constexpr int field_components(FieldKind kind, int n) {
  switch (kind) {
    case FieldKind::scalar: return 1;
    case FieldKind::covector: return n;
    case FieldKind::sym_tensor: return n * (n + 1) / 2;
  }
  return 0;
}

/// Upper-triangle, row-major slot of entry (i, j) in an n x n symmetric tensor.
constexpr int sym_index(int i, int j, int n) {
  if (i > j) {
    int t = i;
    i = j;
    j = t;
  }
  return i * n - i * (i - 1) / 2 + (j - i);
}

/// Grid field with a fixed number of components per point, components fastest.
/// Scalar fields may carry the closed-form generator they were sampled from.
template <typename Scalar_, FieldKind Kind>
class Field {
 public:
  using Scalar = Scalar_;
  static constexpr FieldKind kind = Kind;

  Field() = default;
  explicit Field(Grid grid, Scalar fill = Scalar(0))
      : grid_(std::move(grid)),
        comps_(field_components(Kind, grid_.dim())),
        values_(static_cast<std::size_t>(grid_.points() * comps_), fill) {}

  const Grid& grid() const { return grid_; }
  int components() const { return comps_; }
  Index points() const { return grid_.points(); }

  Scalar& operator()(Index p, int c = 0) { return values_[static_cast<std::size_t>(p * comps_ + c)]; }
  const Scalar& operator()(Index p, int c = 0) const {
    return values_[static_cast<std::size_t>(p * comps_ + c)];
  }

  std::span<Scalar> values() { return values_; }
  std::span<const Scalar> values() const { return values_; }

  const std::optional<Expr>& generator() const { return generator_; }
  void set_generator(Expr e) { generator_ = std::move(e); }
  void clear_generator() { generator_.reset(); }

  /// Symmetric tensor at a point as a dense matrix.
  MatT<Scalar> matrix(Index p) const
    requires(Kind == FieldKind::sym_tensor)
  {
    const int n = grid_.dim();
    MatT<Scalar> m(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = i; j < n; ++j) m(i, j) = m(j, i) = (*this)(p, sym_index(i, j, n));
    return m;
  }

  template <typename Derived>
  void set_matrix(Index p, const Eigen::MatrixBase<Derived>& m)
    requires(Kind == FieldKind::sym_tensor)
  {
    const int n = grid_.dim();
    for (int i = 0; i < n; ++i)
      for (int j = i; j < n; ++j) (*this)(p, sym_index(i, j, n)) = Scalar(0.5) * (m(i, j) + m(j, i));
  }

  VecT<Scalar> vector(Index p) const
    requires(Kind == FieldKind::covector)
  {
    const int n = grid_.dim();
    VecT<Scalar> v(n);
    for (int i = 0; i < n; ++i) v(i) = (*this)(p, i);
    return v;
  }

 private:
  Grid grid_;
  int comps_ = 0;
  std::vector<Scalar> values_;
  std::optional<Expr> generator_;
};

template <typename Scalar>
using ScalarFieldT = Field<Scalar, FieldKind::scalar>;
template <typename Scalar>
using CovectorFieldT = Field<Scalar, FieldKind::covector>;
template <typename Scalar>
using SymTensorFieldT = Field<Scalar, FieldKind::sym_tensor>;

using ScalarField = ScalarFieldT<double>;
using CovectorField = CovectorFieldT<double>;
using SymTensorField = SymTensorFieldT<double>;

/// Samples a closed form on the grid; the result remembers its generator.
ScalarField sample(const Grid& grid, const Expr& generator);

/// Same generator sampled on a grid `factor` times finer per axis.
/// Throws std::invalid_argument for fields without a generator or factor < 2.
ScalarField refine(const ScalarField& f, int factor);

/// Symmetric tensor field sampled entry by entry from closed forms
/// (upper triangle, row-major, n(n+1)/2 expressions).
SymTensorField sample_sym(const Grid& grid, std::span<const Expr> entries);

double max_abs(std::span<const double> values);
double max_abs_diff(std::span<const double> a, std::span<const double> b);

template <typename Scalar, FieldKind Kind>
double max_abs(const Field<Scalar, Kind>& f) {
  return max_abs(f.values());
}

template <typename Scalar, FieldKind Kind>
double max_abs_diff(const Field<Scalar, Kind>& a, const Field<Scalar, Kind>& b) {
  return max_abs_diff(a.values(), b.values());
}

/// Pointwise a*x + b*y over fields of the same shape.
template <typename Scalar, FieldKind Kind>
Field<Scalar, Kind> axpby(Scalar a, const Field<Scalar, Kind>& x, Scalar b, const Field<Scalar, Kind>& y) {
  if (!(x.grid() == y.grid())) throw std::invalid_argument("axpby: grid mismatch");
  Field<Scalar, Kind> out(x.grid());
  auto o = out.values();
  auto xv = x.values();
  auto yv = y.values();
  for (std::size_t i = 0; i < o.size(); ++i) o[i] = a * xv[i] + b * yv[i];
  return out;
}

}  // namespace confbend
