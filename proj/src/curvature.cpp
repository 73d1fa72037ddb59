#include "confbend/curvature.hpp"

#include <cmath>

#include "confbend/stencil.hpp"

namespace confbend {

namespace {

void check_dim(int n) {
  if (n < 3) throw std::invalid_argument("curvature: dimension must be at least 3");
}

}  // namespace

MetricField::MetricField(SymTensorField g, int order) : g_(std::move(g)), order_(order) {
  check_stencil_order(order);
  const Grid& grid = g_.grid();
  const int n = grid.dim();
  check_dim(n);
  const Index np = grid.points();
  ginv_ = SymTensorField(grid);
  chol_.assign(static_cast<std::size_t>(np * n * n), 0.0);
  for (Index p = 0; p < np; ++p) {
    Mat m = g_.matrix(p);
    for (double v : m.reshaped())
      if (!std::isfinite(v)) throw SpdFailure(p, v);
    Mat l = Mat::Zero(n, n);
    for (int j = 0; j < n; ++j) {
      double d = m(j, j);
      for (int k = 0; k < j; ++k) d -= l(j, k) * l(j, k);
      if (!(d > kSpdFloor)) throw SpdFailure(p, d);
      l(j, j) = std::sqrt(d);
      for (int i = j + 1; i < n; ++i) {
        double s = m(i, j);
        for (int k = 0; k < j; ++k) s -= l(i, k) * l(j, k);
        l(i, j) = s / l(j, j);
      }
    }
    std::copy(l.data(), l.data() + n * n, chol_.begin() + p * n * n);
    Mat linv = l.triangularView<Eigen::Lower>().solve(Mat::Identity(n, n));
    ginv_.set_matrix(p, linv.transpose() * linv);
  }

  // Γ^k_ij = ½ g^kl (∂_i g_jl + ∂_j g_il − ∂_l g_ij)
  std::vector<std::vector<double>> dg(static_cast<std::size_t>(n));
  const int sc = g_.components();
  for (int a = 0; a < n; ++a) dg[a] = partial(grid, g_.values(), sc, a, order_);
  auto dgv = [&](int a, Index p, int i, int j) { return dg[a][p * sc + sym_index(i, j, n)]; };
  gamma_.assign(static_cast<std::size_t>(np * n * n * n), 0.0);
  std::vector<double> lower(static_cast<std::size_t>(n));
  for (Index p = 0; p < np; ++p) {
    Mat gi = ginv_.matrix(p);
    for (int i = 0; i < n; ++i) {
      for (int j = i; j < n; ++j) {
        for (int l = 0; l < n; ++l) lower[l] = 0.5 * (dgv(i, p, j, l) + dgv(j, p, i, l) - dgv(l, p, i, j));
        for (int k = 0; k < n; ++k) {
          double s = 0.0;
          for (int l = 0; l < n; ++l) s += gi(k, l) * lower[l];
          gamma_[((p * n + k) * n + i) * n + j] = s;
          gamma_[((p * n + k) * n + j) * n + i] = s;
        }
      }
    }
  }
}

MetricField MetricField::from_generators(const Grid& grid, std::vector<Expr> entries, int order) {
  MetricField m(sample_sym(grid, entries), order);
  m.generators_ = std::move(entries);
  return m;
}

MetricField MetricField::flat(const Grid& grid, int order) {
  const int n = grid.dim();
  std::vector<Expr> e;
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) e.emplace_back(i == j ? 1.0 : 0.0);
  return from_generators(grid, std::move(e), order);
}

Mat MetricField::cholesky(Index p) const {
  const int n = dim();
  Mat l(n, n);
  std::copy(chol_.begin() + p * n * n, chol_.begin() + (p + 1) * n * n, l.data());
  return l;
}

SymTensorField ricci(const MetricField& g) {
  const Grid& grid = g.grid();
  const int n = grid.dim();
  const int n3 = n * n * n;
  const Index np = grid.points();
  auto gam = g.christoffel_values();
  std::vector<std::vector<double>> dgam(static_cast<std::size_t>(n));
  for (int a = 0; a < n; ++a) dgam[a] = partial(grid, gam, n3, a, g.order());
  auto G = [&](Index p, int k, int i, int j) { return gam[p * n3 + (k * n + i) * n + j]; };
  auto dG = [&](int a, Index p, int k, int i, int j) { return dgam[a][p * n3 + (k * n + i) * n + j]; };

  SymTensorField ric(grid);
  for (Index p = 0; p < np; ++p) {
    Mat r(n, n);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        double s = 0.0;
        for (int l = 0; l < n; ++l) {
          s += dG(l, p, l, i, j) - dG(j, p, l, i, l);
          for (int m = 0; m < n; ++m) s += G(p, l, l, m) * G(p, m, i, j) - G(p, l, j, m) * G(p, m, i, l);
        }
        r(i, j) = s;
      }
    }
    ric.set_matrix(p, r);
  }
  return ric;
}

ScalarField scalar_curvature(const MetricField& g, const SymTensorField& ric) {
  const Grid& grid = g.grid();
  const int n = grid.dim();
  ScalarField r(grid);
  for (Index p = 0; p < grid.points(); ++p) {
    double s = 0.0;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) s += g.inverse()(p, sym_index(i, j, n)) * ric(p, sym_index(i, j, n));
    r(p) = s;
  }
  return r;
}

CurvaturePack curvature(const MetricField& g) {
  CurvaturePack pack;
  pack.ricci = ricci(g);
  pack.scalar = scalar_curvature(g, pack.ricci);
  return pack;
}

SymTensorField modified_schouten(const MetricField& g, const CurvaturePack& curv, double tau, int alpha) {
  const int n = g.dim();
  check_dim(n);
  if (alpha != 1 && alpha != -1) throw std::invalid_argument("modified_schouten: alpha must be +1 or -1");
  const double a = alpha / static_cast<double>(n - 2);
  const double b = tau / (2.0 * (n - 1));
  SymTensorField out(g.grid());
  const int sc = out.components();
  for (Index p = 0; p < g.grid().points(); ++p) {
    const double r = curv.scalar(p);
    for (int c = 0; c < sc; ++c) out(p, c) = a * (curv.ricci(p, c) - b * r * g.tensor()(p, c));
  }
  return out;
}

SymTensorField modified_schouten(const MetricField& g, double tau, int alpha) {
  return modified_schouten(g, curvature(g), tau, alpha);
}

CovariantDerivatives covariant_derivatives(const MetricField& g, const ScalarField& u) {
  const Grid& grid = g.grid();
  const int n = grid.dim();
  CovariantDerivatives d;
  d.du = gradient(u, g.order());
  d.hessian = hessian_flat(u, g.order());
  d.laplacian = ScalarField(grid);
  d.grad_norm2 = ScalarField(grid);
  for (Index p = 0; p < grid.points(); ++p) {
    for (int i = 0; i < n; ++i) {
      for (int j = i; j < n; ++j) {
        double corr = 0.0;
        for (int k = 0; k < n; ++k) corr += g.christoffel(p, k, i, j) * d.du(p, k);
        d.hessian(p, sym_index(i, j, n)) -= corr;
      }
    }
    double lap = 0.0;
    double g2 = 0.0;
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        const double gij = g.inverse()(p, sym_index(i, j, n));
        lap += gij * d.hessian(p, sym_index(i, j, n));
        g2 += gij * d.du(p, i) * d.du(p, j);
      }
    }
    d.laplacian(p) = lap;
    d.grad_norm2(p) = g2;
  }
  return d;
}

SymTensorField covariant_hessian(const MetricField& g, const ScalarField& u) {
  return covariant_derivatives(g, u).hessian;
}

SymTensorField conformal_schouten(const MetricField& g, const SymTensorField& schouten_g, const ScalarField& u,
                                  double tau, int alpha) {
  const int n = g.dim();
  check_dim(n);
  const CovariantDerivatives d = covariant_derivatives(g, u);
  const double c_lap = alpha * (tau - 1.0) / (n - 2);
  const double c_grad = alpha * (tau - 2.0) / 2.0;
  SymTensorField out(g.grid());
  for (Index p = 0; p < g.grid().points(); ++p) {
    for (int i = 0; i < n; ++i) {
      for (int j = i; j < n; ++j) {
        const int c = sym_index(i, j, n);
        const double gij = g.tensor()(p, c);
        out(p, c) = schouten_g(p, c) + c_lap * d.laplacian(p) * gij - alpha * d.hessian(p, c) +
                    c_grad * d.grad_norm2(p) * gij + alpha * d.du(p, i) * d.du(p, j);
      }
    }
  }
  return out;
}

SymTensorField conformal_schouten(const MetricField& g, const ScalarField& u, double tau, int alpha) {
  return conformal_schouten(g, modified_schouten(g, tau, alpha), u, tau, alpha);
}

MetricField conformal_metric(const MetricField& g, const ScalarField& u) {
  SymTensorField t(g.grid());
  const int sc = t.components();
  for (Index p = 0; p < g.grid().points(); ++p) {
    const double s = std::exp(2.0 * u(p));
    for (int c = 0; c < sc; ++c) t(p, c) = s * g.tensor()(p, c);
  }
  if (g.has_generators() && u.generator()) {
    std::vector<Expr> e;
    const Expr factor = exp(Expr(2.0) * *u.generator());
    for (const Expr& gij : g.generators()) e.push_back(factor * gij);
    return MetricField::from_generators(g.grid(), std::move(e), g.order());
  }
  return MetricField(std::move(t), g.order());
}

}  // namespace confbend
