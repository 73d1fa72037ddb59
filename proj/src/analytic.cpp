#include "confbend/analytic.hpp"

#include <Eigen/Eigenvalues>

namespace confbend {

AnalyticMetric::AnalyticMetric(int n, std::vector<Expr> entries) : n_(n), g_(std::move(entries)) {
  const int sc = n * (n + 1) / 2;
  if (static_cast<int>(g_.size()) != sc) throw std::invalid_argument("AnalyticMetric: expected n(n+1)/2 entries");
  dg_.resize(static_cast<std::size_t>(n));
  ddg_.assign(static_cast<std::size_t>(n), std::vector<std::vector<Expr>>(static_cast<std::size_t>(n)));
  for (int a = 0; a < n; ++a) {
    for (int c = 0; c < sc; ++c) dg_[a].push_back(g_[c].diff(a));
  }
  for (int a = 0; a < n; ++a)
    for (int b = a; b < n; ++b)
      for (int c = 0; c < sc; ++c) ddg_[a][b].push_back(dg_[a][c].diff(b));
}

PointGeometry AnalyticMetric::at(std::span<const double> x) const {
  const int n = n_;
  PointGeometry geo;
  geo.g.resize(n, n);
  auto val = [&](const std::vector<Expr>& e, int i, int j) { return e[sym_index(i, j, n)].eval(x); };
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) geo.g(i, j) = val(g_, i, j);
  geo.ginv = geo.g.inverse();

  // dg[a](i,j) = ∂_a g_ij, ddg[a][b](i,j) = ∂_a ∂_b g_ij
  std::vector<Mat> dg(static_cast<std::size_t>(n), Mat(n, n));
  std::vector<std::vector<Mat>> ddg(static_cast<std::size_t>(n), std::vector<Mat>(static_cast<std::size_t>(n), Mat(n, n)));
  for (int a = 0; a < n; ++a)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) dg[a](i, j) = val(dg_[a], i, j);
  for (int a = 0; a < n; ++a)
    for (int b = a; b < n; ++b) {
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) ddg[a][b](i, j) = val(ddg_[a][b], i, j);
      ddg[b][a] = ddg[a][b];
    }

  // Γ_lij = ½(∂_i g_jl + ∂_j g_il − ∂_l g_ij) and its derivatives
  auto low = [&](int l, int i, int j) { return 0.5 * (dg[i](j, l) + dg[j](i, l) - dg[l](i, j)); };
  auto dlow = [&](int a, int l, int i, int j) {
    return 0.5 * (ddg[a][i](j, l) + ddg[a][j](i, l) - ddg[a][l](i, j));
  };
  const std::size_t n3 = static_cast<std::size_t>(n * n * n);
  geo.gamma.assign(n3, 0.0);
  std::vector<double> dgamma(static_cast<std::size_t>(n) * n3, 0.0);  // [a][k][i][j]
  std::vector<Mat> dginv(static_cast<std::size_t>(n));
  for (int a = 0; a < n; ++a) dginv[a] = -geo.ginv * dg[a] * geo.ginv;
  for (int k = 0; k < n; ++k)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        double s = 0.0;
        for (int l = 0; l < n; ++l) s += geo.ginv(k, l) * low(l, i, j);
        geo.gamma[(k * n + i) * n + j] = s;
        for (int a = 0; a < n; ++a) {
          double d = 0.0;
          for (int l = 0; l < n; ++l) d += dginv[a](k, l) * low(l, i, j) + geo.ginv(k, l) * dlow(a, l, i, j);
          dgamma[a * n3 + (k * n + i) * n + j] = d;
        }
      }
  auto G = [&](int k, int i, int j) { return geo.gamma[(k * n + i) * n + j]; };
  auto dG = [&](int a, int k, int i, int j) { return dgamma[a * n3 + (k * n + i) * n + j]; };
  geo.ricci.resize(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      double s = 0.0;
      for (int l = 0; l < n; ++l) {
        s += dG(l, l, i, j) - dG(j, l, i, l);
        for (int m = 0; m < n; ++m) s += G(l, l, m) * G(m, i, j) - G(l, j, m) * G(m, i, l);
      }
      geo.ricci(i, j) = s;
    }
  geo.ricci = 0.5 * (geo.ricci + geo.ricci.transpose()).eval();
  geo.scalar = (geo.ginv.cwiseProduct(geo.ricci)).sum();
  return geo;
}

AnalyticScalar::AnalyticScalar(int n, Expr e) : n_(n), e_(std::move(e)) {
  for (int a = 0; a < n; ++a) d_.push_back(e_.diff(a));
  dd_.resize(static_cast<std::size_t>(n));
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) dd_[a].push_back(b < a ? Expr() : d_[a].diff(b));
}

PointJet AnalyticScalar::at(std::span<const double> x) const {
  PointJet j;
  j.value = e_.eval(x);
  j.grad.resize(n_);
  j.hess.resize(n_, n_);
  for (int a = 0; a < n_; ++a) j.grad(a) = d_[a].eval(x);
  for (int a = 0; a < n_; ++a)
    for (int b = a; b < n_; ++b) j.hess(a, b) = j.hess(b, a) = dd_[a][b].eval(x);
  return j;
}

Mat exact_V(const PointGeometry& geo, const PointJet& u, const Mat& A, const EquationParams& params) {
  const int n = static_cast<int>(geo.g.rows());
  Mat hess = u.hess;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) hess(i, j) -= geo.christoffel(k, i, j) * u.grad(k);
  const double lap = geo.ginv.cwiseProduct(hess).sum();
  const double g2 = u.grad.dot(geo.ginv * u.grad);
  Mat V = (lap + params.gamma * g2) * geo.g - params.rho * hess + params.rho * u.grad * u.grad.transpose() + A;
  return 0.5 * (V + V.transpose());
}

ScalarField manufactured_psi(const Grid& grid, const AnalyticMetric& metric, const std::vector<Expr>& A,
                             const Expr& u_star, const EquationParams& params) {
  const int n = grid.dim();
  if (metric.dim() != n) throw std::invalid_argument("manufactured_psi: metric dimension mismatch");
  if (static_cast<int>(A.size()) != n * (n + 1) / 2) throw std::invalid_argument("manufactured_psi: bad A entries");
  AnalyticScalar u(n, u_star);
  ScalarField psi(grid);
  std::vector<double> x(static_cast<std::size_t>(n));
  for (Index p = 0; p < grid.points(); ++p) {
    for (int a = 0; a < n; ++a) x[a] = grid.coordinate(p, a);
    const PointGeometry geo = metric.at(x);
    const PointJet jet = u.at(x);
    Mat a(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) a(i, j) = A[sym_index(i, j, n)].eval(x);
    const Mat V = exact_V(geo, jet, a, params);
    Eigen::GeneralizedSelfAdjointEigenSolver<Mat> es(V, geo.g, Eigen::EigenvaluesOnly);
    const Vec lam = es.eigenvalues();
    if (!in_cone(lam, params.cone.k)) throw ConeError("manufactured_psi: u* is not admissible at a grid point");
    psi(p) = params.cone.f(lam) * std::exp(-2.0 * params.varsigma * jet.value) / params.c;
  }
  return psi;
}

}  // namespace confbend
