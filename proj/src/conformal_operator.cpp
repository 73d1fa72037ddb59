#include "confbend/conformal_operator.hpp"

#include <Eigen/Eigenvalues>
#include <limits>

#include "confbend/stencil.hpp"

namespace confbend {

OperatorContext::OperatorContext(MetricField g_, SymTensorField A_, EquationParams params_, ScalarField psi_)
    : g(std::move(g_)), A(std::move(A_)), params(std::move(params_)), psi(std::move(psi_)) {
  if (!(A.grid() == g.grid()) || !(psi.grid() == g.grid()))
    throw std::invalid_argument("OperatorContext: fields live on different grids");
  if (params.n != g.dim()) throw std::invalid_argument("OperatorContext: parameter dimension differs from the grid");
  for (double v : psi.values())
    if (!(v > 0.0) || !std::isfinite(v)) throw std::invalid_argument("OperatorContext: psi must be positive and finite");
  if (!(params.c > 0.0)) throw std::invalid_argument("OperatorContext: equation constant c must be positive");
}

OperatorContext OperatorContext::with_psi(ScalarField p) const {
  return OperatorContext(g, A, params, std::move(p));
}

SymTensorField reduced_A(const MetricField& g, const EquationParams& params) {
  SymTensorField a = modified_schouten(g, params.tau, params.alpha);
  for (double& v : a.values()) v *= params.a_scale;
  return a;
}

SymTensorField assemble_V(const OperatorContext& ctx, const CovariantDerivatives& d) {
  const int n = ctx.dim();
  const double rho = ctx.params.rho;
  const double gamma = ctx.params.gamma;
  SymTensorField V(ctx.grid());
  for (Index p = 0; p < ctx.grid().points(); ++p) {
    const double iso = d.laplacian(p) + gamma * d.grad_norm2(p);
    for (int i = 0; i < n; ++i) {
      for (int j = i; j < n; ++j) {
        const int c = sym_index(i, j, n);
        V(p, c) = iso * ctx.g.tensor()(p, c) - rho * d.hessian(p, c) + rho * d.du(p, i) * d.du(p, j) + ctx.A(p, c);
      }
    }
  }
  return V;
}

SymTensorField assemble_V(const OperatorContext& ctx, const ScalarField& u) {
  return assemble_V(ctx, covariant_derivatives(ctx.g, u));
}

PointEigen point_eigen(const Mat& V, const Mat& chol) {
  const int n = static_cast<int>(V.rows());
  const Mat linv = chol.triangularView<Eigen::Lower>().solve(Mat::Identity(n, n));
  Mat m = linv * V * linv.transpose();
  m = 0.5 * (m + m.transpose()).eval();
  Eigen::SelfAdjointEigenSolver<Mat> es(m);
  if (es.info() != Eigen::Success) throw std::runtime_error("point_eigen: eigen-solver did not converge");
  return {es.eigenvalues(), linv.transpose() * es.eigenvectors()};
}

Vec EigenField::lambda(Index p) const {
  Vec v(n);
  for (int i = 0; i < n; ++i) v(i) = lambdas[static_cast<std::size_t>(p * n + i)];
  return v;
}

Mat EigenField::frame(Index p) const {
  Mat m(n, n);
  std::copy(frames.begin() + p * n * n, frames.begin() + (p + 1) * n * n, m.data());
  return m;
}

EigenField gen_eigen(const SymTensorField& V, const MetricField& g) {
  const int n = g.dim();
  const Index np = g.grid().points();
  EigenField e;
  e.n = n;
  e.lambdas.resize(static_cast<std::size_t>(np * n));
  e.frames.resize(static_cast<std::size_t>(np * n * n));
  for (Index p = 0; p < np; ++p) {
    PointEigen pe;
    try {
      pe = point_eigen(V.matrix(p), g.cholesky(p));
    } catch (const std::runtime_error&) {
      throw std::runtime_error("gen_eigen: eigen-solver did not converge at grid point " + std::to_string(p));
    }
    std::copy(pe.lambda.data(), pe.lambda.data() + n, e.lambdas.begin() + p * n);
    std::copy(pe.frame.data(), pe.frame.data() + n * n, e.frames.begin() + p * n * n);
  }
  return e;
}

ConeViolation::ConeViolation(std::vector<ConeViolationPoint> points, double min_margin)
    : std::runtime_error("cone violation at " + std::to_string(points.size()) + " grid point(s), first at " +
                         std::to_string(points.empty() ? -1 : points.front().point) + ", min margin " +
                         std::to_string(min_margin)),
      points_(std::move(points)),
      min_margin_(min_margin) {}

OperatorState evaluate(const OperatorContext& ctx, const ScalarField& u) {
  OperatorState s;
  s.V = assemble_V(ctx, u);
  s.eig = gen_eigen(s.V, ctx.g);
  const Index np = ctx.grid().points();
  const ConeSpec& cone = ctx.cone();
  const double c = ctx.params.c;
  const double vs = ctx.params.varsigma;
  s.F = ScalarField(ctx.grid());
  s.margin.resize(static_cast<std::size_t>(np));
  s.min_margin = std::numeric_limits<double>::infinity();
  for (Index p = 0; p < np; ++p) {
    const Vec lam = s.eig.lambda(p);
    const double m = cone.margin(lam);
    s.margin[p] = m;
    if (m < s.min_margin) {
      s.min_margin = m;
      s.argmin_margin = p;
    }
    if (!cone.contains(lam)) {
      s.violations.push_back({p, m});
      continue;
    }
    s.F(p) = cone.f(lam) - c * ctx.psi(p) * std::exp(2.0 * vs * u(p));
  }
  return s;
}

ScalarField residual(const OperatorContext& ctx, const ScalarField& u) {
  OperatorState s = evaluate(ctx, u);
  if (!s.admissible()) throw ConeViolation(std::move(s.violations), s.min_margin);
  return std::move(s.F);
}

ScalarField consistent_psi(const OperatorContext& ctx, const ScalarField& u) {
  OperatorState s = evaluate(ctx, u);
  if (!s.admissible()) throw ConeViolation(std::move(s.violations), s.min_margin);
  ScalarField psi(ctx.grid());
  for (Index p = 0; p < ctx.grid().points(); ++p)
    psi(p) = ctx.cone().f(s.eig.lambda(p)) * std::exp(-2.0 * ctx.params.varsigma * u(p)) / ctx.params.c;
  return psi;
}

namespace {

/// f_i averaged over blocks of (numerically) tied eigenvalues.
Vec tie_averaged_grad(const ConeSpec& cone, const Vec& lam) {
  Vec fi = cone.grad(lam);
  const int n = static_cast<int>(lam.size());
  const double tol = 1e-10 * std::max(1.0, lam.cwiseAbs().maxCoeff());
  int start = 0;
  while (start < n) {
    int end = start + 1;
    while (end < n && lam(end) - lam(end - 1) <= tol) ++end;
    if (end - start > 1) fi.segment(start, end - start).setConstant(fi.segment(start, end - start).mean());
    start = end;
  }
  return fi;
}

}  // namespace

Linearization::Linearization(const OperatorContext& ctx, const ScalarField& u) {
  const OperatorState s = evaluate(ctx, u);
  if (!s.admissible()) throw ConeViolation(s.violations, s.min_margin);
  build(ctx, u, s);
}

Linearization::Linearization(const OperatorContext& ctx, const ScalarField& u, const OperatorState& state) {
  if (!state.admissible()) throw ConeViolation(state.violations, state.min_margin);
  build(ctx, u, state);
}

void Linearization::build(const OperatorContext& ctx, const ScalarField& u, const OperatorState& s) {
  grid_ = ctx.grid();
  n_ = grid_.dim();
  order_ = ctx.g.order();
  const int n = n_;
  const int sc = n * (n + 1) / 2;
  const Index np = grid_.points();
  const double rho = ctx.params.rho;
  const double gamma = ctx.params.gamma;
  const double c = ctx.params.c;
  const double vs = ctx.params.varsigma;
  const CovectorField du = gradient(u, order_);
  Q_.resize(static_cast<std::size_t>(np * sc));
  b_.resize(static_cast<std::size_t>(np * n));
  c0_.resize(static_cast<std::size_t>(np));
  diag_.resize(static_cast<std::size_t>(np));
  symbol_.resize(static_cast<std::size_t>(np * n));
  std::vector<double> cw(static_cast<std::size_t>(n));
  for (int a = 0; a < n; ++a) cw[a] = second_derivative_center_weight(order_, grid_.spacing(a));

  for (Index p = 0; p < np; ++p) {
    const Vec lam = s.eig.lambda(p);
    const Mat X = s.eig.frame(p);
    const Vec fi = tie_averaged_grad(ctx.cone(), lam);
    const double fsum = fi.sum();
    const Mat P = X * fi.asDiagonal() * X.transpose();
    const Mat gi = ctx.g.inverse_matrix(p);
    const Mat Q = fsum * gi - rho * P;
    const Vec d = du.vector(p);
    const Vec bvec = 2.0 * gamma * fsum * (gi * d) + 2.0 * rho * (P * d);
    for (int k = 0; k < n; ++k) {
      double bk = bvec(k);
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) bk -= Q(i, j) * ctx.g.christoffel(p, k, i, j);
      b_[p * n + k] = bk;
    }
    for (int i = 0; i < n; ++i)
      for (int j = i; j < n; ++j) Q_[p * sc + sym_index(i, j, n)] = 0.5 * (Q(i, j) + Q(j, i));
    c0_[p] = 2.0 * vs * c * ctx.psi(p) * std::exp(2.0 * vs * u(p));
    double dg = -c0_[p];
    for (int i = 0; i < n; ++i) dg += Q(i, i) * cw[i];
    diag_[p] = dg;
    for (int i = 0; i < n; ++i) symbol_[p * n + i] = fsum - rho * fi(i);
  }
}

void Linearization::apply(std::span<const double> w, std::span<double> out) const {
  const int n = n_;
  const int sc = n * (n + 1) / 2;
  const Index np = grid_.points();
  ScalarField wf(grid_);
  std::copy(w.begin(), w.end(), wf.values().begin());
  const CovectorField dw = gradient(wf, order_);
  const SymTensorField hw = hessian_flat(wf, order_);
  for (Index p = 0; p < np; ++p) {
    double s = -c0_[p] * w[p];
    for (int i = 0; i < n; ++i) {
      s += b_[p * n + i] * dw(p, i);
      for (int j = i; j < n; ++j) {
        const int c = sym_index(i, j, n);
        s += (i == j ? 1.0 : 2.0) * Q_[p * sc + c] * hw(p, c);
      }
    }
    out[p] = s;
  }
}

ScalarField Linearization::apply(const ScalarField& w) const {
  ScalarField out(grid_);
  apply(w.values(), out.values());
  return out;
}

EllipticityReport ellipticity_probe(const Linearization& lin) {
  EllipticityReport r;
  const auto& s = lin.symbol_eigenvalues();
  const int n = lin.grid().dim();
  r.min_eigenvalue = std::numeric_limits<double>::infinity();
  r.max_eigenvalue = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] < r.min_eigenvalue) {
      r.min_eigenvalue = s[i];
      r.argmin = static_cast<Index>(i) / n;
    }
    r.max_eigenvalue = std::max(r.max_eigenvalue, s[i]);
  }
  r.ratio = r.min_eigenvalue > 0.0 ? r.max_eigenvalue / r.min_eigenvalue : std::numeric_limits<double>::infinity();
  return r;
}

EllipticityReport ellipticity_probe(const OperatorContext& ctx, const ScalarField& u) {
  return ellipticity_probe(Linearization(ctx, u));
}

}  // namespace confbend
