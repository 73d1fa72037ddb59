#include "confbend/krylov.hpp"

#include <cmath>
#include <vector>

namespace confbend {

GmresResult gmres(const LinearOperator& A, const LinearOperator& precond, const Eigen::VectorXd& b,
                  Eigen::VectorXd& x, const GmresOptions& opts) {
  GmresResult res;
  const Eigen::Index n = b.size();
  const double bnorm = b.norm();
  if (bnorm == 0.0) {
    x.setZero();
    res.converged = true;
    return res;
  }
  const int m = opts.restart;
  Eigen::VectorXd r(n), w(n), z(n);
  std::vector<Eigen::VectorXd> V(static_cast<std::size_t>(m + 1), Eigen::VectorXd(n));
  Eigen::MatrixXd H = Eigen::MatrixXd::Zero(m + 1, m);
  Eigen::VectorXd cs(m), sn(m), g(m + 1);

  while (res.iterations < opts.max_iterations) {
    A(x, r);
    r = b - r;
    double beta = r.norm();
    res.rel_residual = beta / bnorm;
    if (res.rel_residual <= opts.rel_tol) {
      res.converged = true;
      return res;
    }
    V[0] = r / beta;
    g.setZero();
    g(0) = beta;
    H.setZero();
    int j = 0;
    for (; j < m && res.iterations < opts.max_iterations; ++j) {
      ++res.iterations;
      precond(V[j], z);
      A(z, w);
      for (int i = 0; i <= j; ++i) {
        H(i, j) = w.dot(V[i]);
        w -= H(i, j) * V[i];
      }
      H(j + 1, j) = w.norm();
      if (H(j + 1, j) > 0.0) V[j + 1] = w / H(j + 1, j);
      for (int i = 0; i < j; ++i) {
        const double t = cs(i) * H(i, j) + sn(i) * H(i + 1, j);
        H(i + 1, j) = -sn(i) * H(i, j) + cs(i) * H(i + 1, j);
        H(i, j) = t;
      }
      const double den = std::hypot(H(j, j), H(j + 1, j));
      cs(j) = H(j, j) / den;
      sn(j) = H(j + 1, j) / den;
      H(j, j) = den;
      H(j + 1, j) = 0.0;
      g(j + 1) = -sn(j) * g(j);
      g(j) = cs(j) * g(j);
      res.rel_residual = std::abs(g(j + 1)) / bnorm;
      if (res.rel_residual <= opts.rel_tol) {
        ++j;
        break;
      }
    }
    Eigen::VectorXd y = H.topLeftCorner(j, j).triangularView<Eigen::Upper>().solve(g.head(j));
    Eigen::VectorXd update = Eigen::VectorXd::Zero(n);
    for (int i = 0; i < j; ++i) update += y(i) * V[i];
    precond(update, z);
    x += z;
    if (res.rel_residual <= opts.rel_tol) {
      A(x, r);
      res.rel_residual = (b - r).norm() / bnorm;
      if (res.rel_residual <= 10.0 * opts.rel_tol) {
        res.converged = true;
        return res;
      }
    }
  }
  return res;
}

}  // namespace confbend
