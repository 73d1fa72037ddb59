#pragma once

#include <Eigen/Dense>
#include <functional>

namespace confbend {

using LinearOperator = std::function<void(const Eigen::VectorXd& in, Eigen::VectorXd& out)>;

struct GmresOptions {
  int restart = 40;
  int max_iterations = 600;
  double rel_tol = 1e-8;
};

struct GmresResult {
  bool converged = false;
  int iterations = 0;
  double rel_residual = 0.0;
};

/// Restarted GMRES with right preconditioning: solves A x = b using A M⁻¹ y = b, x = M⁻¹ y.
/// `x` holds the initial guess on entry.
GmresResult gmres(const LinearOperator& A, const LinearOperator& precond, const Eigen::VectorXd& b,
                  Eigen::VectorXd& x, const GmresOptions& opts = {});

}  // namespace confbend
