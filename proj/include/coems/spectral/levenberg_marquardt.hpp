#pragma once

#include <Eigen/Dense>
#include <functional>
#include <string>

namespace coems::spectral {

struct LmOptions {
  int max_iterations = 300;
  double gradient_tolerance = 1e-12;  // on ||J^T r||_inf, scaled by (1 + cost)
  double step_tolerance = 1e-12;      // relative parameter change
  double cost_tolerance = 1e-14;      // relative cost change on an accepted step
  double initial_damping = 1e-3;      // tau in mu0 = tau max diag(J^T J)
};

struct LmResult {
  Eigen::VectorXd params;
  double cost = 0.0;  // 0.5 ||r||^2
  int iterations = 0;
  bool converged = false;
  Eigen::MatrixXd jtj;  // at the returned parameters
  std::string message;
};

/// Fills residuals (size m) and, when `jacobian` is non-null, the m x p Jacobian.
using ResidualFunction =
    std::function<void(const Eigen::VectorXd& p, Eigen::VectorXd& residuals,
                       Eigen::MatrixXd* jacobian)>;

/// Levenberg-Marquardt with Marquardt diagonal scaling and Nielsen's damping
/// update. Non-finite trial points are rejected like uphill steps.
LmResult levenberg_marquardt(const ResidualFunction& f, Eigen::VectorXd p0,
                             Eigen::Index residual_count, const LmOptions& options = {});

}  // namespace coems::spectral
