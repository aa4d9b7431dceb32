#include "coems/spectral/levenberg_marquardt.hpp"

#include <algorithm>
#include <cmath>

namespace coems::spectral {

LmResult levenberg_marquardt(const ResidualFunction& f, Eigen::VectorXd p0,
                             Eigen::Index residual_count, const LmOptions& options) {
  const Eigen::Index np = p0.size();
  LmResult out;
  Eigen::VectorXd r(residual_count), r_trial(residual_count);
  Eigen::MatrixXd J(residual_count, np);

  Eigen::VectorXd p = std::move(p0);
  f(p, r, &J);
  double cost = 0.5 * r.squaredNorm();
  if (!std::isfinite(cost)) {
    out.params = p;
    out.cost = cost;
    out.message = "non-finite cost at the initial guess";
    return out;
  }

  Eigen::MatrixXd A = J.transpose() * J;
  Eigen::VectorXd g = J.transpose() * r;
  double mu = options.initial_damping * A.diagonal().maxCoeff();
  double nu = 2.0;

  int it = 0;
  for (; it < options.max_iterations; ++it) {
    if (g.lpNorm<Eigen::Infinity>() <= options.gradient_tolerance * (1.0 + cost)) {
      out.converged = true;
      out.message = "gradient below tolerance";
      break;
    }
    Eigen::VectorXd diag = A.diagonal().cwiseMax(1e-300);
    Eigen::MatrixXd damped = A;
    damped.diagonal() += mu * diag;
    const Eigen::VectorXd step = damped.ldlt().solve(-g);
    if (!step.allFinite()) {
      mu *= nu;
      nu *= 2.0;
      continue;
    }
    if (step.norm() <= options.step_tolerance * (p.norm() + options.step_tolerance)) {
      out.converged = true;
      out.message = "step below tolerance";
      break;
    }

    const Eigen::VectorXd p_trial = p + step;
    f(p_trial, r_trial, nullptr);
    const double cost_trial = 0.5 * r_trial.squaredNorm();
    // Predicted reduction of the local quadratic model.
    const double predicted = -(step.dot(g) + 0.5 * step.dot(A * step));
    const double rho = (std::isfinite(cost_trial) && predicted > 0.0)
                           ? (cost - cost_trial) / predicted
                           : -1.0;

    if (rho > 0.0) {
      const double relative_drop = (cost - cost_trial) / std::max(cost, 1e-300);
      p = p_trial;
      f(p, r, &J);
      cost = 0.5 * r.squaredNorm();
      A = J.transpose() * J;
      g = J.transpose() * r;
      mu *= std::max(1.0 / 3.0, 1.0 - std::pow(2.0 * rho - 1.0, 3));
      nu = 2.0;
      if (relative_drop < options.cost_tolerance) {
        out.converged = true;
        out.message = "cost change below tolerance";
        ++it;
        break;
      }
    } else {
      mu *= nu;
      nu *= 2.0;
      if (!std::isfinite(mu) || mu > 1e300) {
        out.message = "damping diverged";
        break;
      }
    }
  }
  if (!out.converged && out.message.empty()) out.message = "maximum iterations reached";

  out.params = p;
  out.cost = cost;
  out.iterations = it;
  out.jtj = A;
  return out;
}

}  // namespace coems::spectral
