#include "coems/sim/integrator.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <string>

namespace coems::sim {

ExactGaussianStepper::ExactGaussianStepper(const physics::MechanicalMode& mode,
                                           double temperature, double h)
    : h_(h) {
  mode.validate();
  if (!(h > 0.0)) throw std::invalid_argument("step must be positive");
  const double w0 = mode.resonance;
  const double gamma = 0.5 * mode.damping;
  const double wd = std::sqrt(w0 * w0 - gamma * gamma);
  const double e = std::exp(-gamma * h);
  const double c = std::cos(wd * h);
  const double s = std::sin(wd * h) / wd;

  phi_[0] = e * (c + gamma * s);
  phi_[1] = e * s;
  phi_[2] = -e * w0 * w0 * s;
  phi_[3] = e * (c - gamma * s);

  inv_stiffness_ = 1.0 / (mode.effective_mass * w0 * w0);
  in_[0] = 1.0 - phi_[0];
  in_[1] = -phi_[2];

  const double px = physics::kBoltzmann * temperature * inv_stiffness_;
  const double pv = physics::kBoltzmann * temperature / mode.effective_mass;
  const double qxx = px - (phi_[0] * phi_[0] * px + phi_[1] * phi_[1] * pv);
  const double qxv = -(phi_[0] * phi_[2] * px + phi_[1] * phi_[3] * pv);
  const double qvv = pv - (phi_[2] * phi_[2] * px + phi_[3] * phi_[3] * pv);

  const double l11 = std::sqrt(std::max(qxx, 0.0));
  const double l21 = l11 > 0.0 ? qxv / l11 : 0.0;
  chol_[0] = l11;
  chol_[1] = l21;
  chol_[2] = std::sqrt(std::max(qvv - l21 * l21, 0.0));
}

SemiImplicitStepper::SemiImplicitStepper(const physics::MechanicalMode& mode, double temperature,
                                         double h)
    : h_(h),
      omega2_(mode.resonance * mode.resonance),
      damping_(mode.damping),
      inv_mass_(1.0 / mode.effective_mass),
      sigma_(std::sqrt(2.0 * physics::kBoltzmann * temperature * mode.damping /
                       mode.effective_mass)) {
  mode.validate();
  if (!(h > 0.0)) throw std::invalid_argument("step must be positive");
  // Jury conditions for the 2x2 update: det = 1 - G h, trace = 2 - w^2 h^2 - G h.
  const double gh = mode.damping * h;
  const double wh2 = omega2_ * h * h;
  if (!(gh < 2.0) || !(wh2 < 4.0 - 2.0 * gh)) {
    throw UnstableStepError("semi-implicit step h=" + std::to_string(h) +
                            " s is unstable for mode '" + mode.label +
                            "'; raise the sample rate or the substep count");
  }
}

void refine_brownian_increment(double dW, double h, std::span<double> out,
                               GaussianSource& bridge) {
  const std::size_t n = out.size();
  if (n == 0 || !std::has_single_bit(n))
    throw std::invalid_argument("Brownian refinement needs a power-of-two count");
  out[0] = dW;
  double width = h;
  for (std::size_t level = 1; level < n; level *= 2) {
    // Split from the back so each coarse slot is read before it is overwritten.
    const double sd = 0.5 * std::sqrt(width);
    for (std::size_t i = level; i-- > 0;) {
      const double coarse = out[i];
      const double dev = sd * bridge();
      out[2 * i] = 0.5 * coarse + dev;
      out[2 * i + 1] = 0.5 * coarse - dev;
    }
    width *= 0.5;
  }
}

}  // namespace coems::sim
