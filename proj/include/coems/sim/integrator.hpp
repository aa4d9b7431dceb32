#pragma once

#include <random>
#include <span>
#include <stdexcept>

#include "coems/physics/types.hpp"
#include "coems/sim/rng.hpp"

namespace coems::sim {

class UnstableStepError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct OscillatorState {
  double x = 0.0;  // m
  double v = 0.0;  // m/s
};

/// Standard-normal draws from one substream.
class GaussianSource {
 public:
  explicit GaussianSource(Rng engine) : engine_(std::move(engine)) {}
  double operator()() { return dist_(engine_); }

 private:
  Rng engine_;
  std::normal_distribution<double> dist_{0.0, 1.0};
};

/// Exact one-step update of the linear Langevin oscillator
///   m x'' = -m w^2 x - m G x' + F_th + F
/// with F held constant across the step. Mean propagates through the matrix
/// exponential; the noise covariance is P - Phi P Phi^T where P is the
/// equilibrium covariance diag(kT/(m w^2), kT/m).
class ExactGaussianStepper {
 public:
  ExactGaussianStepper(const physics::MechanicalMode& mode, double temperature, double h);

  void step(OscillatorState& s, double force, double z1, double z2) const {
    const double a = force * inv_stiffness_;
    const double x = phi_[0] * s.x + phi_[1] * s.v + in_[0] * a + chol_[0] * z1;
    const double v = phi_[2] * s.x + phi_[3] * s.v + in_[1] * a + chol_[1] * z1 + chol_[2] * z2;
    s.x = x;
    s.v = v;
  }

  double h() const { return h_; }

 private:
  double h_;
  double inv_stiffness_;
  double phi_[4];   // row-major transition matrix
  double in_[2];    // (I - Phi) e_x, response to a static displacement offset
  double chol_[3];  // L11, L21, L22
};

/// Symplectic (semi-implicit) Euler with an explicit Brownian increment:
///   v += h (-w^2 x - G v + F/m) + sigma dW;  x += h v
/// Throws UnstableStepError when h lies outside the scheme's stability region.
class SemiImplicitStepper {
 public:
  SemiImplicitStepper(const physics::MechanicalMode& mode, double temperature, double h);

  void step(OscillatorState& s, double force, double dW) const {
    s.v += h_ * (-omega2_ * s.x - damping_ * s.v + force * inv_mass_) + sigma_ * dW;
    s.x += h_ * s.v;
  }

  double h() const { return h_; }

 private:
  double h_;
  double omega2_;
  double damping_;
  double inv_mass_;
  double sigma_;  // sqrt(2 k T G / m)
};

/// Splits a Wiener increment `dW` over an interval of length `h` into
/// out.size() (a power of two) sub-increments by repeated Brownian-bridge
/// midpoint refinement. The sub-increments sum to dW exactly, so a refined
/// path shares the coarse path at every coarse grid point.
void refine_brownian_increment(double dW, double h, std::span<double> out,
                               GaussianSource& bridge);

}  // namespace coems::sim
