#pragma once

#include "coems/physics/types.hpp"
#include "coems/sim/integrator.hpp"

namespace coems::sim {

/// Per-sample standard deviation of white sensor noise whose measured
/// double-sided PSD equals probe.noise_floor: sqrt(S_N * sample_rate).
double sensor_noise_sigma(const physics::ProbeModel& probe, double sample_rate);

/// One transducer reading: scale * (x + n), n white Gaussian.
double sensor_sample(double x, const physics::ProbeModel& probe, double sample_rate,
                     GaussianSource& noise);

/// Gradient-force drive (κ V / 2) cos(omega_d t + phi); κ V is peak-to-peak.
double drive_force(double t, const physics::DriveConfig& drive);

}  // namespace coems::sim
