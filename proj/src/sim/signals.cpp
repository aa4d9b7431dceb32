#include "coems/sim/signals.hpp"

#include <cmath>
#include <stdexcept>

namespace coems::sim {

double sensor_noise_sigma(const physics::ProbeModel& probe, double sample_rate) {
  if (!(sample_rate > 0.0)) throw std::invalid_argument("sample rate must be positive");
  return std::sqrt(probe.noise_floor * sample_rate);
}

double sensor_sample(double x, const physics::ProbeModel& probe, double sample_rate,
                     GaussianSource& noise) {
  const double sigma = sensor_noise_sigma(probe, sample_rate);
  if (sigma == 0.0) return probe.calibration_scale * x;
  return probe.calibration_scale * (x + sigma * noise());
}

double drive_force(double t, const physics::DriveConfig& drive) {
  return drive.force_amplitude() * std::cos(drive.frequency * t + drive.phase);
}

}  // namespace coems::sim
