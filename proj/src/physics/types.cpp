#include "coems/physics/types.hpp"

#include <cmath>
#include <stdexcept>

namespace coems::physics {

void MechanicalMode::validate() const {
  if (!(effective_mass > 0.0) || !std::isfinite(effective_mass))
    throw std::invalid_argument("mode '" + label + "': effective mass must be positive");
  if (!(resonance > 0.0) || !std::isfinite(resonance))
    throw std::invalid_argument("mode '" + label + "': resonance must be positive");
  if (!(damping > 0.0) || !std::isfinite(damping))
    throw std::invalid_argument("mode '" + label + "': damping must be positive");
  if (!(resonance > damping))
    throw std::invalid_argument("mode '" + label + "': must be underdamped (resonance > damping)");
}

MechanicalMode MechanicalMode::from_hz(std::string label, double mass_kg, double resonance_hz,
                                       double damping_hz) {
  MechanicalMode mode{std::move(label), mass_kg, angular_from_hz(resonance_hz),
                      angular_from_hz(damping_hz)};
  mode.validate();
  return mode;
}

void Environment::validate() const {
  if (!(bath_temperature >= 0.0) || !std::isfinite(bath_temperature))
    throw std::invalid_argument("bath temperature must be >= 0");
}

void ProbeModel::validate() const {
  if (!(noise_floor >= 0.0) || !std::isfinite(noise_floor))
    throw std::invalid_argument("probe '" + label + "': noise floor must be >= 0");
  if (!(calibration_scale > 0.0) || !std::isfinite(calibration_scale))
    throw std::invalid_argument("probe '" + label + "': calibration scale must be positive");
}

void FeedbackConfig::validate() const {
  if (!(gain >= 0.0) || !std::isfinite(gain))
    throw std::invalid_argument("feedback gain must be >= 0");
  if (!(delay >= 0.0 && delay < 1.0))
    throw std::invalid_argument("feedback delay must lie in [0, 1) cycles");
  if (bandpass_center < 0.0 || bandpass_width < 0.0)
    throw std::invalid_argument("band-pass center and width must be >= 0");
}

void DriveConfig::validate() const {
  if (!(voltage >= 0.0)) throw std::invalid_argument("drive voltage must be >= 0");
  if (!(force_per_volt >= 0.0)) throw std::invalid_argument("force per volt must be >= 0");
  if (!(frequency >= 0.0) || !std::isfinite(frequency))
    throw std::invalid_argument("drive frequency must be >= 0");
}

}  // namespace coems::physics
