#include "coems/physics/oscillator.hpp"

#include <cmath>
#include <stdexcept>

namespace coems::physics {

std::complex<double> susceptibility(const MechanicalMode& mode, double omega) {
  const std::complex<double> denom{
      mode.effective_mass * (mode.resonance * mode.resonance - omega * omega),
      -mode.effective_mass * mode.damping * omega};
  return 1.0 / denom;
}

double thermal_psd(const MechanicalMode& mode, const Environment& env, double omega) {
  if (env.bath_temperature < 0.0) throw std::invalid_argument("negative bath temperature");
  return 2.0 * kBoltzmann * env.bath_temperature * mode.damping * mode.effective_mass *
         std::norm(susceptibility(mode, omega));
}

double zero_point_psd_peak(const MechanicalMode& mode) {
  mode.validate();
  return kHbar / (mode.effective_mass * mode.damping * mode.resonance);
}

double resonance_from_zero_point(double effective_mass, double damping, double zero_point_psd) {
  if (!(effective_mass > 0 && damping > 0 && zero_point_psd > 0))
    throw std::invalid_argument("zero-point inversion needs positive inputs");
  return kHbar / (effective_mass * damping * zero_point_psd);
}

double phonon_occupancy(double temperature, double omega_m) {
  if (temperature < 0.0) throw std::invalid_argument("negative temperature");
  if (!(omega_m > 0.0)) throw std::invalid_argument("resonance must be positive");
  return kBoltzmann * temperature / (kHbar * omega_m);
}

double equipartition_variance(const MechanicalMode& mode, const Environment& env) {
  return kBoltzmann * env.bath_temperature /
         (mode.effective_mass * mode.resonance * mode.resonance);
}

}  // namespace coems::physics
