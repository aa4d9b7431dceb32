#include "coems/physics/actuation.hpp"

#include <cmath>
#include <complex>
#include <stdexcept>

#include "coems/physics/oscillator.hpp"

namespace coems::physics {

double gradient_force_from_peak(const MechanicalMode& mode, double rbw, double peak_asd) {
  if (!(rbw > 0.0) || !(peak_asd > 0.0))
    throw std::invalid_argument("gradient force needs positive rbw and peak ASD");
  mode.validate();
  return 4.0 / std::sqrt(kPi) * mode.effective_mass * mode.resonance * mode.damping *
         std::sqrt(rbw) * peak_asd;
}

double driven_response(std::span<const MechanicalMode> modes, std::span<const ModeForce> forces,
                       double omega) {
  if (modes.size() != forces.size())
    throw std::invalid_argument("driven_response: modes and forces differ in length");
  std::complex<double> x{0.0, 0.0};
  for (std::size_t j = 0; j < modes.size(); ++j)
    x += susceptibility(modes[j], omega) * std::polar(forces[j].amplitude, forces[j].phase);
  return std::norm(x);
}

double incoherent_response(std::span<const MechanicalMode> modes,
                           std::span<const ModeForce> forces, double omega) {
  if (modes.size() != forces.size())
    throw std::invalid_argument("incoherent_response: modes and forces differ in length");
  double sum = 0.0;
  for (std::size_t j = 0; j < modes.size(); ++j)
    sum += std::norm(susceptibility(modes[j], omega)) * forces[j].amplitude * forces[j].amplitude;
  return sum;
}

}  // namespace coems::physics
