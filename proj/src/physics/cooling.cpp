#include "coems/physics/cooling.hpp"

#include <cmath>
#include <stdexcept>

#include "coems/physics/oscillator.hpp"

namespace coems::physics {
namespace {

void require_gain(double gain) {
  if (!(gain >= 0.0) || !std::isfinite(gain)) throw std::invalid_argument("gain must be >= 0");
}

void require_snr(double snr) {
  if (!(snr > 0.0)) throw std::invalid_argument("snr must be positive");
}

}  // namespace

double snr(const MechanicalMode& mode, const Environment& env, const ProbeModel& inloop) {
  if (!(inloop.noise_floor > 0.0)) throw std::domain_error("infinite SNR");
  return thermal_psd(mode, env, mode.resonance) / inloop.noise_floor;
}

double noise_floor_for_snr(const MechanicalMode& mode, const Environment& env, double snr) {
  require_snr(snr);
  return thermal_psd(mode, env, mode.resonance) / snr;
}

double cooling_temperature(double t0, double gain, double snr) {
  require_gain(gain);
  require_snr(snr);
  return t0 * (1.0 + gain * gain / snr) / (1.0 + gain);
}

double optimal_gain(double snr) {
  require_snr(snr);
  return std::sqrt(1.0 + snr) - 1.0;
}

MinimumTemperature min_temperature(double t0, double snr) {
  const double g = optimal_gain(snr);
  // 2 T0 g / snr, written as 2 T0 / (sqrt(1+snr) + 1) to avoid cancellation
  // when snr is small.
  return {2.0 * t0 / (std::sqrt(1.0 + snr) + 1.0), g};
}

std::complex<double> closed_loop_susceptibility(const MechanicalMode& mode, double gain,
                                                double omega) {
  require_gain(gain);
  const std::complex<double> denom{
      mode.effective_mass * (mode.resonance * mode.resonance - omega * omega),
      -mode.effective_mass * (1.0 + gain) * mode.damping * omega};
  return 1.0 / denom;
}

double outloop_motion_psd(const MechanicalMode& mode, const Environment& env, double gain,
                          const ProbeModel& inloop, double omega) {
  const double m = mode.effective_mass;
  const double thermal_force = 2.0 * kBoltzmann * env.bath_temperature * m * mode.damping;
  const double feedback_gain = gain * m * mode.damping * omega;
  const double imprinted_force = feedback_gain * feedback_gain * inloop.noise_floor;
  return std::norm(closed_loop_susceptibility(mode, gain, omega)) *
         (thermal_force + imprinted_force);
}

double outloop_psd_theory(const MechanicalMode& mode, const Environment& env, double gain,
                          const ProbeModel& inloop, const ProbeModel& outloop, double omega) {
  return outloop_motion_psd(mode, env, gain, inloop, omega) + outloop.noise_floor;
}

double inloop_psd_theory(const MechanicalMode& mode, const Environment& env, double gain,
                         const ProbeModel& inloop, double omega) {
  const auto chi_eff = closed_loop_susceptibility(mode, gain, omega);
  const auto chi = susceptibility(mode, omega);
  const double thermal_force =
      2.0 * kBoltzmann * env.bath_temperature * mode.effective_mass * mode.damping;
  return std::norm(chi_eff) * thermal_force + std::norm(chi_eff / chi) * inloop.noise_floor;
}

InferredTemperature inferred_temperature_theory(Loop loop, double t0, double gain, double snr) {
  require_gain(gain);
  require_snr(snr);
  const double value = loop == Loop::OutOfLoop
                           ? cooling_temperature(t0, gain, snr)
                           : t0 * (1.0 - gain * (gain + 2.0) / snr) / (1.0 + gain);
  return {value, value <= 0.0};
}

}  // namespace coems::physics
