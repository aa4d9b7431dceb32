#pragma once

#include <complex>

#include "coems/physics/types.hpp"

namespace coems::physics {

/// Ratio of the zero-gain thermal peak to the in-loop noise floor.
/// Throws std::domain_error("infinite SNR") for a zero floor.
double snr(const MechanicalMode& mode, const Environment& env, const ProbeModel& inloop);

/// In-loop noise floor (double-sided angular) that realises a given SNR.
double noise_floor_for_snr(const MechanicalMode& mode, const Environment& env, double snr);

/// Mode temperature under cold damping with flat in-loop noise:
/// T0 (1 + g^2/snr) / (1 + g).
double cooling_temperature(double t0, double gain, double snr);

struct MinimumTemperature {
  double temperature;  // K
  double gain;         // g at which it is reached
};

/// T_min = 2 T0 (sqrt(1+snr) - 1)/snr at g = sqrt(1+snr) - 1.
MinimumTemperature min_temperature(double t0, double snr);

/// Susceptibility with the viscous feedback folded in: damping (1+g) Gamma.
std::complex<double> closed_loop_susceptibility(const MechanicalMode& mode, double gain,
                                                double omega);

/// Out-of-loop displacement PSD under feedback. The mechanical part carries
/// the thermal drive and the in-loop noise imprinted through the loop; the
/// independent out-of-loop floor adds on top.
double outloop_psd_theory(const MechanicalMode& mode, const Environment& env, double gain,
                          const ProbeModel& inloop, const ProbeModel& outloop, double omega);

/// Mechanical part of outloop_psd_theory (no out-of-loop floor).
double outloop_motion_psd(const MechanicalMode& mode, const Environment& env, double gain,
                          const ProbeModel& inloop, double omega);

/// In-loop PSD |chi_eff|^2 2 k_B T0 m Gamma + |chi_eff/chi|^2 S_N. The second
/// term is the noise correlated with the motion it drove; it dips below S_N
/// near resonance once the loop is strong enough (squashing).
double inloop_psd_theory(const MechanicalMode& mode, const Environment& env, double gain,
                         const ProbeModel& inloop, double omega);

enum class Loop { InLoop, OutOfLoop };

struct InferredTemperature {
  double kelvin;
  bool unphysical;  // kelvin <= 0
};

/// Temperature an area-based inference would report on each channel.
/// Out-of-loop: cooling_temperature. In-loop: T0 (1 - g(g+2)/snr)/(1+g),
/// returned unclamped.
InferredTemperature inferred_temperature_theory(Loop loop, double t0, double gain, double snr);

/// Gain at which the out-of-loop minimum, the in-loop zero crossing and the
/// onset of sub-floor squashing coincide.
double optimal_gain(double snr);

}  // namespace coems::physics
