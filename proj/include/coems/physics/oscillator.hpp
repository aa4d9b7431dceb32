#pragma once

#include <complex>

#include "coems/physics/types.hpp"

namespace coems::physics {

// Fourier convention: x(t) = integral x(omega) exp(-i omega t) d omega / 2pi,
// so d/dt -> -i omega and the susceptibility has +i Gamma omega poles.

/// chi(omega) = 1 / (m (omega_m^2 - omega^2 - i Gamma omega)), in m/N.
std::complex<double> susceptibility(const MechanicalMode& mode, double omega);

/// Brownian displacement PSD 2 k_B T Gamma m |chi|^2 (double-sided angular).
double thermal_psd(const MechanicalMode& mode, const Environment& env, double omega);

/// Peak of the zero-point displacement PSD, hbar / (m Gamma omega_m).
double zero_point_psd_peak(const MechanicalMode& mode);

/// Inverts zero_point_psd_peak for the resonance: hbar / (m Gamma S_zp).
double resonance_from_zero_point(double effective_mass, double damping, double zero_point_psd);

/// Mean thermal occupation k_B T / (hbar omega_m), classical limit.
double phonon_occupancy(double temperature, double omega_m);

/// Variance k_B T / (m omega_m^2) of an undriven mode in equilibrium.
double equipartition_variance(const MechanicalMode& mode, const Environment& env);

}  // namespace coems::physics
