#pragma once

#include <span>

#include "coems/physics/types.hpp"

namespace coems::physics {

/// Peak-to-peak gradient force from the peak displacement ASD of a driven
/// resonance:  F = (4/sqrt(pi)) m omega_m Gamma sqrt(rbw) sqrt(S_max).
/// `rbw` is the analyser resolution bandwidth in rad/s, `peak_asd` in m/sqrt(Hz).
double gradient_force_from_peak(const MechanicalMode& mode, double rbw, double peak_asd);

struct ModeForce {
  double amplitude = 0.0;  // N
  double phase = 0.0;      // rad
};

/// Coherent multi-mode response |sum_j chi_j(omega) F_j exp(i phi_j)|^2 (m^2).
/// Throws std::invalid_argument when the lists differ in length.
double driven_response(std::span<const MechanicalMode> modes, std::span<const ModeForce> forces,
                       double omega);

/// Incoherent sum |chi_j F_j|^2, i.e. driven_response without interference.
double incoherent_response(std::span<const MechanicalMode> modes,
                           std::span<const ModeForce> forces, double omega);

}  // namespace coems::physics
