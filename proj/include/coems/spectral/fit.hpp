#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "coems/physics/types.hpp"
#include "coems/spectral/psd.hpp"

namespace coems::spectral {

struct FrequencyBand {
  double low = 0.0;   // Hz
  double high = 0.0;  // Hz
};

/// Starting point for fit_spectrum. Masses, damping rates and the floor may
/// be off by up to a factor of three; resonances must be within a few
/// linewidths of the peaks (each is first moved to the tallest bin within
/// three guessed linewidths).
struct FitGuess {
  std::vector<physics::MechanicalMode> modes;
  double noise_floor = 0.0;  // double-sided angular; <= 0 estimates it from the data median
};

struct FitOptions {
  std::optional<FrequencyBand> band;  // default: whole spectrum except DC
  int max_iterations = 300;
  bool snap_resonances = true;
};

struct ParameterErrors {
  double mass = 0.0;
  double resonance = 0.0;
  double damping = 0.0;
};

struct SpectrumFit {
  std::vector<physics::MechanicalMode> modes;
  double noise_floor = 0.0;  // double-sided angular
  double temperature = 0.0;  // held fixed
  std::vector<ParameterErrors> errors;
  double noise_floor_error = 0.0;
  double residual_norm = 0.0;  // ||(data - model)/model||
  int iterations = 0;
  bool converged = false;
  bool degenerate = false;  // some parameter is unconstrained (relative error > 1)
  std::string message;
};

/// Single-sided model sum_j S_x^(j)(2 pi f) + S_N rendered at `frequency` (Hz).
double spectrum_model(std::span<const physics::MechanicalMode> modes, double noise_floor,
                      const physics::Environment& env, double frequency);

/// Weighted least-squares fit of the incoherent multi-mode Brownian model
/// plus a white floor, at fixed bath temperature (S_x only constrains T/m).
/// Parameters are fitted in log space, residuals are (data - model)/model.
/// A fit that fails to converge or leaves a parameter unconstrained returns
/// converged = false.
SpectrumFit fit_spectrum(const Psd& psd, std::size_t n_modes, const physics::Environment& env,
                         const FitGuess& guess, const FitOptions& options = {});

}  // namespace coems::spectral
