#pragma once

#include <cstddef>
#include <vector>

#include "coems/bench/config.hpp"

namespace coems::bench {

struct DrivePoint {
  double voltage = 0.0;          // V_rms
  std::size_t mode = 0;
  double drive_frequency = 0.0;  // Hz
  double peak_asd = 0.0;         // m/sqrt(Hz), tallest bin within two bins of the drive
  double force = 0.0;            // N, inferred peak-to-peak
  double force_configured = 0.0; // N, kappa * V
};

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
};

struct DriveSweep {
  double rbw = 0.0;  // Hz
  std::vector<DrivePoint> points;  // voltage-major, then mode
  std::vector<LineFit> fits;       // peak ASD vs voltage, per mode
};

/// Ordinary least squares y = slope x + intercept. Throws
/// std::invalid_argument for fewer than two points or constant x.
LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y);

/// Drives each mode in turn at its resonance for every voltage and reads the
/// in-loop spectrum. Throws sim::ConfigError when the config has no drive
/// section (kappa missing) or kappa <= 0.
DriveSweep run_drive_sweep(const BenchConfig& config, const std::vector<double>& voltages,
                           std::size_t jobs = 1);

/// Peak-bin value of `psd` within two bins of `frequency`.
double peak_near(const spectral::Psd& psd, double frequency);

}  // namespace coems::bench
