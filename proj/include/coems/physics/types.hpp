#pragma once

#include <cstddef>
#include <string>

namespace coems::physics {

inline constexpr double kBoltzmann = 1.380649e-23;  // J/K
inline constexpr double kHbar = 1.054572e-34;       // J s
inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTwoPi = 2.0 * kPi;

inline constexpr double angular_from_hz(double f) { return kTwoPi * f; }
inline constexpr double hz_from_angular(double omega) { return omega / kTwoPi; }

/// One mechanical eigenmode. All rates are angular (rad/s).
struct MechanicalMode {
  std::string label;
  double effective_mass = 0.0;  // kg
  double resonance = 0.0;       // omega_m
  double damping = 0.0;         // Gamma, full width of the displacement power peak

  /// Throws std::invalid_argument unless mass, resonance and damping are
  /// positive and the mode is underdamped (resonance > damping).
  void validate() const;

  double quality_factor() const { return resonance / damping; }

  static MechanicalMode from_hz(std::string label, double mass_kg, double resonance_hz,
                                double damping_hz);
};

struct Environment {
  double bath_temperature = 0.0;  // K

  static constexpr double boltzmann = kBoltzmann;
  static constexpr double hbar = kHbar;

  void validate() const;
};

/// A transduction channel. `noise_floor` is the white displacement-noise
/// PSD in the canonical double-sided angular convention (m^2 s).
struct ProbeModel {
  std::string label;
  double noise_floor = 0.0;
  double calibration_scale = 1.0;  // reading = scale * (x + n)

  void validate() const;
};

enum class BandpassMode { Auto, On, Off };

struct FeedbackConfig {
  double gain = 0.0;           // dimensionless g; closed-loop damping is (1+g) Gamma
  double delay = 0.25;         // fraction of the controlled mode's period
  double bandpass_center = 0;  // rad/s, 0 selects the controlled mode's resonance
  double bandpass_width = 0;   // rad/s, 0 selects 20 Gamma
  BandpassMode bandpass = BandpassMode::Auto;
  bool enabled = false;
  std::size_t controlled_mode = 0;

  void validate() const;
};

/// Gradient-force drive. `force_per_volt` is the peak-to-peak force per
/// applied RMS volt, so the force amplitude is force_per_volt * voltage / 2.
struct DriveConfig {
  double voltage = 0.0;         // V_rms
  double force_per_volt = 0.0;  // N/V, peak-to-peak
  double frequency = 0.0;       // rad/s
  double phase = 0.0;           // rad

  double force_peak_to_peak() const { return force_per_volt * voltage; }
  double force_amplitude() const { return 0.5 * force_per_volt * voltage; }

  void validate() const;
};

enum class Sidedness { DoubleSidedAngular, SingleSidedHertz };

/// Canonical PSDs are double-sided in angular frequency, normalised so that
/// variance = (1/2pi) * integral over all omega. Printed spectra are
/// single-sided per hertz: S_ss(f) = 2 S_ds(2 pi f).
struct SpectralConvention {
  static constexpr double to_single_sided_hz(double s_ds) { return 2.0 * s_ds; }
  static constexpr double to_double_sided_angular(double s_ss) { return 0.5 * s_ss; }

  static double convert(double value, Sidedness from, Sidedness to) {
    if (from == to) return value;
    return from == Sidedness::DoubleSidedAngular ? to_single_sided_hz(value)
                                                 : to_double_sided_angular(value);
  }
};

}  // namespace coems::physics
