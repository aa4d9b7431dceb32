#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace coems::bench {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;  // usage, IO, parse or config errors
inline constexpr int kExitNoConvergence = 2;

struct DesignOptions {
  double t0 = 300.0;
  double snr = 100.0;
  double g_max = 50.0;
  std::size_t points = 501;
  double resonance_hz = 6.272e6;  // for the occupancy at T_min
  std::filesystem::path out = "runs";
};

struct CoolingOptions {
  std::filesystem::path config;
  std::filesystem::path out = "runs";
  std::optional<std::uint64_t> seed;
  std::vector<double> gains;  // empty: the config's sweep.gains
  std::size_t jobs = 1;
};

struct DriveOptions {
  std::filesystem::path config;
  std::filesystem::path out = "runs";
  std::optional<std::uint64_t> seed;
  std::vector<double> voltages;  // empty: the config's sweep.voltages
  std::size_t jobs = 1;
};

struct AnalyzeOptions {
  std::filesystem::path psd;
  std::optional<std::filesystem::path> config;  // modes as guesses, temperature, fit band
  std::vector<std::string> guesses;             // "mass_kg,resonance_hz,damping_hz"
  std::optional<std::size_t> n_modes;
  std::optional<double> temperature;            // K, default 300 or the config's
  std::optional<double> noise_floor;            // single-sided m^2/Hz guess
  std::optional<double> band_low;               // Hz
  std::optional<double> band_high;              // Hz
  std::optional<std::filesystem::path> model_out;  // fitted model on the data grid
  std::optional<std::filesystem::path> out;
};

/// Each command prints a JSON summary on `out`, diagnostics on `err`, and
/// returns a process exit code.
int cmd_design(const DesignOptions& o, std::ostream& out, std::ostream& err);
int cmd_cooling_sweep(const CoolingOptions& o, std::ostream& out, std::ostream& err);
int cmd_drive_sweep(const DriveOptions& o, std::ostream& out, std::ostream& err);
int cmd_analyze(const AnalyzeOptions& o, std::ostream& out, std::ostream& err);

}  // namespace coems::bench
