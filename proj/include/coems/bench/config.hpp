#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <vector>

#include <json.hpp>

#include "coems/sim/config.hpp"
#include "coems/spectral/fit.hpp"
#include "coems/spectral/psd.hpp"

namespace coems::bench {

/// Spectrum-analyser settings shared by the sweeps.
struct AnalysisSettings {
  std::size_t segment_length = std::size_t{1} << 19;
  double overlap = 0.5;
  spectral::Window window = spectral::Window::Hann;
  /// Welch segments per run. When set, the recorded duration of each run is
  /// derived from it and simulation.duration_s is ignored.
  std::optional<std::size_t> segments = 64;
  std::size_t seeds_per_gain = 1;
  /// Seeds for the g = 0 reference; fewer than seeds_per_gain means as many.
  std::size_t reference_seeds = 0;
  std::optional<spectral::FrequencyBand> fit_band;

  void validate(double sample_rate) const;
};

struct BenchConfig {
  sim::SimulationConfig sim;
  AnalysisSettings analysis;
  std::vector<double> gains;     // default gain list for cooling-sweep
  std::vector<double> voltages;  // default voltage list for drive-sweep
  nlohmann::json source;         // document as read

  /// Simulation config with the recorded length set from analysis.segments.
  sim::SimulationConfig run_config() const;
  /// Resolved document: sim config re-serialised plus the analysis section.
  nlohmann::json resolved() const;
};

/// Throws sim::ConfigError for schema violations.
BenchConfig bench_config_from_json(const nlohmann::json& j);
/// Throws io::ParseError for unreadable or malformed JSON, sim::ConfigError
/// for schema violations.
BenchConfig load_bench_config(const std::filesystem::path& path);

}  // namespace coems::bench
