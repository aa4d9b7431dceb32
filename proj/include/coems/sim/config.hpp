#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "coems/physics/types.hpp"

namespace coems::sim {

class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

enum class Integrator { ExactGaussian, SemiImplicitEuler };
enum class InitialState { Thermal, Rest };

std::string to_string(Integrator integrator);
Integrator integrator_from_string(const std::string& name);
std::string to_string(InitialState state);
InitialState initial_state_from_string(const std::string& name);

struct SimulationConfig {
  std::vector<physics::MechanicalMode> modes;
  physics::Environment env;
  physics::ProbeModel inloop{"in-loop"};
  physics::ProbeModel outloop{"out-of-loop"};
  physics::FeedbackConfig feedback;
  std::optional<physics::DriveConfig> drive;

  double sample_rate = 1e6;  // Hz
  double duration = 1.0;     // s, recorded span
  double settle_time = 0.0;  // s, simulated before recording starts
  std::uint64_t seed = 1;
  Integrator integrator = Integrator::ExactGaussian;
  int substeps = 1;  // integrator steps per sample, power of two
  InitialState initial_state = InitialState::Thermal;
  bool record_mode_traces = true;

  std::size_t sample_count() const;
  std::size_t settle_count() const;
  double dt() const { return 1.0 / sample_rate; }

  /// Throws ConfigError describing the first violated invariant.
  void validate() const;
};

inline constexpr std::size_t kMinSamples = std::size_t{1} << 14;
inline constexpr double kMinSamplesPerPeriod = 20.0;
inline constexpr double kMinQuarterPeriodSamples = 4.0;

}  // namespace coems::sim
