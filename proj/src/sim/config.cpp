#include "coems/sim/config.hpp"

#include <algorithm>
#include <bit>
#include <cmath>

#include "coems/sim/feedback.hpp"

namespace coems::sim {

std::string to_string(Integrator integrator) {
  return integrator == Integrator::ExactGaussian ? "exact-gaussian" : "semi-implicit-euler";
}

Integrator integrator_from_string(const std::string& name) {
  if (name == "exact-gaussian") return Integrator::ExactGaussian;
  if (name == "semi-implicit-euler") return Integrator::SemiImplicitEuler;
  throw ConfigError("unknown integrator '" + name + "'");
}

std::string to_string(InitialState state) {
  return state == InitialState::Thermal ? "thermal" : "rest";
}

InitialState initial_state_from_string(const std::string& name) {
  if (name == "thermal") return InitialState::Thermal;
  if (name == "rest") return InitialState::Rest;
  throw ConfigError("unknown initial state '" + name + "'");
}

std::size_t SimulationConfig::sample_count() const {
  return static_cast<std::size_t>(std::llround(duration * sample_rate));
}

std::size_t SimulationConfig::settle_count() const {
  return static_cast<std::size_t>(std::llround(settle_time * sample_rate));
}

void SimulationConfig::validate() const {
  if (modes.empty()) throw ConfigError("at least one mechanical mode is required");
  try {
    for (const auto& mode : modes) mode.validate();
    env.validate();
    inloop.validate();
    outloop.validate();
    feedback.validate();
    if (drive) drive->validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  if (!(sample_rate > 0.0) || !std::isfinite(sample_rate))
    throw ConfigError("sample rate must be positive");
  if (!(duration > 0.0)) throw ConfigError("duration must be positive");
  if (!(settle_time >= 0.0)) throw ConfigError("settle time must be >= 0");
  if (substeps < 1 || !std::has_single_bit(static_cast<unsigned>(substeps)))
    throw ConfigError("substeps must be a positive power of two");

  const double max_resonance =
      std::max_element(modes.begin(), modes.end(), [](const auto& a, const auto& b) {
        return a.resonance < b.resonance;
      })->resonance;
  if (sample_rate < kMinSamplesPerPeriod * physics::hz_from_angular(max_resonance) * (1 - 1e-12))
    throw ConfigError("sample rate must be at least 20x the highest mode frequency");
  if (sample_count() < kMinSamples)
    throw ConfigError("duration x sample rate must give at least 2^14 samples");

  if (feedback.enabled) {
    if (feedback.controlled_mode >= modes.size())
      throw ConfigError("feedback controlled_mode index out of range");
    const auto& mode = modes[feedback.controlled_mode];
    const double quarter = 0.25 * physics::kTwoPi / mode.resonance * sample_rate;
    if (quarter < kMinQuarterPeriodSamples)
      throw ConfigError("quarter period of the controlled mode must span at least 4 samples");
    try {
      (void)feedback_delay_samples(feedback, mode, sample_rate);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(e.what());
    }
  }
  if (drive && drive->frequency >= physics::kPi * sample_rate)
    throw ConfigError("drive frequency lies above Nyquist");
}

}  // namespace coems::sim
