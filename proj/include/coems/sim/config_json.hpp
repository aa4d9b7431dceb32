#pragma once

#include <json.hpp>

#include "coems/sim/config.hpp"

namespace coems::sim {

/// JSON form of a simulation config. Keys are SI with unit suffixes
/// ("mass_kg", "resonance_hz", ...). Frequencies are entered in hertz;
/// noise floors as single-sided PSDs in m^2/Hz, or as an "snr" relative to
/// the controlled mode's thermal peak.
///
/// Sections read: environment, modes, probes, feedback, drive (optional),
/// simulation. Unknown sections are ignored so that a bench config can be
/// passed whole. Throws ConfigError on missing or ill-typed fields.
SimulationConfig config_from_json(const nlohmann::json& j);

/// Resolved config with explicit noise floors; config_from_json accepts it.
nlohmann::json config_to_json(const SimulationConfig& c);

}  // namespace coems::sim
