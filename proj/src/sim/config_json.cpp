#include "coems/sim/config_json.hpp"

#include <string>

#include "coems/physics/cooling.hpp"

namespace coems::sim {

using nlohmann::json;
using physics::angular_from_hz;
using physics::hz_from_angular;

namespace {

const json& require(const json& j, const char* key, const std::string& where) {
  if (!j.is_object() || !j.contains(key))
    throw ConfigError(where + ": missing required key '" + key + "'");
  return j.at(key);
}

double number(const json& j, const char* key, const std::string& where) {
  const auto& v = require(j, key, where);
  if (!v.is_number()) throw ConfigError(where + "." + key + " must be a number");
  return v.get<double>();
}

double number_or(const json& j, const char* key, double fallback, const std::string& where) {
  if (!j.contains(key)) return fallback;
  return number(j, key, where);
}

std::string string_or(const json& j, const char* key, std::string fallback,
                      const std::string& where) {
  if (!j.contains(key)) return fallback;
  if (!j.at(key).is_string()) throw ConfigError(where + "." + key + " must be a string");
  return j.at(key).get<std::string>();
}

bool bool_or(const json& j, const char* key, bool fallback, const std::string& where) {
  if (!j.contains(key)) return fallback;
  if (!j.at(key).is_boolean()) throw ConfigError(where + "." + key + " must be a boolean");
  return j.at(key).get<bool>();
}

physics::BandpassMode bandpass_from_string(const std::string& s) {
  if (s == "auto") return physics::BandpassMode::Auto;
  if (s == "on") return physics::BandpassMode::On;
  if (s == "off") return physics::BandpassMode::Off;
  throw ConfigError("feedback.bandpass must be one of auto|on|off");
}

std::string to_string(physics::BandpassMode m) {
  switch (m) {
    case physics::BandpassMode::On: return "on";
    case physics::BandpassMode::Off: return "off";
    case physics::BandpassMode::Auto: break;
  }
  return "auto";
}

physics::ProbeModel probe_from_json(const json& j, const std::string& label,
                                    const physics::MechanicalMode& reference,
                                    const physics::Environment& env) {
  const std::string where = "probes." + label;
  physics::ProbeModel probe{label};
  probe.calibration_scale = number_or(j, "calibration_scale", 1.0, where);
  const bool has_floor = j.contains("noise_floor_m2_per_hz");
  const bool has_snr = j.contains("snr");
  if (has_floor == has_snr)
    throw ConfigError(where + ": give exactly one of noise_floor_m2_per_hz or snr");
  if (has_floor) {
    probe.noise_floor = physics::SpectralConvention::to_double_sided_angular(
        number(j, "noise_floor_m2_per_hz", where));
  } else {
    const double snr = number(j, "snr", where);
    if (!(snr > 0.0)) throw ConfigError(where + ".snr must be positive");
    probe.noise_floor = physics::noise_floor_for_snr(reference, env, snr);
  }
  return probe;
}

}  // namespace

SimulationConfig config_from_json(const json& j) {
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  SimulationConfig c;

  const auto& env = require(j, "environment", "config");
  c.env.bath_temperature = number(env, "bath_temperature_k", "environment");

  const auto& modes = require(j, "modes", "config");
  if (!modes.is_array() || modes.empty()) throw ConfigError("modes must be a non-empty array");
  for (std::size_t i = 0; i < modes.size(); ++i) {
    const std::string where = "modes[" + std::to_string(i) + "]";
    const auto& m = modes[i];
    physics::MechanicalMode mode{string_or(m, "label", "mode" + std::to_string(i + 1), where),
                                 number(m, "mass_kg", where),
                                 angular_from_hz(number(m, "resonance_hz", where)),
                                 angular_from_hz(number(m, "damping_hz", where))};
    try {
      mode.validate();
    } catch (const std::invalid_argument& e) {
      throw ConfigError(e.what());
    }
    c.modes.push_back(std::move(mode));
  }

  if (j.contains("feedback")) {
    const auto& f = j.at("feedback");
    c.feedback.enabled = bool_or(f, "enabled", true, "feedback");
    c.feedback.gain = number_or(f, "gain", 0.0, "feedback");
    c.feedback.delay = number_or(f, "delay_cycles", 0.25, "feedback");
    c.feedback.bandpass = bandpass_from_string(string_or(f, "bandpass", "auto", "feedback"));
    c.feedback.bandpass_center = angular_from_hz(number_or(f, "bandpass_center_hz", 0, "feedback"));
    c.feedback.bandpass_width = angular_from_hz(number_or(f, "bandpass_width_hz", 0, "feedback"));
    const double idx = number_or(f, "controlled_mode", 0, "feedback");
    if (idx < 0 || idx >= static_cast<double>(c.modes.size()))
      throw ConfigError("feedback.controlled_mode out of range");
    c.feedback.controlled_mode = static_cast<std::size_t>(idx);
  }
  const auto& reference = c.modes[c.feedback.controlled_mode];

  const auto& probes = require(j, "probes", "config");
  c.inloop = probe_from_json(require(probes, "in_loop", "probes"), "in_loop", reference, c.env);
  c.outloop =
      probe_from_json(require(probes, "out_of_loop", "probes"), "out_of_loop", reference, c.env);

  if (j.contains("drive") && !j.at("drive").is_null()) {
    const auto& d = j.at("drive");
    physics::DriveConfig drive;
    drive.voltage = number(d, "voltage_vrms", "drive");
    drive.force_per_volt = number(d, "force_per_volt_n_per_vrms", "drive");
    const double f_hz = number_or(d, "frequency_hz", 0.0, "drive");
    drive.frequency = f_hz > 0 ? angular_from_hz(f_hz) : reference.resonance;
    drive.phase = number_or(d, "phase_rad", 0.0, "drive");
    c.drive = drive;
  }

  const auto& s = require(j, "simulation", "config");
  c.sample_rate = number(s, "sample_rate_hz", "simulation");
  c.duration = number(s, "duration_s", "simulation");
  c.settle_time = number_or(s, "settle_time_s", 0.0, "simulation");
  if (s.contains("seed")) {
    if (!s.at("seed").is_number_unsigned()) throw ConfigError("simulation.seed must be a u64");
    c.seed = s.at("seed").get<std::uint64_t>();
  }
  c.integrator = integrator_from_string(string_or(s, "integrator", "exact-gaussian", "simulation"));
  c.substeps = static_cast<int>(number_or(s, "substeps", 1, "simulation"));
  c.initial_state = initial_state_from_string(string_or(s, "initial_state", "thermal", "simulation"));
  c.record_mode_traces = bool_or(s, "record_mode_traces", true, "simulation");

  c.validate();
  return c;
}

json config_to_json(const SimulationConfig& c) {
  json j;
  j["environment"] = {{"bath_temperature_k", c.env.bath_temperature}};
  j["modes"] = json::array();
  for (const auto& m : c.modes) {
    j["modes"].push_back({{"label", m.label},
                          {"mass_kg", m.effective_mass},
                          {"resonance_hz", hz_from_angular(m.resonance)},
                          {"damping_hz", hz_from_angular(m.damping)}});
  }
  auto probe = [](const physics::ProbeModel& p) {
    return json{{"noise_floor_m2_per_hz",
                 physics::SpectralConvention::to_single_sided_hz(p.noise_floor)},
                {"calibration_scale", p.calibration_scale}};
  };
  j["probes"] = {{"in_loop", probe(c.inloop)}, {"out_of_loop", probe(c.outloop)}};
  j["feedback"] = {{"enabled", c.feedback.enabled},
                   {"gain", c.feedback.gain},
                   {"delay_cycles", c.feedback.delay},
                   {"bandpass", to_string(c.feedback.bandpass)},
                   {"bandpass_center_hz", hz_from_angular(c.feedback.bandpass_center)},
                   {"bandpass_width_hz", hz_from_angular(c.feedback.bandpass_width)},
                   {"controlled_mode", c.feedback.controlled_mode}};
  if (c.drive) {
    j["drive"] = {{"voltage_vrms", c.drive->voltage},
                  {"force_per_volt_n_per_vrms", c.drive->force_per_volt},
                  {"frequency_hz", hz_from_angular(c.drive->frequency)},
                  {"phase_rad", c.drive->phase}};
  }
  j["simulation"] = {{"sample_rate_hz", c.sample_rate},
                     {"duration_s", c.duration},
                     {"settle_time_s", c.settle_time},
                     {"seed", c.seed},
                     {"integrator", to_string(c.integrator)},
                     {"substeps", c.substeps},
                     {"initial_state", to_string(c.initial_state)},
                     {"record_mode_traces", c.record_mode_traces}};
  return j;
}

}  // namespace coems::sim
