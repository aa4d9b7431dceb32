#include "coems/bench/config.hpp"

#include <bit>
#include <cmath>
#include <fstream>

#include "coems/io/csv.hpp"
#include "coems/sim/config_json.hpp"
#include "coems/spectral/welch.hpp"

namespace coems::bench {

using nlohmann::json;
using sim::ConfigError;

void AnalysisSettings::validate(double sample_rate) const {
  if (segment_length < 16 || !std::has_single_bit(segment_length))
    throw ConfigError("analysis.segment_length must be a power of two >= 16");
  if (!(overlap >= 0.0 && overlap < 1.0)) throw ConfigError("analysis.overlap must be in [0, 1)");
  if (segments && *segments == 0) throw ConfigError("analysis.segments must be positive");
  if (seeds_per_gain == 0) throw ConfigError("analysis.seeds_per_gain must be positive");
  if (fit_band) {
    if (!(fit_band->low >= 0.0 && fit_band->high > fit_band->low &&
          fit_band->high <= 0.5 * sample_rate))
      throw ConfigError("analysis.fit_band_hz must satisfy 0 <= low < high <= Nyquist");
  }
}

namespace {

std::vector<double> number_list(const json& j, const char* key) {
  std::vector<double> out;
  if (!j.contains(key)) return out;
  const auto& arr = j.at(key);
  if (!arr.is_array()) throw ConfigError(std::string("sweep.") + key + " must be an array");
  for (const auto& v : arr) {
    if (!v.is_number() || !(v.get<double>() >= 0.0) || !std::isfinite(v.get<double>()))
      throw ConfigError(std::string("sweep.") + key + " must hold non-negative numbers");
    out.push_back(v.get<double>());
  }
  return out;
}

std::size_t count(const json& j, const char* key) {
  const auto& v = j.at(key);
  if (!v.is_number_unsigned()) throw ConfigError(std::string("analysis.") + key + " must be a non-negative integer");
  return v.get<std::size_t>();
}

}  // namespace

BenchConfig bench_config_from_json(const json& j) {
  BenchConfig cfg;
  cfg.sim = sim::config_from_json(j);
  cfg.source = j;
  if (j.contains("analysis")) {
    const auto& a = j.at("analysis");
    if (!a.is_object()) throw ConfigError("analysis must be an object");
    if (a.contains("segment_length")) cfg.analysis.segment_length = count(a, "segment_length");
    if (a.contains("overlap")) {
      if (!a.at("overlap").is_number()) throw ConfigError("analysis.overlap must be a number");
      cfg.analysis.overlap = a.at("overlap").get<double>();
    }
    if (a.contains("window")) {
      if (!a.at("window").is_string()) throw ConfigError("analysis.window must be a string");
      try {
        cfg.analysis.window = spectral::window_from_string(a.at("window").get<std::string>());
      } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("analysis.window: ") + e.what());
      }
    }
    if (a.contains("segments")) {
      if (a.at("segments").is_null()) cfg.analysis.segments.reset();
      else cfg.analysis.segments = count(a, "segments");
    }
    if (a.contains("seeds_per_gain")) cfg.analysis.seeds_per_gain = count(a, "seeds_per_gain");
    if (a.contains("reference_seeds")) cfg.analysis.reference_seeds = count(a, "reference_seeds");
    if (a.contains("fit_band_hz")) {
      const auto& b = a.at("fit_band_hz");
      if (!b.is_array() || b.size() != 2 || !b[0].is_number() || !b[1].is_number())
        throw ConfigError("analysis.fit_band_hz must be [low, high]");
      cfg.analysis.fit_band = spectral::FrequencyBand{b[0].get<double>(), b[1].get<double>()};
    }
  }
  cfg.analysis.validate(cfg.sim.sample_rate);
  if (j.contains("sweep")) {
    const auto& s = j.at("sweep");
    if (!s.is_object()) throw ConfigError("sweep must be an object");
    cfg.gains = number_list(s, "gains");
    cfg.voltages = number_list(s, "voltages");
  }
  cfg.run_config().validate();
  return cfg;
}

BenchConfig load_bench_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw io::ParseError(path.string() + ": cannot open config");
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw io::ParseError(path.string() + ": " + e.what());
  }
  return bench_config_from_json(j);
}

sim::SimulationConfig BenchConfig::run_config() const {
  auto c = sim;
  if (analysis.segments) {
    const auto n = spectral::welch_samples_for(*analysis.segments, analysis.segment_length,
                                               analysis.overlap);
    c.duration = static_cast<double>(n) / c.sample_rate;
  }
  return c;
}

json BenchConfig::resolved() const {
  json j = sim::config_to_json(run_config());
  json a{{"segment_length", analysis.segment_length},
         {"overlap", analysis.overlap},
         {"window", spectral::to_string(analysis.window)},
         {"seeds_per_gain", analysis.seeds_per_gain},
         {"reference_seeds", analysis.reference_seeds}};
  a["segments"] = analysis.segments ? json(*analysis.segments) : json(nullptr);
  if (analysis.fit_band) a["fit_band_hz"] = {analysis.fit_band->low, analysis.fit_band->high};
  j["analysis"] = a;
  j["sweep"] = {{"gains", gains}, {"voltages", voltages}};
  return j;
}

}  // namespace coems::bench
