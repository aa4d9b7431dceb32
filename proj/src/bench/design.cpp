#include "coems/bench/design.hpp"

#include <stdexcept>

#include "coems/physics/cooling.hpp"
#include "coems/physics/oscillator.hpp"

namespace coems::bench {

std::vector<DesignPoint> design_curve(double t0, double snr, double g_max, std::size_t n_points) {
  if (!(t0 >= 0.0)) throw std::invalid_argument("T0 must be non-negative");
  if (!(snr > 0.0)) throw std::invalid_argument("snr must be positive");
  if (!(g_max > 0.0)) throw std::invalid_argument("g_max must be positive");
  if (n_points < 2) throw std::invalid_argument("need at least two points");
  std::vector<DesignPoint> out;
  out.reserve(n_points);
  for (std::size_t i = 0; i < n_points; ++i) {
    const double g = g_max * static_cast<double>(i) / static_cast<double>(n_points - 1);
    out.push_back({g, physics::cooling_temperature(t0, g, snr),
                   physics::inferred_temperature_theory(physics::Loop::InLoop, t0, g, snr).kelvin});
  }
  return out;
}

DesignSummary design_summary(double t0, double snr, double omega_m) {
  if (!(omega_m > 0.0)) throw std::invalid_argument("omega_m must be positive");
  const auto m = physics::min_temperature(t0, snr);
  return {m.temperature, m.gain, physics::phonon_occupancy(m.temperature, omega_m), omega_m};
}

nlohmann::json to_json(const DesignSummary& s) {
  return {{"T_min_K", s.t_min},
          {"g_opt", s.g_opt},
          {"resonance_hz", physics::hz_from_angular(s.omega_m)},
          {"phonon_occupancy_at_T_min", s.occupancy}};
}

}  // namespace coems::bench
