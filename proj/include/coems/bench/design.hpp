#pragma once

#include <cstddef>
#include <vector>

#include <json.hpp>

namespace coems::bench {

struct DesignPoint {
  double gain;
  double t_eq1;     // K, out-of-loop mode temperature
  double t_inloop;  // K, in-loop inference (signed)
};

struct DesignSummary {
  double t_min;      // K
  double g_opt;
  double occupancy;  // <n> at T_min
  double omega_m;    // rad/s used for the occupancy
};

/// n_points gains evenly spaced on [0, g_max]. Throws std::invalid_argument
/// unless t0 >= 0, snr > 0, g_max > 0 and n_points >= 2.
std::vector<DesignPoint> design_curve(double t0, double snr, double g_max, std::size_t n_points);

DesignSummary design_summary(double t0, double snr, double omega_m);

nlohmann::json to_json(const DesignSummary& s);

}  // namespace coems::bench
