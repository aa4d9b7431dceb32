#pragma once

#include <filesystem>

#include "coems/sim/config.hpp"
#include "coems/sim/simulate.hpp"

namespace coems::sim {

/// Writes `path` as CSV with header "time,x,y_IL,y_OL,F_fb" and a sidecar
/// `<path>.json` holding the resolved config and seed.
void write_record_csv(const SimulationRecord& record, const SimulationConfig& config,
                      const std::filesystem::path& path);

/// Reads the CSV written by write_record_csv (per-mode traces are not stored).
SimulationRecord read_record_csv(const std::filesystem::path& path);

}  // namespace coems::sim
