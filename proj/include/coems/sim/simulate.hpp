#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "coems/sim/config.hpp"

namespace coems::sim {

/// All series share one length. inloop = scale * (x + n_IL) with n_IL drawn
/// from the seed's in-loop substream.
struct SimulationRecord {
  double dt = 0.0;
  std::vector<double> x;                    // sum over modes
  std::vector<std::vector<double>> mode_x;  // per mode, empty if not recorded
  std::vector<double> inloop;
  std::vector<double> outloop;
  std::vector<double> feedback_force;  // N, force applied over each step

  std::size_t size() const { return x.size(); }
  double time(std::size_t i) const { return static_cast<double>(i) * dt; }
};

/// A contiguous block of recorded samples starting at `first`.
struct SimulationChunk {
  std::size_t first = 0;
  double dt = 0.0;
  std::span<const double> x;
  std::span<const std::vector<double>> mode_x;
  std::span<const double> inloop;
  std::span<const double> outloop;
  std::span<const double> feedback_force;
};

using ChunkSink = std::function<void(const SimulationChunk&)>;

/// Integrates the configured system and streams recorded samples to `sink`
/// in blocks of at most `chunk_size`. Identical configs produce identical
/// chunks bit for bit.
void simulate_stream(const SimulationConfig& config, const ChunkSink& sink,
                     std::size_t chunk_size = 1 << 16);

/// Buffers simulate_stream into a record.
SimulationRecord simulate(const SimulationConfig& config);

/// True when the loop band-pass is applied for this config (Auto filters only
/// when more than one mode is simulated).
bool uses_bandpass(const SimulationConfig& config);

}  // namespace coems::sim
