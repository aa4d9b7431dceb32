#pragma once

#include <cstddef>
#include <stdexcept>
#include <vector>

#include "coems/bench/config.hpp"
#include "coems/spectral/psd.hpp"

namespace coems::bench {

struct CoolingPoint {
  double gain = 0.0;
  double t_outloop = 0.0;        // K
  double t_inloop = 0.0;         // K, signed
  double t_theory_eq1 = 0.0;     // K
  double t_theory_inloop = 0.0;  // K, signed
  bool unphysical = false;       // some inferred temperature <= 0
};

struct GainSpectra {
  double gain = 0.0;
  spectral::Psd inloop;   // seed-averaged, calibrated
  spectral::Psd outloop;
  double floor_inloop = 0.0;   // m^2/Hz, measured beside the band
  double floor_outloop = 0.0;
};

struct CoolingSweep {
  double snr = 0.0;
  double t0 = 0.0;
  std::vector<CoolingPoint> points;  // one per gain, ascending
  std::vector<GainSpectra> spectra;  // same order
  double reference_area_inloop = 0.0;
  double reference_area_outloop = 0.0;
};

/// Thrown when a run fails. `spectra` holds every gain whose runs all
/// finished before the sweep was aborted.
class SweepError : public std::runtime_error {
 public:
  SweepError(const std::string& what, std::vector<GainSpectra> completed)
      : std::runtime_error(what), spectra(std::move(completed)) {}
  std::vector<GainSpectra> spectra;
};

/// Sorted, de-duplicated gains with 0 added as the reference.
std::vector<double> sweep_gains(std::vector<double> gains);

/// Closed-loop linewidths between the band edge and the start/end of the
/// windows used to measure each channel's transduction floor.
inline constexpr double kFloorWindowInner = 1.0;
inline constexpr double kFloorWindowOuter = 4.0;

/// Simulates every (gain, seed) pair on up to `jobs` threads and infers
/// both channel temperatures against the g = 0 runs. Run seeds depend only
/// on the base seed and the seed index, so results do not depend on `jobs`
/// or on the order of the gain list.
CoolingSweep run_cooling_sweep(const BenchConfig& config, const std::vector<double>& gains,
                               std::size_t jobs = 1);

/// Single run: calibrated Welch spectra of both probe channels.
GainSpectra simulate_spectra(const BenchConfig& config, double gain, std::uint64_t seed);

}  // namespace coems::bench
