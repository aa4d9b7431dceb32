#include "coems/bench/cooling_sweep.hpp"

#include <algorithm>
#include <cmath>

#include "coems/bench/parallel.hpp"
#include "coems/physics/cooling.hpp"
#include "coems/sim/rng.hpp"
#include "coems/sim/simulate.hpp"
#include "coems/spectral/temperature.hpp"
#include "coems/spectral/welch.hpp"

namespace coems::bench {

std::vector<double> sweep_gains(std::vector<double> gains) {
  for (double g : gains)
    if (!(g >= 0.0) || !std::isfinite(g)) throw std::invalid_argument("gains must be finite and >= 0");
  gains.push_back(0.0);
  std::sort(gains.begin(), gains.end());
  gains.erase(std::unique(gains.begin(), gains.end()), gains.end());
  return gains;
}

GainSpectra simulate_spectra(const BenchConfig& config, double gain, std::uint64_t seed) {
  auto c = config.run_config();
  c.feedback.enabled = gain > 0.0;
  c.feedback.gain = gain;
  c.seed = seed;
  c.record_mode_traces = false;
  const auto& a = config.analysis;
  spectral::WelchEstimator il(c.sample_rate, a.segment_length, a.overlap, a.window);
  spectral::WelchEstimator ol(c.sample_rate, a.segment_length, a.overlap, a.window);
  sim::simulate_stream(c, [&](const sim::SimulationChunk& chunk) {
    il.push(chunk.inloop);
    ol.push(chunk.outloop);
  });
  const double si = c.inloop.calibration_scale;
  const double so = c.outloop.calibration_scale;
  return {gain, il.result().scaled(1.0 / (si * si)), ol.result().scaled(1.0 / (so * so))};
}

namespace {

spectral::FrequencyBand clamp_band(spectral::FrequencyBand band, const spectral::Psd& psd) {
  band.low = std::max(band.low, psd.frequency[1]);
  band.high = std::min(band.high, psd.frequency.back());
  return band;
}

}  // namespace

CoolingSweep run_cooling_sweep(const BenchConfig& config, const std::vector<double>& gain_list,
                               std::size_t jobs) {
  const auto gains = sweep_gains(gain_list);
  const std::size_t seeds = config.analysis.seeds_per_gain;
  const auto& sim = config.sim;
  const auto& mode = sim.modes.at(sim.feedback.controlled_mode);

  // Run list: every gain gets `seeds` runs; the reference (gain 0, first in
  // the sorted list) may get more.
  const std::size_t ref_seeds = std::max(seeds, config.analysis.reference_seeds);
  std::vector<std::size_t> first(gains.size() + 1, 0);
  for (std::size_t gi = 0; gi < gains.size(); ++gi)
    first[gi + 1] = first[gi] + (gi == 0 ? ref_seeds : seeds);
  std::vector<GainSpectra> runs(first.back());
  auto gain_of = [&](std::size_t i) {
    return static_cast<std::size_t>(std::upper_bound(first.begin(), first.end(), i) - first.begin()) - 1;
  };
  auto average = [&](std::size_t gi) {
    std::vector<spectral::Psd> il, ol;
    for (std::size_t i = first[gi]; i < first[gi + 1]; ++i) {
      il.push_back(runs[i].inloop);
      ol.push_back(runs[i].outloop);
    }
    return GainSpectra{gains[gi], spectral::average_psds(il), spectral::average_psds(ol)};
  };

  std::vector<bool> done;
  try {
    parallel_for(
        runs.size(), jobs,
        [&](std::size_t i) {
          const std::size_t gi = gain_of(i);
          runs[i] = simulate_spectra(config, gains[gi], sim::mix_seed(sim.seed, i - first[gi]));
        },
        &done);
  } catch (const std::exception& e) {
    std::vector<GainSpectra> completed;
    for (std::size_t gi = 0; gi < gains.size(); ++gi) {
      bool all = true;
      for (std::size_t i = first[gi]; i < first[gi + 1]; ++i) all = all && done[i];
      if (all) completed.push_back(average(gi));
    }
    throw SweepError(e.what(), std::move(completed));
  }

  CoolingSweep out;
  out.t0 = sim.env.bath_temperature;
  out.snr = physics::snr(mode, sim.env, sim.inloop);
  for (std::size_t gi = 0; gi < gains.size(); ++gi) out.spectra.push_back(average(gi));

  const auto& ref = out.spectra.front();  // gain 0
  auto measure = [&](GainSpectra& s) {
    const double width = (1.0 + s.gain) * physics::hz_from_angular(mode.damping);
    const auto band = clamp_band(spectral::default_band(mode, s.gain), s.outloop);
    s.floor_inloop = spectral::side_band_floor(s.inloop, band, kFloorWindowInner * width,
                                               kFloorWindowOuter * width);
    s.floor_outloop = spectral::side_band_floor(s.outloop, band, kFloorWindowInner * width,
                                                kFloorWindowOuter * width);
    return band;
  };
  for (auto& s : out.spectra) measure(s);
  const auto ref_band = clamp_band(spectral::default_band(mode, 0.0), ref.outloop);
  out.reference_area_inloop = spectral::band_area(ref.inloop, ref.floor_inloop, ref_band);
  out.reference_area_outloop = spectral::band_area(ref.outloop, ref.floor_outloop, ref_band);

  for (const auto& s : out.spectra) {
    const auto band = clamp_band(spectral::default_band(mode, s.gain), s.outloop);
    const auto t_ol = spectral::infer_temperature(s.outloop, s.floor_outloop, band,
                                                  out.reference_area_outloop, out.t0);
    const auto t_il = spectral::infer_temperature(s.inloop, s.floor_inloop, band,
                                                  out.reference_area_inloop, out.t0);
    CoolingPoint p;
    p.gain = s.gain;
    p.t_outloop = t_ol.value;
    p.t_inloop = t_il.value;
    p.t_theory_eq1 = physics::cooling_temperature(out.t0, s.gain, out.snr);
    p.t_theory_inloop =
        physics::inferred_temperature_theory(physics::Loop::InLoop, out.t0, s.gain, out.snr).kelvin;
    p.unphysical = t_ol.unphysical || t_il.unphysical;
    out.points.push_back(p);
  }
  return out;
}

}  // namespace coems::bench
