#include "coems/bench/drive_sweep.hpp"

#include <algorithm>
#include <cmath>

#include "coems/bench/parallel.hpp"
#include "coems/physics/actuation.hpp"
#include "coems/sim/rng.hpp"
#include "coems/sim/simulate.hpp"
#include "coems/spectral/welch.hpp"

namespace coems::bench {

LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2)
    throw std::invalid_argument("fit_line needs two or more (x, y) pairs");
  const double n = static_cast<double>(x.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0, sxy = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (!(sxx > 0.0)) throw std::invalid_argument("fit_line: x values are all equal");
  LineFit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  f.r_squared = syy > 0.0 ? sxy * sxy / (sxx * syy) : 1.0;
  return f;
}

double peak_near(const spectral::Psd& psd, double frequency) {
  const std::size_t k = psd.nearest_bin(frequency);
  const std::size_t lo = k >= 2 ? k - 2 : 0;
  const std::size_t hi = std::min(k + 2, psd.size() - 1);
  return *std::max_element(psd.values.begin() + static_cast<std::ptrdiff_t>(lo),
                           psd.values.begin() + static_cast<std::ptrdiff_t>(hi) + 1);
}

DriveSweep run_drive_sweep(const BenchConfig& config, const std::vector<double>& voltages,
                           std::size_t jobs) {
  const auto& base = config.sim;
  if (!base.drive || !(base.drive->force_per_volt > 0.0))
    throw sim::ConfigError("drive-sweep needs drive.force_per_volt_n_per_vrms (kappa) > 0");
  if (voltages.empty()) throw std::invalid_argument("drive-sweep needs at least one voltage");
  for (double v : voltages)
    if (!(v >= 0.0) || !std::isfinite(v)) throw std::invalid_argument("voltages must be >= 0");

  const std::size_t n_modes = base.modes.size();
  DriveSweep out;
  out.points.resize(voltages.size() * n_modes);
  std::vector<double> rbw(out.points.size());
  const auto& a = config.analysis;
  parallel_for(out.points.size(), jobs, [&](std::size_t i) {
    const std::size_t vi = i / n_modes;
    const std::size_t j = i % n_modes;
    auto c = config.run_config();
    c.drive->voltage = voltages[vi];
    c.drive->frequency = c.modes[j].resonance;
    c.seed = sim::mix_seed(base.seed, j);
    c.record_mode_traces = false;
    spectral::WelchEstimator il(c.sample_rate, a.segment_length, a.overlap, a.window);
    sim::simulate_stream(c, [&](const sim::SimulationChunk& chunk) { il.push(chunk.inloop); });
    const double s = c.inloop.calibration_scale;
    const auto psd = il.result().scaled(1.0 / (s * s));
    DrivePoint p;
    p.voltage = voltages[vi];
    p.mode = j;
    p.drive_frequency = physics::hz_from_angular(c.modes[j].resonance);
    p.peak_asd = std::sqrt(peak_near(psd, p.drive_frequency));
    p.force = physics::gradient_force_from_peak(c.modes[j], physics::angular_from_hz(psd.rbw),
                                                p.peak_asd);
    p.force_configured = c.drive->force_peak_to_peak();
    out.points[i] = p;
    rbw[i] = psd.rbw;
  });
  out.rbw = rbw.front();

  if (voltages.size() >= 2) {
    for (std::size_t j = 0; j < n_modes; ++j) {
      std::vector<double> x, y;
      for (std::size_t vi = 0; vi < voltages.size(); ++vi) {
        x.push_back(voltages[vi]);
        y.push_back(out.points[vi * n_modes + j].peak_asd);
      }
      out.fits.push_back(fit_line(x, y));
    }
  }
  return out;
}

}  // namespace coems::bench
