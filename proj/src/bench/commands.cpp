#include "coems/bench/commands.hpp"

#include <fstream>
#include <iostream>
#include <sstream>

#include <json.hpp>

#include "coems/bench/config.hpp"
#include "coems/bench/cooling_sweep.hpp"
#include "coems/bench/design.hpp"
#include "coems/bench/drive_sweep.hpp"
#include "coems/bench/manifest.hpp"
#include "coems/io/csv.hpp"
#include "coems/physics/cooling.hpp"
#include "coems/spectral/fit.hpp"
#include "coems/spectral/psd_io.hpp"
#include "coems/spectral/temperature.hpp"

namespace coems::bench {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

std::string gain_tag(double g) {
  auto s = io::format_double(g);
  for (auto& c : s)
    if (c == '.') c = 'p';
  return s;
}

void write_json(const fs::path& path, const json& j) {
  std::ofstream f(path, std::ios::binary);
  f << j.dump(2) << '\n';
  if (!f) throw std::runtime_error("cannot write " + path.string());
}

// Exceptions that map to exit code 1 with a one-line message.
template <class F>
int guarded(std::ostream& err, F&& body) {
  try {
    return body();
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }
}

void write_psd_artifacts(const fs::path& dir, Manifest& manifest, const GainSpectra& s,
                         const spectral::FrequencyBand& band) {
  fs::create_directories(dir / "psd");
  const std::string tag = gain_tag(s.gain);
  const auto il = fs::path("psd") / ("psd_g" + tag + "_in_loop.csv");
  const auto ol = fs::path("psd") / ("psd_g" + tag + "_out_of_loop.csv");
  spectral::write_psd_csv(spectral::crop(s.inloop, band.low, band.high), dir / il);
  spectral::write_psd_csv(spectral::crop(s.outloop, band.low, band.high), dir / ol);
  for (const auto& p : {il, ol}) {
    manifest.add_artifact(dir, p);
    manifest.add_artifact(dir, fs::path(p.string() + ".json"));
  }
}

}  // namespace

int cmd_design(const DesignOptions& o, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const auto curve = design_curve(o.t0, o.snr, o.g_max, o.points);
    const auto summary = design_summary(o.t0, o.snr, physics::angular_from_hz(o.resonance_hz));
    const json args{{"T0_K", o.t0}, {"snr", o.snr}, {"g_max", o.g_max},
                    {"points", o.points}, {"resonance_hz", o.resonance_hz}};
    const auto dir = make_run_directory(o.out, 0);
    Manifest manifest("design", args, args, 0);
    std::vector<double> g, teq, tin;
    for (const auto& p : curve) {
      g.push_back(p.gain);
      teq.push_back(p.t_eq1);
      tin.push_back(p.t_inloop);
    }
    io::write_csv(dir / "design_curve.csv", {"gain", "T_eq1_K", "T_inloop_theory_K"},
                  {&g, &teq, &tin});
    manifest.add_artifact(dir, "design_curve.csv");
    const json summary_json = to_json(summary);
    write_json(dir / "design_summary.json", summary_json);
    manifest.add_artifact(dir, "design_summary.json");
    manifest.set_summary(summary_json);
    manifest.write(dir, "complete");
    json report = summary_json;
    report["run_directory"] = dir.string();
    out << report.dump(2) << '\n';
    return kExitOk;
  });
}

int cmd_cooling_sweep(const CoolingOptions& o, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    auto cfg = load_bench_config(o.config);
    if (o.seed) cfg.sim.seed = *o.seed;
    const auto gains = sweep_gains(o.gains.empty() ? cfg.gains : o.gains);
    const json args{{"config", o.config.string()}, {"gains", gains}, {"jobs", o.jobs}};
    const auto dir = make_run_directory(o.out, cfg.sim.seed);
    Manifest manifest("cooling-sweep", args, cfg.resolved(), cfg.sim.seed);
    const auto& mode = cfg.sim.modes.at(cfg.sim.feedback.controlled_mode);

    CoolingSweep sweep;
    try {
      sweep = run_cooling_sweep(cfg, gains, o.jobs);
    } catch (const SweepError& e) {
      for (const auto& s : e.spectra)
        write_psd_artifacts(dir, manifest, s, spectral::default_band(mode, s.gain));
      manifest.write(dir, "failed", e.what());
      err << "error: sweep aborted: " << e.what() << "\npartial results in " << dir.string()
          << '\n';
      return kExitUsage;
    }

    std::vector<double> g, tol, til, teq, tinth, unph;
    for (const auto& p : sweep.points) {
      g.push_back(p.gain);
      tol.push_back(p.t_outloop);
      til.push_back(p.t_inloop);
      teq.push_back(p.t_theory_eq1);
      tinth.push_back(p.t_theory_inloop);
      unph.push_back(p.unphysical ? 1.0 : 0.0);
    }
    io::write_csv(dir / "cooling_sweep.csv",
                  {"gain", "T_outloop_K", "T_inloop_K", "T_theory_eq1_K", "T_theory_inloop_K",
                   "unphysical"},
                  {&g, &tol, &til, &teq, &tinth, &unph});
    manifest.add_artifact(dir, "cooling_sweep.csv");
    for (const auto& s : sweep.spectra)
      write_psd_artifacts(dir, manifest, s, spectral::default_band(mode, s.gain));

    const auto tmin = physics::min_temperature(sweep.t0, sweep.snr);
    const json summary{{"T0_K", sweep.t0},
                       {"snr", sweep.snr},
                       {"T_min_K", tmin.temperature},
                       {"g_opt", tmin.gain},
                       {"reference_area_in_loop_m2", sweep.reference_area_inloop},
                       {"reference_area_out_of_loop_m2", sweep.reference_area_outloop},
                       {"welch_segments_per_gain", sweep.spectra.front().outloop.segments_averaged}};
    manifest.set_summary(summary);
    manifest.write(dir, "complete");
    json report = summary;
    report["points"] = json::array();
    for (const auto& p : sweep.points)
      report["points"].push_back({{"gain", p.gain},
                                  {"T_outloop_K", p.t_outloop},
                                  {"T_inloop_K", p.t_inloop},
                                  {"T_theory_eq1_K", p.t_theory_eq1},
                                  {"T_theory_inloop_K", p.t_theory_inloop},
                                  {"unphysical", p.unphysical}});
    report["run_directory"] = dir.string();
    out << report.dump(2) << '\n';
    return kExitOk;
  });
}

int cmd_drive_sweep(const DriveOptions& o, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    auto cfg = load_bench_config(o.config);
    if (o.seed) cfg.sim.seed = *o.seed;
    const auto& voltages = o.voltages.empty() ? cfg.voltages : o.voltages;
    const json args{{"config", o.config.string()}, {"voltages", voltages}, {"jobs", o.jobs}};
    const auto sweep = run_drive_sweep(cfg, voltages, o.jobs);
    const auto dir = make_run_directory(o.out, cfg.sim.seed);
    Manifest manifest("drive-sweep", args, cfg.resolved(), cfg.sim.seed);

    std::vector<double> v, mode, f, asd, force, force_cfg;
    for (const auto& p : sweep.points) {
      v.push_back(p.voltage);
      mode.push_back(static_cast<double>(p.mode + 1));
      f.push_back(p.drive_frequency);
      asd.push_back(p.peak_asd);
      force.push_back(p.force);
      force_cfg.push_back(p.force_configured);
    }
    io::write_csv(dir / "drive_sweep.csv",
                  {"voltage_vrms", "mode", "drive_frequency_hz", "peak_asd_m_per_rthz",
                   "force_inferred_n", "force_configured_n"},
                  {&v, &mode, &f, &asd, &force, &force_cfg});
    manifest.add_artifact(dir, "drive_sweep.csv");

    json fits = json::array();
    for (std::size_t j = 0; j < sweep.fits.size(); ++j)
      fits.push_back({{"mode", j + 1},
                      {"label", cfg.sim.modes[j].label},
                      {"slope_m_per_rthz_per_vrms", sweep.fits[j].slope},
                      {"intercept_m_per_rthz", sweep.fits[j].intercept},
                      {"r_squared", sweep.fits[j].r_squared}});
    const json summary{{"rbw_hz", sweep.rbw}, {"linearity", fits}};
    write_json(dir / "drive_linearity.json", summary);
    manifest.add_artifact(dir, "drive_linearity.json");
    manifest.set_summary(summary);
    manifest.write(dir, "complete");
    json report = summary;
    report["run_directory"] = dir.string();
    out << report.dump(2) << '\n';
    return kExitOk;
  });
}

namespace {

physics::MechanicalMode parse_guess(const std::string& text, std::size_t index) {
  std::vector<double> v;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      v.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw std::invalid_argument("--guess '" + text + "': not a number list");
    }
  }
  if (v.size() != 3)
    throw std::invalid_argument("--guess expects mass_kg,resonance_hz,damping_hz");
  auto m = physics::MechanicalMode::from_hz("mode" + std::to_string(index + 1), v[0], v[1], v[2]);
  m.validate();
  return m;
}

}  // namespace

int cmd_analyze(const AnalyzeOptions& o, std::ostream& out, std::ostream& err) {
  spectral::Psd psd;
  spectral::FitGuess guess;
  physics::Environment env{300.0};
  spectral::FitOptions options;
  const int setup = guarded(err, [&] {
    psd = spectral::read_psd_csv(o.psd);
    if (o.config) {
      const auto cfg = load_bench_config(*o.config);
      guess.modes = cfg.sim.modes;
      env = cfg.sim.env;
      options.band = cfg.analysis.fit_band;
    }
    if (!o.guesses.empty()) {
      guess.modes.clear();
      for (std::size_t i = 0; i < o.guesses.size(); ++i)
        guess.modes.push_back(parse_guess(o.guesses[i], i));
    }
    if (guess.modes.empty())
      throw std::invalid_argument("analyze needs initial guesses (--guess or --config)");
    if (o.n_modes && *o.n_modes != guess.modes.size())
      throw std::invalid_argument("--modes does not match the number of guesses");
    if (o.temperature) env.bath_temperature = *o.temperature;
    env.validate();
    if (o.noise_floor)
      guess.noise_floor = physics::SpectralConvention::to_double_sided_angular(*o.noise_floor);
    if (o.band_low || o.band_high) {
      spectral::FrequencyBand b = options.band.value_or(
          spectral::FrequencyBand{psd.frequency.front(), psd.frequency.back()});
      if (o.band_low) b.low = *o.band_low;
      if (o.band_high) b.high = *o.band_high;
      if (!(b.high > b.low)) throw std::invalid_argument("fit band must have high > low");
      options.band = b;
    }
    return kExitOk;
  });
  if (setup != kExitOk) return setup;

  return guarded(err, [&] {
    const auto fit = spectral::fit_spectrum(psd, guess.modes.size(), env, guess, options);
    json report = spectral::fit_to_json(fit);
    report["psd"] = o.psd.string();
    if (o.model_out) {
      spectral::Psd model = psd;
      for (std::size_t k = 0; k < model.size(); ++k)
        model.values[k] = spectral::spectrum_model(fit.modes, fit.noise_floor, env, psd.frequency[k]);
      spectral::write_psd_csv(model, *o.model_out);
    }
    if (o.out) {
      const auto dir = make_run_directory(*o.out, 0);
      const json args{{"psd", o.psd.string()}, {"modes", guess.modes.size()},
                      {"temperature_K", env.bath_temperature}};
      Manifest manifest("analyze", args, args, 0);
      write_json(dir / "fit.json", report);
      manifest.add_artifact(dir, "fit.json");
      manifest.set_summary({{"converged", fit.converged}});
      manifest.write(dir, fit.converged ? "complete" : "not-converged");
      report["run_directory"] = dir.string();
    }
    out << report.dump(2) << '\n';
    if (!fit.converged) {
      err << "fit did not converge: " << fit.message << '\n';
      return kExitNoConvergence;
    }
    return kExitOk;
  });
}

}  // namespace coems::bench
