#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "coems/bench/config.hpp"
#include "coems/bench/cooling_sweep.hpp"
#include "coems/bench/design.hpp"
#include "coems/bench/drive_sweep.hpp"
#include "coems/io/csv.hpp"
#include "coems/physics/actuation.hpp"
#include "coems/physics/cooling.hpp"
#include "coems/physics/oscillator.hpp"
#include "coems/sim/config_json.hpp"
#include "coems/sim/simulate.hpp"
#include "coems/spectral/calibrate.hpp"
#include "coems/spectral/fit.hpp"
#include "coems/spectral/psd_io.hpp"
#include "coems/spectral/temperature.hpp"
#include "coems/spectral/welch.hpp"

namespace py = pybind11;
using namespace coems;
using nlohmann::json;

namespace {

using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;

py::array_t<double> to_array(const std::vector<double>& v) {
  py::array_t<double> out(static_cast<py::ssize_t>(v.size()));
  std::copy(v.begin(), v.end(), out.mutable_data());
  return out;
}

std::vector<double> to_vector(const Array& a) {
  if (a.ndim() != 1) throw std::invalid_argument("expected a one-dimensional array");
  return {a.data(), a.data() + a.size()};
}

physics::MechanicalMode mode_hz(double mass_kg, double resonance_hz, double damping_hz) {
  return physics::MechanicalMode::from_hz("mode", mass_kg, resonance_hz, damping_hz);
}

spectral::Psd make_psd(const Array& frequency, const Array& values, double rbw) {
  spectral::Psd psd;
  psd.frequency = to_vector(frequency);
  psd.values = to_vector(values);
  psd.validate();
  psd.rbw = rbw > 0.0 ? rbw : psd.bin_width();
  psd.window = spectral::Window::Rectangular;
  return psd;
}

py::dict psd_dict(const spectral::Psd& psd) {
  py::dict d;
  d["frequency_hz"] = to_array(psd.frequency);
  d["psd_m2_per_hz"] = to_array(psd.values);
  d["rbw_hz"] = psd.rbw;
  d["segments"] = psd.segments_averaged;
  return d;
}

bench::BenchConfig parse_config(const std::string& text) {
  return bench::bench_config_from_json(json::parse(text));
}

}  // namespace

PYBIND11_MODULE(_coems, m) {
  m.doc() = "Feedback-cooled opto-electromechanical resonator: theory, simulation, analysis";

  py::register_exception<sim::ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<io::ParseError>(m, "ParseError", PyExc_ValueError);
  py::register_exception<spectral::CalibrationError>(m, "CalibrationError", PyExc_RuntimeError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const json::exception& e) {
      PyErr_SetString(PyExc_ValueError, e.what());
    }
  });

  // Closed forms.
  m.def("cooling_temperature", &physics::cooling_temperature, py::arg("t0"), py::arg("gain"),
        py::arg("snr"), "Out-of-loop mode temperature T0 (1 + g^2/snr) / (1 + g).");
  m.def(
      "min_temperature",
      [](double t0, double snr) {
        const auto r = physics::min_temperature(t0, snr);
        return py::make_tuple(r.temperature, r.gain);
      },
      py::arg("t0"), py::arg("snr"), "(T_min, g_opt).");
  m.def("optimal_gain", &physics::optimal_gain, py::arg("snr"));
  m.def(
      "inferred_temperature",
      [](const std::string& loop, double t0, double gain, double snr) {
        physics::Loop l;
        if (loop == "in") l = physics::Loop::InLoop;
        else if (loop == "out") l = physics::Loop::OutOfLoop;
        else throw std::invalid_argument("loop must be 'in' or 'out'");
        const auto r = physics::inferred_temperature_theory(l, t0, gain, snr);
        return py::make_tuple(r.kelvin, r.unphysical);
      },
      py::arg("loop"), py::arg("t0"), py::arg("gain"), py::arg("snr"),
      "(kelvin, unphysical) an area inference would report on the 'in' or 'out' loop probe.");
  m.def(
      "phonon_occupancy",
      [](double t, double f_hz) { return physics::phonon_occupancy(t, physics::angular_from_hz(f_hz)); },
      py::arg("temperature"), py::arg("resonance_hz"));
  m.def(
      "zero_point_asd",
      [](double mass, double f_hz, double gamma_hz) {
        return std::sqrt(physics::zero_point_psd_peak(mode_hz(mass, f_hz, gamma_hz)));
      },
      py::arg("mass_kg"), py::arg("resonance_hz"), py::arg("damping_hz"),
      "Square root of hbar / (m Gamma omega_m), m/sqrt(Hz).");
  m.def(
      "resonance_from_zero_point",
      [](double mass, double gamma_hz, double asd) {
        return physics::hz_from_angular(physics::resonance_from_zero_point(
            mass, physics::angular_from_hz(gamma_hz), asd * asd));
      },
      py::arg("mass_kg"), py::arg("damping_hz"), py::arg("asd"), "Resonance in Hz.");
  m.def(
      "gradient_force_from_peak",
      [](double mass, double f_hz, double gamma_hz, double rbw_hz, double peak_asd) {
        return physics::gradient_force_from_peak(mode_hz(mass, f_hz, gamma_hz),
                                                 physics::angular_from_hz(rbw_hz), peak_asd);
      },
      py::arg("mass_kg"), py::arg("resonance_hz"), py::arg("damping_hz"), py::arg("rbw_hz"),
      py::arg("peak_asd"));
  m.def(
      "thermal_psd",
      [](double mass, double f_hz, double gamma_hz, double t, const Array& freq) {
        const auto mode = mode_hz(mass, f_hz, gamma_hz);
        const physics::Environment env{t};
        std::vector<double> out;
        for (double f : to_vector(freq))
          out.push_back(physics::SpectralConvention::to_single_sided_hz(
              physics::thermal_psd(mode, env, physics::angular_from_hz(f))));
        return to_array(out);
      },
      py::arg("mass_kg"), py::arg("resonance_hz"), py::arg("damping_hz"), py::arg("temperature"),
      py::arg("frequency_hz"), "Single-sided Brownian PSD (m^2/Hz).");

  m.def(
      "design_curve",
      [](double t0, double snr, double g_max, std::size_t n) {
        std::vector<double> g, eq1, il;
        for (const auto& p : bench::design_curve(t0, snr, g_max, n)) {
          g.push_back(p.gain);
          eq1.push_back(p.t_eq1);
          il.push_back(p.t_inloop);
        }
        py::dict d;
        d["gain"] = to_array(g);
        d["T_eq1_K"] = to_array(eq1);
        d["T_inloop_theory_K"] = to_array(il);
        return d;
      },
      py::arg("t0") = 300.0, py::arg("snr") = 100.0, py::arg("g_max") = 50.0,
      py::arg("points") = 501);

  // Simulation.
  m.def(
      "simulate",
      [](const std::string& config_json) {
        const auto cfg = parse_config(config_json).sim;
        sim::SimulationRecord rec;
        {
          py::gil_scoped_release release;
          rec = sim::simulate(cfg);
        }
        std::vector<double> t(rec.size());
        for (std::size_t i = 0; i < t.size(); ++i) t[i] = rec.time(i);
        py::dict d;
        d["time"] = to_array(t);
        d["x"] = to_array(rec.x);
        d["y_IL"] = to_array(rec.inloop);
        d["y_OL"] = to_array(rec.outloop);
        d["F_fb"] = to_array(rec.feedback_force);
        return d;
      },
      py::arg("config_json"), "Time series for a config document (JSON text).");
  m.def(
      "resolve_config",
      [](const std::string& config_json) { return parse_config(config_json).resolved().dump(); },
      py::arg("config_json"), "Validated config with explicit noise floors, as JSON text.");

  // Spectra.
  m.def(
      "welch_psd",
      [](const Array& series, double fs, std::size_t segment, double overlap,
         const std::string& window) {
        const auto v = to_vector(series);
        return psd_dict(spectral::welch_psd(v, fs, segment, overlap, spectral::window_from_string(window)));
      },
      py::arg("series"), py::arg("sample_rate"), py::arg("segment_length"),
      py::arg("overlap") = 0.5, py::arg("window") = "hann");
  m.def(
      "calibrate",
      [](const Array& f, const Array& s, double rbw, double tone_hz, double tone_asd) {
        return spectral::calibrate(make_psd(f, s, rbw), {tone_hz, tone_asd});
      },
      py::arg("frequency_hz"), py::arg("psd"), py::arg("rbw_hz"), py::arg("tone_hz"),
      py::arg("tone_peak_asd"), "Scale that maps the PSD to absolute m^2/Hz.");
  m.def(
      "fit_spectrum",
      [](const Array& f, const Array& s, const std::vector<std::tuple<double, double, double>>& guesses,
         double temperature, std::optional<double> noise_floor,
         std::optional<std::pair<double, double>> band) {
        const auto psd = make_psd(f, s, 0.0);
        spectral::FitGuess guess;
        for (const auto& [mass, fr, gm] : guesses) guess.modes.push_back(mode_hz(mass, fr, gm));
        if (noise_floor)
          guess.noise_floor = physics::SpectralConvention::to_double_sided_angular(*noise_floor);
        spectral::FitOptions opt;
        if (band) opt.band = spectral::FrequencyBand{band->first, band->second};
        const auto fit =
            spectral::fit_spectrum(psd, guess.modes.size(), physics::Environment{temperature}, guess, opt);
        return spectral::fit_to_json(fit).dump();
      },
      py::arg("frequency_hz"), py::arg("psd"), py::arg("guesses"), py::arg("temperature") = 300.0,
      py::arg("noise_floor") = py::none(), py::arg("band") = py::none(),
      "Multi-mode fit; guesses are (mass_kg, resonance_hz, damping_hz). Returns JSON text.");
  m.def(
      "band_temperature",
      [](const Array& f, const Array& s, double floor, double low, double high,
         double reference_area, double t0) {
        const auto e = spectral::infer_temperature(make_psd(f, s, 0.0), floor, {low, high},
                                                   reference_area, t0);
        return py::make_tuple(e.value, e.area, e.unphysical);
      },
      py::arg("frequency_hz"), py::arg("psd"), py::arg("noise_floor"), py::arg("low_hz"),
      py::arg("high_hz"), py::arg("reference_area"), py::arg("t0"),
      "(kelvin, area, unphysical) from the floor-subtracted band area.");

  // Sweeps.
  m.def(
      "cooling_sweep",
      [](const std::string& config_json, std::vector<double> gains, std::size_t jobs) {
        const auto cfg = parse_config(config_json);
        if (gains.empty()) gains = cfg.gains;
        bench::CoolingSweep sweep;
        {
          py::gil_scoped_release release;
          sweep = bench::run_cooling_sweep(cfg, gains, jobs);
        }
        py::list rows;
        for (const auto& p : sweep.points) {
          py::dict r;
          r["gain"] = p.gain;
          r["T_outloop_K"] = p.t_outloop;
          r["T_inloop_K"] = p.t_inloop;
          r["T_theory_eq1_K"] = p.t_theory_eq1;
          r["T_theory_inloop_K"] = p.t_theory_inloop;
          r["unphysical"] = p.unphysical;
          rows.append(r);
        }
        return rows;
      },
      py::arg("config_json"), py::arg("gains") = std::vector<double>{}, py::arg("jobs") = 1);
  m.def(
      "drive_sweep",
      [](const std::string& config_json, std::vector<double> voltages, std::size_t jobs) {
        const auto cfg = parse_config(config_json);
        if (voltages.empty()) voltages = cfg.voltages;
        bench::DriveSweep sweep;
        {
          py::gil_scoped_release release;
          sweep = bench::run_drive_sweep(cfg, voltages, jobs);
        }
        py::list rows;
        for (const auto& p : sweep.points) {
          py::dict r;
          r["voltage_vrms"] = p.voltage;
          r["mode"] = p.mode + 1;
          r["drive_frequency_hz"] = p.drive_frequency;
          r["peak_asd_m_per_rthz"] = p.peak_asd;
          r["force_inferred_n"] = p.force;
          r["force_configured_n"] = p.force_configured;
          rows.append(r);
        }
        py::list fits;
        for (const auto& f : sweep.fits) {
          py::dict r;
          r["slope"] = f.slope;
          r["intercept"] = f.intercept;
          r["r_squared"] = f.r_squared;
          fits.append(r);
        }
        py::dict d;
        d["rbw_hz"] = sweep.rbw;
        d["points"] = rows;
        d["fits"] = fits;
        return d;
      },
      py::arg("config_json"), py::arg("voltages") = std::vector<double>{}, py::arg("jobs") = 1);
}
