#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <vector>

#include "coems/io/csv.hpp"
#include "coems/physics/cooling.hpp"
#include "coems/physics/oscillator.hpp"
#include "coems/sim/simulate.hpp"
#include "coems/spectral/calibrate.hpp"
#include "coems/spectral/fit.hpp"
#include "coems/spectral/psd_io.hpp"
#include "coems/spectral/temperature.hpp"
#include "coems/spectral/welch.hpp"
#include "oracles.hpp"

using namespace coems;
using namespace coems::spectral;
using physics::MechanicalMode;
using doctest::Approx;

namespace {

constexpr double kB = 1.380649e-23;

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

std::vector<double> white(std::size_t n, double sigma, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, sigma);
  std::vector<double> v(n);
  for (auto& x : v) x = g(rng);
  return v;
}

// Single-sided Brownian line written out directly: 4 kT G / (m ((w0^2 - w^2)^2 + G^2 w^2)).
double brownian_ss(double m, double f0, double gamma_hz, double t, double f) {
  const double w = 2 * oracle::pi * f, w0 = 2 * oracle::pi * f0, g = 2 * oracle::pi * gamma_hz;
  return 4 * kB * t * g / (m * ((w0 * w0 - w * w) * (w0 * w0 - w * w) + g * g * w * w));
}

Psd synthetic(const std::vector<std::array<double, 3>>& modes, double floor_ss, double t,
              double f_lo, double f_hi, double df) {
  Psd p;
  p.window = Window::Rectangular;
  for (double f = f_lo; f <= f_hi; f += df) {
    double s = floor_ss;
    for (const auto& m : modes) s += brownian_ss(m[0], m[1], m[2], t, f);
    p.frequency.push_back(f);
    p.values.push_back(s);
  }
  p.rbw = df;
  return p;
}

sim::SimulationConfig desk(double damping_hz, double duration) {
  sim::SimulationConfig c;
  c.modes = {MechanicalMode::from_hz("desk", 1e-12, 1e4, damping_hz)};
  c.env.bath_temperature = 300.0;
  c.sample_rate = 1e6;
  c.duration = duration;
  c.record_mode_traces = false;
  c.inloop.noise_floor = physics::noise_floor_for_snr(c.modes[0], c.env, 100.0);
  c.outloop.noise_floor = c.inloop.noise_floor;
  return c;
}

std::pair<Psd, Psd> simulate_psds(const sim::SimulationConfig& c, std::size_t seg) {
  WelchEstimator il(c.sample_rate, seg), ol(c.sample_rate, seg);
  sim::simulate_stream(c, [&](const sim::SimulationChunk& ch) {
    il.push(ch.inloop);
    ol.push(ch.outloop);
  });
  return {il.result(), ol.result()};
}

}  // namespace

TEST_CASE("Welch reads white noise at 2 sigma^2 / fs") {
  const double fs = 1e5, sigma = 3.0;
  const auto x = white(1 << 20, sigma, 1);
  const auto psd = welch_psd(x, fs, 1024);
  double mean = 0.0;
  for (std::size_t k = 1; k < psd.size(); ++k) mean += psd.values[k];
  mean /= static_cast<double>(psd.size() - 1);
  CHECK(rel(mean, 2 * sigma * sigma / fs) < 0.05);
  CHECK(rel(psd.integrated_power(), sigma * sigma) < 0.02);
  CHECK(psd.segments_averaged == welch_segment_count(x.size(), 1024, 0.5));
  CHECK(psd.rbw == Approx(1.5 * fs / 1024));
  CHECK(welch_segment_count(welch_samples_for(37, 1024, 0.5), 1024, 0.5) == 37);
}

TEST_CASE("Welch tone power and position") {
  const double fs = 1e5, f0 = 12345.6, a = 2e-3;
  std::vector<double> x(1 << 18);
  for (std::size_t k = 0; k < x.size(); ++k) x[k] = a * std::cos(2 * oracle::pi * f0 * k / fs);
  for (auto w : {Window::Hann, Window::Rectangular}) {
    const auto psd = welch_psd(x, fs, 4096, 0.5, w);
    std::size_t peak = 0;
    for (std::size_t k = 0; k < psd.size(); ++k)
      if (psd.values[k] > psd.values[peak]) peak = k;
    CHECK(std::abs(psd.frequency[peak] - f0) <= psd.bin_width());
    if (w == Window::Hann) CHECK(rel(psd.integrated_power(), a * a / 2) < 0.01);
  }
}

TEST_CASE("Welch argument errors and averaging") {
  const auto x = white(1000, 1.0, 2);
  CHECK_THROWS_AS(welch_psd(x, 1e3, 2048), std::length_error);
  CHECK_THROWS_AS(welch_psd(x, 1e3, 100), std::invalid_argument);
  CHECK_THROWS_AS(welch_psd(x, 1e3, 128, 1.0), std::invalid_argument);
  WelchEstimator empty(1e3, 128);
  CHECK_THROWS_AS(empty.result(), std::length_error);

  // Streaming in odd blocks equals the batch estimate.
  const auto y = white(50000, 1.0, 3);
  WelchEstimator s(1e3, 512);
  for (std::size_t i = 0; i < y.size(); i += 997)
    s.push(std::span<const double>(y).subspan(i, std::min<std::size_t>(997, y.size() - i)));
  const auto batch = welch_psd(y, 1e3, 512);
  const auto streamed = s.result();
  for (std::size_t k = 0; k < batch.size(); ++k)
    CHECK(streamed.values[k] == Approx(batch.values[k]).epsilon(1e-12));

  const std::vector<Psd> both{batch, batch.scaled(3.0)};
  CHECK(average_psds(both).values[10] == Approx(2.0 * batch.values[10]));
  CHECK_THROWS_AS(average_psds(std::vector<Psd>{}), std::invalid_argument);
  CHECK_THROWS_AS(window_from_string("kaiser"), std::invalid_argument);
}

TEST_CASE("reference-tone calibration") {
  const double fs = 1e5, f0 = 20000.3, a = 1e-9;
  auto x = white(1 << 19, 1e-11, 4);
  for (std::size_t k = 0; k < x.size(); ++k) x[k] += a * std::cos(2 * oracle::pi * f0 * k / fs);
  const auto psd = welch_psd(x, fs, 4096);
  const ReferenceTone ref{f0, tone_peak_asd(a, psd.rbw)};
  CHECK(tone_peak_asd(a, 2.0) == Approx(a / 2.0));
  CHECK(rel(calibrate(psd, ref), 1.0) < 0.02);

  std::vector<double> doubled(x);
  for (auto& v : doubled) v *= 2.0;
  const auto psd2 = welch_psd(doubled, fs, 4096);
  CHECK(rel(calibrate(psd2, ref), 0.25) < 0.02);
  // Applying the scale makes a second calibration the identity.
  CHECK(calibrate(psd2.scaled(calibrate(psd2, ref)), ref) == Approx(1.0).epsilon(1e-12));

  const auto noise = welch_psd(white(1 << 18, 1e-11, 5), fs, 4096);
  CHECK_THROWS_AS(calibrate(noise, ref), CalibrationError);
  CHECK_THROWS_AS(calibrate(psd, {f0, 0.0}), std::invalid_argument);
  CHECK_THROWS_AS(calibrate(psd, {2 * fs, 1.0}), CalibrationError);
}

TEST_CASE("calibration recovers the thermal variance end to end") {
  auto c = desk(200.0, 4.0);
  c.outloop.calibration_scale = 3.0;
  const double f_tone = 30000.0, a = 1e-9;
  WelchEstimator ol(c.sample_rate, 1 << 14);
  std::vector<double> buf;
  sim::simulate_stream(c, [&](const sim::SimulationChunk& ch) {
    buf.assign(ch.outloop.begin(), ch.outloop.end());
    for (std::size_t i = 0; i < buf.size(); ++i) {
      const double t = static_cast<double>(ch.first + i) / c.sample_rate;
      buf[i] += 3.0 * a * std::cos(2 * oracle::pi * f_tone * t);
    }
    ol.push(buf);
  });
  const auto raw = ol.result();
  const double scale = calibrate(raw, {f_tone, tone_peak_asd(a, raw.rbw)});
  CHECK(rel(scale, 1.0 / 9.0) < 0.05);
  const auto psd = raw.scaled(scale);
  const FrequencyBand band{8000.0, 12000.0};
  const double area = band_area(psd, 2.0 * c.outloop.noise_floor, band);
  const double expect = oracle::integrate_band(
      [](double f) { return brownian_ss(1e-12, 1e4, 200.0, 300.0, f); }, band.low, band.high,
      1e4, 200.0);
  CHECK(rel(area, expect) < 0.10);
}

TEST_CASE("noiseless three-mode fit recovers every parameter") {
  const std::vector<std::array<double, 3>> truth{
      {3e-8, 4.68e6, 9e3}, {2.5e-8, 5.12e6, 1.1e4}, {4e-8, 5.63e6, 1.3e4}};
  const double floor_ss = 2.25e-36;
  const auto psd = synthetic(truth, floor_ss, 300.0, 4.2e6, 6.1e6, 500.0);
  FitGuess guess;
  const double mult[3] = {2.5, 0.4, 1.8};
  for (std::size_t j = 0; j < 3; ++j) {
    guess.modes.push_back(MechanicalMode::from_hz("m", truth[j][0] * mult[j], truth[j][1] + 2e3,
                                                  truth[j][2] / mult[j]));
  }
  guess.noise_floor = 3.0 * floor_ss / 2.0;
  const auto fit = fit_spectrum(psd, 3, physics::Environment{300.0}, guess);
  REQUIRE(fit.converged);
  CHECK_FALSE(fit.degenerate);
  for (std::size_t j = 0; j < 3; ++j) {
    CHECK(rel(fit.modes[j].effective_mass, truth[j][0]) < 1e-3);
    CHECK(rel(physics::hz_from_angular(fit.modes[j].resonance), truth[j][1]) < 1e-3);
    CHECK(rel(physics::hz_from_angular(fit.modes[j].damping), truth[j][2]) < 1e-3);
  }
  CHECK(rel(physics::SpectralConvention::to_single_sided_hz(fit.noise_floor), floor_ss) < 1e-3);
  CHECK(fit.residual_norm < 1e-6);

  // The fitted model, evaluated back, matches the data.
  const double f = 5.12e6;
  CHECK(rel(spectrum_model(fit.modes, fit.noise_floor, physics::Environment{300.0}, f),
            synthetic(truth, floor_ss, 300.0, f, f, 1.0).values[0]) < 1e-3);

  const auto j = fit_to_json(fit);
  CHECK(j["modes"].size() == 3);
  CHECK(j["converged"].get<bool>());
}

TEST_CASE("single-mode fit on a 64-average spectrum") {
  const std::vector<std::array<double, 3>> truth{{3e-8, 6.272e6, 1.15e4}};
  const double floor_ss = 1e-35;
  auto psd = synthetic(truth, floor_ss, 300.0, 6.0e6, 6.55e6, 1000.0);
  std::mt19937_64 rng(9);
  std::gamma_distribution<double> chi(64.0, 1.0 / 64.0);
  for (auto& v : psd.values) v *= chi(rng);
  FitGuess guess;
  guess.modes.push_back(MechanicalMode::from_hz("m", 6e-8, 6.275e6, 2e4));
  const auto fit = fit_spectrum(psd, 1, physics::Environment{300.0}, guess);
  REQUIRE(fit.converged);
  CHECK(rel(fit.modes[0].effective_mass, 3e-8) < 0.05);
  CHECK(rel(physics::hz_from_angular(fit.modes[0].damping), 1.15e4) < 0.05);
  CHECK(rel(physics::hz_from_angular(fit.modes[0].resonance), 6.272e6) < 1e-4);
  CHECK(rel(physics::SpectralConvention::to_single_sided_hz(fit.noise_floor), floor_ss) < 0.05);
  // Reported errors are of the size of the actual deviation.
  CHECK(fit.errors[0].mass > 0.0);
  CHECK(std::abs(fit.modes[0].effective_mass - 3e-8) < 5.0 * fit.errors[0].mass);
}

TEST_CASE("a pure floor leaves the mode unconstrained") {
  Psd psd;
  for (int k = 1; k <= 400; ++k) {
    psd.frequency.push_back(6e6 + 1e3 * k);
    psd.values.push_back(1e-35);
  }
  psd.rbw = 1e3;
  FitGuess guess;
  guess.modes.push_back(MechanicalMode::from_hz("m", 3e-8, 6.2e6, 1e4));
  const auto fit = fit_spectrum(psd, 1, physics::Environment{300.0}, guess);
  CHECK_FALSE(fit.converged);

  CHECK_THROWS_AS(fit_spectrum(psd, 0, physics::Environment{300.0}, guess), std::invalid_argument);
  CHECK_THROWS_AS(fit_spectrum(psd, 2, physics::Environment{300.0}, guess), std::invalid_argument);
  CHECK_THROWS_AS(fit_spectrum(psd, 1, physics::Environment{0.0}, guess), std::invalid_argument);
}

TEST_CASE("area temperature inference") {
  Psd flat;
  for (int k = 0; k < 200; ++k) {
    flat.frequency.push_back(9000.0 + 10.0 * k);
    flat.values.push_back(4e-20);
  }
  flat.rbw = 10.0;
  const FrequencyBand band{9500.0, 10500.0};
  const auto zero = infer_temperature(flat, 4e-20, band, 1e-18, 300.0);
  CHECK(zero.value == 0.0);
  CHECK(zero.unphysical);
  CHECK_THROWS_AS(infer_temperature(flat, 4e-20, band, 0.0, 300.0), std::invalid_argument);
  CHECK_THROWS_AS(band_area(flat, 0.0, {8000.0, 9500.0}), std::invalid_argument);
  CHECK_THROWS_AS(band_area(flat, 0.0, {9600.0, 9500.0}), std::invalid_argument);
  CHECK(side_band_floor(flat, band, 10.0, 100.0) == Approx(4e-20));
  CHECK_THROWS_AS(side_band_floor(flat, band, 1e5, 2e5), std::invalid_argument);

  // Linear in the spectrum: scaling data, floor and reference together is neutral.
  auto peaked = flat;
  for (std::size_t k = 0; k < peaked.size(); ++k)
    peaked.values[k] += brownian_ss(1e-12, 1e4, 20.0, 300.0, peaked.frequency[k]);
  const double a = band_area(peaked, 4e-20, band);
  const auto same = infer_temperature(peaked.scaled(5.0), 2e-19, band, 5.0 * a, 300.0);
  CHECK(same.value == Approx(300.0).epsilon(1e-12));
  CHECK(band_area(peaked.scaled(5.0), 2e-19, band) == Approx(5.0 * a).epsilon(1e-12));

  const auto m = MechanicalMode::from_hz("d", 1e-12, 1e4, 20.0);
  const auto b = default_band(m, 3.0);
  CHECK(b.low == Approx(1e4 - 800.0));
  CHECK(b.high == Approx(1e4 + 800.0));
}

TEST_CASE("zero-gain band area matches the thermal variance") {
  const auto c = desk(200.0, 4.0);
  const auto [il, ol] = simulate_psds(c, 1 << 14);
  const auto band = default_band(c.modes[0], 0.0);
  auto line = [](double f) { return brownian_ss(1e-12, 1e4, 200.0, 300.0, f); };
  const double in_band = oracle::integrate_band(line, band.low, band.high, 1e4, 200.0);
  // The side windows still hold some of the line's tail.
  const double tail = (oracle::integrate_band(line, band.low - 1600.0, band.low - 200.0, 1e4, 200.0) +
                       oracle::integrate_band(line, band.high + 200.0, band.high + 1600.0, 1e4, 200.0)) /
                      2800.0;
  for (const auto* p : {&il, &ol}) {
    const double floor = side_band_floor(*p, band, 200.0, 1600.0);
    CHECK(rel(floor, 2.0 * c.inloop.noise_floor + tail) < 0.05);
    CHECK(rel(band_area(*p, floor, band), in_band - (band.high - band.low) * tail) < 0.05);
  }
}

TEST_CASE("in-loop inference goes negative beyond twice the optimal gain") {
  auto c = desk(20.0, 8.0);
  const auto [ref_il, ref_ol] = simulate_psds(c, 1 << 17);
  const auto m = c.modes[0];
  const double gamma_hz = 20.0;
  const auto band0 = default_band(m, 0.0);
  const double ref = band_area(ref_il, side_band_floor(ref_il, band0, gamma_hz, 8 * gamma_hz), band0);

  const double g = 2.0 * physics::optimal_gain(100.0);
  c.feedback.enabled = true;
  c.feedback.gain = g;
  c.seed = 77;
  const auto [il, ol] = simulate_psds(c, 1 << 17);
  const auto band = default_band(m, g);
  const double w = (1 + g) * gamma_hz;
  const auto est = infer_temperature(il, side_band_floor(il, band, w, 8 * w), band, ref, 300.0);
  CHECK(est.unphysical);
  CHECK(est.value < 0.0);
  const auto theory = physics::inferred_temperature_theory(physics::Loop::InLoop, 300.0, g, 100.0);
  CHECK(theory.unphysical);
}

TEST_CASE("closed-loop linewidth from a fit of the out-of-loop spectrum") {
  auto c = desk(20.0, 4.0);
  c.feedback.enabled = true;
  c.feedback.gain = 5.0;
  const auto [il, ol] = simulate_psds(c, 1 << 16);
  FitGuess guess;
  guess.modes.push_back(MechanicalMode::from_hz("m", 1e-12, 1e4, 60.0));
  FitOptions opt;
  opt.band = FrequencyBand{9000.0, 11000.0};
  const auto fit = fit_spectrum(ol, 1, c.env, guess, opt);
  REQUIRE(fit.converged);
  CHECK(rel(physics::hz_from_angular(fit.modes[0].damping), 6.0 * 20.0) < 0.10);
}

TEST_CASE("PSD CSV round trip and malformed input") {
  const auto dir = std::filesystem::temp_directory_path() / "coems_test_psd";
  std::filesystem::create_directories(dir);
  auto psd = welch_psd(white(1 << 14, 1.0, 6), 1e3, 256);
  psd.calibration_scale = 0.5;
  write_psd_csv(psd, dir / "a.csv");
  const auto back = read_psd_csv(dir / "a.csv");
  CHECK(back.values == psd.values);
  CHECK(back.frequency == psd.frequency);
  CHECK(back.rbw == psd.rbw);
  CHECK(back.window == Window::Hann);
  CHECK(back.segments_averaged == psd.segments_averaged);
  CHECK(back.calibration_scale == 0.5);

  std::filesystem::remove(dir / "a.csv.json");
  const auto bare = read_psd_csv(dir / "a.csv");
  CHECK(bare.window == Window::Rectangular);
  CHECK(bare.rbw == Approx(bare.bin_width()));

  std::ofstream(dir / "empty.csv").close();
  CHECK_THROWS_AS(read_psd_csv(dir / "empty.csv"), io::ParseError);
  std::ofstream(dir / "one.csv") << "frequency_hz,psd_m2_per_hz\n1,2\n";
  CHECK_THROWS_AS(read_psd_csv(dir / "one.csv"), io::ParseError);
  std::ofstream(dir / "neg.csv") << "frequency_hz,psd_m2_per_hz\n1,2\n2,-1\n";
  CHECK_THROWS_AS(read_psd_csv(dir / "neg.csv"), io::ParseError);
  std::ofstream(dir / "text.csv") << "frequency_hz,psd_m2_per_hz\n1,abc\n2,1\n";
  CHECK_THROWS_AS(read_psd_csv(dir / "text.csv"), io::ParseError);

  const auto c = crop(psd, 100.0, 200.0);
  CHECK(c.frequency.front() >= 100.0);
  CHECK(c.frequency.back() <= 200.0);
  std::filesystem::remove_all(dir);
}
