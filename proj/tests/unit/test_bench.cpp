#include <doctest.h>

#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "coems/bench/commands.hpp"
#include "coems/bench/config.hpp"
#include "coems/bench/cooling_sweep.hpp"
#include "coems/bench/design.hpp"
#include "coems/bench/drive_sweep.hpp"
#include "coems/bench/manifest.hpp"
#include "coems/bench/parallel.hpp"
#include "coems/io/csv.hpp"
#include "coems/physics/cooling.hpp"
#include "coems/spectral/psd_io.hpp"
#include "coems/spectral/welch.hpp"
#include "oracles.hpp"

using namespace coems;
using namespace coems::bench;
using doctest::Approx;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& name) : path(fs::temp_directory_path() / name) {
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

json small_config() {
  return json::parse(R"({
    "environment": {"bath_temperature_k": 300.0},
    "modes": [{"label": "broad", "mass_kg": 1e-12, "resonance_hz": 10000.0, "damping_hz": 200.0}],
    "probes": {"in_loop": {"snr": 100.0}, "out_of_loop": {"snr": 100.0}},
    "feedback": {"delay_cycles": 0.25},
    "simulation": {"sample_rate_hz": 1000000.0, "duration_s": 1.0, "seed": 5},
    "analysis": {"segment_length": 16384, "segments": 16, "seeds_per_gain": 1},
    "sweep": {"gains": [0, 2], "voltages": [1, 2]}
  })");
}

fs::path write_config(const fs::path& dir, const json& j) {
  const auto p = dir / "config.json";
  std::ofstream(p) << j.dump(2);
  return p;
}

}  // namespace

TEST_CASE("design curve and summary") {
  const auto curve = design_curve(300.0, 100.0, 50.0, 501);
  REQUIRE(curve.size() == 501);
  CHECK(curve.front().gain == 0.0);
  CHECK(curve.back().gain == Approx(50.0));
  CHECK(curve.front().t_eq1 == Approx(300.0));
  for (const auto& p : curve) {
    CHECK(p.t_eq1 == Approx(300.0 * (1 + p.gain * p.gain / 100.0) / (1 + p.gain)).epsilon(1e-12));
    CHECK(p.t_inloop ==
          Approx(300.0 * (1 - p.gain * (p.gain + 2) / 100.0) / (1 + p.gain)).epsilon(1e-12));
  }
  const auto s = design_summary(300.0, 100.0, physics::kTwoPi * 6.272e6);
  CHECK(s.t_min == Approx(54.29925).epsilon(1e-6));
  CHECK(s.g_opt == Approx(9.04988).epsilon(1e-6));
  CHECK(s.occupancy == Approx(54.29925 * 1.380649e-23 / (1.054572e-34 * physics::kTwoPi * 6.272e6))
                           .epsilon(1e-3));
  const auto j = to_json(s);
  CHECK(j.contains("T_min_K"));
  CHECK(j.contains("g_opt"));

  // T_min scales linearly with the bath temperature at fixed SNR.
  CHECK(design_summary(1.7, 100.0, 1.0).t_min == Approx(54.29925 * 1.7 / 300.0).epsilon(1e-6));

  CHECK_THROWS_AS(design_curve(300.0, 0.0, 50.0, 10), std::invalid_argument);
  CHECK_THROWS_AS(design_curve(300.0, 100.0, 0.0, 10), std::invalid_argument);
  CHECK_THROWS_AS(design_curve(300.0, 100.0, 50.0, 1), std::invalid_argument);
  CHECK_THROWS_AS(design_curve(-1.0, 100.0, 50.0, 10), std::invalid_argument);
}

TEST_CASE("line fit") {
  const auto f = fit_line({1, 2, 3, 4}, {3, 5, 7, 9});
  CHECK(f.slope == Approx(2.0));
  CHECK(f.intercept == Approx(1.0));
  CHECK(f.r_squared == Approx(1.0));
  const auto g = fit_line({0, 1, 2}, {0, 1, 0});
  CHECK(g.slope == Approx(0.0));
  CHECK(g.r_squared == Approx(0.0));
  CHECK_THROWS_AS(fit_line({1}, {1}), std::invalid_argument);
  CHECK_THROWS_AS(fit_line({1, 1}, {1, 2}), std::invalid_argument);
  CHECK_THROWS_AS(fit_line({1, 2}, {1}), std::invalid_argument);
}

TEST_CASE("parallel_for runs every index once and rethrows") {
  std::vector<std::atomic<int>> hits(100);
  parallel_for(100, 3, [&](std::size_t i) { hits[i]++; });
  bool once = true;
  for (auto& h : hits) once = once && h.load() == 1;
  CHECK(once);
  CHECK_THROWS_AS(parallel_for(10, 2,
                               [](std::size_t i) {
                                 if (i == 4) throw std::runtime_error("boom");
                               }),
                  std::runtime_error);
}

TEST_CASE("manifest digests and run directories") {
  TempDir tmp("coems_test_manifest");
  std::ofstream(tmp.path / "abc.txt", std::ios::binary) << "abc";
  CHECK(sha256_file(tmp.path / "abc.txt") ==
        "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
  CHECK_THROWS(sha256_file(tmp.path / "missing"));

  const auto a = make_run_directory(tmp.path, 9);
  const auto b = make_run_directory(tmp.path, 9);
  CHECK(a != b);
  CHECK(fs::is_directory(a));
  CHECK(a.filename().string().find("-seed9") != std::string::npos);

  std::ofstream(a / "data.csv") << "x\n1\n";
  Manifest m("design", {{"t0", 300}}, {{"k", 1}}, 9);
  m.add_artifact(a, "data.csv");
  m.set_summary({{"ok", true}});
  m.write(a, "complete");
  const auto doc = json::parse(slurp(a / "manifest.json"));
  CHECK(doc["status"] == "complete");
  CHECK(doc["seed"] == 9);
  CHECK(doc["artifacts"].size() == 1);
  CHECK(doc["artifacts"][0]["sha256"] == sha256_file(a / "data.csv"));
  CHECK(utc_timestamp().size() == 20);
}

TEST_CASE("bench config parsing") {
  const auto cfg = bench_config_from_json(small_config());
  CHECK(cfg.analysis.segment_length == 16384);
  CHECK(cfg.gains == std::vector<double>{0, 2});
  CHECK(cfg.voltages == std::vector<double>{1, 2});
  const auto run = cfg.run_config();
  CHECK(run.sample_count() == spectral::welch_samples_for(16, 16384, 0.5));
  CHECK(cfg.resolved().contains("analysis"));

  auto j = small_config();
  j["analysis"]["segment_length"] = 1000;
  CHECK_THROWS_AS(bench_config_from_json(j), sim::ConfigError);
  j = small_config();
  j["analysis"]["overlap"] = "half";
  CHECK_THROWS_AS(bench_config_from_json(j), sim::ConfigError);
  j = small_config();
  j["analysis"]["window"] = "kaiser";
  CHECK_THROWS_AS(bench_config_from_json(j), sim::ConfigError);
  j = small_config();
  j["sweep"]["gains"] = {1, -2};
  CHECK_THROWS_AS(bench_config_from_json(j), sim::ConfigError);
  j = small_config();
  j["modes"][0].erase("mass_kg");
  CHECK_THROWS_AS(bench_config_from_json(j), sim::ConfigError);

  TempDir tmp("coems_test_config");
  std::ofstream(tmp.path / "bad.json") << "{ not json";
  CHECK_THROWS_AS(load_bench_config(tmp.path / "bad.json"), io::ParseError);
  CHECK_THROWS_AS(load_bench_config(tmp.path / "absent.json"), io::ParseError);

  // Every shipped config loads.
  for (const auto& entry : fs::directory_iterator(COEMS_CONFIG_DIR))
    CHECK_NOTHROW(load_bench_config(entry.path()));
}

TEST_CASE("zero-gain sweep reads the bath temperature") {
  const auto cfg = bench_config_from_json(small_config());
  const auto sweep = run_cooling_sweep(cfg, {0.0});
  REQUIRE(sweep.points.size() == 1);
  CHECK(sweep.points[0].t_outloop == Approx(300.0).epsilon(1e-12));
  CHECK(sweep.points[0].t_inloop == Approx(300.0).epsilon(1e-12));
  CHECK(sweep.snr == Approx(100.0));
  CHECK(sweep_gains({3, 1, 3}) == std::vector<double>{0, 1, 3});
}

TEST_CASE("cooling sweep lowers the out-of-loop temperature") {
  const auto cfg = bench_config_from_json(small_config());
  const auto sweep = run_cooling_sweep(cfg, {2.0});
  REQUIRE(sweep.points.size() == 2);
  const auto& p = sweep.points[1];
  CHECK(p.t_theory_eq1 == Approx(physics::cooling_temperature(300.0, 2.0, 100.0)));
  CHECK(p.t_outloop < 200.0);
  CHECK(p.t_outloop > 60.0);
  CHECK(p.t_inloop < p.t_outloop);
}

TEST_CASE("drive sweep needs a calibrated drive") {
  const auto cfg = bench_config_from_json(small_config());
  CHECK_THROWS_AS(run_drive_sweep(cfg, {1.0}), sim::ConfigError);
}

TEST_CASE("cooling-sweep command is reproducible and independent of jobs") {
  TempDir tmp("coems_test_cooling");
  const auto config = write_config(tmp.path, small_config());
  std::ostringstream out, err;
  CoolingOptions o;
  o.config = config;
  o.out = tmp.path / "a";
  CHECK(cmd_cooling_sweep(o, out, err) == kExitOk);
  o.out = tmp.path / "b";
  o.jobs = 2;
  CHECK(cmd_cooling_sweep(o, out, err) == kExitOk);
  auto only = [](const fs::path& p) { return *fs::directory_iterator(p); };
  const auto a = only(tmp.path / "a").path();
  const auto b = only(tmp.path / "b").path();
  CHECK(slurp(a / "cooling_sweep.csv") == slurp(b / "cooling_sweep.csv"));
  CHECK(slurp(a / "psd" / "psd_g2_in_loop.csv") == slurp(b / "psd" / "psd_g2_in_loop.csv"));
  const auto table = io::read_csv(a / "cooling_sweep.csv");
  CHECK(table.column("gain") == std::vector<double>{0, 2});
  CHECK(fs::exists(a / "manifest.json"));

  o.seed = 6;
  o.out = tmp.path / "c";
  CHECK(cmd_cooling_sweep(o, out, err) == kExitOk);
  CHECK(slurp(only(tmp.path / "c").path() / "cooling_sweep.csv") != slurp(a / "cooling_sweep.csv"));

  o.config = tmp.path / "absent.json";
  CHECK(cmd_cooling_sweep(o, out, err) == kExitUsage);
}

TEST_CASE("design command writes its artifacts") {
  TempDir tmp("coems_test_design");
  std::ostringstream out, err;
  DesignOptions o;
  o.out = tmp.path;
  o.points = 11;
  CHECK(cmd_design(o, out, err) == kExitOk);
  const auto dir = fs::directory_iterator(tmp.path)->path();
  CHECK(io::read_csv(dir / "design_curve.csv").rows() == 11);
  const auto summary = json::parse(slurp(dir / "design_summary.json"));
  CHECK(summary["T_min_K"].get<double>() == Approx(54.29925).epsilon(1e-6));
  o.snr = -1.0;
  CHECK(cmd_design(o, out, err) == kExitUsage);
}

TEST_CASE("analyze command") {
  TempDir tmp("coems_test_analyze");
  std::ostringstream out, err;
  AnalyzeOptions o;

  std::ofstream(tmp.path / "empty.csv").close();
  o.psd = tmp.path / "empty.csv";
  o.guesses = {"3e-8,5.1e6,1e4"};
  CHECK(cmd_analyze(o, out, err) == kExitUsage);

  // Three Brownian lines on a white floor with 64-average scatter.
  const double kt = 1.380649e-23 * 300.0;
  const double truth[3][3] = {{3e-8, 4.68e6, 9e3}, {2.5e-8, 5.12e6, 1.1e4}, {4e-8, 5.63e6, 1.3e4}};
  const double floor_ss = 2.25e-36;
  spectral::Psd psd;
  psd.rbw = 1000.0;
  std::mt19937_64 rng(3);
  std::gamma_distribution<double> chi(64.0, 1.0 / 64.0);
  for (double f = 4.2e6; f <= 6.1e6; f += 1000.0) {
    const double w = 2 * oracle::pi * f;
    double s = floor_ss;
    for (const auto& m : truth) {
      const double w0 = 2 * oracle::pi * m[1], g = 2 * oracle::pi * m[2];
      s += 4 * kt * g / (m[0] * ((w0 * w0 - w * w) * (w0 * w0 - w * w) + g * g * w * w));
    }
    psd.frequency.push_back(f);
    psd.values.push_back(s * chi(rng));
  }
  spectral::write_psd_csv(psd, tmp.path / "three.csv");
  o.psd = tmp.path / "three.csv";
  o.guesses = {"6e-8,4.681e6,1.5e4", "1.5e-8,5.119e6,8e3", "8e-8,5.632e6,2e4"};
  o.model_out = tmp.path / "model.csv";
  out.str("");
  REQUIRE(cmd_analyze(o, out, err) == kExitOk);
  const auto report = json::parse(out.str());
  CHECK(rel(report["noise_floor_m2_per_hz"].get<double>(), floor_ss) < 0.05);
  for (int j = 0; j < 3; ++j) {
    CHECK(rel(report["modes"][j]["mass_kg"].get<double>(), truth[j][0]) < 0.05);
    CHECK(rel(report["modes"][j]["damping_hz"].get<double>(), truth[j][2]) < 0.05);
  }

  // Refitting the fitted model from its own parameters is a fixed point.
  AnalyzeOptions again;
  again.psd = tmp.path / "model.csv";
  again.noise_floor = report["noise_floor_m2_per_hz"].get<double>();
  for (int j = 0; j < 3; ++j) {
    char buf[128];
    const auto& m = report["modes"][j];
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g", m["mass_kg"].get<double>(),
                  m["resonance_hz"].get<double>(), m["damping_hz"].get<double>());
    again.guesses.emplace_back(buf);
  }
  out.str("");
  REQUIRE(cmd_analyze(again, out, err) == kExitOk);
  const auto refit = json::parse(out.str());
  for (int j = 0; j < 3; ++j) {
    for (const char* key : {"mass_kg", "resonance_hz", "damping_hz"})
      CHECK(rel(refit["modes"][j][key].get<double>(), report["modes"][j][key].get<double>()) < 1e-6);
  }

  // Wrong mode count and a pure floor.
  o.model_out.reset();
  o.n_modes = 2;
  CHECK(cmd_analyze(o, out, err) == kExitUsage);
  o.n_modes.reset();
  o.guesses = {"not,a,number"};
  CHECK(cmd_analyze(o, out, err) == kExitUsage);

  spectral::Psd flat = psd;
  for (auto& v : flat.values) v = floor_ss;
  spectral::write_psd_csv(flat, tmp.path / "flat.csv");
  o.psd = tmp.path / "flat.csv";
  o.guesses = {"3e-8,5.1e6,1e4"};
  CHECK(cmd_analyze(o, out, err) == kExitNoConvergence);
}
