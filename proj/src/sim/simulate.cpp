#include "coems/sim/simulate.hpp"

#include <cmath>
#include <optional>

#include "coems/physics/oscillator.hpp"
#include "coems/sim/feedback.hpp"
#include "coems/sim/integrator.hpp"
#include "coems/sim/rng.hpp"
#include "coems/sim/signals.hpp"

namespace coems::sim {

bool uses_bandpass(const SimulationConfig& config) {
  switch (config.feedback.bandpass) {
    case physics::BandpassMode::On: return true;
    case physics::BandpassMode::Off: return false;
    case physics::BandpassMode::Auto: break;
  }
  return config.modes.size() > 1;
}

namespace {

struct ChunkBuffer {
  std::vector<double> x, inloop, outloop, force;
  std::vector<std::vector<double>> mode_x;

  ChunkBuffer(std::size_t capacity, std::size_t modes, bool per_mode) {
    for (auto* v : {&x, &inloop, &outloop, &force}) v->reserve(capacity);
    if (per_mode) {
      mode_x.resize(modes);
      for (auto& v : mode_x) v.reserve(capacity);
    }
  }

  void clear() {
    for (auto* v : {&x, &inloop, &outloop, &force}) v->clear();
    for (auto& v : mode_x) v.clear();
  }
};

class Engine {
 public:
  explicit Engine(const SimulationConfig& c) : c_(c), h_(c.dt() / c.substeps) {
    const auto n = c.modes.size();
    states_.resize(n);
    for (std::size_t j = 0; j < n; ++j) {
      thermal_.emplace_back(make_stream(c.seed, Stream::ThermalForce, j));
      bridge_.emplace_back(make_stream(c.seed, Stream::BrownianBridge, j));
      const auto& mode = c.modes[j];
      if (c.integrator == Integrator::ExactGaussian)
        exact_.emplace_back(mode, c.env.bath_temperature, h_);
      else
        semi_.emplace_back(mode, c.env.bath_temperature, h_);
    }
    if (c.initial_state == InitialState::Thermal) {
      GaussianSource init(make_stream(c.seed, Stream::InitialState));
      for (std::size_t j = 0; j < n; ++j) {
        const auto& mode = c.modes[j];
        const double kt = physics::kBoltzmann * c.env.bath_temperature;
        states_[j].x = std::sqrt(physics::equipartition_variance(mode, c.env)) * init();
        states_[j].v = std::sqrt(kt / mode.effective_mass) * init();
      }
    }
    if (c.feedback.enabled) {
      loop_.emplace(c.feedback, c.modes[c.feedback.controlled_mode], c.sample_rate,
                    uses_bandpass(c));
    }
    increments_.resize(static_cast<std::size_t>(c.substeps));
  }

  double total_displacement() const {
    double x = 0.0;
    for (const auto& s : states_) x += s.x;
    return x;
  }

  double mode_displacement(std::size_t j) const { return states_[j].x; }

  // Sensor readings and feedback for the current sample; returns the force to hold.
  void measure(double x, double& y_il, double& y_ol, double& f_fb) {
    y_il = sensor_sample(x, c_.inloop, c_.sample_rate, inloop_noise_);
    y_ol = sensor_sample(x, c_.outloop, c_.sample_rate, outloop_noise_);
    f_fb = loop_ ? loop_->push(y_il / c_.inloop.calibration_scale) : 0.0;
  }

  // Advances every mode across one sample interval starting at record time t.
  void advance(double t, double f_fb) {
    const int sub = c_.substeps;
    const std::size_t n = states_.size();
    if (c_.integrator == Integrator::ExactGaussian) {
      for (int s = 0; s < sub; ++s) {
        const double f = f_fb + drive_at(t + (s + 0.5) * h_);
        for (std::size_t j = 0; j < n; ++j) {
          const double z1 = thermal_[j]();
          const double z2 = thermal_[j]();
          exact_[j].step(states_[j], f, z1, z2);
        }
      }
      return;
    }
    const double sqrt_dt = std::sqrt(c_.dt());
    for (std::size_t j = 0; j < n; ++j) {
      const double dW = sqrt_dt * thermal_[j]();
      if (sub == 1) {
        increments_[0] = dW;
      } else {
        refine_brownian_increment(dW, c_.dt(), increments_, bridge_[j]);
      }
      for (int s = 0; s < sub; ++s) {
        const double f = f_fb + drive_at(t + (s + 0.5) * h_);
        semi_[j].step(states_[j], f, increments_[static_cast<std::size_t>(s)]);
      }
    }
  }

 private:
  double drive_at(double t) const { return c_.drive ? drive_force(t, *c_.drive) : 0.0; }

  const SimulationConfig& c_;
  double h_;
  std::vector<OscillatorState> states_;
  std::vector<GaussianSource> thermal_;
  std::vector<GaussianSource> bridge_;
  std::vector<ExactGaussianStepper> exact_;
  std::vector<SemiImplicitStepper> semi_;
  GaussianSource inloop_noise_{make_stream(c_.seed, Stream::InLoopNoise)};
  GaussianSource outloop_noise_{make_stream(c_.seed, Stream::OutOfLoopNoise)};
  std::optional<FeedbackLoop> loop_;
  std::vector<double> increments_;
};

}  // namespace

void simulate_stream(const SimulationConfig& config, const ChunkSink& sink,
                     std::size_t chunk_size) {
  config.validate();
  if (chunk_size == 0) chunk_size = 1;
  Engine engine(config);

  const std::size_t settle = config.settle_count();
  const std::size_t count = config.sample_count();
  const double dt = config.dt();
  const std::size_t n_modes = config.modes.size();

  ChunkBuffer buf(std::min(chunk_size, count), n_modes, config.record_mode_traces);
  std::size_t first = 0;
  auto flush = [&] {
    if (buf.x.empty()) return;
    SimulationChunk chunk{first, dt, buf.x, buf.mode_x, buf.inloop, buf.outloop, buf.force};
    sink(chunk);
    first += buf.x.size();
    buf.clear();
  };

  for (std::size_t k = 0; k < settle + count; ++k) {
    const double x = engine.total_displacement();
    double y_il, y_ol, f_fb;
    engine.measure(x, y_il, y_ol, f_fb);
    if (k >= settle) {
      buf.x.push_back(x);
      buf.inloop.push_back(y_il);
      buf.outloop.push_back(y_ol);
      buf.force.push_back(f_fb);
      for (std::size_t j = 0; j < buf.mode_x.size(); ++j)
        buf.mode_x[j].push_back(engine.mode_displacement(j));
      if (buf.x.size() == chunk_size) flush();
    }
    const double t = (static_cast<double>(k) - static_cast<double>(settle)) * dt;
    engine.advance(t, f_fb);
  }
  flush();
}

SimulationRecord simulate(const SimulationConfig& config) {
  SimulationRecord rec;
  rec.dt = config.dt();
  const std::size_t count = config.sample_count();
  rec.x.reserve(count);
  rec.inloop.reserve(count);
  rec.outloop.reserve(count);
  rec.feedback_force.reserve(count);
  if (config.record_mode_traces) rec.mode_x.resize(config.modes.size());
  simulate_stream(config, [&](const SimulationChunk& c) {
    rec.x.insert(rec.x.end(), c.x.begin(), c.x.end());
    rec.inloop.insert(rec.inloop.end(), c.inloop.begin(), c.inloop.end());
    rec.outloop.insert(rec.outloop.end(), c.outloop.begin(), c.outloop.end());
    rec.feedback_force.insert(rec.feedback_force.end(), c.feedback_force.begin(),
                              c.feedback_force.end());
    for (std::size_t j = 0; j < c.mode_x.size(); ++j)
      rec.mode_x[j].insert(rec.mode_x[j].end(), c.mode_x[j].begin(), c.mode_x[j].end());
  });
  return rec;
}

}  // namespace coems::sim
