#include "coems/spectral/fit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "coems/physics/oscillator.hpp"
#include "coems/spectral/levenberg_marquardt.hpp"

namespace coems::spectral {

using physics::kBoltzmann;
using physics::kTwoPi;

double spectrum_model(std::span<const physics::MechanicalMode> modes, double noise_floor,
                      const physics::Environment& env, double frequency) {
  const double omega = kTwoPi * frequency;
  double s = noise_floor;
  for (const auto& m : modes) s += physics::thermal_psd(m, env, omega);
  return physics::SpectralConvention::to_single_sided_hz(s);
}

namespace {

struct Problem {
  std::vector<double> omega;
  std::vector<double> data;
  std::size_t n_modes;
  double kt;

  // Parameter layout: [log m, log G, log w] per mode, then log S_N.
  void evaluate(const Eigen::VectorXd& p, Eigen::VectorXd& r, Eigen::MatrixXd* J) const {
    const std::size_t n = omega.size();
    const double floor = std::exp(p[static_cast<Eigen::Index>(3 * n_modes)]);
    std::vector<double> mass(n_modes), damping(n_modes), res(n_modes);
    for (std::size_t j = 0; j < n_modes; ++j) {
      mass[j] = std::exp(p[static_cast<Eigen::Index>(3 * j)]);
      damping[j] = std::exp(p[static_cast<Eigen::Index>(3 * j + 1)]);
      res[j] = std::exp(p[static_cast<Eigen::Index>(3 * j + 2)]);
    }
    std::vector<double> peak(n_modes), denom(n_modes);
    for (std::size_t i = 0; i < n; ++i) {
      const double w = omega[i];
      const double w2 = w * w;
      double model = floor;
      for (std::size_t j = 0; j < n_modes; ++j) {
        const double detune = res[j] * res[j] - w2;
        denom[j] = detune * detune + damping[j] * damping[j] * w2;
        peak[j] = 2.0 * kt * damping[j] / (mass[j] * denom[j]);
        model += peak[j];
      }
      const auto row = static_cast<Eigen::Index>(i);
      // Single-sided factor 2 cancels in the relative residual.
      const double ratio = data[i] / (2.0 * model);
      r[row] = ratio - 1.0;
      if (!J) continue;
      const double dr_dm = -ratio / model;  // d r / d model
      for (std::size_t j = 0; j < n_modes; ++j) {
        const double detune = res[j] * res[j] - w2;
        const auto c = static_cast<Eigen::Index>(3 * j);
        (*J)(row, c) = dr_dm * (-peak[j]);
        (*J)(row, c + 1) =
            dr_dm * peak[j] * (1.0 - 2.0 * damping[j] * damping[j] * w2 / denom[j]);
        (*J)(row, c + 2) = dr_dm * (-peak[j] * 4.0 * detune * res[j] * res[j] / denom[j]);
      }
      (*J)(row, static_cast<Eigen::Index>(3 * n_modes)) = dr_dm * floor;
    }
  }
};

}  // namespace

SpectrumFit fit_spectrum(const Psd& psd, std::size_t n_modes, const physics::Environment& env,
                         const FitGuess& guess, const FitOptions& options) {
  if (n_modes == 0) throw std::invalid_argument("fit_spectrum needs at least one mode");
  if (guess.modes.size() != n_modes)
    throw std::invalid_argument("fit_spectrum: one initial guess per mode is required");
  if (!(env.bath_temperature > 0.0))
    throw std::invalid_argument("fit_spectrum: bath temperature must be positive");
  psd.validate();

  const double lo = options.band ? options.band->low : psd.frequency.front();
  const double hi = options.band ? options.band->high : psd.frequency.back();
  Problem prob{{}, {}, n_modes, kBoltzmann * env.bath_temperature};
  for (std::size_t k = 0; k < psd.size(); ++k) {
    const double f = psd.frequency[k];
    if (f <= 0.0 || f < lo || f > hi) continue;
    prob.omega.push_back(kTwoPi * f);
    prob.data.push_back(psd.values[k]);
  }
  const std::size_t np = 3 * n_modes + 1;
  if (prob.data.size() <= np) throw std::invalid_argument("fit band holds too few bins");

  auto modes = guess.modes;
  for (auto& m : modes) m.validate();
  if (options.snap_resonances) {
    for (auto& m : modes) {
      double best = -1.0;
      double best_omega = m.resonance;
      for (std::size_t i = 0; i < prob.omega.size(); ++i) {
        if (std::abs(prob.omega[i] - m.resonance) > 3.0 * m.damping) continue;
        if (prob.data[i] > best) {
          best = prob.data[i];
          best_omega = prob.omega[i];
        }
      }
      m.resonance = best_omega;
    }
  }
  double floor = guess.noise_floor;
  if (!(floor > 0.0)) {
    auto sorted = prob.data;
    std::nth_element(sorted.begin(), sorted.begin() + static_cast<std::ptrdiff_t>(sorted.size() / 2),
                     sorted.end());
    floor = physics::SpectralConvention::to_double_sided_angular(sorted[sorted.size() / 2]);
  }
  if (!(floor > 0.0)) throw std::invalid_argument("fit_spectrum: could not seed the noise floor");

  Eigen::VectorXd p0(static_cast<Eigen::Index>(np));
  for (std::size_t j = 0; j < n_modes; ++j) {
    p0[static_cast<Eigen::Index>(3 * j)] = std::log(modes[j].effective_mass);
    p0[static_cast<Eigen::Index>(3 * j + 1)] = std::log(modes[j].damping);
    p0[static_cast<Eigen::Index>(3 * j + 2)] = std::log(modes[j].resonance);
  }
  p0[static_cast<Eigen::Index>(3 * n_modes)] = std::log(floor);

  LmOptions lm;
  lm.max_iterations = options.max_iterations;
  const auto result = levenberg_marquardt(
      [&](const Eigen::VectorXd& p, Eigen::VectorXd& r, Eigen::MatrixXd* J) {
        prob.evaluate(p, r, J);
      },
      p0, static_cast<Eigen::Index>(prob.data.size()), lm);

  SpectrumFit fit;
  fit.temperature = env.bath_temperature;
  fit.iterations = result.iterations;
  fit.residual_norm = std::sqrt(2.0 * result.cost);
  fit.message = result.message;
  for (std::size_t j = 0; j < n_modes; ++j) {
    physics::MechanicalMode m = guess.modes[j];
    m.effective_mass = std::exp(result.params[static_cast<Eigen::Index>(3 * j)]);
    m.damping = std::exp(result.params[static_cast<Eigen::Index>(3 * j + 1)]);
    m.resonance = std::exp(result.params[static_cast<Eigen::Index>(3 * j + 2)]);
    fit.modes.push_back(m);
  }
  fit.noise_floor = std::exp(result.params[static_cast<Eigen::Index>(3 * n_modes)]);

  // Standard errors from the Gauss-Newton curvature; log-space errors are
  // relative errors of the physical parameters.
  const double dof = static_cast<double>(prob.data.size() - np);
  const double s2 = 2.0 * result.cost / dof;
  Eigen::FullPivLU<Eigen::MatrixXd> lu(result.jtj);
  bool identifiable = lu.isInvertible();
  Eigen::VectorXd rel = Eigen::VectorXd::Constant(static_cast<Eigen::Index>(np),
                                                  std::numeric_limits<double>::infinity());
  if (identifiable) {
    const Eigen::MatrixXd cov = lu.inverse() * s2;
    for (Eigen::Index i = 0; i < cov.rows(); ++i) rel[i] = std::sqrt(std::max(cov(i, i), 0.0));
  }
  for (std::size_t j = 0; j < n_modes; ++j) {
    const auto c = static_cast<Eigen::Index>(3 * j);
    fit.errors.push_back({fit.modes[j].effective_mass * rel[c],
                          fit.modes[j].resonance * rel[c + 2], fit.modes[j].damping * rel[c + 1]});
  }
  fit.noise_floor_error = fit.noise_floor * rel[static_cast<Eigen::Index>(3 * n_modes)];

  fit.degenerate = !identifiable || !rel.allFinite() || (rel.array() > 1.0).any();
  bool physical = std::isfinite(fit.residual_norm);
  for (const auto& m : fit.modes)
    physical = physical && std::isfinite(m.effective_mass) && std::isfinite(m.damping) &&
               std::isfinite(m.resonance) && m.resonance > m.damping;
  fit.converged = result.converged && physical && !fit.degenerate;
  if (result.converged && fit.degenerate) fit.message = "converged to an unconstrained parameter";
  else if (result.converged && !physical) fit.message = "converged to an unphysical mode";
  return fit;
}

}  // namespace coems::spectral
