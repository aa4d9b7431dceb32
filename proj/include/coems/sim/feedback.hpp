#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "coems/physics/types.hpp"

namespace coems::sim {

/// Integer-sample delay equivalent to feedback.delay cycles of the mode.
/// Throws std::invalid_argument if it rounds below one sample.
std::size_t feedback_delay_samples(const physics::FeedbackConfig& feedback,
                                   const physics::MechanicalMode& mode, double sample_rate);

/// Cold-damping force at the current step from the in-loop history (newest
/// sample last, already band-passed if the loop filters):
///   F = g m Gamma omega_m y(t - tau).
/// A tone at omega_m delayed by a quarter period equals -y'/omega_m, so this is
/// the viscous force -g m Gamma y'. Returns 0 when the loop is disabled.
double feedback_force(std::span<const double> history, const physics::FeedbackConfig& feedback,
                      const physics::MechanicalMode& mode, double sample_rate);

/// Second-order resonator band-pass, unit gain and zero phase at the center.
class ResonatorBandpass {
 public:
  ResonatorBandpass(double center_hz, double width_hz, double sample_rate);
  double operator()(double in);

 private:
  double b0_, b2_, a1_, a2_;
  double x1_ = 0, x2_ = 0, y1_ = 0, y2_ = 0;
};

/// Stateful loop: optional band-pass, then a delay line.
class FeedbackLoop {
 public:
  FeedbackLoop(const physics::FeedbackConfig& feedback, const physics::MechanicalMode& mode,
               double sample_rate, bool use_bandpass);

  /// Pushes the newest in-loop reading (m) and returns the force for the
  /// following step.
  double push(double reading);

  std::size_t delay_samples() const { return delay_; }
  bool filtering() const { return bandpass_.has_value(); }

 private:
  double coefficient_;  // g m Gamma omega_m
  std::size_t delay_;
  std::vector<double> ring_;
  std::size_t head_ = 0;
  std::optional<ResonatorBandpass> bandpass_;
};

}  // namespace coems::sim
