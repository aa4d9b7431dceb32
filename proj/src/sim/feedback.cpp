#include "coems/sim/feedback.hpp"

#include <cmath>
#include <optional>
#include <stdexcept>

namespace coems::sim {

std::size_t feedback_delay_samples(const physics::FeedbackConfig& feedback,
                                   const physics::MechanicalMode& mode, double sample_rate) {
  const double period = physics::kTwoPi / mode.resonance;
  const long samples = std::lround(feedback.delay * period * sample_rate);
  if (samples < 1)
    throw std::invalid_argument("feedback delay is shorter than one sample; raise the sample rate");
  return static_cast<std::size_t>(samples);
}

double feedback_force(std::span<const double> history, const physics::FeedbackConfig& feedback,
                      const physics::MechanicalMode& mode, double sample_rate) {
  if (!feedback.enabled || feedback.gain == 0.0) return 0.0;
  const std::size_t delay = feedback_delay_samples(feedback, mode, sample_rate);
  if (history.size() <= delay)
    throw std::invalid_argument("in-loop history is shorter than the feedback delay");
  const double coefficient =
      feedback.gain * mode.effective_mass * mode.damping * mode.resonance;
  return coefficient * history[history.size() - 1 - delay];
}

ResonatorBandpass::ResonatorBandpass(double center_hz, double width_hz, double sample_rate) {
  if (!(center_hz > 0.0 && width_hz > 0.0 && center_hz < 0.5 * sample_rate))
    throw std::invalid_argument("band-pass center must lie in (0, Nyquist) with positive width");
  const double w0 = physics::kTwoPi * center_hz / sample_rate;
  const double alpha = std::sin(w0) * width_hz / (2.0 * center_hz);
  const double a0 = 1.0 + alpha;
  b0_ = alpha / a0;
  b2_ = -alpha / a0;
  a1_ = -2.0 * std::cos(w0) / a0;
  a2_ = (1.0 - alpha) / a0;
}

double ResonatorBandpass::operator()(double in) {
  const double out = b0_ * in + b2_ * x2_ - a1_ * y1_ - a2_ * y2_;
  x2_ = x1_;
  x1_ = in;
  y2_ = y1_;
  y1_ = out;
  return out;
}

FeedbackLoop::FeedbackLoop(const physics::FeedbackConfig& feedback,
                           const physics::MechanicalMode& mode, double sample_rate,
                           bool use_bandpass)
    : coefficient_(feedback.enabled
                       ? feedback.gain * mode.effective_mass * mode.damping * mode.resonance
                       : 0.0),
      delay_(feedback_delay_samples(feedback, mode, sample_rate)),
      ring_(delay_ + 1, 0.0) {
  if (use_bandpass) {
    const double center =
        feedback.bandpass_center > 0 ? feedback.bandpass_center : mode.resonance;
    const double width = feedback.bandpass_width > 0 ? feedback.bandpass_width : 20.0 * mode.damping;
    bandpass_.emplace(physics::hz_from_angular(center), physics::hz_from_angular(width),
                      sample_rate);
  }
}

double FeedbackLoop::push(double reading) {
  const double filtered = bandpass_ ? (*bandpass_)(reading) : reading;
  ring_[head_] = filtered;
  head_ = (head_ + 1) % ring_.size();
  // After the write, head_ points at the oldest slot: exactly `delay_` samples back.
  return coefficient_ * ring_[head_];
}

}  // namespace coems::sim
