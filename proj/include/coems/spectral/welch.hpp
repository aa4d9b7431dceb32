#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <vector>

#include "coems/spectral/psd.hpp"

namespace coems::spectral {

/// Streaming Welch estimator: feed samples in any block sizes, read the
/// averaged single-sided PSD at the end. Each segment has its mean removed
/// before windowing; normalisation is 2|X_k|^2 / (f_s sum w^2), so white noise
/// of variance s^2 reads 2 s^2 / f_s per hertz.
class WelchEstimator {
 public:
  /// segment_length must be a power of two; 0 <= overlap < 1.
  WelchEstimator(double sample_rate, std::size_t segment_length, double overlap = 0.5,
                 Window window = Window::Hann);
  ~WelchEstimator();
  WelchEstimator(WelchEstimator&&) noexcept;
  WelchEstimator& operator=(WelchEstimator&&) noexcept;

  void push(std::span<const double> samples);

  std::size_t segments() const { return segments_; }
  std::size_t segment_length() const { return length_; }
  std::size_t hop() const { return hop_; }

  /// Throws std::length_error ("series too short") before the first segment.
  Psd result() const;

 private:
  void process_segment();

  struct Fft;
  double sample_rate_;
  std::size_t length_;
  std::size_t hop_;
  Window window_;
  std::vector<double> coeffs_;
  double window_power_ = 0.0;  // sum w^2
  double window_sum_ = 0.0;
  std::vector<double> pending_;
  std::vector<double> accum_;
  std::size_t segments_ = 0;
  std::unique_ptr<Fft> fft_;
};

Psd welch_psd(std::span<const double> series, double sample_rate, std::size_t segment_length,
              double overlap = 0.5, Window window = Window::Hann);

/// Segment-weighted mean of PSDs on an identical grid.
Psd average_psds(std::span<const Psd> psds);

/// Number of segments welch_psd produces for a series of `samples`.
std::size_t welch_segment_count(std::size_t samples, std::size_t segment_length, double overlap);

/// Series length that yields exactly `segments` segments.
std::size_t welch_samples_for(std::size_t segments, std::size_t segment_length, double overlap);

}  // namespace coems::spectral
