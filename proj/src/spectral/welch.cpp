#include "coems/spectral/welch.hpp"

#include <fftw3.h>

#include <bit>
#include <cmath>
#include <mutex>
#include <numeric>
#include <stdexcept>

#include "coems/physics/types.hpp"

namespace coems::spectral {
namespace {

// FFTW's planner is not re-entrant.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

std::size_t hop_for(std::size_t length, double overlap) {
  if (!(overlap >= 0.0 && overlap < 1.0)) throw std::invalid_argument("overlap must be in [0, 1)");
  const auto overlap_samples = static_cast<std::size_t>(std::llround(overlap * length));
  return std::max<std::size_t>(1, length - overlap_samples);
}

}  // namespace

struct WelchEstimator::Fft {
  explicit Fft(std::size_t n) : n(n) {
    in = static_cast<double*>(fftw_malloc(sizeof(double) * n));
    out = static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * (n / 2 + 1)));
    if (!in || !out) throw std::bad_alloc();
    std::lock_guard lock(planner_mutex());
    plan = fftw_plan_dft_r2c_1d(static_cast<int>(n), in, out, FFTW_ESTIMATE);
  }
  ~Fft() {
    {
      std::lock_guard lock(planner_mutex());
      fftw_destroy_plan(plan);
    }
    fftw_free(in);
    fftw_free(out);
  }
  Fft(const Fft&) = delete;
  Fft& operator=(const Fft&) = delete;

  std::size_t n;
  double* in = nullptr;
  fftw_complex* out = nullptr;
  fftw_plan plan = nullptr;
};

WelchEstimator::WelchEstimator(double sample_rate, std::size_t segment_length, double overlap,
                               Window window)
    : sample_rate_(sample_rate),
      length_(segment_length),
      hop_(hop_for(segment_length, overlap)),
      window_(window) {
  if (!(sample_rate > 0.0)) throw std::invalid_argument("sample rate must be positive");
  if (segment_length < 2 || !std::has_single_bit(segment_length))
    throw std::invalid_argument("segment length must be a power of two >= 2");
  coeffs_.resize(length_);
  for (std::size_t n = 0; n < length_; ++n) {
    // Periodic Hann: equivalent noise bandwidth is exactly 1.5 bins.
    coeffs_[n] = window == Window::Hann
                     ? 0.5 * (1.0 - std::cos(physics::kTwoPi * static_cast<double>(n) /
                                             static_cast<double>(length_)))
                     : 1.0;
  }
  for (double w : coeffs_) {
    window_power_ += w * w;
    window_sum_ += w;
  }
  accum_.assign(length_ / 2 + 1, 0.0);
  pending_.reserve(2 * length_);
  fft_ = std::make_unique<Fft>(length_);
}

WelchEstimator::~WelchEstimator() = default;
WelchEstimator::WelchEstimator(WelchEstimator&&) noexcept = default;
WelchEstimator& WelchEstimator::operator=(WelchEstimator&&) noexcept = default;

void WelchEstimator::push(std::span<const double> samples) {
  std::size_t offset = 0;
  while (offset < samples.size()) {
    const std::size_t take = std::min(samples.size() - offset, length_ - pending_.size());
    pending_.insert(pending_.end(), samples.begin() + offset, samples.begin() + offset + take);
    offset += take;
    if (pending_.size() == length_) {
      process_segment();
      pending_.erase(pending_.begin(), pending_.begin() + static_cast<std::ptrdiff_t>(hop_));
    }
  }
}

void WelchEstimator::process_segment() {
  const double mean =
      std::accumulate(pending_.begin(), pending_.end(), 0.0) / static_cast<double>(length_);
  for (std::size_t n = 0; n < length_; ++n) fft_->in[n] = (pending_[n] - mean) * coeffs_[n];
  fftw_execute(fft_->plan);
  for (std::size_t k = 0; k < accum_.size(); ++k)
    accum_[k] += fft_->out[k][0] * fft_->out[k][0] + fft_->out[k][1] * fft_->out[k][1];
  ++segments_;
}

Psd WelchEstimator::result() const {
  if (segments_ == 0) throw std::length_error("series too short for one Welch segment");
  Psd psd;
  const std::size_t bins = accum_.size();
  const double df = sample_rate_ / static_cast<double>(length_);
  const double norm = 1.0 / (sample_rate_ * window_power_ * static_cast<double>(segments_));
  psd.frequency.resize(bins);
  psd.values.resize(bins);
  for (std::size_t k = 0; k < bins; ++k) {
    const double one_sided = (k == 0 || k == bins - 1) ? 1.0 : 2.0;
    psd.frequency[k] = static_cast<double>(k) * df;
    psd.values[k] = one_sided * accum_[k] * norm;
  }
  psd.rbw = sample_rate_ * window_power_ / (window_sum_ * window_sum_);
  psd.window = window_;
  psd.segments_averaged = segments_;
  return psd;
}

Psd welch_psd(std::span<const double> series, double sample_rate, std::size_t segment_length,
              double overlap, Window window) {
  if (segment_length > series.size())
    throw std::length_error("series too short: segment length exceeds series length");
  WelchEstimator est(sample_rate, segment_length, overlap, window);
  est.push(series);
  return est.result();
}

Psd average_psds(std::span<const Psd> psds) {
  if (psds.empty()) throw std::invalid_argument("no PSDs to average");
  Psd out = psds.front();
  std::fill(out.values.begin(), out.values.end(), 0.0);
  std::size_t total = 0;
  for (const auto& p : psds) {
    if (p.size() != out.size() || p.frequency.front() != out.frequency.front() ||
        p.frequency.back() != out.frequency.back())
      throw std::invalid_argument("PSDs to average must share one grid");
    for (std::size_t k = 0; k < p.size(); ++k)
      out.values[k] += p.values[k] * static_cast<double>(p.segments_averaged);
    total += p.segments_averaged;
  }
  if (total == 0) throw std::invalid_argument("PSDs carry no segments");
  for (double& v : out.values) v /= static_cast<double>(total);
  out.segments_averaged = total;
  return out;
}

std::size_t welch_segment_count(std::size_t samples, std::size_t segment_length, double overlap) {
  if (samples < segment_length) return 0;
  return 1 + (samples - segment_length) / hop_for(segment_length, overlap);
}

std::size_t welch_samples_for(std::size_t segments, std::size_t segment_length, double overlap) {
  if (segments == 0) return 0;
  return segment_length + (segments - 1) * hop_for(segment_length, overlap);
}

}  // namespace coems::spectral
