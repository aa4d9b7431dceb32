#include "coems/spectral/calibrate.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace coems::spectral {
namespace {

constexpr std::size_t kToneHalfWidth = 3;   // bins integrated either side of the peak
constexpr std::size_t kFloorInner = 8;      // floor estimate skips this many bins
constexpr std::size_t kFloorOuter = 40;
constexpr double kMinProminence = 10.0;     // 10 dB

double median(std::vector<double> v) {
  const auto mid = v.begin() + static_cast<std::ptrdiff_t>(v.size() / 2);
  std::nth_element(v.begin(), mid, v.end());
  return *mid;
}

}  // namespace

double tone_peak_asd(double amplitude, double rbw) {
  if (!(rbw > 0.0)) throw std::invalid_argument("rbw must be positive");
  return std::abs(amplitude) / std::sqrt(2.0 * rbw);
}

double measured_tone_peak(const Psd& psd, double frequency) {
  psd.validate();
  if (frequency < psd.frequency.front() || frequency > psd.frequency.back())
    throw CalibrationError("reference tone frequency lies outside the spectrum");
  const std::size_t n = psd.size();
  std::size_t peak = psd.nearest_bin(frequency);
  const std::size_t lo = peak >= 2 ? peak - 2 : 0;
  const std::size_t hi = std::min(n - 1, peak + 2);
  for (std::size_t k = lo; k <= hi; ++k)
    if (psd.values[k] > psd.values[peak]) peak = k;

  std::vector<double> side;
  for (std::size_t d = kFloorInner; d <= kFloorOuter; ++d) {
    if (peak >= d) side.push_back(psd.values[peak - d]);
    if (peak + d < n) side.push_back(psd.values[peak + d]);
  }
  if (side.empty()) throw CalibrationError("spectrum too short to estimate the local floor");
  const double floor = median(side);
  if (!(psd.values[peak] >= kMinProminence * floor) || psd.values[peak] <= 0.0)
    throw CalibrationError("reference tone not found at least 10 dB above the local floor");

  double power = 0.0;
  const std::size_t a = peak >= kToneHalfWidth ? peak - kToneHalfWidth : 0;
  const std::size_t b = std::min(n - 1, peak + kToneHalfWidth);
  for (std::size_t k = a; k <= b; ++k) power += psd.values[k] - floor;
  power *= psd.bin_width();
  return power / psd.rbw;
}

double calibrate(const Psd& psd, const ReferenceTone& reference) {
  if (!(reference.peak_asd > 0.0)) throw std::invalid_argument("reference ASD must be positive");
  const double measured = measured_tone_peak(psd, reference.frequency);
  return reference.peak_asd * reference.peak_asd / measured;
}

}  // namespace coems::spectral
