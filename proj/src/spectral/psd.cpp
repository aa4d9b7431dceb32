#include "coems/spectral/psd.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace coems::spectral {

std::string to_string(Window w) { return w == Window::Hann ? "hann" : "rectangular"; }

Window window_from_string(const std::string& name) {
  if (name == "hann") return Window::Hann;
  if (name == "rectangular") return Window::Rectangular;
  throw std::invalid_argument("unknown window '" + name + "'");
}

double Psd::bin_width() const {
  if (frequency.size() < 2) throw std::logic_error("PSD grid needs at least two bins");
  return (frequency.back() - frequency.front()) / static_cast<double>(frequency.size() - 1);
}

std::size_t Psd::nearest_bin(double f) const {
  const double df = bin_width();
  const double idx = std::round((f - frequency.front()) / df);
  if (idx <= 0) return 0;
  return std::min(static_cast<std::size_t>(idx), frequency.size() - 1);
}

double Psd::integrated_power() const {
  double sum = 0.0;
  for (double v : values) sum += v;
  return sum * bin_width();
}

Psd Psd::scaled(double scale) const {
  Psd out = *this;
  for (double& v : out.values) v *= scale;
  out.calibration_scale *= scale;
  return out;
}

void Psd::validate() const {
  if (frequency.size() != values.size() || frequency.size() < 2)
    throw std::invalid_argument("PSD needs matching frequency/value arrays of length >= 2");
  const double df = bin_width();
  if (!(df > 0)) throw std::invalid_argument("PSD frequency axis must be increasing");
  for (std::size_t i = 1; i < frequency.size(); ++i) {
    const double step = frequency[i] - frequency[i - 1];
    if (!(step > 0) || std::abs(step - df) > 1e-6 * df)
      throw std::invalid_argument("PSD frequency axis must be uniform and strictly increasing");
  }
  for (double v : values)
    if (!(v >= 0.0) || !std::isfinite(v))
      throw std::invalid_argument("PSD values must be finite and non-negative");
}

}  // namespace coems::spectral
