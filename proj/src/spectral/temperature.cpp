#include "coems/spectral/temperature.hpp"

#include <stdexcept>

namespace coems::spectral {

double band_area(const Psd& psd, double noise_floor, const FrequencyBand& band) {
  if (!(band.high > band.low)) throw std::invalid_argument("band must have high > low");
  if (band.low < psd.frequency.front() || band.high > psd.frequency.back())
    throw std::invalid_argument("band lies outside the PSD support");
  const std::size_t first = psd.nearest_bin(band.low);
  const std::size_t last = psd.nearest_bin(band.high);
  double sum = 0.0;
  for (std::size_t k = first; k <= last; ++k) sum += psd.values[k] - noise_floor;
  return sum * psd.bin_width();
}

double side_band_floor(const Psd& psd, const FrequencyBand& band, double inner, double outer) {
  if (!(outer > inner && inner >= 0.0)) throw std::invalid_argument("need 0 <= inner < outer");
  double sum = 0.0;
  std::size_t n = 0;
  for (std::size_t k = 0; k < psd.size(); ++k) {
    const double f = psd.frequency[k];
    if (f <= 0.0) continue;
    const double below = band.low - f;
    const double above = f - band.high;
    if ((below >= inner && below <= outer) || (above >= inner && above <= outer)) {
      sum += psd.values[k];
      ++n;
    }
  }
  if (n == 0) throw std::invalid_argument("no PSD bins beside the band");
  return sum / static_cast<double>(n);
}

FrequencyBand default_band(const physics::MechanicalMode& mode, double gain) {
  const double center = physics::hz_from_angular(mode.resonance);
  const double half = 10.0 * (1.0 + gain) * physics::hz_from_angular(mode.damping);
  return {center - half, center + half};
}

TemperatureEstimate infer_temperature(const Psd& psd, double noise_floor,
                                      const FrequencyBand& band, double reference_area,
                                      double t0) {
  if (!(reference_area > 0.0)) throw std::invalid_argument("reference area must be positive");
  TemperatureEstimate est;
  est.band = band;
  est.reference_area = reference_area;
  est.area = band_area(psd, noise_floor, band);
  est.value = t0 * est.area / reference_area;
  est.unphysical = est.value <= 0.0;
  return est;
}

}  // namespace coems::spectral
