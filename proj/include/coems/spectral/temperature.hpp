#pragma once

#include "coems/physics/types.hpp"
#include "coems/spectral/fit.hpp"
#include "coems/spectral/psd.hpp"

namespace coems::spectral {

struct TemperatureEstimate {
  double value = 0.0;           // K, signed
  double reference_area = 0.0;  // m^2
  double area = 0.0;            // m^2
  FrequencyBand band;
  bool unphysical = false;      // value <= 0
};

/// Signed area sum_k (S_k - floor) df over the bins inside `band`.
/// `noise_floor` is single-sided (m^2/Hz), like the PSD.
double band_area(const Psd& psd, double noise_floor, const FrequencyBand& band);

/// f_m +/- 10 (1+g) Gamma/2pi: wide enough for the broadened cooled peak.
FrequencyBand default_band(const physics::MechanicalMode& mode, double gain);

/// Transduction floor measured beside `band`: mean of the bins lying between
/// `inner` and `outer` hertz beyond either band edge (clipped to the PSD
/// support). Throws std::invalid_argument when no bin qualifies.
double side_band_floor(const Psd& psd, const FrequencyBand& band, double inner, double outer);

/// Area-based temperature: T0 * area / reference_area, where reference_area
/// comes from a zero-gain record of the same channel. Negative values are
/// kept and flagged. Throws std::invalid_argument for reference_area <= 0 or
/// a band outside the PSD support.
TemperatureEstimate infer_temperature(const Psd& psd, double noise_floor,
                                      const FrequencyBand& band, double reference_area,
                                      double t0);

}  // namespace coems::spectral
