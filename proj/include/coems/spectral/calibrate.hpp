#pragma once

#include <stdexcept>

#include "coems/spectral/psd.hpp"

namespace coems::spectral {

class CalibrationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A tone of known displacement: its peak ASD as an analyser with the PSD's
/// resolution bandwidth would display it.
struct ReferenceTone {
  double frequency = 0.0;  // Hz
  double peak_asd = 0.0;   // m/sqrt(Hz)
};

/// Peak single-sided ASD of a pure tone of amplitude `amplitude` (m) seen
/// with resolution bandwidth `rbw` (Hz): A / sqrt(2 rbw).
double tone_peak_asd(double amplitude, double rbw);

/// Equivalent peak PSD of the tone nearest `frequency`: the power it carries
/// above the local floor, divided by the PSD's rbw. Independent of where the
/// tone falls between bins. Throws CalibrationError unless the tone stands
/// at least 10 dB above the floor.
double measured_tone_peak(const Psd& psd, double frequency);

/// Multiplicative scale mapping the raw PSD to absolute m^2/Hz so that the
/// reference tone reads its known peak. Apply it to each channel separately.
double calibrate(const Psd& psd, const ReferenceTone& reference);

}  // namespace coems::spectral
