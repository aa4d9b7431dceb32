#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace coems::spectral {

enum class Window { Hann, Rectangular };

std::string to_string(Window w);
Window window_from_string(const std::string& name);

/// Discretised displacement PSD, single-sided per hertz (m^2/Hz) on a
/// uniform frequency grid.
struct Psd {
  std::vector<double> frequency;  // Hz, strictly increasing
  std::vector<double> values;     // m^2/Hz
  double rbw = 0.0;               // Hz, equivalent noise bandwidth of one bin
  Window window = Window::Hann;
  std::size_t segments_averaged = 0;
  double calibration_scale = 1.0;  // already applied to `values`

  std::size_t size() const { return values.size(); }
  double bin_width() const;
  /// Index of the bin closest to f (clamped to the grid).
  std::size_t nearest_bin(double f) const;
  /// Sum of values times bin width: the variance the spectrum represents.
  double integrated_power() const;

  /// Copy with every value multiplied by `scale` (and the scale recorded).
  Psd scaled(double scale) const;

  /// Throws std::invalid_argument if the grid is not uniform and increasing or
  /// any value is negative or non-finite.
  void validate() const;
};

}  // namespace coems::spectral
