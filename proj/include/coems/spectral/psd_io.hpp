#pragma once

#include <filesystem>
#include <json.hpp>

#include "coems/spectral/fit.hpp"
#include "coems/spectral/psd.hpp"

namespace coems::spectral {

/// CSV "frequency_hz,psd_m2_per_hz" plus sidecar `<path>.json` with rbw,
/// window, averages and calibration scale.
void write_psd_csv(const Psd& psd, const std::filesystem::path& path);

/// Reads write_psd_csv output. Without a sidecar the rbw defaults to one bin
/// and the window to rectangular. Throws io::ParseError on malformed input.
Psd read_psd_csv(const std::filesystem::path& path);

/// Restricts a PSD to [low, high] Hz.
Psd crop(const Psd& psd, double low, double high);

nlohmann::json fit_to_json(const SpectrumFit& fit);

}  // namespace coems::spectral
