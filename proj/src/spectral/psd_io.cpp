#include "coems/spectral/psd_io.hpp"

#include <fstream>

#include "coems/io/csv.hpp"

namespace coems::spectral {

using nlohmann::json;

void write_psd_csv(const Psd& psd, const std::filesystem::path& path) {
  io::write_csv(path, {"frequency_hz", "psd_m2_per_hz"}, {&psd.frequency, &psd.values});
  const json meta{{"convention", "single-sided-hertz"},
                  {"rbw_hz", psd.rbw},
                  {"window", to_string(psd.window)},
                  {"segments_averaged", psd.segments_averaged},
                  {"calibration_scale", psd.calibration_scale}};
  std::ofstream side(path.string() + ".json", std::ios::binary);
  side << meta.dump(2) << '\n';
}

Psd read_psd_csv(const std::filesystem::path& path) {
  const auto table = io::read_csv(path);
  Psd psd;
  psd.frequency = table.column("frequency_hz");
  psd.values = table.column("psd_m2_per_hz");
  if (psd.size() < 2) throw io::ParseError(path.string() + ": PSD needs at least two rows");
  try {
    psd.validate();
  } catch (const std::invalid_argument& e) {
    throw io::ParseError(path.string() + ": " + e.what());
  }
  psd.rbw = psd.bin_width();
  psd.window = Window::Rectangular;
  const auto sidecar = std::filesystem::path(path.string() + ".json");
  if (std::filesystem::exists(sidecar)) {
    std::ifstream in(sidecar);
    json meta;
    try {
      in >> meta;
      psd.rbw = meta.value("rbw_hz", psd.rbw);
      psd.window = window_from_string(meta.value("window", std::string("rectangular")));
      psd.segments_averaged = meta.value("segments_averaged", std::size_t{0});
      psd.calibration_scale = meta.value("calibration_scale", 1.0);
    } catch (const std::exception& e) {
      throw io::ParseError(sidecar.string() + ": " + e.what());
    }
  }
  return psd;
}

Psd crop(const Psd& psd, double low, double high) {
  Psd out = psd;
  out.frequency.clear();
  out.values.clear();
  for (std::size_t k = 0; k < psd.size(); ++k) {
    if (psd.frequency[k] < low || psd.frequency[k] > high) continue;
    out.frequency.push_back(psd.frequency[k]);
    out.values.push_back(psd.values[k]);
  }
  return out;
}

json fit_to_json(const SpectrumFit& fit) {
  json modes = json::array();
  for (std::size_t j = 0; j < fit.modes.size(); ++j) {
    const auto& m = fit.modes[j];
    const auto& e = fit.errors[j];
    modes.push_back({{"label", m.label},
                     {"mass_kg", m.effective_mass},
                     {"mass_kg_error", e.mass},
                     {"resonance_hz", physics::hz_from_angular(m.resonance)},
                     {"resonance_hz_error", physics::hz_from_angular(e.resonance)},
                     {"damping_hz", physics::hz_from_angular(m.damping)},
                     {"damping_hz_error", physics::hz_from_angular(e.damping)}});
  }
  const double floor_ss = physics::SpectralConvention::to_single_sided_hz(fit.noise_floor);
  return json{{"modes", modes},
              {"noise_floor_m2_per_hz", floor_ss},
              {"noise_floor_m2_per_hz_error",
               physics::SpectralConvention::to_single_sided_hz(fit.noise_floor_error)},
              {"noise_asd_m_per_rthz", std::sqrt(floor_ss)},
              {"temperature_k", fit.temperature},
              {"residual_norm", fit.residual_norm},
              {"iterations", fit.iterations},
              {"converged", fit.converged},
              {"degenerate", fit.degenerate},
              {"message", fit.message}};
}

}  // namespace coems::spectral
