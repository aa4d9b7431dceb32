#include "coems/sim/record_io.hpp"

#include <fstream>

#include "coems/io/csv.hpp"
#include "coems/sim/config_json.hpp"

namespace coems::sim {

void write_record_csv(const SimulationRecord& record, const SimulationConfig& config,
                      const std::filesystem::path& path) {
  std::vector<double> time(record.size());
  for (std::size_t i = 0; i < time.size(); ++i) time[i] = record.time(i);
  io::write_csv(path, {"time", "x", "y_IL", "y_OL", "F_fb"},
                {&time, &record.x, &record.inloop, &record.outloop, &record.feedback_force});

  nlohmann::json meta;
  meta["config"] = config_to_json(config);
  meta["seed"] = config.seed;
  meta["samples"] = record.size();
  meta["dt_s"] = record.dt;
  meta["columns"] = {{"time", "s"}, {"x", "m"}, {"y_IL", "m"}, {"y_OL", "m"}, {"F_fb", "N"}};
  std::ofstream side(path.string() + ".json", std::ios::binary);
  side << meta.dump(2) << '\n';
}

SimulationRecord read_record_csv(const std::filesystem::path& path) {
  const auto table = io::read_csv(path);
  SimulationRecord rec;
  const auto& t = table.column("time");
  rec.x = table.column("x");
  rec.inloop = table.column("y_IL");
  rec.outloop = table.column("y_OL");
  rec.feedback_force = table.column("F_fb");
  rec.dt = t.size() > 1 ? t[1] - t[0] : 0.0;
  return rec;
}

}  // namespace coems::sim
