#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

#include <json.hpp>

namespace coems::bench {

inline constexpr const char* kToolName = "coems-bench";
inline constexpr const char* kToolVersion = "0.1.0";

/// Lower-case hex SHA-256 of a file's bytes.
std::string sha256_file(const std::filesystem::path& path);

/// "2026-01-31T12:00:00Z"
std::string utc_timestamp();

/// Creates `<out>/<YYYYmmddTHHMMSSZ>-seed<seed>` (with a numeric suffix if
/// that already exists) and returns it.
std::filesystem::path make_run_directory(const std::filesystem::path& out, std::uint64_t seed);

/// Provenance record written last, by a single writer, as manifest.json.
class Manifest {
 public:
  Manifest(std::string command, nlohmann::json arguments, nlohmann::json config,
           std::uint64_t seed);

  /// Records `file` (inside the run directory) with its digest.
  void add_artifact(const std::filesystem::path& dir, const std::filesystem::path& file);
  void set_summary(nlohmann::json summary) { doc_["summary"] = std::move(summary); }

  /// Stamps the end time and status ("complete" or "failed") and writes
  /// `<dir>/manifest.json`.
  void write(const std::filesystem::path& dir, const std::string& status,
             const std::string& error = {});

  const nlohmann::json& document() const { return doc_; }

 private:
  nlohmann::json doc_;
};

}  // namespace coems::bench
