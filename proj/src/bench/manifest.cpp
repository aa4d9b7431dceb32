#include "coems/bench/manifest.hpp"

#include <openssl/evp.h>

#include <array>
#include <chrono>
#include <ctime>
#include <fstream>
#include <memory>
#include <stdexcept>

namespace coems::bench {

using nlohmann::json;

std::string sha256_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), EVP_MD_CTX_free);
  if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1)
    throw std::runtime_error("sha256 initialisation failed");
  std::array<char, 1 << 16> buf{};
  while (in) {
    in.read(buf.data(), buf.size());
    if (in.gcount() > 0) EVP_DigestUpdate(ctx.get(), buf.data(), static_cast<std::size_t>(in.gcount()));
  }
  std::array<unsigned char, EVP_MAX_MD_SIZE> md{};
  unsigned int len = 0;
  EVP_DigestFinal_ex(ctx.get(), md.data(), &len);
  static constexpr char hex[] = "0123456789abcdef";
  std::string out;
  for (unsigned i = 0; i < len; ++i) {
    out += hex[md[i] >> 4];
    out += hex[md[i] & 15];
  }
  return out;
}

namespace {

std::string format_utc(const char* fmt) {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, fmt, &tm);
  return buf;
}

}  // namespace

std::string utc_timestamp() { return format_utc("%Y-%m-%dT%H:%M:%SZ"); }

std::filesystem::path make_run_directory(const std::filesystem::path& out, std::uint64_t seed) {
  const std::string stem = format_utc("%Y%m%dT%H%M%SZ") + "-seed" + std::to_string(seed);
  std::filesystem::create_directories(out);
  auto dir = out / stem;
  for (int k = 1; !std::filesystem::create_directory(dir); ++k)
    dir = out / (stem + "-" + std::to_string(k));
  return dir;
}

Manifest::Manifest(std::string command, json arguments, json config, std::uint64_t seed) {
  doc_ = {{"tool", kToolName},
          {"version", kToolVersion},
          {"command", std::move(command)},
          {"arguments", std::move(arguments)},
          {"config", std::move(config)},
          {"seed", seed},
          {"started_utc", utc_timestamp()},
          {"artifacts", json::array()}};
}

void Manifest::add_artifact(const std::filesystem::path& dir, const std::filesystem::path& file) {
  const auto full = dir / file;
  doc_["artifacts"].push_back({{"path", file.generic_string()},
                               {"bytes", std::filesystem::file_size(full)},
                               {"sha256", sha256_file(full)}});
}

void Manifest::write(const std::filesystem::path& dir, const std::string& status,
                     const std::string& error) {
  doc_["finished_utc"] = utc_timestamp();
  doc_["status"] = status;
  if (!error.empty()) doc_["error"] = error;
  std::ofstream out(dir / "manifest.json", std::ios::binary);
  out << doc_.dump(2) << '\n';
  if (!out) throw std::runtime_error("cannot write manifest in " + dir.string());
}

}  // namespace coems::bench
