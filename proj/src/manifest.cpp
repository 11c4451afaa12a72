#include <cstdio>
#include <fstream>

#include <openssl/evp.h>

#include "cohsim/scenario.hpp"

namespace cohsim {
namespace {

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw IoError("cannot open " + path.string() + " for writing");
  os.write(content.data(), static_cast<std::streamsize>(content.size()));
  os.close();
  if (!os) throw IoError("failed writing " + path.string());
}

}  // namespace

std::string sha256_hex(std::string_view data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
    throw IoError("SHA-256 digest failed");
  }
  std::string hex;
  hex.reserve(2 * len);
  char byte[3];
  for (unsigned int i = 0; i < len; ++i) {
    std::snprintf(byte, sizeof byte, "%02x", digest[i]);
    hex += byte;
  }
  return hex;
}

std::string artifact_version() { return COHSIM_VERSION; }

Json RunManifest::to_json() const {
  Json entries = Json::array();
  for (const auto& e : files) entries.push_back({{"name", e.name}, {"sha256", e.sha256}, {"bytes", e.bytes}});
  return {{"artifact", "cohsim"},
          {"version", version},
          {"scenario", scenario},
          {"master_seed", master_seed},
          {"config_sha256", config_sha256},
          {"files", entries},
          {"wall_clock_seconds", wall_clock_seconds}};
}

RunManifest write_run(const ScenarioConfig& cfg, const ScenarioOutput& out, const std::filesystem::path& dir,
                      double wall_clock_seconds) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create output directory " + dir.string() + ": " + ec.message());

  RunManifest m;
  m.config_sha256 = sha256_hex(cfg.document.dump());
  m.master_seed = cfg.master_seed;
  m.version = artifact_version();
  m.scenario = std::string(to_string(cfg.scenario));
  m.wall_clock_seconds = wall_clock_seconds;

  auto emit = [&](const std::string& name, const std::string& content) {
    write_file(dir / name, content);
    m.files.push_back({name, sha256_hex(content), content.size()});
  };
  for (const auto& f : out.files) emit(f.name, f.content);
  emit("summary.json", out.summary.dump(2) + "\n");
  write_file(dir / "manifest.json", m.to_json().dump(2) + "\n");
  return m;
}

}  // namespace cohsim
