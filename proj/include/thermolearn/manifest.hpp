#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"

namespace thermo::io {

/// FNV-1a 64-bit content digest, hex-encoded. Bookkeeping, not security.
std::string file_digest(const std::string& path);

// Every CLI command writes one of these next to its outputs so a run can be
// reproduced from the recorded config + seed and checked against digests.
struct RunManifest {
  std::string command;
  nlohmann::json config;
  std::uint64_t seed = 0;
  int threads = 1;
  std::string version;
  std::vector<std::pair<std::string, std::string>> inputs;   // path, digest
  std::vector<std::pair<std::string, std::string>> outputs;  // path, digest
  std::int64_t started_unix = 0;
  std::int64_t finished_unix = 0;

  void add_input(const std::string& path);
  void add_output(const std::string& path);
  void write(const std::string& path) const;
};

inline constexpr const char* kVersion = "thermolearn 0.1.0";

}  // namespace thermo::io
