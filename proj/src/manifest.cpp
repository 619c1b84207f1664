#include "thermolearn/manifest.hpp"

#include <fstream>

namespace thermo::io {

std::string file_digest(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot digest " + path);
  std::uint64_t hash = 0xcbf29ce484222325ULL;
  char buf[1 << 14];
  while (f) {
    f.read(buf, sizeof(buf));
    const std::streamsize n = f.gcount();
    for (std::streamsize i = 0; i < n; ++i) {
      hash ^= static_cast<unsigned char>(buf[i]);
      hash *= 0x100000001b3ULL;
    }
  }
  char out[17];
  std::snprintf(out, sizeof(out), "%016llx",
                static_cast<unsigned long long>(hash));
  return out;
}

void RunManifest::add_input(const std::string& path) {
  inputs.emplace_back(path, file_digest(path));
}

void RunManifest::add_output(const std::string& path) {
  outputs.emplace_back(path, file_digest(path));
}

void RunManifest::write(const std::string& path) const {
  nlohmann::json j;
  j["command"] = command;
  j["config"] = config;
  j["seed"] = seed;
  j["threads"] = threads;
  j["version"] = version;
  for (const auto& [p, d] : inputs)
    j["inputs"].push_back({{"path", p}, {"digest", d}});
  for (const auto& [p, d] : outputs)
    j["outputs"].push_back({{"path", p}, {"digest", d}});
  j["started_unix"] = started_unix;
  j["finished_unix"] = finished_unix;
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot write " + path);
  f << j.dump(2) << "\n";
}

}  // namespace thermo::io
