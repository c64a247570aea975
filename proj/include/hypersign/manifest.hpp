#pragma once

#include <chrono>
#include <cstdint>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "hypersign/error.hpp"
#include "hypersign/version.hpp"

namespace hypersign {

// FNV-1a over the file bytes; enough to notice an input changed between runs.
inline std::string file_digest(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open '" + path + "' for digest");
  std::uint64_t h = 0xcbf29ce484222325ull;
  char buf[4096];
  while (in.read(buf, sizeof(buf)) || in.gcount() > 0) {
    for (std::streamsize i = 0; i < in.gcount(); ++i) {
      h ^= static_cast<unsigned char>(buf[i]);
      h *= 0x100000001b3ull;
    }
  }
  char hex[17];
  std::snprintf(hex, sizeof(hex), "%016llx", static_cast<unsigned long long>(h));
  return hex;
}

// One manifest per artifact-producing run: what ran, on what, with which
// resolved settings, and what came out.
struct RunManifest {
  std::string subcommand;
  nlohmann::json config = nlohmann::json::object();
  std::uint64_t seed = 0;
  std::vector<std::string> inputs;
  std::vector<std::string> outputs;
  double wall_clock_seconds = 0;

  nlohmann::json to_json() const {
    nlohmann::json j;
    j["tool"] = "hypersign";
    j["version"] = std::string(kVersion);
    j["subcommand"] = subcommand;
    j["config"] = config;
    j["seed"] = seed;
    j["inputs"] = nlohmann::json::array();
    for (const auto& path : inputs)
      j["inputs"].push_back({{"path", path}, {"fnv1a64", file_digest(path)}});
    j["outputs"] = outputs;
    j["wall_clock_seconds"] = wall_clock_seconds;
    return j;
  }
};

inline void write_manifest(const std::string& path, const RunManifest& m) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write manifest '" + path + "'");
  out << m.to_json().dump(2) << '\n';
}

}  // namespace hypersign
