#pragma once

#include <chrono>
#include <ctime>
#include <fstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "difflog/common.hpp"

namespace difflog {

inline constexpr const char* kToolVersion = "0.1.0";

/// Record of one CLI run: resolved configuration, input digests and outputs.
/// Written next to the primary output so runs can be compared and replayed.
struct RunManifest {
  std::string subcommand;
  nlohmann::json config = nlohmann::json::object();
  std::vector<std::pair<std::string, std::string>> inputs;  // (path, fnv1a64 digest)
  std::vector<std::string> outputs;

  void add_input(const std::string& path) { inputs.emplace_back(path, file_digest_hex(path)); }

  nlohmann::json to_json() const {
    nlohmann::json jin = nlohmann::json::array();
    for (const auto& [path, digest] : inputs) jin.push_back({{"path", path}, {"digest", digest}});
    auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    char stamp[32];
    std::strftime(stamp, sizeof(stamp), "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
    return nlohmann::json{{"tool_version", kToolVersion},
                          {"subcommand", subcommand},
                          {"timestamp", stamp},
                          {"config", config},
                          {"inputs", jin},
                          {"outputs", outputs}};
  }

  void write(const std::string& path) const {
    std::ofstream out(path);
    if (!out) throw input_error("cannot write manifest: " + path);
    out << to_json().dump(2) << '\n';
  }
};

}  // namespace difflog
