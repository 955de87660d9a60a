// manifest.hpp -- run provenance. Every output directory gets exactly one
// manifest recording the command, the config snapshot and the master seed,
// so a run can be reproduced bit-for-bit.

#ifndef ADDF_MANIFEST_HPP
#define ADDF_MANIFEST_HPP

#include <cstdint>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "addf/version.hpp"

namespace addf {

struct RunManifest {
  std::string command;               // subcommand plus arguments as invoked
  std::uint64_t seed = 0;
  nlohmann::json config;             // full effective configuration
  std::vector<std::string> outputs;  // paths relative to the output directory
  nlohmann::json metrics;            // optional headline numbers for the run
  double duration_seconds = 0.0;

  nlohmann::json to_json() const {
    nlohmann::json j{{"version", kVersion},
                     {"command", command},
                     {"seed", seed},
                     {"config", config},
                     {"outputs", outputs},
                     {"duration_seconds", duration_seconds}};
    if (!metrics.is_null()) j["metrics"] = metrics;
    return j;
  }

  void write(const std::string& path) const {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("manifest: cannot open " + path + " for writing");
    out << to_json().dump(2) << "\n";
  }
};

}  // namespace addf

#endif
