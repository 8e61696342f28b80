#pragma once
#include <string>

#include <json.hpp>

#include "arxtrail/backends.hpp"
#include "arxtrail/word.hpp"

namespace arxtrail {

struct Config {
  SolverConfig solver;
  double probe_timeout_s = 3600;
};

// Schema:
// { "sat":     {"command": "cadical", "flags": ["-q"], "parser": "competition"},
//   "counter": {"command": "ganak_count.py", "flags": [], "parser": "mc"},
//   "enum_limit_bits": 26, "jobs": 0, "timeout_s": 0, "probe_timeout_s": 3600 }
Config config_from_json(const nlohmann::json& j);
nlohmann::json config_to_json(const Config& c);

// Reads the file (if non-empty), then applies environment overrides:
// ARXTRAIL_SAT, ARXTRAIL_SAT_FLAGS, ARXTRAIL_COUNTER, ARXTRAIL_COUNTER_FLAGS,
// ARXTRAIL_JOBS. With an empty path, ARXTRAIL_CONFIG names the file.
Config load_config(const std::string& path);

}  // namespace arxtrail
