#include "arxtrail/config.hpp"

#include <cstdlib>
#include <fstream>
#include <sstream>

namespace arxtrail {

namespace {

std::vector<std::string> split_ws(const std::string& s) {
  std::istringstream is(s);
  std::vector<std::string> out;
  for (std::string w; is >> w;) out.push_back(w);
  return out;
}

const char* env(const char* name) {
  const char* v = std::getenv(name);
  return v && *v ? v : nullptr;
}

}  // namespace

Config config_from_json(const nlohmann::json& j) {
  Config c;
  try {
    if (j.contains("sat")) {
      const auto& s = j.at("sat");
      c.solver.sat_command = s.value("command", "");
      c.solver.sat_flags = s.value("flags", std::vector<std::string>{});
      c.solver.sat_parser = s.value("parser", "competition");
    }
    if (j.contains("counter")) {
      const auto& s = j.at("counter");
      c.solver.counter_command = s.value("command", "");
      c.solver.counter_flags = s.value("flags", std::vector<std::string>{});
      c.solver.counter_parser = s.value("parser", "mc");
    }
    c.solver.enum_limit_bits = j.value("enum_limit_bits", 26u);
    c.solver.jobs = j.value("jobs", 0u);
    c.solver.timeout_s = j.value("timeout_s", 0.0);
    c.probe_timeout_s = j.value("probe_timeout_s", 3600.0);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::Parse, std::string("malformed config: ") + e.what());
  }
  if (c.solver.enum_limit_bits > 40) throw Error(ErrorCode::InvalidArgument, "enum_limit_bits above 40 is not supported");
  return c;
}

nlohmann::json config_to_json(const Config& c) {
  nlohmann::json j;
  j["sat"] = {{"command", c.solver.sat_command.empty() ? "internal" : c.solver.sat_command},
              {"flags", c.solver.sat_flags},
              {"parser", c.solver.sat_parser}};
  j["counter"] = {{"command", c.solver.counter_command.empty() ? "internal" : c.solver.counter_command},
                  {"flags", c.solver.counter_flags},
                  {"parser", c.solver.counter_parser}};
  j["enum_limit_bits"] = c.solver.enum_limit_bits;
  j["jobs"] = c.solver.jobs;
  j["timeout_s"] = c.solver.timeout_s;
  j["probe_timeout_s"] = c.probe_timeout_s;
  return j;
}

Config load_config(const std::string& path_in) {
  std::string path = path_in;
  if (path.empty())
    if (const char* p = env("ARXTRAIL_CONFIG")) path = p;
  Config c;
  if (!path.empty()) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::Io, "cannot open config file '" + path + "'");
    nlohmann::json j;
    try {
      in >> j;
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorCode::Parse, "config file '" + path + "' is not valid JSON: " + e.what());
    }
    c = config_from_json(j);
  }
  if (const char* v = env("ARXTRAIL_SAT")) c.solver.sat_command = v;
  if (const char* v = env("ARXTRAIL_SAT_FLAGS")) c.solver.sat_flags = split_ws(v);
  if (const char* v = env("ARXTRAIL_COUNTER")) c.solver.counter_command = v;
  if (const char* v = env("ARXTRAIL_COUNTER_FLAGS")) c.solver.counter_flags = split_ws(v);
  if (const char* v = env("ARXTRAIL_JOBS")) c.solver.jobs = static_cast<unsigned>(std::strtoul(v, nullptr, 10));
  return c;
}

}  // namespace arxtrail
