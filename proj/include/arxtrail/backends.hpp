#pragma once
#include <atomic>
#include <functional>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "arxtrail/cnf.hpp"
#include "arxtrail/sat_solver.hpp"

namespace arxtrail {

using BigInt = boost::multiprecision::cpp_int;

// Backend selection. An empty or "internal" command selects the in-process
// engine; anything else is run as an external program given a DIMACS file.
struct SolverConfig {
  std::string sat_command;
  std::vector<std::string> sat_flags;
  std::string sat_parser = "competition";
  std::string counter_command;
  std::vector<std::string> counter_flags;
  std::string counter_parser = "mc";
  unsigned enum_limit_bits = 26;
  unsigned jobs = 0;       // 0: hardware concurrency
  double timeout_s = 0;    // 0: unlimited

  bool external_sat() const { return !sat_command.empty() && sat_command != "internal"; }
  bool external_counter() const { return !counter_command.empty() && counter_command != "internal"; }
  unsigned effective_jobs() const;
};

struct SatResult {
  SatStatus status = SatStatus::Unknown;
  std::vector<bool> model;  // 1-based, empty unless Sat
  double seconds = 0;
  std::string backend;
};

struct CountResult {
  BigInt count = 0;
  double seconds = 0;
  std::string backend;
  unsigned projected_vars = 0;
  // -inf for a zero count.
  double log2() const;
};

double big_log2(const BigInt& v);

// Evaluates a full assignment of the projection variables (in projection
// order). When supplied, the internal counter enumerates and calls it instead
// of consulting the SAT engine.
using SemanticEvaluator = std::function<bool(const std::vector<bool>&)>;

SatResult solve_sat(const CnfFormula& f, const SolverConfig& cfg, const std::vector<Lit>& assumptions = {},
                    const std::atomic<bool>* stop = nullptr);

CountResult count_models(const CnfFormula& f, const std::vector<int>& projection, const SolverConfig& cfg,
                         const SemanticEvaluator* evaluator = nullptr);

// Output parsers for external tools, looked up by name.
struct ParsedSat {
  SatStatus status = SatStatus::Unknown;
  std::vector<Lit> values;
};
using SatOutputParser = std::function<ParsedSat(const std::string& out, int exit_code)>;
using CountOutputParser = std::function<BigInt(const std::string& out, int exit_code)>;

void register_sat_parser(const std::string& name, SatOutputParser p);
void register_count_parser(const std::string& name, CountOutputParser p);

struct ProcessResult {
  int exit_code = -1;
  bool timed_out = false;
  std::string out;
};

// Runs argv[0] (searched in PATH) with stdout captured and stderr discarded.
ProcessResult run_process(const std::vector<std::string>& argv, double timeout_s);

}  // namespace arxtrail
