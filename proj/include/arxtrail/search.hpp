#pragma once
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "arxtrail/verify.hpp"

namespace arxtrail {

// Fixes the difference of an observed word, e.g. {"k", 8, 0x78000}.
struct Pin {
  std::string field;
  unsigned row = 0;
  u64 value = 0;
};
// Parses "k.8=0x00078000".
Pin parse_pin(const std::string& text, unsigned n);

using SearchLog = std::function<void(const nlohmann::json&)>;

struct SearchOptions {
  unsigned rounds = 0;
  int w_start = 0;                    // optimal search: first weight probed
  int w_max = 512;                    // give up above this weight
  bool matsui = true;
  MatsuiOptions matsui_opt;
  std::vector<int> known_bounds;      // optimal weight by round count, -1 unknown
  std::vector<Pin> pins;
  bool verify = true;                 // check found trails for right pairs
  bool refine = false;                // refine the final trail
  double probe_timeout_s = 3600;
  unsigned max_exclusions = 100000;
  // bisection windows: upper bound (satisfiable) and lower bound.
  int wd_hi = 0, wd_lo = 0, wdk_hi = 0, wdk_lo = 0;
  // Zero-difference window start round; -1 tries every placement, -2 disables.
  int zero_window = -1;
  SearchLog log;
};

struct SearchResult {
  bool found = false;
  Trail trail;
  int weight = -1;   // independence weight of the trail
  int w_d = -1, w_k = -1;
  std::vector<int> bounds;  // bounds[r] = optimal weight of r rounds (optimal search)
  std::optional<Verdict> verdict;
  unsigned exclusions = 0;
  unsigned probes = 0;
  double seconds = 0;
};

// Optimal trail under the independence assumption whose
// differential has a right pair.
SearchResult search_optimal(const CipherSpec& c, const SolverConfig& cfg, const SearchOptions& opt);

// Bisection search on the data weight, then on the total weight.
SearchResult search_good(const CipherSpec& c, const SolverConfig& cfg, const SearchOptions& opt);

// Up to `limit` distinct trails of weight <= W, each blocked once found.
std::vector<Trail> enumerate_trails(const CipherSpec& c, const SolverConfig& cfg, unsigned rounds, int W, unsigned limit,
                                    const std::vector<Pin>& pins = {});

// The differential search model (for DIMACS export).
CnfFormula search_model(const CipherSpec& c, unsigned rounds, int W, const std::vector<Pin>& pins = {});

nlohmann::json to_json(const SearchResult& r);

}  // namespace arxtrail
