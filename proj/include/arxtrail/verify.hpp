#pragma once
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "arxtrail/ciphers.hpp"

namespace arxtrail {

struct CmaRefinement {
  CmaRef ref;
  CmaReport report;
  bool flagged = false;      // some link shows non-independent positions
  bool refined = false;      // probability computed and applied
  double tail_weight = 0;    // independence weight of every addition after the first
  double refined_tail = 0;   // -log2 Pr(rest | first)
  std::string warning;
};

enum class InvalidCause { None, BadDifferential, Conflict, WholeTrail };

struct Verdict {
  std::string cipher;
  Trail trail;
  bool valid = false;
  InvalidCause cause = InvalidCause::None;
  std::string detail;
  double independence_weight = 0;
  double refined_weight = 0;
  std::vector<double> site_weights;          // independence weights per addition
  std::vector<double> refined_site_weights;  // after refinement
  std::vector<CmaRefinement> cmas;
  // Conflicting links when the whole-trail model is unsatisfiable.
  std::vector<CmaReport> conflicts;
  // Witness: one concrete value per circuit input, and the weak key when the
  // cipher has one.
  std::map<std::string, u64> witness;
  std::vector<u64> weak_key;
  bool witness_checked = false;
  double seconds = 0;
  std::string sat_backend;
};

struct VerifyOptions {
  bool refine = true;
  bool find_witness = true;  // false: skip the whole-trail model (refinement only)
  CountMethod count_method = CountMethod::Auto;
};

Verdict verify_and_refine(const CipherSpec& c, const Trail& t, const SolverConfig& cfg, const VerifyOptions& opt = {});

// Runs the circuit on the witness and on the witness xor the input
// differences; true when every wire follows the trail.
bool check_witness(const ArxCircuit& circ, const std::vector<u64>& inputs, const std::vector<u64>& wire_diffs);

// Trail annotated with refined per-row columns ("<col>_refined").
Trail annotate_refined(const CipherSpec& c, const Verdict& v);

nlohmann::json to_json(const Verdict& v);

}  // namespace arxtrail
