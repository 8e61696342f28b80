#pragma once
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "arxtrail/backends.hpp"
#include "arxtrail/constraints.hpp"
#include "arxtrail/value_model.hpp"

namespace arxtrail {

// Additions A_0..A_{m-1}; the output of A_j feeds the first input of A_{j+1}
// through glues[j] (zz = rotr(z xor k, r)). Every second input, and both
// inputs of A_0, are fresh.
struct ChainSpec {
  unsigned n = 0;
  std::vector<DiffTriple> adds;
  std::vector<Glue> glues;
  std::vector<std::string> names;  // optional labels, one per addition

  std::size_t size() const { return adds.size(); }
  unsigned fresh_bits() const { return static_cast<unsigned>((adds.size() + 1) * n); }
  // Throws unless widths agree and each linked input difference equals the glued output difference.
  void check() const;
};

struct CmaSpec {
  unsigned n = 0;
  DiffTriple m1;
  Glue glue;
  DiffTriple m2;
  std::string name1 = "M1", name2 = "M2";

  ChainSpec as_chain() const;
};

// Exact number of fresh-input assignments (2^{(m+1)n} total) that follow
// every addition's differential. Dynamic program over one carry per addition.
BigInt chain_count_dp(const ChainSpec& s);

// Bits kept per addition by pruning: bits 0..h where h is the highest bit
// <= n-2 with a non-equal difference pattern (kept = h + 1, 0 if none).
std::vector<unsigned> prune_bits(const ChainSpec& s);

struct ChainModel {
  CnfFormula f;
  std::vector<int> projection;
  std::vector<WordVars> inputs;   // x, y, u_1, ...
  std::vector<WordVars> outputs;  // z_0, z_1, ...
  std::vector<unsigned> kept_bits;
  unsigned total_free = 0;
  // full count = projected count * 2^rescale_bits
  unsigned rescale_bits() const { return total_free - static_cast<unsigned>(projection.size()); }
};

// Joint value model. When pruned, unused bits are pinned so the formula's
// plain model count equals its projected count.
ChainModel build_chain_model(const ChainSpec& s, bool pruned);

enum class CountMethod { Auto, CarryDp, Cnf };

struct ChainProbability {
  BigInt count = 0;          // over all (m+1)n fresh bits
  unsigned total_free = 0;
  double joint_log2 = 0;     // log2 Pr(all additions)
  double cond_log2 = 0;      // log2 Pr(A_1.. | A_0)
  unsigned indep_weight = 0; // sum of per-addition weights
  unsigned first_weight = 0;
  std::string backend;
  bool pruned = false;
  unsigned projected_bits = 0;
  double seconds = 0;
};

// Throws InvalidDifferential when an addition is individually impossible.
ChainProbability chain_probability(const ChainSpec& s, const SolverConfig& cfg, CountMethod method = CountMethod::Auto);

enum class CmaStatus { ValidConfirmed, InvalidConflict, InvalidBySat, InvalidDifferential };
std::string cma_status_name(CmaStatus s);

struct CmaReport {
  ChainSpec spec;
  CmaStatus status = CmaStatus::ValidConfirmed;
  std::vector<ConflictReport> conflicts;                 // one per link
  std::vector<std::vector<NonIndepPosition>> nonindep;   // one per link
  std::optional<ChainProbability> probability;
  std::string note;
  double seconds = 0;
};

// Conflict check on each link, then SAT on the joint value model; optionally
// exact counting when the chain is valid.
CmaReport cma_validate(const ChainSpec& s, const SolverConfig& cfg, bool with_probability,
                       CountMethod method = CountMethod::Auto);

// CMA files: {"format": "arxtrail-cma/1", "word_size": n,
//   "additions": [{"name", "dx", "dy", "dz"}, ...], "links": [{"rot", "xor"}, ...]}
ChainSpec chain_from_json(const nlohmann::json& j);
nlohmann::json chain_to_json(const ChainSpec& s);
ChainSpec load_chain(const std::string& path);

nlohmann::json to_json(const ChainProbability& p);
nlohmann::json to_json(const CmaReport& r);

}  // namespace arxtrail
