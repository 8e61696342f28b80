#pragma once
#include <string>
#include <utility>
#include <vector>

#include "arxtrail/cnf.hpp"
#include "arxtrail/value_model.hpp"

namespace arxtrail {

enum class WeightTag { Data, Key };

// Weight bits w_0..w_{n-2} of one addition, w_i = not eq(dx_i, dy_i, dz_i).
struct WeightVars {
  std::vector<Lit> w;
  WeightTag tag = WeightTag::Data;
  int round = 0;
};

// Differential validity of dz for inputs (dx, dy) plus weight bits.
WeightVars encode_modadd_diff(CnfFormula& f, const WordVars& dx, const WordVars& dy, const WordVars& dz,
                              WeightTag tag = WeightTag::Data, int round = 0);

// Concatenates weight bits in the given order.
std::vector<Lit> flatten_weights(const std::vector<WeightVars>& ws);

// sum(weights) <= W over a sequential counter.
AtMostK encode_weight_bound(CnfFormula& f, const std::vector<WeightVars>& weights, int W);

// Matsui-style bounds. The weight literals are split into consecutive units
// (unit_ends[k] = number of literals in units 0..k). window_min[u] is a lower
// bound on the weight of any u consecutive units (window_min[0] = 0). For every
// split with k leading (or trailing) units, their weight is forced to at most
// W - window_min[U-k]. `fwd` must count the literals in order and `bwd` (may be
// null) in reverse order.
struct MatsuiOptions {
  bool prefix = true;
  bool suffix = true;
};
unsigned encode_matsui(CnfFormula& f, const AtMostK& fwd, const AtMostK* bwd, const std::vector<std::size_t>& unit_ends,
                       const std::vector<int>& window_min, int W, MatsuiOptions opt = {});

// Blocking clause: at least one literal differs from its recorded value.
void exclude_pattern(CnfFormula& f, const std::vector<std::pair<Lit, bool>>& fixed_bits);

// Pins a word to a constant with unit clauses.
void fix_word(CnfFormula& f, const WordVars& w, u64 value);

}  // namespace arxtrail
