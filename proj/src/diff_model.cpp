#include "arxtrail/diff_model.hpp"

#include <algorithm>

namespace arxtrail {

WeightVars encode_modadd_diff(CnfFormula& f, const WordVars& dx, const WordVars& dy, const WordVars& dz, WeightTag tag,
                              int round) {
  const unsigned n = dx.n();
  if (dy.n() != n || dz.n() != n) throw Error(ErrorCode::WidthMismatch, "difference words of unequal width");
  WeightVars wv;
  wv.tag = tag;
  wv.round = round;
  if (n == 0) return wv;
  // LSB: dx_0 ^ dy_0 ^ dz_0 = 0.
  {
    const Lit a = dx.bits[0], b = dy.bits[0], c = dz.bits[0];
    f.add_clause({a, b, -c});
    f.add_clause({a, -b, c});
    f.add_clause({-a, b, c});
    f.add_clause({-a, -b, -c});
  }
  for (unsigned i = 0; i + 1 < n; ++i) {
    const Lit a = dx.bits[i], b = dy.bits[i], c = dz.bits[i];
    const Lit na = dx.bits[i + 1], nb = dy.bits[i + 1], nc = dz.bits[i + 1];
    // eq(a,b,c) implies na ^ nb ^ nc = a.
    for (int v = 0; v < 2; ++v) {
      const Lit pa = v ? -a : a, pb = v ? -b : b, pc = v ? -c : c;  // premise a=b=c=v negated
      for (int m = 0; m < 8; ++m) {
        int parity = (m & 1) ^ ((m >> 1) & 1) ^ ((m >> 2) & 1);
        if (parity == v) continue;  // allowed assignment
        f.add_clause({pa, pb, pc, (m & 1) ? -na : na, (m & 2) ? -nb : nb, (m & 4) ? -nc : nc});
      }
    }
    const Lit w = f.new_var();
    f.add_clause({-a, c, w});
    f.add_clause({a, -c, w});
    f.add_clause({-a, b, w});
    f.add_clause({a, -b, w});
    f.add_clause({a, b, c, -w});
    f.add_clause({-a, -b, -c, -w});
    wv.w.push_back(w);
  }
  return wv;
}

std::vector<Lit> flatten_weights(const std::vector<WeightVars>& ws) {
  std::vector<Lit> out;
  for (const auto& w : ws) out.insert(out.end(), w.w.begin(), w.w.end());
  return out;
}

AtMostK encode_weight_bound(CnfFormula& f, const std::vector<WeightVars>& weights, int W) {
  if (W < 0) throw Error(ErrorCode::InvalidArgument, "weight bound must be non-negative");
  return encode_atmost_k(f, flatten_weights(weights), W);
}

unsigned encode_matsui(CnfFormula& f, const AtMostK& fwd, const AtMostK* bwd, const std::vector<std::size_t>& unit_ends,
                       const std::vector<int>& window_min, int W, MatsuiOptions opt) {
  const std::size_t U = unit_ends.size();
  if (window_min.size() < U + 1) throw Error(ErrorCode::InvalidArgument, "window bounds shorter than the unit count");
  const std::size_t total = U ? unit_ends.back() : 0;
  unsigned added = 0;
  for (std::size_t k = 1; k < U; ++k) {
    const int bound = W - window_min[U - k];
    if (opt.prefix && fwd.bound_prefix(f, unit_ends[k - 1], bound)) ++added;
    if (opt.suffix && bwd) {
      // Trailing k units: literals from unit_ends[U-k-1] to the end.
      std::size_t len = total - unit_ends[U - k - 1];
      if (bwd->bound_prefix(f, len, bound)) ++added;
    }
  }
  return added;
}

void exclude_pattern(CnfFormula& f, const std::vector<std::pair<Lit, bool>>& fixed_bits) {
  Clause c;
  for (const auto& [l, v] : fixed_bits) c.push_back(v ? -l : l);
  f.add_clause(c);
}

void fix_word(CnfFormula& f, const WordVars& w, u64 value) {
  if (value & ~word_mask(w.n())) throw Error(ErrorCode::WidthMismatch, "value wider than the word");
  for (unsigned i = 0; i < w.n(); ++i) f.add_unit(bit_of(value, i) ? w.bits[i] : -w.bits[i]);
}

}  // namespace arxtrail
