#include "arxtrail/value_model.hpp"

namespace arxtrail {

namespace {

void xor3_clauses(CnfFormula& f, Lit z, Lit x, Lit y, Lit c) {
  // z = x ^ y ^ c: forbid every assignment of odd parity over (z, x, y, c).
  for (int m = 0; m < 16; ++m) {
    int parity = __builtin_popcount(static_cast<unsigned>(m)) & 1;
    if (!parity) continue;
    Lit lits[4] = {z, x, y, c};
    Clause cl;
    for (int k = 0; k < 4; ++k) cl.push_back(((m >> k) & 1) ? -lits[k] : lits[k]);
    f.add_clause(cl);
  }
}

void carry_clauses(CnfFormula& f, Lit cn, Lit c, Lit x, Lit y) {
  f.add_clause({cn, -c, -y});
  f.add_clause({cn, c, -x, -y});
  f.add_clause({-cn, c, x});
  f.add_clause({cn, -c, x, -y});
  f.add_clause({-cn, c, y});
  f.add_clause({cn, -c, -x, y});
  f.add_clause({-cn, x, y});
}

void relation_clauses(CnfFormula& f, const Relation& r, Lit x, Lit y, Lit z, Lit c, Lit cn) {
  auto pick = [&](Operand o) {
    switch (o) {
      case Operand::X: return x;
      case Operand::Y: return y;
      case Operand::Z: return z;
      case Operand::Carry: return c;
      case Operand::CarryNext: return cn;
    }
    return x;
  };
  Lit a = pick(r.lhs), b = pick(r.rhs);
  encode_gadget(f, r.negated ? Gadget::Neq : Gadget::Eq, {a, b});
}

}  // namespace

WordVars new_word(CnfFormula& f, unsigned n, const std::string& label) {
  WordVars w;
  w.label = label;
  int first = f.new_vars(static_cast<int>(n));
  std::vector<int> vars;
  for (unsigned i = 0; i < n; ++i) {
    w.bits.push_back(first + static_cast<int>(i));
    vars.push_back(first + static_cast<int>(i));
  }
  if (!label.empty()) f.add_group(label, vars);
  return w;
}

WordVars rotl_word(const WordVars& w, unsigned r) {
  const unsigned n = w.n();
  WordVars out;
  out.label = w.label;
  out.bits.resize(n);
  if (n == 0) return out;
  r %= n;
  for (unsigned i = 0; i < n; ++i) out.bits[(i + r) % n] = w.bits[i];
  return out;
}

WordVars rotr_word(const WordVars& w, unsigned r) {
  const unsigned n = w.n();
  return n == 0 ? w : rotl_word(w, (n - r % n) % n);
}

WordVars xor_const_word(const WordVars& w, u64 k) {
  WordVars out = w;
  for (unsigned i = 0; i < w.n(); ++i)
    if (bit_of(k, i)) out.bits[i] = -out.bits[i];
  return out;
}

WordVars xor_words(CnfFormula& f, const WordVars& a, const WordVars& b, const std::string& label) {
  if (a.n() != b.n()) throw Error(ErrorCode::WidthMismatch, "xor of words with different widths");
  WordVars out = new_word(f, a.n(), label);
  for (unsigned i = 0; i < a.n(); ++i) encode_gadget(f, Gadget::XorOut, {out.bits[i], a.bits[i], b.bits[i]});
  return out;
}

WordVars encode_linear(CnfFormula& f, const WordVars& in, const LinearOp& op) {
  if ((op.kind == LinearKind::RotateLeft || op.kind == LinearKind::RotateRight) && op.amount >= in.n() && in.n() > 0)
    throw Error(ErrorCode::InvalidArgument, "rotation amount must be below the word size");
  switch (op.kind) {
    case LinearKind::RotateRight: return rotr_word(in, op.amount);
    case LinearKind::RotateLeft: return rotl_word(in, op.amount);
    case LinearKind::XorConst:
      if (op.constant & ~word_mask(in.n())) throw Error(ErrorCode::WidthMismatch, "constant wider than the word");
      return xor_const_word(in, op.constant);
    case LinearKind::XorVars:
      if (!op.other) throw Error(ErrorCode::InvalidArgument, "xor with a missing word");
      return xor_words(f, in, *op.other);
  }
  return in;
}

void encode_modadd_state(CnfFormula& f, const WordVars& x, const WordVars& y, const WordVars& z, const WordVars& c,
                         const DiffTriple& t, unsigned bits) {
  const unsigned n = t.n;
  if (x.n() != n || y.n() != n || z.n() != n || c.n() != n)
    throw Error(ErrorCode::WidthMismatch, "word widths do not match the differential");
  if (!xdp_valid(t)) throw Error(ErrorCode::InvalidDifferential, "differential is impossible through modular addition");
  if (bits == 0 || bits > n) bits = n;
  f.add_unit(-c.bits[0]);
  for (unsigned i = 0; i < bits; ++i) {
    const Lit xi = x.bits[i], yi = y.bits[i], zi = z.bits[i], ci = c.bits[i];
    if (i == 0)
      encode_gadget(f, Gadget::XorOut, {zi, xi, yi});
    else
      xor3_clauses(f, zi, xi, yi, ci);
    if (i + 1 >= n) break;  // top bit has no carry-out
    const Lit cn = c.bits[i + 1];
    BitConstraint bc = classify_bit(t, i);
    if (bc.row == Row::Free) {
      carry_clauses(f, cn, ci, xi, yi);
      continue;
    }
    relation_clauses(f, *bc.input_relation, xi, yi, zi, ci, cn);
    relation_clauses(f, *bc.output_relation, xi, yi, zi, ci, cn);
    relation_clauses(f, *bc.carry_relation, xi, yi, zi, ci, cn);
  }
}

WordVars add_state(CnfFormula& f, const WordVars& x, const WordVars& y, const DiffTriple& t, const std::string& label,
                   unsigned bits) {
  WordVars z = new_word(f, t.n, label);
  WordVars c = new_word(f, t.n, label.empty() ? std::string() : label + ".carry");
  encode_modadd_state(f, x, y, z, c, t, bits);
  return z;
}

u64 decode_word(const WordVars& w, const std::vector<bool>& model) {
  u64 v = 0;
  for (unsigned i = 0; i < w.n(); ++i) {
    Lit l = w.bits[i];
    bool b = model.at(static_cast<std::size_t>(l > 0 ? l : -l));
    if (l < 0) b = !b;
    if (b) v |= u64{1} << i;
  }
  return v;
}

}  // namespace arxtrail
