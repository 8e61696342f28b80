#include "arxtrail/constraints.hpp"

#include <sstream>

namespace arxtrail {

namespace {

OutputBitDescriptor resolve_carry_chain(const DiffTriple& t, unsigned i, bool negative) {
  OutputBitDescriptor d;
  d.bit = i;
  d.non_uniform = true;
  d.sign_negative = negative;

  // Walk c_i downwards until the chain is grounded.
  unsigned pos = i;
  bool grounded = false;
  while (!grounded) {
    if (pos == 0) {
      d.base = ChainBase::Zero;
      break;
    }
    unsigned j = pos - 1;
    switch (classify_bit(t, j).row) {
      case Row::R7:
      case Row::R8:
        d.skipped.push_back(j);
        pos = j;
        break;
      case Row::Free:
        d.carry_bits.push_back(j);
        pos = j;
        break;
      case Row::R3:
        d.base = ChainBase::FreshInput;
        d.base_bit = static_cast<int>(j);
        grounded = true;
        break;
      case Row::R4:
      case Row::R5:
      case Row::R6:
        d.base = ChainBase::OutputBit;
        d.base_bit = static_cast<int>(j);
        grounded = true;
        break;
      case Row::Contradiction:
        throw Error(ErrorCode::InvalidDifferential, "invalid differential in carry chain");
    }
  }
  d.chain_start = d.carry_bits.empty() ? d.base_bit : static_cast<int>(d.carry_bits.front());

  if (d.carry_bits.empty()) {
    switch (d.base) {
      case ChainBase::Zero:
        d.kind = OutputKind::FixedValue;
        d.fixed_value = negative ? 1 : 0;
        break;
      case ChainBase::OutputBit:
        d.kind = OutputKind::TiedToOutputBit;
        d.tied_bit = static_cast<unsigned>(d.base_bit);
        d.tied_negated = !negative;
        break;
      case ChainBase::FreshInput:
        d.kind = OutputKind::TiedToFreshInput;
        break;
    }
  } else {
    d.kind = OutputKind::CarryChain;
  }
  return d;
}

std::string join_bits(const std::vector<unsigned>& v) {
  std::string s;
  for (std::size_t k = 0; k < v.size(); ++k) s += (k ? "," : "") + std::to_string(v[k]);
  return s;
}

}  // namespace

std::vector<OutputBitDescriptor> output_constraints(const DiffTriple& t) {
  if (!xdp_valid(t)) throw Error(ErrorCode::InvalidDifferential, "output_constraints needs a valid differential");
  std::vector<OutputBitDescriptor> out(t.n);
  for (unsigned i = 0; i < t.n; ++i) {
    out[i].bit = i;
    if (i + 1 >= t.n) continue;  // top bit: x_{n-1} is free
    switch (classify_bit(t, i).row) {
      case Row::R3: out[i] = resolve_carry_chain(t, i, false); break;
      case Row::R4: out[i] = resolve_carry_chain(t, i, true); break;
      case Row::R5:
      case Row::R6:
      case Row::R7:
      case Row::R8: out[i].kind = OutputKind::TiedToFreshInput; break;
      default: break;
    }
  }
  return out;
}

std::optional<ForcedImplication> forced_pattern_check(const OutputBitDescriptor& d) {
  if (d.kind != OutputKind::CarryChain || d.base == ChainBase::FreshInput) return std::nullopt;
  ForcedImplication f;
  f.target = d.bit;
  f.premise = d.carry_bits;
  if (d.base == ChainBase::Zero) {
    f.premise_all_ones = true;
    f.value = d.sign_negative ? 1 : 0;
  } else {
    f.premise.push_back(static_cast<unsigned>(d.base_bit));
    f.flip = !d.sign_negative;
  }
  return f;
}

std::string OutputBitDescriptor::describe() const {
  std::ostringstream os;
  os << "z_" << bit << ": ";
  switch (kind) {
    case OutputKind::Uniform: os << "uniform"; break;
    case OutputKind::TiedToFreshInput: os << "tied to a fresh input bit"; break;
    case OutputKind::FixedValue: os << "fixed to " << fixed_value; break;
    case OutputKind::TiedToOutputBit: os << "= " << (tied_negated ? "~" : "") << "z_" << tied_bit; break;
    case OutputKind::CarryChain: {
      os << "= " << (sign_negative ? "~" : "") << "f_carry(x[" << carry_bits.front() << "," << carry_bits.back()
         << "], y[" << carry_bits.front() << "," << carry_bits.back() << "], ";
      if (base == ChainBase::Zero)
        os << "0)";
      else if (base == ChainBase::OutputBit)
        os << "~z_" << base_bit << ")";
      else
        os << "x_" << base_bit << ")";
      if (!skipped.empty()) os << " skipping " << join_bits(skipped);
      break;
    }
  }
  return os.str();
}

std::string ForcedImplication::describe() const {
  std::ostringstream os;
  if (premise_all_ones) {
    for (std::size_t k = 0; k < premise.size(); ++k) os << (k ? "=" : "") << "z_" << premise[k];
    os << "=1 => z_" << target << "=" << value;
  } else {
    for (std::size_t k = 0; k < premise.size(); ++k) os << (k ? "=" : "") << "z_" << premise[k];
    os << " => z_" << target << " = " << (flip ? "~" : "") << "z_" << premise.front();
  }
  return os.str();
}

AdjacencyVectors adjacency_vectors(const DiffTriple& t, Side side) {
  const unsigned n = t.n;
  const u64 m = word_mask(n);
  const u64 valid_a = n >= 2 ? word_mask(n - 1) : 0;  // rows exist for bits 0..n-2
  const u64 valid_b = n >= 3 ? word_mask(n - 2) : 0;  // adjacency for bits 0..n-3
  const u64 ds = (t.dc() >> 1) & m;
  AdjacencyVectors v;
  v.n = n;
  if (side == Side::Output) {
    v.a1 = ~(t.dx ^ t.dy) & ~(t.dy ^ (~t.dz & m)) & ~((~t.dz & m) ^ ds);
    v.a2 = ~(t.dx ^ (~t.dy & m)) & ~(t.dz ^ ds);
    v.a3 = ~(t.dx ^ t.dy) & ~(t.dy ^ (~t.dz & m)) & ~(t.dz ^ ds);
  } else {
    // Here dx is the linked input z, dy the fresh input u, dz the output v.
    v.a1 = ~(t.dx ^ (~t.dy & m)) & ~(t.dy ^ t.dz) & ~(t.dz ^ ds);
    v.a2 = ~(t.dy ^ (~t.dz & m)) & ~(t.dx ^ ds);
    v.a3 = ~(t.dx ^ (~t.dy & m)) & ~(t.dy ^ t.dz) & ~(t.dx ^ ds);
  }
  v.a1 &= valid_a;
  v.a2 &= valid_a;
  v.a3 &= valid_a;
  v.bN = (v.a1 >> 1) & (v.a2 | v.a3) & valid_b;
  v.bE = (v.a3 >> 1) & (v.a2 | v.a3) & valid_b;
  return v;
}

ConflictReport detect_adjacent_conflict(const AdjacencyVectors& out_vecs, const AdjacencyVectors& in_vecs) {
  if (out_vecs.n != in_vecs.n) throw Error(ErrorCode::WidthMismatch, "adjacency vectors of different widths");
  ConflictReport r;
  r.q = (out_vecs.bN & in_vecs.bE) | (out_vecs.bE & in_vecs.bN);
  for (unsigned i = 0; i < out_vecs.n; ++i) {
    if (!bit_of(r.q, i)) continue;
    ConflictRecord rec;
    rec.bit = i;
    rec.m1_neq = bit_of(out_vecs.bN & in_vecs.bE, i);
    r.records.push_back(rec);
  }
  return r;
}

namespace {
std::vector<int> bits3(u64 w, unsigned at, unsigned n) {
  std::vector<int> v;
  for (unsigned k = 0; k < 3 && at + k < n; ++k) v.push_back(bit_of(w, at + k));
  return v;
}
}  // namespace

ConflictReport detect_pair_conflict(const DiffTriple& m1, const Glue& glue, const DiffTriple& m2) {
  if (m1.n != m2.n) throw Error(ErrorCode::WidthMismatch, "CMA additions of different widths");
  const unsigned n = m1.n;
  AdjacencyVectors out = adjacency_vectors(m1, Side::Output);
  AdjacencyVectors in = adjacency_vectors(m2, Side::Input);
  const u64 valid_b = n >= 3 ? word_mask(n - 2) : 0;
  // XOR with a constant whose bits t and t+1 differ swaps "equal" and "not equal".
  const u64 flip = (glue.xor_const ^ (glue.xor_const >> 1)) & word_mask(n);
  const u64 bN = (out.bN & ~flip) | (out.bE & flip);
  const u64 bE = (out.bE & ~flip) | (out.bN & flip);
  AdjacencyVectors aligned = out;
  aligned.bN = rotr(bN, glue.rot, n) & valid_b;
  aligned.bE = rotr(bE, glue.rot, n) & valid_b;
  ConflictReport rep = detect_adjacent_conflict(aligned, in);
  for (auto& rec : rep.records) {
    unsigned t = (rec.bit + glue.rot) % n;
    rec.bits = {{"dx", bits3(m1.dx, t, n)}, {"dy", bits3(m1.dy, t, n)}, {"dz", bits3(m1.dz, t, n)},
                {"du", bits3(m2.dy, rec.bit, n)}, {"dv", bits3(m2.dz, rec.bit, n)}};
  }
  return rep;
}

std::string ConflictRecord::describe() const {
  std::ostringstream os;
  os << "zz_" << bit + 1 << (m1_neq ? " = ~" : " = ") << "zz_" << bit << " from M1 conflicts with zz_" << bit + 1
     << (m1_neq ? " = " : " = ~") << "zz_" << bit << " from M2";
  return os.str();
}

std::vector<NonIndepPosition> detect_nonindep_positions(const DiffTriple& m1, const Glue& glue, const DiffTriple& m2) {
  if (m1.n != m2.n) throw Error(ErrorCode::WidthMismatch, "CMA additions of different widths");
  const unsigned n = m1.n;
  if (rotr(m1.dz, glue.rot, n) != m2.dx)
    throw Error(ErrorCode::InvalidArgument, "second addition's linked input difference does not match the glued output");
  std::vector<NonIndepPosition> out;
  for (unsigned b = 0; b + 1 < n; ++b) {
    unsigned t = (b + glue.rot) % n;
    if (t + 1 >= n) continue;
    int x = bit_of(m1.dx, t), y = bit_of(m1.dy, t), z = bit_of(m1.dz, t);
    int u = bit_of(m2.dy, b), v = bit_of(m2.dz, b);
    if (x == y && z != x && u == x && v == x) out.push_back({b, t});
  }
  return out;
}

}  // namespace arxtrail
