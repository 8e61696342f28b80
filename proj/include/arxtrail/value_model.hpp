#pragma once
#include <string>
#include <vector>

#include "arxtrail/cnf.hpp"
#include "arxtrail/diff.hpp"

namespace arxtrail {

// An n-bit word as literals, index 0 = LSB. Literals may be negated or shared
// (rotations and constant XORs are pure rewiring).
struct WordVars {
  std::vector<Lit> bits;
  std::string label;
  unsigned n() const { return static_cast<unsigned>(bits.size()); }
};

// Allocates n fresh variables and registers them as group `label` (if non-empty).
WordVars new_word(CnfFormula& f, unsigned n, const std::string& label);

enum class LinearKind { RotateRight, RotateLeft, XorConst, XorVars };

struct LinearOp {
  LinearKind kind = LinearKind::RotateRight;
  unsigned amount = 0;
  u64 constant = 0;
  const WordVars* other = nullptr;  // XorVars
};

WordVars encode_linear(CnfFormula& f, const WordVars& in, const LinearOp& op);
WordVars rotr_word(const WordVars& w, unsigned r);
WordVars rotl_word(const WordVars& w, unsigned r);
WordVars xor_const_word(const WordVars& w, u64 k);
WordVars xor_words(CnfFormula& f, const WordVars& a, const WordVars& b, const std::string& label = {});

// Value transition of z = x + y under differential t. c holds carries
// c_0..c_{n-1}; c_0 is forced to 0. `bits` limits the encoding to bits
// 0..bits-1 (0 = full width); higher bits of z and c are left unconstrained.
// Throws InvalidDifferential when t is not a valid differential.
void encode_modadd_state(CnfFormula& f, const WordVars& x, const WordVars& y, const WordVars& z, const WordVars& c,
                         const DiffTriple& t, unsigned bits = 0);

// Allocates z and carry words and encodes the addition; returns z.
WordVars add_state(CnfFormula& f, const WordVars& x, const WordVars& y, const DiffTriple& t, const std::string& label,
                   unsigned bits = 0);

u64 decode_word(const WordVars& w, const std::vector<bool>& model);

}  // namespace arxtrail
