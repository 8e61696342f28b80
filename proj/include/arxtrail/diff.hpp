#pragma once
#include <optional>
#include <string>
#include <vector>

#include "arxtrail/word.hpp"

namespace arxtrail {

// Input/output differences of one n-bit modular addition z = x + y.
struct DiffTriple {
  unsigned n = 0;
  u64 dx = 0, dy = 0, dz = 0;

  DiffTriple() = default;
  DiffTriple(unsigned width, u64 x, u64 y, u64 z);

  u64 dc() const { return (dx ^ dy ^ dz) & word_mask(n); }
  bool operator==(const DiffTriple&) const = default;
};

enum class Row { Free = 1, Contradiction = 2, R3, R4, R5, R6, R7, R8 };

// Operands a relation may mention at bit i. CarryNext is c_{i+1}.
enum class Operand { X, Y, Z, Carry, CarryNext };

// lhs = rhs (or lhs = ¬rhs when negated).
struct Relation {
  Operand lhs;
  Operand rhs;
  bool negated = false;
  std::string describe(unsigned i) const;
};

struct BitConstraint {
  Row row = Row::Free;
  std::optional<Relation> input_relation;
  std::optional<Relation> output_relation;
  std::optional<Relation> carry_relation;  // empty for Free: carry is the plain carry function
  int weight_bit = 0;

  bool invalid() const { return row == Row::Contradiction; }
};

u64 carry_diff(const DiffTriple& t);
bool xdp_valid(const DiffTriple& t);
// Number of non-equal positions among bits 0..n-2, or nullopt for an invalid triple.
std::optional<unsigned> xdp_weight(const DiffTriple& t);
BitConstraint classify_bit(const DiffTriple& t, unsigned i);

std::string row_name(Row r);
inline bool eq3(int a, int b, int c) { return a == b && b == c; }

}  // namespace arxtrail
