#include "arxtrail/diff.hpp"

namespace arxtrail {

DiffTriple::DiffTriple(unsigned width, u64 x, u64 y, u64 z) : n(width), dx(x), dy(y), dz(z) {
  check_width(width);
  u64 m = word_mask(width);
  if ((x | y | z) & ~m) throw Error(ErrorCode::WidthMismatch, "difference wider than " + std::to_string(width) + " bits");
}

u64 carry_diff(const DiffTriple& t) { return t.dc(); }

bool xdp_valid(const DiffTriple& t) {
  u64 dc = t.dc();
  if (dc & 1) return false;
  for (unsigned i = 0; i + 1 < t.n; ++i) {
    int a = bit_of(t.dx, i);
    if (eq3(a, bit_of(t.dy, i), bit_of(t.dz, i)) && bit_of(dc, i + 1) != a) return false;
  }
  return true;
}

std::optional<unsigned> xdp_weight(const DiffTriple& t) {
  if (!xdp_valid(t)) return std::nullopt;
  unsigned w = 0;
  for (unsigned i = 0; i + 1 < t.n; ++i)
    if (!eq3(bit_of(t.dx, i), bit_of(t.dy, i), bit_of(t.dz, i))) ++w;
  return w;
}

BitConstraint classify_bit(const DiffTriple& t, unsigned i) {
  if (i + 1 >= t.n) throw Error(ErrorCode::InvalidArgument, "classify_bit needs 0 <= i <= n-2");
  int x = bit_of(t.dx, i), y = bit_of(t.dy, i), z = bit_of(t.dz, i), c = bit_of(t.dc(), i + 1);
  using O = Operand;
  BitConstraint bc;
  if (eq3(x, y, z)) {
    bc.row = (c == x) ? Row::Free : Row::Contradiction;
    return bc;
  }
  bc.weight_bit = 1;
  if (x == y) {  // (a,a,¬a)
    if (c == x) {
      bc.row = Row::R3;
      bc.input_relation = Relation{O::X, O::Y, false};
      bc.output_relation = Relation{O::Z, O::Carry, false};
      bc.carry_relation = Relation{O::CarryNext, O::X, false};
    } else {
      bc.row = Row::R4;
      bc.input_relation = Relation{O::X, O::Y, true};
      bc.output_relation = Relation{O::Z, O::Carry, true};
      bc.carry_relation = Relation{O::CarryNext, O::Carry, false};
    }
  } else if (x == z) {  // (a,¬a,a)
    if (c == x) {
      bc.row = Row::R5;
      bc.input_relation = Relation{O::Y, O::Carry, true};
      bc.output_relation = Relation{O::Z, O::X, true};
      bc.carry_relation = Relation{O::CarryNext, O::X, false};
    } else {
      bc.row = Row::R7;
      bc.input_relation = Relation{O::Y, O::Carry, false};
      bc.output_relation = Relation{O::Z, O::X, false};
      bc.carry_relation = Relation{O::CarryNext, O::Carry, false};
    }
  } else {  // (¬a,a,a)
    if (c == y) {
      bc.row = Row::R6;
      bc.input_relation = Relation{O::X, O::Carry, true};
      bc.output_relation = Relation{O::Z, O::Y, true};
      bc.carry_relation = Relation{O::CarryNext, O::Y, false};
    } else {
      bc.row = Row::R8;
      bc.input_relation = Relation{O::X, O::Carry, false};
      bc.output_relation = Relation{O::Z, O::Y, false};
      bc.carry_relation = Relation{O::CarryNext, O::Carry, false};
    }
  }
  return bc;
}

namespace {
std::string operand_name(Operand o, unsigned i) {
  switch (o) {
    case Operand::X: return "x_" + std::to_string(i);
    case Operand::Y: return "y_" + std::to_string(i);
    case Operand::Z: return "z_" + std::to_string(i);
    case Operand::Carry: return "c_" + std::to_string(i);
    case Operand::CarryNext: return "c_" + std::to_string(i + 1);
  }
  return "?";
}
}  // namespace

std::string Relation::describe(unsigned i) const {
  return operand_name(lhs, i) + " = " + (negated ? "~" : "") + operand_name(rhs, i);
}

std::string row_name(Row r) {
  switch (r) {
    case Row::Free: return "R1";
    case Row::Contradiction: return "R2";
    case Row::R3: return "R3";
    case Row::R4: return "R4";
    case Row::R5: return "R5";
    case Row::R6: return "R6";
    case Row::R7: return "R7";
    case Row::R8: return "R8";
  }
  return "?";
}

}  // namespace arxtrail
