#pragma once
#include <optional>
#include <string>
#include <vector>

#include "arxtrail/diff.hpp"

namespace arxtrail {

enum class OutputKind { Uniform, TiedToFreshInput, FixedValue, TiedToOutputBit, CarryChain };

// Where a carry chain bottoms out.
enum class ChainBase {
  Zero,        // reaches c_0 = 0
  OutputBit,   // c_{k+1} = ~z_k (rows 4-6 at bit k)
  FreshInput,  // c_{k+1} = x_k = y_k (row 3 at bit k)
};

struct OutputBitDescriptor {
  unsigned bit = 0;
  OutputKind kind = OutputKind::Uniform;
  bool non_uniform = false;  // z_i = c_i or z_i = ~c_i

  int fixed_value = 0;  // FixedValue

  // TiedToOutputBit: z_bit = tied_bit, negated when tied_negated.
  unsigned tied_bit = 0;
  bool tied_negated = false;

  // CarryChain. sign_negative: z_i = ~c_i.
  bool sign_negative = false;
  int chain_start = -1;                  // highest bit j of the chain below i
  std::vector<unsigned> skipped;         // rows 7/8 passed through (c_{t+1} = c_t)
  std::vector<unsigned> carry_bits;      // row-1 bits feeding the carry function, descending
  ChainBase base = ChainBase::Zero;
  int base_bit = -1;                     // k for OutputBit / FreshInput

  std::string describe() const;
};

// Premise bits must all be equal (or all 1 for a Zero base) to force z_target.
struct ForcedImplication {
  std::vector<unsigned> premise;  // descending
  bool premise_all_ones = false;  // Zero base: premise is z_t = 1 for all t
  unsigned target = 0;
  // Zero base: forced value. Otherwise z_target = z_{premise[0]} xor flip.
  int value = 0;
  bool flip = false;
  std::string describe() const;
};

std::vector<OutputBitDescriptor> output_constraints(const DiffTriple& t);
std::optional<ForcedImplication> forced_pattern_check(const OutputBitDescriptor& d);

enum class Side { Output, Input };

struct AdjacencyVectors {
  unsigned n = 0;
  u64 a1 = 0, a2 = 0, a3 = 0, bN = 0, bE = 0;
};

AdjacencyVectors adjacency_vectors(const DiffTriple& t, Side side);

struct ConflictRecord {
  unsigned bit = 0;       // i in M2 coordinates: bits i, i+1, i+2 are recorded
  bool m1_neq = false;    // M1 imposes z_{i+1} = ~z_i (else z_{i+1} = z_i)
  // Difference bits of the five words at positions i..i+2. Index 0..4 is
  // dx, dy, dz (M1 coordinates, aligned), du, dv (M2 coordinates); with dzz
  // implied by dz through the glue.
  std::vector<std::pair<std::string, std::vector<int>>> bits;
  std::string describe() const;
};

struct ConflictReport {
  u64 q = 0;
  std::vector<ConflictRecord> records;
};

// Glue between two additions: zz = rotr(z xor k, r).
struct Glue {
  unsigned rot = 0;
  u64 xor_const = 0;
  bool operator==(const Glue&) const = default;
};

// out_vecs from M1 (output side) must already be aligned to M2 coordinates.
ConflictReport detect_adjacent_conflict(const AdjacencyVectors& out_vecs, const AdjacencyVectors& in_vecs);

// Full detection for a pair with glue: aligns M1 vectors through the rotation,
// masks wrapped positions and fills per-bit difference records.
ConflictReport detect_pair_conflict(const DiffTriple& m1, const Glue& glue, const DiffTriple& m2);

struct NonIndepPosition {
  unsigned m2_bit = 0;  // position in M2 coordinates
  unsigned m1_bit = 0;  // same intermediate bit in M1 coordinates
};

std::vector<NonIndepPosition> detect_nonindep_positions(const DiffTriple& m1, const Glue& glue, const DiffTriple& m2);

}  // namespace arxtrail
