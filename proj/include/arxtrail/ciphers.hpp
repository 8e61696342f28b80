#pragma once
#include <array>
#include <map>
#include <string>
#include <vector>

#include "arxtrail/circuit.hpp"
#include "arxtrail/cma.hpp"
#include "arxtrail/trail.hpp"

namespace arxtrail {

enum class Family { Speck, Chaskey, ToySpeck, ToyChaskey };

struct CipherSpec {
  std::string id;
  Family family = Family::Speck;
  unsigned n = 16;
  unsigned alpha = 7, beta = 2;            // SPECK-like rotations
  std::array<unsigned, 6> rot{};           // Chaskey-like rotations, in round order
  unsigned chain_group = 2;                // additions per refinement unit
};

// Known ids: speck32/64, speck48/96, speck64/128, chaskey, toy-chaskey-32,
// toy-chaskey-28, toy-speck-28, toy-speck-14. "toy-speck-<2n>" builds any
// even block size.
CipherSpec make_cipher(const std::string& id);
std::vector<std::string> cipher_ids();

// Observed words are named "<field>.<row>", for instance "x.3" or "v2.0".
ArxCircuit build_circuit(const CipherSpec& c, unsigned rounds);

// Trail fields held in a row: SPECK l,k,x,y; Chaskey v0..v3; toy SPECK x,y.
std::vector<std::string> row_fields(const CipherSpec& c, unsigned rounds, unsigned row);
// Weight columns: SPECK w_k,w_d; others w.
std::vector<std::string> weight_columns(const CipherSpec& c);

struct TrailDiffs {
  std::vector<u64> inputs;   // circuit input order
  std::vector<u64> site_dz;  // one per addition site
  std::vector<u64> wires;    // propagated wire differences
  std::vector<DiffTriple> triples;
};

// Derives every addition's differences from a trail and checks that the
// propagated words agree with each word the trail lists.
TrailDiffs trail_differences(const CipherSpec& c, const ArxCircuit& circ, const Trail& t);

// Per-row weight columns from per-site weights.
std::vector<std::map<std::string, double>> row_weights(const CipherSpec& c, const ArxCircuit& circ, unsigned rounds,
                                                       const std::vector<double>& site_weights);

// Builds a trail from propagated wire differences (used for search output).
Trail make_trail(const CipherSpec& c, const ArxCircuit& circ, unsigned rounds, const std::vector<u64>& wires);

// Differences the trail lists against the weights recomputed from them.
struct WeightMismatch {
  unsigned row = 0;
  std::string column;
  double stored = 0, recomputed = 0;
};
std::vector<WeightMismatch> check_trail_weights(const CipherSpec& c, const Trail& t);

// Consecutive units for Matsui bounds (site indices per unit). A window of k
// units corresponds to k + units_round_offset(c) rounds.
std::vector<std::vector<int>> matsui_units(const CipherSpec& c, const ArxCircuit& circ, unsigned rounds);
unsigned units_round_offset(const CipherSpec& c);

// Consecutive-addition units for refinement. Each chain lists its sites in
// order; chain_group 2 yields overlapping pairs, larger groups partition each
// addition chain.
struct CmaRef {
  std::vector<int> sites;
  ChainSpec spec;
};
std::vector<CmaRef> enumerate_cmas(const CipherSpec& c, const ArxCircuit& circ, const std::vector<DiffTriple>& triples);

// Input names of the weak key (SPECK: l2, l1, l0, k0), empty otherwise.
std::vector<std::string> key_inputs(const CipherSpec& c);

}  // namespace arxtrail
