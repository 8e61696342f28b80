#pragma once
#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "arxtrail/ciphers.hpp"
#include "arxtrail/cma.hpp"
#include "arxtrail/trail.hpp"

namespace arxtrail {

// Number of pairs (x, y) among 2^{2n} that follow t. n <= 12.
std::uint64_t bruteforce_xdp(const DiffTriple& t);

// Frequency of each output value z = x + y over all (x, y) following t. n <= 12.
std::vector<std::uint64_t> output_histogram(const DiffTriple& t);

// Exact count over all fresh inputs of a chain (at most 28 fresh bits).
std::uint64_t bruteforce_chain(const ChainSpec& s);
std::uint64_t bruteforce_cma(const CmaSpec& s);

// Straight-line toy round functions (independent of the circuit builder).
void toy_speck_round(const CipherSpec& c, unsigned round, u64& x, u64& y);
void toy_chaskey_round(const CipherSpec& c, u64 v[4]);

enum class EmpiricalMode { FullTraversal, Sample };

struct EmpiricalReport {
  EmpiricalMode mode = EmpiricalMode::FullTraversal;
  std::uint64_t pairs = 0;                  // plaintexts tested
  std::vector<std::uint64_t> survivors;     // after each round
  std::vector<double> round_weights;        // -log2 of conditional survival per round
  double total_weight = 0;                  // -log2(survivors at the end / pairs)
  std::uint64_t seed = 0;
};

// Runs plaintext pairs with the trail's input difference through a toy
// cipher, counting pairs that match every row so far. FullTraversal needs a
// block of at most 32 bits; Sample draws `samples` plaintexts from a seeded
// counter-based generator.
EmpiricalReport empirical_trail(const CipherSpec& c, const Trail& t, EmpiricalMode mode, std::uint64_t samples = 0,
                                std::uint64_t seed = 1, unsigned jobs = 0);

nlohmann::json to_json(const EmpiricalReport& r);

}  // namespace arxtrail
