#include <doctest.h>

#include <random>

#include "arxtrail/cma.hpp"
#include "arxtrail/constraints.hpp"
#include "arxtrail/oracle.hpp"
#include "helpers.hpp"

using namespace arxtrail;

namespace {
const DiffTriple kEx1(6, 0b000000, 0b001100, 0b010100);
const DiffTriple kEx2(6, 0b010000, 0b010000, 0b000000);

bool implication_holds(const ForcedImplication& imp, u64 z) {
  if (imp.premise_all_ones) {
    for (unsigned b : imp.premise)
      if (!bit_of(z, b)) return true;
    return bit_of(z, imp.target) == imp.value;
  }
  int first = bit_of(z, imp.premise[0]);
  for (unsigned b : imp.premise)
    if (bit_of(z, b) != first) return true;
  return bit_of(z, imp.target) == (first ^ (imp.flip ? 1 : 0));
}
}  // namespace

TEST_CASE("output descriptors of the worked examples") {
  auto d1 = output_constraints(kEx1);
  REQUIRE(d1.size() == 6);
  CHECK(d1[2].kind == OutputKind::TiedToFreshInput);
  CHECK(d1[3].kind == OutputKind::TiedToFreshInput);
  CHECK(d1[4].kind == OutputKind::TiedToOutputBit);
  CHECK(d1[4].tied_bit == 2);
  CHECK(d1[4].tied_negated);

  auto d2 = output_constraints(kEx2);
  CHECK(d2[4].kind == OutputKind::CarryChain);
  CHECK(d2[4].non_uniform);
  CHECK(d2[4].sign_negative);
  CHECK(d2[4].base == ChainBase::Zero);
  auto imp = forced_pattern_check(d2[4]);
  REQUIRE(imp);
  CHECK(imp->premise == std::vector<unsigned>{3, 2, 1, 0});
  CHECK(imp->premise_all_ones);
  CHECK(imp->target == 4);
  CHECK(imp->value == 1);

  for (const auto& d : output_constraints(DiffTriple(6, 0, 0, 0))) CHECK(d.kind == OutputKind::Uniform);
  CHECK_FALSE(forced_pattern_check(output_constraints(DiffTriple(6, 0, 0, 0))[3]).has_value());
  CHECK_THROWS_AS(output_constraints(DiffTriple(4, 0, 0, 1)), Error);
}

TEST_CASE("output histogram of the second example has empty values 15 and 47") {
  auto h = output_histogram(kEx2);
  CHECK(h[15] == 0);
  CHECK(h[47] == 0);
  std::uint64_t total = 0;
  for (auto v : h) total += v;
  CHECK(total == (1u << 12) / 2);
}

TEST_CASE("forced implications hold on every output of random n = 6 triples") {
  std::mt19937_64 rng(11);
  int checked = 0;
  for (int k = 0; k < 400; ++k) {
    DiffTriple t = testing_support::random_valid(rng, 6);
    auto hist = output_histogram(t);
    for (const auto& d : output_constraints(t)) {
      if (d.kind != OutputKind::CarryChain) continue;
      auto imp = forced_pattern_check(d);
      if (!imp) continue;
      ++checked;
      for (u64 z = 0; z < hist.size(); ++z)
        if (hist[z]) REQUIRE_MESSAGE(implication_holds(*imp, z), imp->describe());
    }
  }
  CHECK(checked > 50);
}

TEST_CASE("adjacency vectors") {
  auto v = adjacency_vectors(DiffTriple(6, 0, 0, 0), Side::Output);
  CHECK((v.a1 | v.a2 | v.a3 | v.bN | v.bE) == 0);
  std::mt19937_64 rng(3);
  for (int k = 0; k < 200; ++k) {
    DiffTriple t = testing_support::random_valid(rng, 8);
    auto o = adjacency_vectors(t, Side::Output);
    CHECK((o.bN & ~(o.a1 >> 1)) == 0);
    CHECK((o.bE & ~(o.a3 >> 1)) == 0);
  }
  CHECK(detect_pair_conflict(DiffTriple(6, 0, 0, 0), Glue{}, DiffTriple(6, 0, 0, 0)).q == 0);
}

TEST_CASE("non-independence positions of the third example") {
  auto spec = load_chain(testing_support::fixture("cma/example_higher.json"));
  auto pos = detect_nonindep_positions(spec.adds[0], spec.glues[0], spec.adds[1]);
  REQUIRE(pos.size() == 1);
  CHECK(pos[0].m2_bit == 3);
  CHECK(detect_nonindep_positions(DiffTriple(6, 0, 0, 0), Glue{}, DiffTriple(6, 0, 0, 0)).empty());
}

TEST_CASE("a reported conflict means the pair has no solutions (exhaustive n = 4)") {
  const unsigned n = 4;
  std::vector<DiffTriple> valid;
  for (u64 a = 0; a < 16; ++a)
    for (u64 b = 0; b < 16; ++b)
      for (u64 c = 0; c < 16; ++c)
        if (xdp_valid(DiffTriple(n, a, b, c))) valid.emplace_back(n, a, b, c);
  unsigned conflicts = 0;
  for (Glue g : {Glue{0, 0}, Glue{1, 0}, Glue{3, 0}, Glue{0, 0b0110}, Glue{1, 0b1011}, Glue{3, 0b0001}})
    for (const auto& m1 : valid)
      for (const auto& m2 : valid) {
        const unsigned rot = g.rot;
        if (m2.dx != rotr(m1.dz, rot, n)) continue;
        auto rep = detect_pair_conflict(m1, g, m2);
        if (rep.q == 0) continue;
        ++conflicts;
        CmaSpec s{n, m1, g, m2};
        REQUIRE(chain_count_dp(s.as_chain()) == 0);
        REQUIRE(bruteforce_cma(s) == 0);
      }
  CHECK(conflicts > 0);
}

TEST_CASE("a reported conflict means the pair has no solutions (random n = 5, 6)") {
  std::mt19937_64 rng(5);
  unsigned conflicts = 0;
  for (int k = 0; k < 20000; ++k) {
    unsigned n = 5 + (k & 1);
    DiffTriple m1 = testing_support::random_valid(rng, n);
    Glue g{static_cast<unsigned>(rng() % n), rng() & word_mask(n)};
    u64 dx = rotr(m1.dz, g.rot, n);
    DiffTriple m2(n, dx, rng() & word_mask(n), rng() & word_mask(n));
    if (!xdp_valid(m2)) continue;
    if (detect_pair_conflict(m1, g, m2).q == 0) continue;
    ++conflicts;
    CmaSpec s{n, m1, g, m2};
    REQUIRE(chain_count_dp(s.as_chain()) == 0);
  }
  CHECK(conflicts > 0);
}
