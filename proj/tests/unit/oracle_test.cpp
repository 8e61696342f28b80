#include <doctest.h>

#include "arxtrail/ciphers.hpp"
#include "arxtrail/oracle.hpp"
#include "arxtrail/search.hpp"
#include "helpers.hpp"

using namespace arxtrail;
using testing_support::fixture;

TEST_CASE("brute-force pair counts") {
  CHECK(bruteforce_xdp(DiffTriple(6, 0b000000, 0b001100, 0b010100)) * 8 == (1u << 12));
  CHECK(bruteforce_xdp(DiffTriple(6, 0, 0, 0)) == (1u << 12));
  CHECK(bruteforce_xdp(DiffTriple(6, 0, 0, 1)) == 0);
  CHECK_THROWS_AS(bruteforce_xdp(DiffTriple(13, 0, 0, 0)), Error);
  for (u64 a = 0; a < 32; ++a)
    for (u64 b = 0; b < 32; ++b)
      for (u64 c = 0; c < 32; ++c) {
        DiffTriple t(5, a, b, c);
        auto w = xdp_weight(t);
        REQUIRE((bruteforce_xdp(t) > 0) == w.has_value());
      }
}

TEST_CASE("empirical traversal of the zero trail keeps every pair") {
  CipherSpec c = make_cipher("toy-speck-14");
  ArxCircuit g = build_circuit(c, 3);
  Trail t = make_trail(c, g, 3, std::vector<u64>(g.wire_count(), 0));
  auto r = empirical_trail(c, t, EmpiricalMode::FullTraversal, 0, 1, 2);
  CHECK(r.pairs == (1u << 14));
  CHECK(r.survivors.back() == r.pairs);
  CHECK(r.total_weight == doctest::Approx(0));
}

TEST_CASE("sampling is reproducible and independent of the thread count") {
  Trail t = load_trail(fixture("trails/toy_chaskey32_r5.json"));
  CipherSpec c = make_cipher(t.cipher);
  auto a = empirical_trail(c, t, EmpiricalMode::Sample, 1 << 20, 42, 1);
  auto b = empirical_trail(c, t, EmpiricalMode::Sample, 1 << 20, 42, 4);
  auto d = empirical_trail(c, t, EmpiricalMode::Sample, 1 << 20, 43, 4);
  CHECK(a.survivors == b.survivors);
  CHECK(a.seed == 42);
  CHECK(a.survivors.front() != d.survivors.front());
}

TEST_CASE("full traversal matches the optimal toy trail's survival count") {
  CipherSpec c = make_cipher("toy-speck-14");
  auto trails = enumerate_trails(c, testing_support::internal_cfg(), 1, 20, 1);
  REQUIRE(trails.size() == 1);
  auto r = empirical_trail(c, trails[0], EmpiricalMode::FullTraversal);
  // One round is a single addition: survival equals its exact probability.
  const auto& row0 = trails[0].row(0);
  const auto& row1 = trails[0].row(1);
  DiffTriple t(c.n, rotr(row0.at("x"), c.alpha, c.n), row0.at("y"), row1.at("x"));
  CHECK(r.pairs == (1u << (2 * c.n)));
  CHECK(r.survivors.back() == bruteforce_xdp(t));
}
