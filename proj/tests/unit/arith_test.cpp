#include <doctest.h>

#include <random>

#include "arxtrail/diff.hpp"
#include "arxtrail/oracle.hpp"
#include "helpers.hpp"

using namespace arxtrail;

TEST_CASE("carry difference") {
  CHECK(carry_diff(DiffTriple(6, 0, 0, 0)) == 0);
  CHECK(carry_diff(DiffTriple(6, 0b000000, 0b001100, 0b010100)) == 0b011000);
  CHECK(carry_diff(DiffTriple(6, 0b010000, 0b010000, 0b000000)) == 0);
  CHECK_THROWS_AS(DiffTriple(4, 0x10, 0, 0), Error);
}

TEST_CASE("weights of the worked examples") {
  CHECK(xdp_weight(DiffTriple(6, 0b000000, 0b001100, 0b010100)) == 3u);
  CHECK(xdp_weight(DiffTriple(6, 0b010000, 0b010000, 0b000000)) == 1u);
  CHECK(xdp_weight(DiffTriple(6, 0, 0, 0)) == 0u);
  CHECK(bruteforce_xdp(DiffTriple(6, 0b000000, 0b001100, 0b010100)) == (1u << 12) / 8);
  CHECK(bruteforce_xdp(DiffTriple(5, 0, 0, 0)) == (1u << 10));
}

TEST_CASE("validity and weight match exhaustive pair counting for n <= 6") {
  for (unsigned n = 1; n <= 6; ++n) {
    const u64 m = word_mask(n);
    for (u64 dx = 0; dx <= m; ++dx)
      for (u64 dy = 0; dy <= m; ++dy)
        for (u64 dz = 0; dz <= m; ++dz) {
          DiffTriple t(n, dx, dy, dz);
          const auto count = bruteforce_xdp(t);
          const auto w = xdp_weight(t);
          REQUIRE(xdp_valid(t) == (count > 0));
          if (w) REQUIRE((count << *w) == (std::uint64_t{1} << (2 * n)));
        }
  }
}

TEST_CASE("classification rows") {
  // (dx_0, dy_0, dz_0) = (1, 0, 0) with dc_1 = 1.
  DiffTriple t(4, 0b0001, 0b0000, 0b0010);
  BitConstraint b = classify_bit(t, 0);
  CHECK(b.row == Row::R8);
  CHECK(b.weight_bit == 1);
  REQUIRE(b.input_relation);
  CHECK(b.input_relation->describe(0) == "x_0 = c_0");
  REQUIRE(b.output_relation);
  CHECK(b.output_relation->describe(0) == "z_0 = y_0");
  REQUIRE(b.carry_relation);
  CHECK(b.carry_relation->describe(0) == "c_1 = c_0");

  DiffTriple free_bit(4, 0, 0, 0);
  CHECK(classify_bit(free_bit, 1).row == Row::Free);
  CHECK_FALSE(classify_bit(free_bit, 1).carry_relation.has_value());

  DiffTriple contra(4, 0b0000, 0b0000, 0b0010);  // eq at bit 0, dc_1 = 1
  CHECK(classify_bit(contra, 0).row == Row::Contradiction);
  CHECK(classify_bit(contra, 0).invalid());
}

TEST_CASE("weight counts rows 3-8 and contradictions mark invalid triples") {
  for (unsigned n = 2; n <= 5; ++n) {
    const u64 m = word_mask(n);
    for (u64 dx = 0; dx <= m; ++dx)
      for (u64 dy = 0; dy <= m; ++dy)
        for (u64 dz = 0; dz <= m; ++dz) {
          DiffTriple t(n, dx, dy, dz);
          unsigned rows38 = 0;
          bool contradiction = false;
          for (unsigned i = 0; i + 1 < n; ++i) {
            auto b = classify_bit(t, i);
            if (b.row == Row::Contradiction) contradiction = true;
            if (b.row != Row::Free && b.row != Row::Contradiction) ++rows38;
            REQUIRE(b.weight_bit == (b.row != Row::Free && b.row != Row::Contradiction ? 1 : 0));
          }
          if ((carry_diff(t) & 1) == 0) REQUIRE(contradiction == !xdp_valid(t));
          if (auto w = xdp_weight(t)) REQUIRE(*w == rows38);
        }
  }
}

TEST_CASE("random n = 8 triples agree with brute force") {
  std::mt19937_64 rng(7);
  for (int k = 0; k < 300; ++k) {
    DiffTriple t(8, rng() & 0xff, rng() & 0xff, rng() & 0xff);
    if (k % 2) t = testing_support::random_valid(rng, 8);
    const auto count = bruteforce_xdp(t);
    const auto w = xdp_weight(t);
    REQUIRE(w.has_value() == (count > 0));
    if (w) REQUIRE((count << *w) == (std::uint64_t{1} << 16));
  }
}

TEST_CASE("word parsing and formatting") {
  CHECK(parse_word("0b0101", 4) == 5);
  CHECK(parse_word("0x1f", 8) == 0x1f);
  CHECK(parse_word("17", 8) == 17);
  CHECK_THROWS_AS(parse_word("0x100", 8), Error);
  CHECK_THROWS_AS(parse_word("0bx", 8), Error);
  CHECK(format_hex(0x78000, 32) == "0x00078000");
  CHECK(format_bin(5, 4) == "0b0101");
  CHECK(rotr(0b0001, 1, 4) == 0b1000);
  CHECK(rotl(0b1000, 1, 4) == 0b0001);
}
