#include <doctest.h>

#include <algorithm>
#include <limits>
#include <set>

#include "arxtrail/ciphers.hpp"
#include "arxtrail/oracle.hpp"
#include "arxtrail/search.hpp"
#include "arxtrail/verify.hpp"
#include "helpers.hpp"

using namespace arxtrail;
using testing_support::fixture;
using testing_support::internal_cfg;

namespace {
// Best independence weight of r-round toy SPECK trails, by dynamic
// programming over all (dx, dy) states.
std::vector<int> toy_speck_optimum(const CipherSpec& c, unsigned max_rounds) {
  const unsigned n = c.n;
  const u64 m = word_mask(n);
  const std::size_t states = std::size_t{1} << (2 * n);
  const int inf = std::numeric_limits<int>::max() / 2;
  std::vector<int> cost(states, 0), next(states);
  cost[0] = inf;
  std::vector<int> best{0};
  for (unsigned r = 1; r <= max_rounds; ++r) {
    std::fill(next.begin(), next.end(), inf);
    for (std::size_t s = 0; s < states; ++s) {
      if (cost[s] >= inf) continue;
      const u64 dx = s >> n, dy = s & m;
      const u64 a = rotr(dx, c.alpha, n);
      for (u64 dz = 0; dz <= m; ++dz) {
        auto w = xdp_weight(DiffTriple(n, a, dy, dz));
        if (!w) continue;
        const u64 ny = dz ^ rotl(dy, c.beta, n);
        const std::size_t t = (dz << n) | ny;
        next[t] = std::min(next[t], cost[s] + static_cast<int>(*w));
      }
    }
    cost.swap(next);
    best.push_back(*std::min_element(cost.begin(), cost.end()));
  }
  return best;
}

std::string trail_key(const Trail& t) {
  std::string k;
  for (const auto& r : t.rows)
    for (const auto& [f, v] : r.words) k += f + std::to_string(r.round) + "=" + std::to_string(v) + ";";
  return k;
}
}  // namespace

TEST_CASE("refined weight of the 15-round SPECK48/96 trail") {
  Trail t = load_trail(fixture("trails/speck48_96_r15.json"));
  Verdict v = verify_and_refine(make_cipher(t.cipher), t, internal_cfg());
  REQUIRE(v.valid);
  CHECK(v.independence_weight == doctest::Approx(87));
  CHECK(v.refined_weight == doctest::Approx(83.5081).epsilon(1e-6));
  CHECK(v.witness_checked);
  CHECK(v.weak_key.size() == 4);

  VerifyOptions plain;
  plain.refine = false;
  Verdict u = verify_and_refine(make_cipher(t.cipher), t, internal_cfg(), plain);
  CHECK(u.refined_weight == doctest::Approx(u.independence_weight));
}

TEST_CASE("witnesses follow the trail through plain cipher arithmetic") {
  for (const char* f : {"trails/speck64_128_r14.json", "trails/toy_chaskey28_r6.json", "trails/toy_speck28_r8.json"}) {
    CAPTURE(f);
    Trail t = load_trail(fixture(f));
    CipherSpec c = make_cipher(t.cipher);
    Verdict v = verify_and_refine(c, t, internal_cfg());
    REQUIRE(v.valid);
    ArxCircuit g = build_circuit(c, t.rounds);
    TrailDiffs d = trail_differences(c, g, t);
    std::vector<u64> in;
    for (int w : g.inputs()) in.push_back(v.witness.at(g.wire_names()[static_cast<std::size_t>(w)]));
    CHECK(check_witness(g, in, d.wires));
  }
}

TEST_CASE("the conflicting SPECK64/128 trail is invalid at the recorded bits") {
  Trail t = load_trail(fixture("trails/speck64_128_r14_invalid.json"));
  Verdict v = verify_and_refine(make_cipher(t.cipher), t, internal_cfg());
  CHECK_FALSE(v.valid);
  CHECK(v.cause == InvalidCause::Conflict);
  REQUIRE_FALSE(v.conflicts.empty());
  const auto& rep = v.conflicts.front();
  CHECK(rep.spec.names.front() == "M8");
  CHECK(rep.spec.names.back() == "M11");
  CHECK(rep.conflicts.at(0).q == 0x800);
}

TEST_CASE("all-zero trail is valid with weight zero") {
  CipherSpec c = make_cipher("toy-speck-14");
  ArxCircuit g = build_circuit(c, 3);
  Trail t = make_trail(c, g, 3, std::vector<u64>(g.wire_count(), 0));
  Verdict v = verify_and_refine(c, t, internal_cfg());
  CHECK(v.valid);
  CHECK(v.refined_weight == doctest::Approx(0));
}

TEST_CASE("toy SPECK optimum agrees with exhaustive dynamic programming") {
  CipherSpec c = make_cipher("toy-speck-14");
  auto oracle = toy_speck_optimum(c, 3);
  SearchOptions opt;
  opt.rounds = 3;
  auto r = search_optimal(c, internal_cfg(), opt);
  REQUIRE(r.found);
  REQUIRE(r.bounds.size() >= 4);
  for (unsigned k = 1; k <= 3; ++k) CHECK(r.bounds[k] == oracle[k]);
  CHECK(r.weight == oracle[3]);
  CHECK(check_trail_weights(c, r.trail).empty());
}

TEST_CASE("blocking clauses never return a trail twice") {
  CipherSpec c = make_cipher("toy-speck-14");
  auto oracle = toy_speck_optimum(c, 3);
  auto trails = enumerate_trails(c, internal_cfg(), 3, oracle[3] + 1, 40);
  CHECK(trails.size() > 1);
  std::set<std::string> seen;
  for (const auto& t : trails) CHECK(seen.insert(trail_key(t)).second);
  CHECK(enumerate_trails(c, internal_cfg(), 3, oracle[3] - 1, 5).empty());
}

TEST_CASE("bisection windows") {
  CipherSpec c = make_cipher("toy-speck-14");
  auto oracle = toy_speck_optimum(c, 3);
  SearchOptions opt;
  opt.rounds = 3;
  opt.wd_hi = opt.wd_lo = opt.wdk_hi = opt.wdk_lo = oracle[3];
  auto single = search_good(c, internal_cfg(), opt);
  CHECK(single.found);
  CHECK(single.probes == single.exclusions + 1);

  opt.wd_hi = opt.wdk_hi = oracle[3] + 6;
  opt.wd_lo = opt.wdk_lo = 0;
  auto r = search_good(c, internal_cfg(), opt);
  CHECK(r.weight == oracle[3]);

  opt.wd_hi = opt.wdk_hi = oracle[3] - 1;
  CHECK_THROWS_AS(search_good(c, internal_cfg(), opt), Error);
}

TEST_CASE("pins parse and constrain the search") {
  Pin p = parse_pin("k.8=0x00078000", 32);
  CHECK(p.field == "k");
  CHECK(p.row == 8);
  CHECK(p.value == 0x78000);
  CHECK_THROWS_AS(parse_pin("k8", 32), Error);

  CipherSpec c = make_cipher("toy-speck-14");
  auto trails = enumerate_trails(c, internal_cfg(), 2, 12, 5, {parse_pin("x.0=0x01", 7)});
  for (const auto& t : trails) CHECK(t.row(0).at("x") == 1);
}
