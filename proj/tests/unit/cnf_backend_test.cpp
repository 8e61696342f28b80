#include <doctest.h>

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <random>

#include "arxtrail/backends.hpp"
#include "arxtrail/diff_model.hpp"
#include "arxtrail/oracle.hpp"
#include "arxtrail/value_model.hpp"
#include "helpers.hpp"

using namespace arxtrail;
using testing_support::internal_cfg;

namespace {
std::string find_tool(const char* name) {
  for (const char* dir : {"/usr/local/bin", "/usr/bin"}) {
    auto p = std::filesystem::path(dir) / name;
    if (std::filesystem::exists(p)) return p.string();
  }
  return {};
}

CountResult count_all(const CnfFormula& f, const SolverConfig& cfg) {
  std::vector<int> proj;
  for (int v = 1; v <= f.var_count(); ++v) proj.push_back(v);
  return count_models(f, proj, cfg);
}
}  // namespace

TEST_CASE("gadget clauses and DIMACS text") {
  CnfFormula empty;
  CHECK(emit_dimacs(empty).rfind("p cnf 0 0", 0) == 0);

  CnfFormula f;
  int a = f.new_var(), b = f.new_var();
  encode_gadget(f, Gadget::Eq, {a, b});
  CHECK(emit_dimacs(f) == "p cnf 2 2\n-1 2 0\n1 -2 0");

  CnfFormula g;
  int gg = g.new_var(), x = g.new_var(), y = g.new_var();
  encode_gadget(g, Gadget::AndOut, {gg, x, y});
  REQUIRE(g.clause_count() == 3);
  CHECK(g.clauses()[0] == Clause{-gg, x});
  CHECK(g.clauses()[1] == Clause{-gg, y});
  CHECK(g.clauses()[2] == Clause{gg, -x, -y});

  CnfFormula h;
  int o = h.new_var(), p = h.new_var();
  encode_gadget(h, Gadget::XorOut, {o, p, p});
  h.add_unit(p);
  auto r = solve_sat(h, internal_cfg());
  REQUIRE(r.status == SatStatus::Sat);
  CHECK_FALSE(r.model[o]);
}

TEST_CASE("DIMACS round trip keeps clauses and projection") {
  std::mt19937_64 rng(1);
  CnfFormula f;
  f.new_vars(12);
  for (int k = 0; k < 30; ++k) {
    Clause c;
    for (int j = 0; j < 3; ++j) c.push_back(static_cast<int>(rng() % 12 + 1) * (rng() & 1 ? 1 : -1));
    f.add_clause(c);
  }
  std::vector<int> proj{1, 4, 7};
  std::vector<int> back_proj;
  CnfFormula g = parse_dimacs(emit_dimacs(f, &proj), &back_proj);
  CHECK(g.var_count() == f.var_count());
  CHECK(g.clauses() == f.clauses());
  CHECK(back_proj == proj);
  CHECK_THROWS_AS(parse_dimacs("p cnf 2 1\n1 x 0\n"), Error);
}

TEST_CASE("internal SAT basics") {
  CnfFormula empty;
  CHECK(solve_sat(empty, internal_cfg()).status == SatStatus::Sat);
  CnfFormula contra;
  int v = contra.new_var();
  contra.add_unit(v);
  contra.add_unit(-v);
  CHECK(solve_sat(contra, internal_cfg()).status == SatStatus::Unsat);

  // Pigeonhole 5 into 4 is unsatisfiable.
  CnfFormula ph;
  auto var = [](int p, int h) { return p * 4 + h + 1; };
  ph.new_vars(20);
  for (int p = 0; p < 5; ++p) ph.add_clause({var(p, 0), var(p, 1), var(p, 2), var(p, 3)});
  for (int h = 0; h < 4; ++h)
    for (int p = 0; p < 5; ++p)
      for (int q = p + 1; q < 5; ++q) ph.add_clause({-var(p, h), -var(q, h)});
  CHECK(solve_sat(ph, internal_cfg()).status == SatStatus::Unsat);
}

TEST_CASE("model counting") {
  CnfFormula f;
  f.new_vars(9);
  CHECK(count_all(f, internal_cfg()).count == 512);
  f.add_clause({1, 2});
  CHECK(count_all(f, internal_cfg()).count == 384);

  // Projection hides auxiliary variables.
  CnfFormula g;
  int a = g.new_var(), b = g.new_var(), c = g.new_var();
  encode_gadget(g, Gadget::XorOut, {c, a, b});
  CHECK(count_models(g, {c}, internal_cfg()).count == 2);
  CHECK(count_models(g, {a, b}, internal_cfg()).count == 4);
}

TEST_CASE("sequential counter admits exactly the assignments of weight at most k") {
  for (int k : {0, 2, 5}) {
    CnfFormula f;
    std::vector<Lit> lits;
    for (int i = 0; i < 5; ++i) lits.push_back(f.new_var());
    encode_atmost_k(f, lits, k);
    std::vector<int> proj(lits.begin(), lits.end());
    unsigned expect = 0;
    for (unsigned m = 0; m < 32; ++m)
      if (static_cast<int>(__builtin_popcount(m)) <= k) ++expect;
    CHECK(count_models(f, proj, internal_cfg()).count == expect);
  }
}

TEST_CASE("value model count matches 2^(2n - w) for every valid triple, n <= 5") {
  auto t0 = std::chrono::steady_clock::now();
  for (unsigned n = 2; n <= 5; ++n) {
    const u64 m = word_mask(n);
    for (u64 dx = 0; dx <= m; ++dx)
      for (u64 dy = 0; dy <= m; ++dy)
        for (u64 dz = 0; dz <= m; ++dz) {
          DiffTriple t(n, dx, dy, dz);
          auto w = xdp_weight(t);
          if (!w) continue;
          CnfFormula f;
          WordVars x = new_word(f, n, "x"), y = new_word(f, n, "y");
          add_state(f, x, y, t, "z");
          std::vector<int> proj;
          for (Lit l : x.bits) proj.push_back(l);
          for (Lit l : y.bits) proj.push_back(l);
          REQUIRE(count_models(f, proj, internal_cfg()).count == (BigInt(1) << (2 * n - *w)));
        }
  }
  MESSAGE("value-model sweep took "
          << std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count() << " s");
}

TEST_CASE("value model rejects invalid triples and satisfying models follow the differential") {
  CnfFormula f;
  WordVars x = new_word(f, 4, "x"), y = new_word(f, 4, "y");
  CHECK_THROWS_AS(add_state(f, x, y, DiffTriple(4, 0, 0, 1), "z"), Error);

  const DiffTriple t(6, 0b000000, 0b001100, 0b010100);
  CnfFormula g;
  WordVars gx = new_word(g, 6, "x"), gy = new_word(g, 6, "y");
  WordVars gz = add_state(g, gx, gy, t, "z");
  auto r = solve_sat(g, internal_cfg());
  REQUIRE(r.status == SatStatus::Sat);
  u64 xv = decode_word(gx, r.model), yv = decode_word(gy, r.model);
  CHECK(decode_word(gz, r.model) == ((xv + yv) & 63));
  CHECK(((((xv ^ t.dx) + (yv ^ t.dy)) ^ (xv + yv)) & 63) == t.dz);
}

TEST_CASE("difference model accepts exactly the valid triples (n = 4)") {
  CnfFormula f;
  WordVars dx = new_word(f, 4, "dx"), dy = new_word(f, 4, "dy"), dz = new_word(f, 4, "dz");
  encode_modadd_diff(f, dx, dy, dz);
  std::vector<int> proj;
  for (const auto* w : {&dx, &dy, &dz})
    for (Lit l : w->bits) proj.push_back(l);
  unsigned valid = 0;
  for (u64 a = 0; a < 16; ++a)
    for (u64 b = 0; b < 16; ++b)
      for (u64 c = 0; c < 16; ++c) valid += xdp_valid(DiffTriple(4, a, b, c));
  CHECK(count_models(f, proj, internal_cfg()).count == valid);
}

TEST_CASE("difference model weight bits sum to the weight") {
  CnfFormula f;
  WordVars dx = new_word(f, 6, "dx"), dy = new_word(f, 6, "dy"), dz = new_word(f, 6, "dz");
  auto w = encode_modadd_diff(f, dx, dy, dz);
  fix_word(f, dx, 0b000000);
  fix_word(f, dy, 0b001100);
  fix_word(f, dz, 0b010100);
  auto r = solve_sat(f, internal_cfg());
  REQUIRE(r.status == SatStatus::Sat);
  int sum = 0;
  for (Lit l : w.w) sum += r.model[l] ? 1 : 0;
  CHECK(sum == 3);

  CnfFormula g;
  WordVars gx = new_word(g, 4, "dx"), gy = new_word(g, 4, "dy"), gz = new_word(g, 4, "dz");
  encode_modadd_diff(g, gx, gy, gz);
  fix_word(g, gx, 0);
  fix_word(g, gy, 0);
  fix_word(g, gz, 0b0010);
  CHECK(solve_sat(g, internal_cfg()).status == SatStatus::Unsat);
}

TEST_CASE("external tools agree with the internal engine when installed") {
  const std::string cadical = find_tool("cadical");
  std::string counter;
  if (run_process({"python3", "-c", "import pyganak"}, 60).exit_code == 0)
    counter = std::string(ARXTRAIL_SOURCE_DIR) + "/tools/ganak_count.py";
  CnfFormula f;
  WordVars x = new_word(f, 5, "x"), y = new_word(f, 5, "y");
  add_state(f, x, y, DiffTriple(5, 0b00100, 0b01100, 0b01000), "z");
  std::vector<int> proj;
  for (Lit l : x.bits) proj.push_back(l);
  for (Lit l : y.bits) proj.push_back(l);
  const BigInt expect = count_models(f, proj, internal_cfg()).count;
  if (!cadical.empty()) {
    SolverConfig c;
    c.sat_command = cadical;
    CHECK(solve_sat(f, c).status == SatStatus::Sat);
    CnfFormula contra;
    int v = contra.new_var();
    contra.add_unit(v);
    contra.add_unit(-v);
    CHECK(solve_sat(contra, c).status == SatStatus::Unsat);
  } else {
    MESSAGE("cadical not installed, skipped");
  }
  if (!counter.empty()) {
    SolverConfig c;
    c.counter_command = counter;
    CHECK(count_models(f, proj, c).count == expect);
  } else {
    MESSAGE("pyganak not installed, skipped");
  }
  SolverConfig missing;
  missing.sat_command = "/nonexistent/solver";
  CHECK_THROWS_AS(solve_sat(f, missing), Error);
}
