#pragma once
#include <cstdint>
#include <random>
#include <string>

#include "arxtrail/backends.hpp"
#include "arxtrail/diff.hpp"

namespace testing_support {

inline std::string fixture(const std::string& rel) { return std::string(ARXTRAIL_SOURCE_DIR) + "/fixtures/" + rel; }

inline arxtrail::SolverConfig internal_cfg() {
  arxtrail::SolverConfig c;
  c.jobs = 1;
  return c;
}

// Random valid triple of width n.
inline arxtrail::DiffTriple random_valid(std::mt19937_64& rng, unsigned n) {
  const arxtrail::u64 m = arxtrail::word_mask(n);
  for (;;) {
    arxtrail::DiffTriple t(n, rng() & m, rng() & m, rng() & m);
    if (arxtrail::xdp_valid(t)) return t;
  }
}

}  // namespace testing_support
