#include "arxtrail/oracle.hpp"

#include <array>
#include <cmath>
#include <thread>

namespace arxtrail {

std::uint64_t bruteforce_xdp(const DiffTriple& t) {
  const unsigned n = t.n;
  if (n > 12) throw Error(ErrorCode::LimitExceeded, "brute-force differential probability is limited to n <= 12");
  const u64 m = word_mask(n);
  std::uint64_t count = 0;
  for (u64 x = 0; x <= m; ++x)
    for (u64 y = 0; y <= m; ++y)
      if ((((x + y) ^ ((x ^ t.dx) + (y ^ t.dy))) & m) == t.dz) ++count;
  return count;
}

std::vector<std::uint64_t> output_histogram(const DiffTriple& t) {
  const unsigned n = t.n;
  if (n > 12) throw Error(ErrorCode::LimitExceeded, "output histograms are limited to n <= 12");
  const u64 m = word_mask(n);
  std::vector<std::uint64_t> h(m + 1, 0);
  for (u64 x = 0; x <= m; ++x)
    for (u64 y = 0; y <= m; ++y) {
      u64 z = (x + y) & m;
      if ((z ^ (((x ^ t.dx) + (y ^ t.dy)) & m)) == t.dz) ++h[z];
    }
  return h;
}

namespace {

struct ChainWalker {
  const ChainSpec& s;
  u64 m;
  std::uint64_t count = 0;

  // Addition j with first input a (a' = a ^ adds[j].dx is implied).
  void step(std::size_t j, u64 a) {
    const DiffTriple& t = s.adds[j];
    for (u64 b = 0; b <= m; ++b) {
      u64 z = (a + b) & m;
      if ((((a ^ t.dx) + (b ^ t.dy)) & m) != (z ^ t.dz)) continue;
      if (j + 1 == s.adds.size()) {
        ++count;
        continue;
      }
      const Glue& g = s.glues[j];
      step(j + 1, rotr(z ^ g.xor_const, g.rot, s.n));
    }
  }
};

}  // namespace

std::uint64_t bruteforce_chain(const ChainSpec& s) {
  s.check();
  if (s.fresh_bits() > 28) throw Error(ErrorCode::LimitExceeded, "brute-force chain counting is limited to 28 fresh bits");
  ChainWalker w{s, word_mask(s.n)};
  for (u64 x = 0; x <= w.m; ++x) w.step(0, x);
  return w.count;
}

std::uint64_t bruteforce_cma(const CmaSpec& s) { return bruteforce_chain(s.as_chain()); }

void toy_speck_round(const CipherSpec& c, unsigned round, u64& x, u64& y) {
  const unsigned n = c.n;
  const u64 m = word_mask(n);
  x = (((rotr(x, c.alpha, n) + y) & m) ^ round) & m;
  y = x ^ rotl(y, c.beta, n);
}

void toy_chaskey_round(const CipherSpec& c, u64 v[4]) {
  const unsigned n = c.n;
  const u64 m = word_mask(n);
  const auto& r = c.rot;
  v[0] = (v[0] + v[1]) & m;
  v[1] = rotl(v[1], r[1], n) ^ v[0];
  v[0] = rotl(v[0], r[0], n);
  v[2] = (v[2] + v[3]) & m;
  v[3] = rotl(v[3], r[2], n) ^ v[2];
  v[0] = (v[0] + v[3]) & m;
  v[3] = rotl(v[3], r[3], n) ^ v[0];
  v[2] = (v[2] + v[1]) & m;
  v[1] = rotl(v[1], r[4], n) ^ v[2];
  v[2] = rotl(v[2], r[5], n);
}

namespace {

// SplitMix64 over a counter: reproducible and trivially partitioned.
u64 mix64(u64 z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace

EmpiricalReport empirical_trail(const CipherSpec& c, const Trail& t, EmpiricalMode mode, std::uint64_t samples,
                                std::uint64_t seed, unsigned jobs) {
  const bool speck = c.family == Family::ToySpeck;
  if (!speck && c.family != Family::ToyChaskey) throw Error(ErrorCode::InvalidArgument, "empirical traversal is only offered for toy ciphers");
  if (t.word_size != c.n) throw Error(ErrorCode::WidthMismatch, "trail word size does not match " + c.id);
  const unsigned words = speck ? 2 : 4;
  const unsigned n = c.n, block = words * n, R = t.rounds;
  const char* names2[2] = {"x", "y"};
  const char* names4[4] = {"v0", "v1", "v2", "v3"};
  std::vector<std::array<u64, 4>> rows(R + 1);
  for (unsigned r = 0; r <= R; ++r)
    for (unsigned k = 0; k < words; ++k) rows[r][k] = t.row(r).at(speck ? names2[k] : names4[k]);

  EmpiricalReport rep;
  rep.mode = mode;
  rep.seed = seed;
  if (mode == EmpiricalMode::FullTraversal) {
    if (block > 32) throw Error(ErrorCode::LimitExceeded, "full traversal needs a block of at most 32 bits");
    rep.pairs = std::uint64_t{1} << block;
  } else {
    if (samples == 0) throw Error(ErrorCode::InvalidArgument, "sampling needs a positive sample count");
    rep.pairs = samples;
  }
  const u64 m = word_mask(n);
  if (jobs == 0) jobs = std::max(1u, std::thread::hardware_concurrency());
  jobs = static_cast<unsigned>(std::min<std::uint64_t>(jobs, std::max<std::uint64_t>(1, rep.pairs >> 16)));
  std::vector<std::vector<std::uint64_t>> part(jobs, std::vector<std::uint64_t>(R, 0));

  auto worker = [&](unsigned id) {
    const std::uint64_t lo = rep.pairs * id / jobs, hi = rep.pairs * (id + 1) / jobs;
    auto& surv = part[id];
    for (std::uint64_t idx = lo; idx < hi; ++idx) {
      u64 p = mode == EmpiricalMode::FullTraversal ? idx : mix64(seed * 0x100000001b3ULL + idx);
      u64 a[4], b[4];
      for (unsigned k = 0; k < words; ++k) {
        a[k] = (p >> (k * n)) & m;
        b[k] = a[k] ^ rows[0][k];
      }
      for (unsigned r = 0; r < R; ++r) {
        if (speck) {
          toy_speck_round(c, r, a[0], a[1]);
          toy_speck_round(c, r, b[0], b[1]);
        } else {
          toy_chaskey_round(c, a);
          toy_chaskey_round(c, b);
        }
        bool ok = true;
        for (unsigned k = 0; k < words && ok; ++k) ok = (a[k] ^ b[k]) == rows[r + 1][k];
        if (!ok) break;
        ++surv[r];
      }
    }
  };
  std::vector<std::thread> pool;
  for (unsigned id = 1; id < jobs; ++id) pool.emplace_back(worker, id);
  worker(0);
  for (auto& th : pool) th.join();

  rep.survivors.assign(R, 0);
  for (const auto& p : part)
    for (unsigned r = 0; r < R; ++r) rep.survivors[r] += p[r];
  std::uint64_t prev = rep.pairs;
  for (unsigned r = 0; r < R; ++r) {
    const std::uint64_t s = rep.survivors[r];
    rep.round_weights.push_back(s == 0 || prev == 0 ? INFINITY : std::log2(static_cast<double>(prev)) - std::log2(static_cast<double>(s)));
    prev = s;
  }
  const std::uint64_t last = R == 0 ? rep.pairs : rep.survivors.back();
  rep.total_weight = last == 0 ? INFINITY : std::log2(static_cast<double>(rep.pairs)) - std::log2(static_cast<double>(last));
  return rep;
}

nlohmann::json to_json(const EmpiricalReport& r) {
  nlohmann::json j;
  j["mode"] = r.mode == EmpiricalMode::FullTraversal ? "full" : "sample";
  j["pairs"] = r.pairs;
  if (r.mode == EmpiricalMode::Sample) j["seed"] = r.seed;
  j["survivors"] = r.survivors;
  nlohmann::json w = nlohmann::json::array();
  for (double x : r.round_weights) w.push_back(std::isfinite(x) ? nlohmann::json(std::round(x * 1e5) / 1e5) : nlohmann::json(nullptr));
  j["round_weights"] = w;
  j["total_weight"] = std::isfinite(r.total_weight) ? nlohmann::json(std::round(r.total_weight * 1e5) / 1e5) : nlohmann::json(nullptr);
  return j;
}

}  // namespace arxtrail
