#include "arxtrail/search.hpp"

#include <algorithm>
#include <chrono>
#include <set>

namespace arxtrail {

Pin parse_pin(const std::string& text, unsigned n) {
  auto eq = text.find('='), dot = text.find('.');
  if (eq == std::string::npos || dot == std::string::npos || dot > eq)
    throw Error(ErrorCode::Parse, "pin '" + text + "' must look like field.row=value");
  Pin p;
  p.field = text.substr(0, dot);
  try {
    p.row = static_cast<unsigned>(std::stoul(text.substr(dot + 1, eq - dot - 1)));
  } catch (const std::exception&) {
    throw Error(ErrorCode::Parse, "pin '" + text + "' has a bad row number");
  }
  p.value = parse_word(text.substr(eq + 1), n);
  return p;
}

namespace {

using Clock = std::chrono::steady_clock;
double since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

struct SiteKey {
  int round;
  Part part;
  int slot;
  bool operator<(const SiteKey& o) const { return std::tie(round, part, slot) < std::tie(o.round, o.part, o.slot); }
};

// A blocked difference pattern on a set of additions (all their input and
// output bits), or on a whole trail when `rounds` is set.
struct Exclusion {
  std::vector<std::pair<SiteKey, DiffTriple>> sites;
  unsigned rounds = 0;                  // whole-trail exclusions apply only to this length
  std::vector<u64> inputs;              // whole trail: input differences
};

struct Constraints {
  int W = -1;       // total weight
  int W_d = -1;     // data weight (SPECK key/data split)
  std::vector<int> window_min;
  MatsuiOptions matsui;
  bool use_matsui = false;
  std::vector<Pin> pins;
  int zero_window = -2;
};

class Probe {
 public:
  Probe(const CipherSpec& c, unsigned rounds) : c_(c), rounds_(rounds), circ_(build_circuit(c, rounds)), dm_(build_diff_model(circ_)) {
    // Exclude the all-zero trail.
    Clause any;
    for (int w : circ_.inputs())
      for (Lit l : dm_.wires[static_cast<std::size_t>(w)].bits) any.push_back(l);
    dm_.f.add_clause(any);
    units_ = matsui_units(c, circ_, rounds);
  }

  const ArxCircuit& circuit() const { return circ_; }
  std::size_t unit_count() const { return units_.size(); }

  CnfFormula build(const Constraints& k, const std::vector<Exclusion>& excl) const {
    CnfFormula f = dm_.f;
    std::vector<Lit> lits;
    std::vector<std::size_t> ends;
    for (const auto& u : units_) {
      for (int s : u) {
        const auto& w = dm_.weights[static_cast<std::size_t>(s)].w;
        lits.insert(lits.end(), w.begin(), w.end());
      }
      ends.push_back(lits.size());
    }
    if (k.W >= 0) {
      AtMostK fwd = encode_atmost_k(f, lits, k.W);
      if (k.use_matsui) {
        std::vector<Lit> rev(lits.rbegin(), lits.rend());
        AtMostK bwd;
        if (k.matsui.suffix) bwd = encode_atmost_k(f, rev, k.W);
        encode_matsui(f, fwd, k.matsui.suffix ? &bwd : nullptr, ends, k.window_min, k.W, k.matsui);
      }
    }
    if (k.W_d >= 0) {
      std::vector<Lit> data;
      for (std::size_t s = 0; s < circ_.sites().size(); ++s)
        if (circ_.sites()[s].part == Part::Data) {
          const auto& w = dm_.weights[s].w;
          data.insert(data.end(), w.begin(), w.end());
        }
      encode_atmost_k(f, data, k.W_d);
    }
    for (const auto& p : k.pins) fix_word(f, word(p.field, p.row), p.value);
    if (k.zero_window >= 0) {
      const unsigned j = static_cast<unsigned>(k.zero_window);
      for (unsigned r = j; r < j + 3; ++r) fix_word(f, word("k", r), 0);
      for (unsigned r = j; r < j + 4; ++r) {
        fix_word(f, word("x", r), 0);
        fix_word(f, word("y", r), 0);
      }
    }
    for (const auto& e : excl) add_exclusion(f, e);
    return f;
  }

  // Input differences and addition outputs of a model.
  std::vector<u64> decode(const std::vector<bool>& model) const {
    std::vector<u64> in, dz;
    for (int w : circ_.inputs()) in.push_back(decode_word(dm_.wires[static_cast<std::size_t>(w)], model));
    for (const auto& s : circ_.sites())
      dz.push_back(decode_word(dm_.wires[static_cast<std::size_t>(circ_.ops()[static_cast<std::size_t>(s.op)].out)], model));
    return circ_.propagate(in, dz);
  }

  Exclusion whole_trail(const std::vector<u64>& wires) const {
    Exclusion e;
    e.rounds = rounds_;
    for (int w : circ_.inputs()) e.inputs.push_back(wires[static_cast<std::size_t>(w)]);
    const auto tr = circ_.site_triples(wires);
    for (std::size_t s = 0; s < tr.size(); ++s) e.sites.push_back({key(s), tr[s]});
    return e;
  }

  Exclusion sites_pattern(const std::vector<std::string>& names, const std::vector<u64>& wires) const {
    Exclusion e;
    const auto tr = circ_.site_triples(wires);
    for (const auto& nm : names)
      for (std::size_t s = 0; s < circ_.sites().size(); ++s)
        if (circ_.sites()[s].name == nm) e.sites.push_back({key(s), tr[s]});
    return e;
  }

  bool has_word(const std::string& f, unsigned row) const { return circ_.observed().count(f + "." + std::to_string(row)) != 0; }

 private:
  SiteKey key(std::size_t s) const {
    const auto& site = circ_.sites()[s];
    return {site.round, site.part, site.slot};
  }

  const WordVars& word(const std::string& f, unsigned row) const {
    return dm_.wires[static_cast<std::size_t>(circ_.observed_wire(f + "." + std::to_string(row)))];
  }

  void add_exclusion(CnfFormula& f, const Exclusion& e) const {
    if (e.rounds != 0 && e.rounds != rounds_) return;
    std::vector<std::pair<Lit, bool>> bits;
    auto push = [&](const WordVars& w, u64 v) {
      for (unsigned i = 0; i < w.n(); ++i) bits.push_back({w.bits[i], bit_of(v, i) != 0});
    };
    if (e.rounds != 0)
      for (std::size_t i = 0; i < e.inputs.size(); ++i) push(dm_.wires[static_cast<std::size_t>(circ_.inputs()[i])], e.inputs[i]);
    for (const auto& [k, t] : e.sites) {
      int s = circ_.site_index(k.round, k.part, k.slot);
      if (s < 0) return;  // pattern does not exist at this length
      const Op& op = circ_.ops()[static_cast<std::size_t>(circ_.sites()[static_cast<std::size_t>(s)].op)];
      push(dm_.wires[static_cast<std::size_t>(op.in1)], t.dx);
      push(dm_.wires[static_cast<std::size_t>(op.in2)], t.dy);
      push(dm_.wires[static_cast<std::size_t>(op.out)], t.dz);
    }
    exclude_pattern(f, bits);
  }

  CipherSpec c_;
  unsigned rounds_;
  ArxCircuit circ_;
  CircuitDiffModel dm_;
  std::vector<std::vector<int>> units_;
};

struct ProbeOutcome {
  bool sat = false;
  Trail trail;
  std::optional<Verdict> verdict;
};

class Searcher {
 public:
  Searcher(const CipherSpec& c, const SolverConfig& cfg, const SearchOptions& opt) : c_(c), cfg_(cfg), opt_(opt) {
    cfg_.timeout_s = opt.probe_timeout_s;
  }

  // Search_1 / Search_2: solve, verify, exclude and re-solve until a trail
  // with a right pair is found or the model is unsatisfiable.
  ProbeOutcome run(const Probe& p, const Constraints& k, const nlohmann::json& tag) {
    const auto t0 = Clock::now();
    for (;;) {
      ++probes_;
      CnfFormula f = p.build(k, excl_);
      SatResult sr = solve_sat(f, cfg_);
      nlohmann::json ev = tag;
      ev["event"] = "probe";
      ev["backend"] = sr.backend;
      ev["elapsed"] = since(t0);
      if (sr.status == SatStatus::Unsat) {
        ev["status"] = "unsat";
        emit(ev);
        return {};
      }
      if (sr.status != SatStatus::Sat) throw Error(ErrorCode::SolverFailed, "SAT backend returned no answer");
      const auto wires = p.decode(sr.model);
      Trail t = make_trail(c_, p.circuit(), tag.value("rounds", 0u), wires);
      if (!opt_.verify) {
        ev["status"] = "sat";
        emit(ev);
        return {true, t, std::nullopt};
      }
      VerifyOptions vo;
      vo.refine = false;
      Verdict v = verify_and_refine(c_, t, cfg_, vo);
      if (v.valid) {
        ev["status"] = "sat";
        emit(ev);
        return {true, t, v};
      }
      if (v.cause == InvalidCause::Conflict) {
        for (const auto& cr : v.conflicts) excl_.push_back(p.sites_pattern(cr.spec.names, wires));
      } else {
        excl_.push_back(p.whole_trail(wires));
      }
      ev["status"] = "invalid";
      ev["cause"] = v.cause == InvalidCause::Conflict ? "conflict" : "whole_trail";
      emit(ev);
      if (excl_.size() > opt_.max_exclusions) throw Error(ErrorCode::LimitExceeded, "exclusion limit reached");
    }
  }

  void emit(const nlohmann::json& j) const {
    if (opt_.log) opt_.log(j);
  }

  unsigned probes() const { return probes_; }
  unsigned exclusions() const { return static_cast<unsigned>(excl_.size()); }
  const SolverConfig& cfg() const { return cfg_; }

 private:
  CipherSpec c_;
  SolverConfig cfg_;
  const SearchOptions& opt_;
  std::vector<Exclusion> excl_;
  unsigned probes_ = 0;
};

void fill_weights(SearchResult& r, const CipherSpec& c) {
  double wd = 0, wk = 0;
  for (const auto& row : r.trail.rows) {
    for (const auto& [k, v] : row.values) {
      if (k == "w_k") wk += v;
      else if (k == "w_d" || k == "w") wd += v;
    }
  }
  r.w_d = static_cast<int>(wd);
  r.w_k = c.family == Family::Speck ? static_cast<int>(wk) : 0;
  r.weight = r.w_d + r.w_k;
}

void finish(SearchResult& r, const CipherSpec& c, const SolverConfig& cfg, const SearchOptions& opt, const Searcher& s,
            Clock::time_point t0) {
  if (r.found) {
    fill_weights(r, c);
    if (opt.refine) {
      VerifyOptions vo;
      r.verdict = verify_and_refine(c, r.trail, s.cfg(), vo);
    }
  }
  (void)cfg;
  r.exclusions = s.exclusions();
  r.probes = s.probes();
  r.seconds = since(t0);
}

}  // namespace

SearchResult search_optimal(const CipherSpec& c, const SolverConfig& cfg, const SearchOptions& opt) {
  const auto t0 = Clock::now();
  const unsigned R = opt.rounds;
  const unsigned first = c.family == Family::Speck ? 2 : 1;
  if (R < first) throw Error(ErrorCode::InvalidArgument, "too few rounds for " + c.id);
  Searcher s(c, cfg, opt);
  SearchResult res;
  res.bounds.assign(R + 1, -1);
  for (std::size_t r = 0; r < opt.known_bounds.size() && r <= R; ++r) res.bounds[r] = opt.known_bounds[r];
  res.bounds[0] = 0;
  if (first == 2) res.bounds[1] = 0;  // one SPECK round has no addition in the trail
  const unsigned off = units_round_offset(c);
  int W = opt.w_start;
  for (unsigned r = first; r <= R; ++r) {
    if (res.bounds[r] >= 0 && r < R) {
      W = std::max(W, res.bounds[r]);
      continue;
    }
    Probe p(c, r);
    for (;; ++W) {
      if (W > opt.w_max) throw Error(ErrorCode::LimitExceeded, "weight limit reached without a trail");
      Constraints k;
      k.W = W;
      k.pins = r == R ? opt.pins : std::vector<Pin>{};
      if (opt.matsui) {
        k.use_matsui = true;
        k.matsui = opt.matsui_opt;
        k.window_min.assign(p.unit_count() + 1, 0);
        for (std::size_t u = 1; u <= p.unit_count(); ++u) {
          std::size_t rr = u + off;
          if (rr < res.bounds.size() && rr < r && res.bounds[rr] > 0) k.window_min[u] = res.bounds[rr];
        }
      }
      ProbeOutcome o = s.run(p, k, {{"rounds", r}, {"W", W}});
      if (o.sat) {
        res.bounds[r] = W;
        s.emit({{"event", "bound"}, {"rounds", r}, {"W", W}});
        if (r == R) {
          res.found = true;
          res.trail = o.trail;
        }
        break;
      }
    }
  }
  finish(res, c, cfg, opt, s, t0);
  return res;
}

SearchResult search_good(const CipherSpec& c, const SolverConfig& cfg, const SearchOptions& opt) {
  const auto t0 = Clock::now();
  const unsigned R = opt.rounds;
  Searcher s(c, cfg, opt);
  Probe p(c, R);
  SearchResult res;
  std::vector<int> windows;
  if (opt.zero_window == -1 && c.family == Family::Speck) {
    for (unsigned j = 0; j + 3 <= R - 1 && j + 3 <= R; ++j) windows.push_back(static_cast<int>(j));
  } else if (opt.zero_window >= 0) {
    if (c.family != Family::Speck || static_cast<unsigned>(opt.zero_window) + 3 > R - 1)
      throw Error(ErrorCode::InvalidArgument, "zero-difference window does not fit");
    windows.push_back(opt.zero_window);
  }
  if (windows.empty()) windows.push_back(-2);

  auto probe = [&](int Wd, int Wdk) -> bool {
    for (int j : windows) {
      Constraints k;
      k.W = Wdk;
      k.W_d = c.family == Family::Speck ? Wd : -1;
      if (c.family != Family::Speck) k.W = std::min(Wd, Wdk);
      k.pins = opt.pins;
      k.zero_window = j;
      ProbeOutcome o = s.run(p, k, {{"rounds", R}, {"W", Wdk}, {"W_d", Wd}, {"zero_window", j}});
      if (o.sat) {
        res.found = true;
        res.trail = o.trail;
        return true;
      }
    }
    return false;
  };

  int hi_d = opt.wd_hi, lo_d = opt.wd_lo, hi_dk = opt.wdk_hi, lo_dk = opt.wdk_lo;
  if (hi_d < lo_d || hi_dk < lo_dk) throw Error(ErrorCode::InvalidArgument, "search windows must satisfy lower <= upper");
  int Wd = hi_d, Wdk = hi_dk;
  bool last = probe(Wd, Wdk);
  if (!last) {
    finish(res, c, cfg, opt, s, t0);
    throw Error(ErrorCode::LimitExceeded, "no trail within the upper bounds W_d=" + std::to_string(hi_d) + ", W_dk=" + std::to_string(hi_dk));
  }
  Wd = (hi_d + lo_d) / 2;
  while (hi_d - lo_d > 1) {
    last = probe(Wd, Wdk);
    if (last) hi_d = Wd;
    else lo_d = Wd;
    Wd = (hi_d + lo_d) / 2;
  }
  Wd = hi_d;
  Wdk = (hi_dk + lo_dk) / 2;
  while (hi_dk - lo_dk > 1) {
    last = probe(Wd, Wdk);
    if (last) hi_dk = Wdk;
    else lo_dk = Wdk;
    Wdk = (hi_dk + lo_dk) / 2;
  }
  // The recorded trail is the last satisfiable probe; re-probe the final
  // pair when the last probe was unsatisfiable.
  if (!last) probe(hi_d, hi_dk);
  finish(res, c, cfg, opt, s, t0);
  return res;
}

std::vector<Trail> enumerate_trails(const CipherSpec& c, const SolverConfig& cfg, unsigned rounds, int W, unsigned limit,
                                    const std::vector<Pin>& pins) {
  Probe p(c, rounds);
  Constraints k;
  k.W = W;
  k.pins = pins;
  std::vector<Exclusion> excl;
  std::vector<Trail> out;
  while (out.size() < limit) {
    CnfFormula f = p.build(k, excl);
    SatResult sr = solve_sat(f, cfg);
    if (sr.status != SatStatus::Sat) break;
    const auto wires = p.decode(sr.model);
    out.push_back(make_trail(c, p.circuit(), rounds, wires));
    excl.push_back(p.whole_trail(wires));
  }
  return out;
}

CnfFormula search_model(const CipherSpec& c, unsigned rounds, int W, const std::vector<Pin>& pins) {
  Probe p(c, rounds);
  Constraints k;
  k.W = W;
  k.pins = pins;
  return p.build(k, {});
}

nlohmann::json to_json(const SearchResult& r) {
  nlohmann::json j;
  j["found"] = r.found;
  if (r.found) {
    j["weight"] = r.weight;
    j["w_d"] = r.w_d;
    j["w_k"] = r.w_k;
    j["trail"] = trail_to_json(r.trail);
  }
  nlohmann::json b = nlohmann::json::array();
  for (std::size_t i = 0; i < r.bounds.size(); ++i)
    if (r.bounds[i] >= 0 && i > 0) b.push_back({{"rounds", i}, {"weight", r.bounds[i]}});
  if (!b.empty()) j["bounds"] = b;
  if (r.verdict) j["verdict"] = to_json(*r.verdict);
  j["exclusions"] = r.exclusions;
  j["probes"] = r.probes;
  j["seconds"] = r.seconds;
  return j;
}

}  // namespace arxtrail
