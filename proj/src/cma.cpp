#include "arxtrail/cma.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <unordered_map>

namespace arxtrail {

void ChainSpec::check() const {
  check_width(n);
  if (adds.empty()) throw Error(ErrorCode::InvalidArgument, "chain has no additions");
  if (glues.size() + 1 != adds.size()) throw Error(ErrorCode::InvalidArgument, "chain needs one glue per link");
  if (adds.size() > 24) throw Error(ErrorCode::LimitExceeded, "chain longer than 24 additions");
  for (const auto& a : adds)
    if (a.n != n) throw Error(ErrorCode::WidthMismatch, "addition width differs from chain width");
  for (std::size_t j = 0; j + 1 < adds.size(); ++j) {
    if (glues[j].rot >= n) throw Error(ErrorCode::InvalidArgument, "glue rotation must be below the word size");
    if (glues[j].xor_const & ~word_mask(n)) throw Error(ErrorCode::WidthMismatch, "glue constant wider than the word");
    if (rotr(adds[j].dz, glues[j].rot, n) != adds[j + 1].dx)
      throw Error(ErrorCode::InvalidArgument, "linked input difference of addition " + std::to_string(j + 1) +
                                                  " does not match the glued output difference");
  }
}

ChainSpec CmaSpec::as_chain() const {
  ChainSpec c;
  c.n = n;
  c.adds = {m1, m2};
  c.glues = {glue};
  c.names = {name1, name2};
  return c;
}

BigInt chain_count_dp(const ChainSpec& s) {
  s.check();
  const unsigned n = s.n;
  const std::size_t m = s.adds.size();
  std::vector<unsigned> start(m);
  std::vector<u64> dc(m);
  unsigned acc = 0;
  for (std::size_t j = 0; j < m; ++j) {
    start[j] = (n - acc % n) % n;
    if (j + 1 < m) acc += s.glues[j].rot;
    dc[j] = s.adds[j].dc();
    if (dc[j] & 1) return 0;
  }
  // key bits: [0, m) carries, [m, 2m) guessed initial carries, bit 2m pending output bit.
  const u64 zbit = u64{1} << (2 * m);
  std::unordered_map<u64, BigInt> cur, next;
  u64 guess_mask = 0;
  for (std::size_t j = 0; j < m; ++j)
    if (start[j] != 0) guess_mask |= u64{1} << j;
  for (u64 g = guess_mask;; g = (g - 1) & guess_mask) {
    cur[g | (g << m)] = 1;
    if (g == 0) break;
  }
  auto maj = [](int a, int b, int c) { return (a & b) | (a & c) | (b & c); };
  for (unsigned p = 0; p < n; ++p) {
    for (std::size_t j = 0; j < m; ++j) {
      const unsigned b = (start[j] + p) % n;
      const DiffTriple& t = s.adds[j];
      const int da = bit_of(t.dx, b), db = bit_of(t.dy, b);
      const int dcb = bit_of(dc[j], b);
      const int dcn = b + 1 < n ? bit_of(dc[j], b + 1) : 0;
      const int kbit = j > 0 ? bit_of(s.glues[j - 1].xor_const, (b + s.glues[j - 1].rot) % n) : 0;
      next.clear();
      for (const auto& [key, cnt] : cur) {
        const int c = static_cast<int>((key >> j) & 1);
        const int c2 = c ^ dcb;
        const int na = j == 0 ? 2 : 1;
        for (int av = 0; av < na; ++av) {
          const int a = j == 0 ? av : static_cast<int>(((key & zbit) != 0)) ^ kbit;
          for (int bv = 0; bv < 2; ++bv) {
            int carry_out = 0;
            if (b + 1 < n) {
              carry_out = maj(a, bv, c);
              if (maj(a ^ da, bv ^ db, c2) != (carry_out ^ dcn)) continue;
            }
            const int z = a ^ bv ^ c;
            u64 nk = key & ~zbit & ~(u64{1} << j);
            if (carry_out) nk |= u64{1} << j;
            if (z && j + 1 < m) nk |= zbit;
            next[nk] += cnt;
          }
        }
      }
      std::swap(cur, next);
    }
  }
  BigInt total = 0;
  for (const auto& [key, cnt] : cur) {
    const u64 carries = key & word_mask(static_cast<unsigned>(m));
    const u64 guesses = (key >> m) & word_mask(static_cast<unsigned>(m));
    if ((carries & guess_mask) == guesses) total += cnt;
  }
  return total;
}

std::vector<unsigned> prune_bits(const ChainSpec& s) {
  std::vector<unsigned> kept;
  for (const auto& t : s.adds) {
    unsigned k = 0;
    for (unsigned i = 0; i + 1 < t.n; ++i)
      if (!eq3(bit_of(t.dx, i), bit_of(t.dy, i), bit_of(t.dz, i))) k = i + 1;
    kept.push_back(k);
  }
  return kept;
}

ChainModel build_chain_model(const ChainSpec& s, bool pruned) {
  s.check();
  const unsigned n = s.n;
  const std::size_t m = s.adds.size();
  ChainModel cm;
  cm.total_free = s.fresh_bits();
  cm.kept_bits = pruned ? prune_bits(s) : std::vector<unsigned>(m, n);
  CnfFormula& f = cm.f;

  WordVars x = new_word(f, n, "x");
  WordVars y = new_word(f, n, "y");
  cm.inputs = {x, y};
  WordVars a = x;
  for (std::size_t j = 0; j < m; ++j) {
    const DiffTriple& t = s.adds[j];
    const unsigned keep = cm.kept_bits[j];
    WordVars b = j == 0 ? y : new_word(f, n, "u" + std::to_string(j));
    if (j > 0) cm.inputs.push_back(b);
    WordVars z = new_word(f, n, "z" + std::to_string(j));
    WordVars c = new_word(f, n, "c" + std::to_string(j));
    if (!xdp_valid(t)) throw Error(ErrorCode::InvalidDifferential, "addition " + std::to_string(j) + " is impossible");
    if (keep > 0) encode_modadd_state(f, a, b, z, c, t, keep);
    // Projection: first-input bits that are free (only at j == 0 or when the
    // source output bit lies outside the previous slice), and second-input bits.
    for (unsigned i = 0; i < keep; ++i) {
      if (j == 0) {
        cm.projection.push_back(x.bits[i]);
      } else {
        const unsigned src = (i + s.glues[j - 1].rot) % n;
        if (src >= cm.kept_bits[j - 1]) cm.projection.push_back(std::abs(a.bits[i]));
      }
      cm.projection.push_back(b.bits[i]);
    }
    if (pruned) {
      // Pin everything the slice leaves untouched so the formula has no
      // unconstrained variables outside the projection.
      for (unsigned i = keep; i < n; ++i) {
        if (j == 0) f.add_unit(-x.bits[i]);
        f.add_unit(-b.bits[i]);
        if (i > keep || keep == 0) f.add_unit(-c.bits[i]);
      }
    }
    cm.outputs.push_back(z);
    if (j + 1 < m) a = rotr_word(xor_const_word(z, s.glues[j].xor_const), s.glues[j].rot);
  }
  if (pruned) {
    // Output bits above a slice that nothing retained reads are pinned too.
    std::vector<char> used(static_cast<std::size_t>(f.var_count()) + 1, 0);
    for (int v : cm.projection) used[static_cast<std::size_t>(v)] = 1;
    for (std::size_t j = 0; j < m; ++j)
      for (unsigned i = cm.kept_bits[j]; i < n; ++i) {
        const int v = cm.outputs[j].bits[i];
        if (!used[static_cast<std::size_t>(v)]) f.add_unit(-v);
      }
  }
  f.add_group("projection", cm.projection);
  return cm;
}

ChainProbability chain_probability(const ChainSpec& s, const SolverConfig& cfg, CountMethod method) {
  const auto t0 = std::chrono::steady_clock::now();
  s.check();
  ChainProbability p;
  p.total_free = s.fresh_bits();
  for (std::size_t j = 0; j < s.adds.size(); ++j) {
    auto w = xdp_weight(s.adds[j]);
    if (!w) throw Error(ErrorCode::InvalidDifferential, "addition " + std::to_string(j) + " is impossible");
    p.indep_weight += *w;
    if (j == 0) p.first_weight = *w;
  }
  bool use_dp = method == CountMethod::CarryDp || (method == CountMethod::Auto && !cfg.external_counter());
  if (use_dp) {
    p.count = chain_count_dp(s);
    p.backend = "carry-dp";
  } else {
    ChainModel cm = build_chain_model(s, true);
    CountResult cr = count_models(cm.f, cm.projection, cfg);
    p.count = cr.count << cm.rescale_bits();
    p.backend = cr.backend;
    p.pruned = true;
    p.projected_bits = static_cast<unsigned>(cm.projection.size());
  }
  p.joint_log2 = big_log2(p.count) - p.total_free;
  p.cond_log2 = p.joint_log2 + p.first_weight;
  p.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return p;
}

std::string cma_status_name(CmaStatus s) {
  switch (s) {
    case CmaStatus::ValidConfirmed: return "ValidConfirmed";
    case CmaStatus::InvalidConflict: return "InvalidConflict";
    case CmaStatus::InvalidBySat: return "InvalidBySat";
    case CmaStatus::InvalidDifferential: return "InvalidDifferential";
  }
  return "?";
}

CmaReport cma_validate(const ChainSpec& s, const SolverConfig& cfg, bool with_probability, CountMethod method) {
  const auto t0 = std::chrono::steady_clock::now();
  s.check();
  CmaReport r;
  r.spec = s;
  auto finish = [&]() {
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return r;
  };
  for (std::size_t j = 0; j < s.adds.size(); ++j)
    if (!xdp_valid(s.adds[j])) {
      r.status = CmaStatus::InvalidDifferential;
      r.note = "addition " + std::to_string(j) + " is individually impossible";
      return finish();
    }
  bool conflict = false;
  for (std::size_t j = 0; j + 1 < s.adds.size(); ++j) {
    r.conflicts.push_back(detect_pair_conflict(s.adds[j], s.glues[j], s.adds[j + 1]));
    r.nonindep.push_back(detect_nonindep_positions(s.adds[j], s.glues[j], s.adds[j + 1]));
    if (r.conflicts.back().q != 0) conflict = true;
  }
  if (conflict) {
    r.status = CmaStatus::InvalidConflict;
    return finish();
  }
  ChainModel cm = build_chain_model(s, true);
  SatResult sr = solve_sat(cm.f, cfg);
  if (sr.status == SatStatus::Unsat) {
    r.status = CmaStatus::InvalidBySat;
    return finish();
  }
  r.status = CmaStatus::ValidConfirmed;
  if (with_probability) r.probability = chain_probability(s, cfg, method);
  return finish();
}

nlohmann::json to_json(const ChainProbability& p) {
  nlohmann::json j;
  j["count"] = p.count.str();
  j["fresh_bits"] = p.total_free;
  j["joint_log2"] = std::round(p.joint_log2 * 1e4) / 1e4;
  j["conditional_log2"] = std::round(p.cond_log2 * 1e4) / 1e4;
  j["independence_weight"] = p.indep_weight;
  j["first_weight"] = p.first_weight;
  j["backend"] = p.backend;
  j["pruned"] = p.pruned;
  if (p.pruned) j["projected_bits"] = p.projected_bits;
  j["seconds"] = p.seconds;
  return j;
}

nlohmann::json to_json(const CmaReport& r) {
  nlohmann::json j;
  const unsigned n = r.spec.n;
  j["word_size"] = n;
  nlohmann::json adds = nlohmann::json::array();
  for (std::size_t k = 0; k < r.spec.adds.size(); ++k) {
    const auto& t = r.spec.adds[k];
    nlohmann::json a;
    if (k < r.spec.names.size()) a["name"] = r.spec.names[k];
    a["dx"] = format_hex(t.dx, n);
    a["dy"] = format_hex(t.dy, n);
    a["dz"] = format_hex(t.dz, n);
    if (auto w = xdp_weight(t)) a["weight"] = *w;
    nlohmann::json cons = nlohmann::json::array();
    if (xdp_valid(t))
      for (const auto& d : output_constraints(t))
        if (d.kind != OutputKind::Uniform) cons.push_back(d.describe());
    a["output_constraints"] = cons;
    adds.push_back(a);
  }
  j["additions"] = adds;
  nlohmann::json links = nlohmann::json::array();
  for (std::size_t k = 0; k + 1 < r.spec.adds.size(); ++k) {
    nlohmann::json l;
    l["rot"] = r.spec.glues[k].rot;
    l["xor"] = format_hex(r.spec.glues[k].xor_const, n);
    if (k < r.conflicts.size()) {
      l["q"] = format_hex(r.conflicts[k].q, n);
      nlohmann::json recs = nlohmann::json::array();
      for (const auto& rec : r.conflicts[k].records) {
        nlohmann::json jr;
        jr["bit"] = rec.bit;
        jr["description"] = rec.describe();
        for (const auto& [name, bits] : rec.bits) jr["bits"][name] = bits;
        recs.push_back(jr);
      }
      l["conflicts"] = recs;
    }
    if (k < r.nonindep.size()) {
      nlohmann::json ps = nlohmann::json::array();
      for (const auto& p : r.nonindep[k]) ps.push_back({{"second", p.m2_bit}, {"first", p.m1_bit}});
      l["nonindependent_positions"] = ps;
    }
    links.push_back(l);
  }
  j["links"] = links;
  j["status"] = cma_status_name(r.status);
  if (!r.note.empty()) j["note"] = r.note;
  if (r.probability) j["probability"] = to_json(*r.probability);
  j["seconds"] = r.seconds;
  return j;
}

ChainSpec chain_from_json(const nlohmann::json& j) {
  try {
    const std::string fmt = j.value("format", "");
    if (fmt != "arxtrail-cma/1") throw Error(ErrorCode::Parse, "unsupported CMA format '" + fmt + "'");
    ChainSpec s;
    s.n = j.at("word_size").get<unsigned>();
    check_width(s.n);
    for (const auto& a : j.at("additions")) {
      s.adds.emplace_back(s.n, parse_word(a.at("dx").get<std::string>(), s.n), parse_word(a.at("dy").get<std::string>(), s.n),
                          parse_word(a.at("dz").get<std::string>(), s.n));
      s.names.push_back(a.value("name", "A" + std::to_string(s.adds.size() - 1)));
    }
    if (j.contains("links"))
      for (const auto& l : j.at("links")) {
        Glue g;
        g.rot = l.value("rot", 0u);
        if (l.contains("xor")) g.xor_const = parse_word(l.at("xor").get<std::string>(), s.n);
        s.glues.push_back(g);
      }
    while (s.glues.size() + 1 < s.adds.size()) s.glues.push_back({});
    if (s.adds.empty()) throw Error(ErrorCode::Parse, "CMA file lists no additions");
    s.check();
    return s;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::Parse, std::string("malformed CMA JSON: ") + e.what());
  }
}

nlohmann::json chain_to_json(const ChainSpec& s) {
  nlohmann::json j;
  j["format"] = "arxtrail-cma/1";
  j["word_size"] = s.n;
  nlohmann::json adds = nlohmann::json::array(), links = nlohmann::json::array();
  for (std::size_t k = 0; k < s.adds.size(); ++k)
    adds.push_back({{"name", k < s.names.size() ? s.names[k] : "A" + std::to_string(k)},
                    {"dx", format_hex(s.adds[k].dx, s.n)},
                    {"dy", format_hex(s.adds[k].dy, s.n)},
                    {"dz", format_hex(s.adds[k].dz, s.n)}});
  for (const auto& g : s.glues) links.push_back({{"rot", g.rot}, {"xor", format_hex(g.xor_const, s.n)}});
  j["additions"] = adds;
  j["links"] = links;
  return j;
}

ChainSpec load_chain(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Io, "cannot open CMA file '" + path + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::Parse, "CMA file '" + path + "' is not valid JSON: " + e.what());
  }
  return chain_from_json(j);
}

}  // namespace arxtrail
