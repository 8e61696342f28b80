#include "arxtrail/ciphers.hpp"

#include <algorithm>
#include <cmath>
#include <regex>

namespace arxtrail {

namespace {

std::string field(const std::string& f, unsigned row) { return f + "." + std::to_string(row); }

const char* kChaskeyWords[4] = {"v0", "v1", "v2", "v3"};

void require_rounds(const CipherSpec& c, unsigned rounds) {
  if (c.family == Family::Speck && rounds < 2) throw Error(ErrorCode::InvalidArgument, c.id + " needs at least 2 rounds");
  if (rounds < 1) throw Error(ErrorCode::InvalidArgument, "at least one round is required");
  if ((c.family == Family::Chaskey || c.family == Family::ToyChaskey) && rounds > 12)
    throw Error(ErrorCode::InvalidArgument, "Chaskey permutations have at most 12 rounds");
}

}  // namespace

CipherSpec make_cipher(const std::string& id) {
  CipherSpec c;
  c.id = id;
  if (id == "speck32/64") {
    c.n = 16;
  } else if (id == "speck48/96") {
    c.n = 24, c.alpha = 8, c.beta = 3;
  } else if (id == "speck64/128") {
    c.n = 32, c.alpha = 8, c.beta = 3;
  } else if (id == "chaskey") {
    c.family = Family::Chaskey, c.n = 32, c.rot = {16, 5, 8, 13, 7, 16}, c.chain_group = 4;
  } else if (id == "toy-chaskey-32" || id == "toy-chaskey-28") {
    c.family = Family::ToyChaskey, c.n = id == "toy-chaskey-32" ? 8 : 7, c.rot = {3, 3, 2, 2, 2, 3};
  } else {
    static const std::regex toy_speck(R"(toy-speck-(\d+))");
    std::smatch m;
    if (!std::regex_match(id, m, toy_speck)) throw Error(ErrorCode::InvalidArgument, "unknown cipher '" + id + "'");
    unsigned block = static_cast<unsigned>(std::stoul(m[1]));
    if (block % 2 != 0 || block < 8 || block > 64) throw Error(ErrorCode::InvalidArgument, "unsupported toy SPECK block size in '" + id + "'");
    c.family = Family::ToySpeck, c.n = block / 2, c.alpha = 6, c.beta = 3;
  }
  return c;
}

std::vector<std::string> cipher_ids() {
  return {"speck32/64", "speck48/96", "speck64/128", "chaskey", "toy-chaskey-32", "toy-chaskey-28", "toy-speck-28", "toy-speck-14"};
}

ArxCircuit build_circuit(const CipherSpec& c, unsigned rounds) {
  require_rounds(c, rounds);
  const unsigned n = c.n;
  ArxCircuit g(n);
  switch (c.family) {
    case Family::Speck: {
      std::vector<int> l(rounds + 2, -1), k(rounds, -1), x(rounds + 1, -1), y(rounds + 1, -1);
      for (int i = 0; i < 3; ++i) l[static_cast<std::size_t>(i)] = g.input("l" + std::to_string(i));
      k[0] = g.input("k0");
      x[0] = g.input("x0");
      y[0] = g.input("y0");
      for (unsigned i = 0; i + 2 <= rounds; ++i) {
        int t = g.add(g.rotr(l[i], c.alpha), k[i], static_cast<int>(i), Part::Key, 0, "M" + std::to_string(i));
        l[i + 3] = g.xor_const(t, i);
        k[i + 1] = g.xor_(g.rotl(k[i], c.beta), l[i + 3]);
      }
      // The first round's addition is skipped: the trail starts after it.
      x[1] = g.xor_(x[0], k[0]);
      y[1] = g.xor_(y[0], x[1]);
      for (unsigned i = 1; i < rounds; ++i) {
        int z = g.add(g.rotr(x[i], c.alpha), y[i], static_cast<int>(i), Part::Data, 0, "D" + std::to_string(i));
        x[i + 1] = g.xor_(z, k[i]);
        y[i + 1] = g.xor_(g.rotl(y[i], c.beta), x[i + 1]);
      }
      for (unsigned i = 0; i < l.size(); ++i)
        if (l[i] >= 0) g.observe(field("l", i), l[i]);
      for (unsigned i = 0; i < k.size(); ++i) g.observe(field("k", i), k[i]);
      for (unsigned i = 0; i <= rounds; ++i) {
        g.observe(field("x", i), x[i]);
        g.observe(field("y", i), y[i]);
      }
      break;
    }
    case Family::ToySpeck: {
      int x = g.input("x0"), y = g.input("y0");
      g.observe("x.0", x);
      g.observe("y.0", y);
      for (unsigned i = 0; i < rounds; ++i) {
        int z = g.add(g.rotr(x, c.alpha), y, static_cast<int>(i), Part::Data, 0, "D" + std::to_string(i));
        x = g.xor_const(z, i);
        y = g.xor_(x, g.rotl(y, c.beta));
        g.observe(field("x", i + 1), x);
        g.observe(field("y", i + 1), y);
      }
      break;
    }
    case Family::Chaskey:
    case Family::ToyChaskey: {
      const auto& r = c.rot;
      int v[4];
      for (int j = 0; j < 4; ++j) {
        v[j] = g.input(std::string(kChaskeyWords[j]) + "_0");
        g.observe(field(kChaskeyWords[j], 0), v[j]);
      }
      for (unsigned i = 0; i < rounds; ++i) {
        const int ri = static_cast<int>(i);
        const std::string sfx = "." + std::to_string(i);
        int s = g.add(v[0], v[1], ri, Part::Data, 0, "M1" + sfx);
        int w0 = g.rotl(s, r[0]);
        int w1 = g.xor_(g.rotl(v[1], r[1]), s);
        int w2 = g.add(v[2], v[3], ri, Part::Data, 1, "M2" + sfx);
        int w3 = g.xor_(g.rotl(v[3], r[2]), w2);
        v[0] = g.add(w0, w3, ri, Part::Data, 2, "M3" + sfx);
        v[3] = g.xor_(g.rotl(w3, r[3]), v[0]);
        int t = g.add(w2, w1, ri, Part::Data, 3, "M4" + sfx);
        v[2] = g.rotl(t, r[5]);
        v[1] = g.xor_(g.rotl(w1, r[4]), t);
        for (int j = 0; j < 4; ++j) g.observe(field(kChaskeyWords[j], i + 1), v[j]);
      }
      break;
    }
  }
  return g;
}

std::vector<std::string> row_fields(const CipherSpec& c, unsigned rounds, unsigned row) {
  switch (c.family) {
    case Family::Speck:
      if (row < rounds) return {"l", "k", "x", "y"};
      return {"x", "y"};
    case Family::ToySpeck:
      return {"x", "y"};
    default:
      return {"v0", "v1", "v2", "v3"};
  }
}

std::vector<std::string> weight_columns(const CipherSpec& c) {
  if (c.family == Family::Speck) return {"w_k", "w_d"};
  return {"w"};
}

TrailDiffs trail_differences(const CipherSpec& c, const ArxCircuit& circ, const Trail& t) {
  const unsigned n = c.n, R = t.rounds;
  if (t.word_size != n) throw Error(ErrorCode::WidthMismatch, "trail word size " + std::to_string(t.word_size) + " does not match " + c.id);
  if (t.rows.size() != R + 1) throw Error(ErrorCode::InvalidArgument, "trail row count does not match its round count");
  auto opt = [&](unsigned row, const char* f) -> u64 {
    if (row > R) return 0;
    const auto& r = t.rows[row];
    return r.has(f) ? r.at(f) : 0;
  };
  TrailDiffs d;
  d.site_dz.assign(circ.sites().size(), 0);
  switch (c.family) {
    case Family::Speck:
      d.inputs = {t.row(0).at("l"), t.row(1).at("l"), opt(2, "l"), t.row(0).at("k"), t.row(0).at("x"), t.row(0).at("y")};
      for (std::size_t s = 0; s < circ.sites().size(); ++s) {
        const auto& site = circ.sites()[s];
        const unsigned i = static_cast<unsigned>(site.round);
        if (site.part == Part::Key)
          d.site_dz[s] = t.row(i + 1).at("k") ^ rotl(t.row(i).at("k"), c.beta, n);
        else
          d.site_dz[s] = t.row(i + 1).at("x") ^ t.row(i).at("k");
      }
      break;
    case Family::ToySpeck:
      d.inputs = {t.row(0).at("x"), t.row(0).at("y")};
      for (std::size_t s = 0; s < circ.sites().size(); ++s) {
        const unsigned i = static_cast<unsigned>(circ.sites()[s].round);
        d.site_dz[s] = t.row(i + 1).at("x");
      }
      break;
    default: {
      const auto& r = c.rot;
      d.inputs = {t.row(0).at("v0"), t.row(0).at("v1"), t.row(0).at("v2"), t.row(0).at("v3")};
      for (unsigned i = 0; i < R; ++i) {
        const auto &a = t.row(i), &b = t.row(i + 1);
        u64 tt = rotr(b.at("v2"), r[5], n);
        u64 w1 = rotr(b.at("v1") ^ tt, r[4], n);
        u64 s = w1 ^ rotl(a.at("v1"), r[1], n);
        u64 w3 = rotr(b.at("v3") ^ b.at("v0"), r[3], n);
        u64 w2 = w3 ^ rotl(a.at("v3"), r[2], n);
        const u64 dz[4] = {s, w2, b.at("v0"), tt};
        for (int slot = 0; slot < 4; ++slot) d.site_dz[static_cast<std::size_t>(circ.site_index(static_cast<int>(i), Part::Data, slot))] = dz[slot];
      }
      break;
    }
  }
  d.wires = circ.propagate(d.inputs, d.site_dz);
  for (unsigned row = 0; row <= R; ++row) {
    for (const auto& [f, v] : t.rows[row].words) {
      auto it = circ.observed().find(field(f, row));
      if (it == circ.observed().end()) continue;
      u64 got = d.wires[static_cast<std::size_t>(it->second)];
      if (got != v)
        throw Error(ErrorCode::InvalidArgument, "trail word " + f + " in row " + std::to_string(row) + " is " + format_hex(v, n) +
                                                    " but the listed differences propagate to " + format_hex(got, n));
    }
  }
  d.triples = circ.site_triples(d.wires);
  return d;
}

std::vector<std::map<std::string, double>> row_weights(const CipherSpec& c, const ArxCircuit& circ, unsigned rounds,
                                                       const std::vector<double>& w) {
  std::vector<std::map<std::string, double>> rows(rounds + 1);
  for (std::size_t s = 0; s < circ.sites().size(); ++s) {
    const auto& site = circ.sites()[s];
    auto& row = rows[static_cast<std::size_t>(site.round)];
    if (c.family == Family::Speck)
      row[site.part == Part::Key ? "w_k" : "w_d"] += w[s];
    else
      row["w"] += w[s];
  }
  return rows;
}

Trail make_trail(const CipherSpec& c, const ArxCircuit& circ, unsigned rounds, const std::vector<u64>& wires) {
  Trail t;
  t.cipher = c.id;
  t.word_size = c.n;
  t.rounds = rounds;
  std::vector<double> w;
  for (const auto& tr : circ.site_triples(wires)) {
    auto x = xdp_weight(tr);
    w.push_back(x ? static_cast<double>(*x) : std::nan(""));
  }
  auto rw = row_weights(c, circ, rounds, w);
  for (unsigned r = 0; r <= rounds; ++r) {
    TrailRow row;
    row.round = static_cast<int>(r);
    for (const auto& f : row_fields(c, rounds, r)) row.words[f] = wires[static_cast<std::size_t>(circ.observed_wire(field(f, r)))];
    if (r < rounds) row.values = rw[r];
    t.rows.push_back(row);
  }
  return t;
}

std::vector<WeightMismatch> check_trail_weights(const CipherSpec& c, const Trail& t) {
  ArxCircuit circ = build_circuit(c, t.rounds);
  TrailDiffs d = trail_differences(c, circ, t);
  std::vector<double> w;
  for (const auto& tr : d.triples) {
    auto x = xdp_weight(tr);
    w.push_back(x ? static_cast<double>(*x) : std::nan(""));
  }
  auto rw = row_weights(c, circ, t.rounds, w);
  std::vector<WeightMismatch> out;
  for (unsigned r = 0; r <= t.rounds; ++r) {
    for (const auto& col : weight_columns(c)) {
      auto it = t.rows[r].values.find(col);
      auto jt = rw[r].find(col);
      if (it == t.rows[r].values.end() && jt == rw[r].end()) continue;
      double stored = it == t.rows[r].values.end() ? 0 : it->second;
      double mine = jt == rw[r].end() ? 0 : jt->second;
      if (!(std::fabs(stored - mine) < 1e-9)) out.push_back({r, col, stored, mine});
    }
  }
  return out;
}

std::vector<std::vector<int>> matsui_units(const CipherSpec& c, const ArxCircuit& circ, unsigned rounds) {
  std::vector<std::vector<int>> units;
  if (c.family == Family::Speck) {
    for (unsigned i = 0; i + 2 <= rounds; ++i)
      units.push_back({circ.site_index(static_cast<int>(i), Part::Key, 0), circ.site_index(static_cast<int>(i + 1), Part::Data, 0)});
    return units;
  }
  units.resize(rounds);
  for (std::size_t s = 0; s < circ.sites().size(); ++s) units[static_cast<std::size_t>(circ.sites()[s].round)].push_back(static_cast<int>(s));
  return units;
}

unsigned units_round_offset(const CipherSpec& c) { return c.family == Family::Speck ? 1 : 0; }

std::vector<CmaRef> enumerate_cmas(const CipherSpec& c, const ArxCircuit& circ, const std::vector<DiffTriple>& triples) {
  const auto links = enumerate_links(circ);
  const std::size_t S = circ.sites().size();
  std::vector<int> in_link(S, -1), out_link(S, -1);
  for (std::size_t i = 0; i < links.size(); ++i) {
    const auto& l = links[i];
    if (in_link[static_cast<std::size_t>(l.to)] >= 0 || out_link[static_cast<std::size_t>(l.from)] >= 0)
      throw Error(ErrorCode::Internal, "addition sites link into a tree; only chains are supported");
    in_link[static_cast<std::size_t>(l.to)] = static_cast<int>(i);
    out_link[static_cast<std::size_t>(l.from)] = static_cast<int>(i);
  }
  auto oriented = [&](std::size_t site, bool swap) {
    DiffTriple t = triples[site];
    if (swap) std::swap(t.dx, t.dy);
    return t;
  };
  auto make_ref = [&](const std::vector<int>& sites, const std::vector<int>& link_ids) {
    CmaRef r;
    r.sites = sites;
    r.spec.n = c.n;
    for (std::size_t j = 0; j < sites.size(); ++j) {
      const auto s = static_cast<std::size_t>(sites[j]);
      bool swap = j > 0 && links[static_cast<std::size_t>(link_ids[j - 1])].second_input;
      r.spec.adds.push_back(oriented(s, swap));
      r.spec.names.push_back(circ.sites()[s].name);
      if (j > 0) r.spec.glues.push_back(links[static_cast<std::size_t>(link_ids[j - 1])].glue);
    }
    return r;
  };
  std::vector<CmaRef> out;
  const unsigned g = std::max(2u, c.chain_group);
  for (std::size_t s = 0; s < S; ++s) {
    if (in_link[s] >= 0) continue;
    std::vector<int> chain{static_cast<int>(s)}, ids;
    for (int cur = static_cast<int>(s); out_link[static_cast<std::size_t>(cur)] >= 0;) {
      int li = out_link[static_cast<std::size_t>(cur)];
      ids.push_back(li);
      cur = links[static_cast<std::size_t>(li)].to;
      chain.push_back(cur);
    }
    if (g == 2) {
      for (std::size_t j = 0; j + 1 < chain.size(); ++j) out.push_back(make_ref({chain[j], chain[j + 1]}, {ids[j]}));
    } else {
      for (std::size_t j = 0; j + 1 < chain.size(); j += g) {
        std::size_t e = std::min(chain.size(), j + g);
        out.push_back(make_ref(std::vector<int>(chain.begin() + static_cast<long>(j), chain.begin() + static_cast<long>(e)),
                               std::vector<int>(ids.begin() + static_cast<long>(j), ids.begin() + static_cast<long>(e - 1))));
      }
    }
  }
  return out;
}

std::vector<std::string> key_inputs(const CipherSpec& c) {
  if (c.family == Family::Speck) return {"l2", "l1", "l0", "k0"};
  return {};
}

}  // namespace arxtrail
