#include "arxtrail/circuit.hpp"

#include <algorithm>

namespace arxtrail {

int ArxCircuit::new_wire(const std::string& name) {
  names_.push_back(name.empty() ? "w" + std::to_string(names_.size()) : name);
  producer_.push_back(-1);
  return static_cast<int>(names_.size()) - 1;
}

int ArxCircuit::input(const std::string& name) {
  int w = new_wire(name);
  inputs_.push_back(w);
  return w;
}

int ArxCircuit::add(int a, int b, int round, Part part, int slot, const std::string& name) {
  int w = new_wire(name);
  Op op;
  op.kind = OpKind::Add;
  op.out = w;
  op.in1 = a;
  op.in2 = b;
  op.site = static_cast<int>(sites_.size());
  ops_.push_back(op);
  producer_[static_cast<std::size_t>(w)] = static_cast<int>(ops_.size()) - 1;
  sites_.push_back({round, part, slot, name, static_cast<int>(ops_.size()) - 1});
  return w;
}

int ArxCircuit::rotl(int a, unsigned r) {
  int w = new_wire("");
  ops_.push_back({OpKind::RotL, w, a, -1, r % n_, 0, -1});
  producer_[static_cast<std::size_t>(w)] = static_cast<int>(ops_.size()) - 1;
  return w;
}

int ArxCircuit::rotr(int a, unsigned r) {
  int w = new_wire("");
  ops_.push_back({OpKind::RotR, w, a, -1, r % n_, 0, -1});
  producer_[static_cast<std::size_t>(w)] = static_cast<int>(ops_.size()) - 1;
  return w;
}

int ArxCircuit::xor_(int a, int b) {
  int w = new_wire("");
  ops_.push_back({OpKind::Xor, w, a, b, 0, 0, -1});
  producer_[static_cast<std::size_t>(w)] = static_cast<int>(ops_.size()) - 1;
  return w;
}

int ArxCircuit::xor_const(int a, u64 k) {
  int w = new_wire("");
  ops_.push_back({OpKind::XorConst, w, a, -1, 0, k & word_mask(n_), -1});
  producer_[static_cast<std::size_t>(w)] = static_cast<int>(ops_.size()) - 1;
  return w;
}

void ArxCircuit::observe(const std::string& field, int wire) { observed_[field] = wire; }

int ArxCircuit::observed_wire(const std::string& field) const {
  auto it = observed_.find(field);
  if (it == observed_.end()) throw Error(ErrorCode::InvalidArgument, "circuit has no observed word '" + field + "'");
  return it->second;
}

int ArxCircuit::site_index(int round, Part part, int slot) const {
  for (std::size_t i = 0; i < sites_.size(); ++i)
    if (sites_[i].round == round && sites_[i].part == part && sites_[i].slot == slot) return static_cast<int>(i);
  return -1;
}

std::vector<u64> ArxCircuit::evaluate(const std::vector<u64>& in) const {
  if (in.size() != inputs_.size()) throw Error(ErrorCode::InvalidArgument, "wrong number of circuit inputs");
  const u64 m = word_mask(n_);
  std::vector<u64> v(names_.size(), 0);
  for (std::size_t i = 0; i < inputs_.size(); ++i) v[static_cast<std::size_t>(inputs_[i])] = in[i] & m;
  for (const Op& op : ops_) {
    const u64 a = v[static_cast<std::size_t>(op.in1)];
    u64& o = v[static_cast<std::size_t>(op.out)];
    switch (op.kind) {
      case OpKind::Add: o = (a + v[static_cast<std::size_t>(op.in2)]) & m; break;
      case OpKind::RotL: o = arxtrail::rotl(a, op.amount, n_); break;
      case OpKind::RotR: o = arxtrail::rotr(a, op.amount, n_); break;
      case OpKind::Xor: o = a ^ v[static_cast<std::size_t>(op.in2)]; break;
      case OpKind::XorConst: o = a ^ op.constant; break;
    }
  }
  return v;
}

std::vector<u64> ArxCircuit::propagate(const std::vector<u64>& in, const std::vector<u64>& site_dz) const {
  if (in.size() != inputs_.size()) throw Error(ErrorCode::InvalidArgument, "wrong number of input differences");
  if (site_dz.size() != sites_.size()) throw Error(ErrorCode::InvalidArgument, "wrong number of addition differences");
  const u64 m = word_mask(n_);
  std::vector<u64> d(names_.size(), 0);
  for (std::size_t i = 0; i < inputs_.size(); ++i) d[static_cast<std::size_t>(inputs_[i])] = in[i] & m;
  for (const Op& op : ops_) {
    const u64 a = d[static_cast<std::size_t>(op.in1)];
    u64& o = d[static_cast<std::size_t>(op.out)];
    switch (op.kind) {
      case OpKind::Add: o = site_dz[static_cast<std::size_t>(op.site)] & m; break;
      case OpKind::RotL: o = arxtrail::rotl(a, op.amount, n_); break;
      case OpKind::RotR: o = arxtrail::rotr(a, op.amount, n_); break;
      case OpKind::Xor: o = a ^ d[static_cast<std::size_t>(op.in2)]; break;
      case OpKind::XorConst: o = a; break;
    }
  }
  return d;
}

std::vector<DiffTriple> ArxCircuit::site_triples(const std::vector<u64>& d) const {
  std::vector<DiffTriple> out;
  for (const auto& s : sites_) {
    const Op& op = ops_[static_cast<std::size_t>(s.op)];
    out.emplace_back(n_, d[static_cast<std::size_t>(op.in1)], d[static_cast<std::size_t>(op.in2)],
                     d[static_cast<std::size_t>(op.out)]);
  }
  return out;
}

std::vector<SiteLink> enumerate_links(const ArxCircuit& c) {
  const unsigned n = c.word_size();
  std::vector<int> producer(c.wire_count(), -1);
  for (std::size_t i = 0; i < c.ops().size(); ++i) producer[static_cast<std::size_t>(c.ops()[i].out)] = static_cast<int>(i);
  std::vector<SiteLink> links;
  for (std::size_t s = 0; s < c.sites().size(); ++s) {
    const Op& add = c.ops()[static_cast<std::size_t>(c.sites()[s].op)];
    for (int which = 0; which < 2; ++which) {
      int w = which == 0 ? add.in1 : add.in2;
      std::vector<const Op*> chain;
      int from = -1;
      for (;;) {
        int p = producer[static_cast<std::size_t>(w)];
        if (p < 0) break;
        const Op& op = c.ops()[static_cast<std::size_t>(p)];
        if (op.kind == OpKind::Add) {
          from = op.site;
          break;
        }
        if (op.kind == OpKind::Xor) break;
        chain.push_back(&op);
        w = op.in1;
      }
      if (from < 0) continue;
      Glue g;
      for (auto it = chain.rbegin(); it != chain.rend(); ++it) {
        const Op& op = **it;
        if (op.kind == OpKind::XorConst)
          g.xor_const ^= rotl(op.constant, g.rot, n);
        else if (op.kind == OpKind::RotR)
          g.rot = (g.rot + op.amount) % n;
        else
          g.rot = (g.rot + n - op.amount % n) % n;
      }
      links.push_back({from, static_cast<int>(s), g, which == 1});
    }
  }
  return links;
}

CircuitValueModel build_value_model(const ArxCircuit& c, const std::vector<u64>& d) {
  const unsigned n = c.word_size();
  if (d.size() != c.wire_count()) throw Error(ErrorCode::InvalidArgument, "wire difference count mismatch");
  CircuitValueModel m;
  m.wires.resize(c.wire_count());
  for (int w : c.inputs()) m.wires[static_cast<std::size_t>(w)] = new_word(m.f, n, c.wire_names()[static_cast<std::size_t>(w)]);
  for (const Op& op : c.ops()) {
    const WordVars& a = m.wires[static_cast<std::size_t>(op.in1)];
    WordVars& o = m.wires[static_cast<std::size_t>(op.out)];
    switch (op.kind) {
      case OpKind::Add: {
        DiffTriple t(n, d[static_cast<std::size_t>(op.in1)], d[static_cast<std::size_t>(op.in2)], d[static_cast<std::size_t>(op.out)]);
        const std::string& name = c.sites()[static_cast<std::size_t>(op.site)].name;
        if (!xdp_valid(t)) throw Error(ErrorCode::InvalidDifferential, "addition " + name + " is impossible");
        o = add_state(m.f, a, m.wires[static_cast<std::size_t>(op.in2)], t, name);
        break;
      }
      case OpKind::RotL: o = rotl_word(a, op.amount); break;
      case OpKind::RotR: o = rotr_word(a, op.amount); break;
      case OpKind::Xor: o = xor_words(m.f, a, m.wires[static_cast<std::size_t>(op.in2)]); break;
      case OpKind::XorConst: o = xor_const_word(a, op.constant); break;
    }
  }
  return m;
}

CircuitDiffModel build_diff_model(const ArxCircuit& c) {
  const unsigned n = c.word_size();
  CircuitDiffModel m;
  m.wires.resize(c.wire_count());
  m.weights.resize(c.sites().size());
  for (int w : c.inputs())
    m.wires[static_cast<std::size_t>(w)] = new_word(m.f, n, "d." + c.wire_names()[static_cast<std::size_t>(w)]);
  for (const Op& op : c.ops()) {
    const WordVars& a = m.wires[static_cast<std::size_t>(op.in1)];
    WordVars& o = m.wires[static_cast<std::size_t>(op.out)];
    switch (op.kind) {
      case OpKind::Add: {
        const AddSite& s = c.sites()[static_cast<std::size_t>(op.site)];
        o = new_word(m.f, n, "d." + s.name);
        m.weights[static_cast<std::size_t>(op.site)] =
            encode_modadd_diff(m.f, a, m.wires[static_cast<std::size_t>(op.in2)], o,
                               s.part == Part::Key ? WeightTag::Key : WeightTag::Data, s.round);
        break;
      }
      case OpKind::RotL: o = rotl_word(a, op.amount); break;
      case OpKind::RotR: o = rotr_word(a, op.amount); break;
      case OpKind::Xor: o = xor_words(m.f, a, m.wires[static_cast<std::size_t>(op.in2)]); break;
      case OpKind::XorConst: o = a; break;
    }
  }
  return m;
}

}  // namespace arxtrail
