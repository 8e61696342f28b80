#pragma once
#include <map>
#include <string>
#include <vector>

#include "arxtrail/cnf.hpp"
#include "arxtrail/constraints.hpp"
#include "arxtrail/diff_model.hpp"
#include "arxtrail/value_model.hpp"

namespace arxtrail {

enum class OpKind { Add, RotL, RotR, Xor, XorConst };
enum class Part { Data, Key };

struct Op {
  OpKind kind = OpKind::Add;
  int out = -1;
  int in1 = -1;
  int in2 = -1;        // Add, Xor
  unsigned amount = 0; // rotations
  u64 constant = 0;    // XorConst
  int site = -1;       // Add: index into sites
};

// An addition site: round number, part and an index within the round.
struct AddSite {
  int round = 0;
  Part part = Part::Data;
  int slot = 0;
  std::string name;
  int op = -1;
};

// Straight-line ARX circuit over n-bit wires; each wire is assigned once.
class ArxCircuit {
 public:
  explicit ArxCircuit(unsigned n = 0) : n_(n) {}
  unsigned word_size() const { return n_; }

  int input(const std::string& name);
  int add(int a, int b, int round, Part part, int slot, const std::string& name);
  int rotl(int a, unsigned r);
  int rotr(int a, unsigned r);
  int xor_(int a, int b);
  int xor_const(int a, u64 k);
  // Records a wire under a trail field name such as "x3".
  void observe(const std::string& field, int wire);

  const std::vector<Op>& ops() const { return ops_; }
  const std::vector<AddSite>& sites() const { return sites_; }
  const std::vector<int>& inputs() const { return inputs_; }
  const std::vector<std::string>& wire_names() const { return names_; }
  const std::map<std::string, int>& observed() const { return observed_; }
  std::size_t wire_count() const { return names_.size(); }
  int observed_wire(const std::string& field) const;
  int site_index(int round, Part part, int slot) const;  // -1 if absent

  // Values of every wire for concrete inputs (in input order).
  std::vector<u64> evaluate(const std::vector<u64>& input_values) const;
  // Differences of every wire given input differences and the output
  // difference of each addition site.
  std::vector<u64> propagate(const std::vector<u64>& input_diffs, const std::vector<u64>& site_dz) const;
  // Per-site difference triples from propagated wire differences.
  std::vector<DiffTriple> site_triples(const std::vector<u64>& wire_diffs) const;

 private:
  int new_wire(const std::string& name);
  unsigned n_;
  std::vector<std::string> names_;
  std::vector<int> producer_;  // op index producing each wire, -1 for inputs
  std::vector<int> inputs_;
  std::vector<Op> ops_;
  std::vector<AddSite> sites_;
  std::map<std::string, int> observed_;
};

// A consecutive-addition link: site `to` reads the output of site `from`
// through rotations and constant XORs only.
struct SiteLink {
  int from = -1;
  int to = -1;
  Glue glue;
  bool second_input = false;  // the linked wire is `to`'s second input
};

std::vector<SiteLink> enumerate_links(const ArxCircuit& c);

// Whole-circuit value model under fixed wire differences.
struct CircuitValueModel {
  CnfFormula f;
  std::vector<WordVars> wires;
};
CircuitValueModel build_value_model(const ArxCircuit& c, const std::vector<u64>& wire_diffs);

// Differential search model: one difference word per wire, validity and
// weight bits per addition site.
struct CircuitDiffModel {
  CnfFormula f;
  std::vector<WordVars> wires;
  std::vector<WeightVars> weights;  // one per site, same order as sites()
};
CircuitDiffModel build_diff_model(const ArxCircuit& c);

}  // namespace arxtrail
