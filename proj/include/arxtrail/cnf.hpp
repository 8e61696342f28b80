#pragma once
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace arxtrail {

using Lit = int;  // DIMACS literal: +v or -v, v >= 1
using Clause = std::vector<Lit>;

class CnfFormula {
 public:
  int new_var();
  // Allocates count consecutive variables and returns the first index.
  int new_vars(int count);
  int var_count() const { return var_count_; }

  void add_clause(Clause c);
  void add_clause(std::initializer_list<Lit> c) { add_clause(Clause(c)); }
  void add_unit(Lit l) { add_clause({l}); }
  const std::vector<Clause>& clauses() const { return clauses_; }
  std::size_t clause_count() const { return clauses_.size(); }

  // Named variable groups (ordered); adding to an existing name appends.
  void add_group(const std::string& name, const std::vector<int>& vars);
  const std::vector<int>& group(const std::string& name) const;
  bool has_group(const std::string& name) const { return groups_.count(name) != 0; }
  const std::map<std::string, std::vector<int>>& groups() const { return groups_; }

  // A constant-true literal, allocated on first use.
  Lit true_lit();

 private:
  int var_count_ = 0;
  std::vector<Clause> clauses_;
  std::map<std::string, std::vector<int>> groups_;
  int true_var_ = 0;
};

enum class Gadget { Eq, Neq, XorOut, AndOut };

// Eq/Neq take (a, b). XorOut and AndOut take (g, a, b) for g = a xor b and g = a and b.
void encode_gadget(CnfFormula& f, Gadget kind, const std::vector<Lit>& lits);

// Sinz sequential counter for sum(lits) <= k. reg[i][j] is true whenever at
// least j+1 of lits[0..i] are true, which lets callers bound prefixes.
struct AtMostK {
  std::vector<Lit> lits;
  int k = 0;
  std::vector<std::vector<Lit>> reg;
  // Forces sum(lits[0..prefix_len-1]) <= bound. Returns false if bound >= k (no-op).
  bool bound_prefix(CnfFormula& f, std::size_t prefix_len, int bound) const;
};

AtMostK encode_atmost_k(CnfFormula& f, const std::vector<Lit>& lits, int k);

// Group annotations are emitted as "c group <name> v1 v2 ..." lines and the
// optional projection as "c p show ... 0".
std::string emit_dimacs(const CnfFormula& f, const std::vector<int>* projection = nullptr, bool annotate = false);
CnfFormula parse_dimacs(std::string_view text, std::vector<int>* projection = nullptr);

}  // namespace arxtrail
