#include "arxtrail/cnf.hpp"

#include <cstdlib>
#include <sstream>

#include "arxtrail/word.hpp"

namespace arxtrail {

int CnfFormula::new_var() { return ++var_count_; }

int CnfFormula::new_vars(int count) {
  if (count < 0) throw Error(ErrorCode::InvalidArgument, "negative variable count");
  int first = var_count_ + 1;
  var_count_ += count;
  return first;
}

void CnfFormula::add_clause(Clause c) {
  for (Lit l : c)
    if (l == 0 || std::abs(l) > var_count_)
      throw Error(ErrorCode::InvalidArgument, "literal " + std::to_string(l) + " out of range");
  clauses_.push_back(std::move(c));
}

void CnfFormula::add_group(const std::string& name, const std::vector<int>& vars) {
  auto& g = groups_[name];
  g.insert(g.end(), vars.begin(), vars.end());
}

const std::vector<int>& CnfFormula::group(const std::string& name) const {
  auto it = groups_.find(name);
  if (it == groups_.end()) throw Error(ErrorCode::InvalidArgument, "unknown variable group '" + name + "'");
  return it->second;
}

Lit CnfFormula::true_lit() {
  if (!true_var_) {
    true_var_ = new_var();
    add_unit(true_var_);
  }
  return true_var_;
}

void encode_gadget(CnfFormula& f, Gadget kind, const std::vector<Lit>& l) {
  auto need = [&](std::size_t k) {
    if (l.size() != k) throw Error(ErrorCode::InvalidArgument, "gadget arity mismatch");
  };
  switch (kind) {
    case Gadget::Eq:
      need(2);
      f.add_clause({-l[0], l[1]});
      f.add_clause({l[0], -l[1]});
      break;
    case Gadget::Neq:
      need(2);
      f.add_clause({l[0], l[1]});
      f.add_clause({-l[0], -l[1]});
      break;
    case Gadget::XorOut: {
      need(3);
      Lit g = l[0], a = l[1], b = l[2];
      f.add_clause({-g, a, b});
      f.add_clause({-g, -a, -b});
      f.add_clause({g, -a, b});
      f.add_clause({g, a, -b});
      break;
    }
    case Gadget::AndOut: {
      need(3);
      Lit g = l[0], a = l[1], b = l[2];
      f.add_clause({-g, a});
      f.add_clause({-g, b});
      f.add_clause({g, -a, -b});
      break;
    }
  }
}

AtMostK encode_atmost_k(CnfFormula& f, const std::vector<Lit>& lits, int k) {
  if (k < 0) throw Error(ErrorCode::InvalidArgument, "at-most-k needs k >= 0");
  AtMostK r;
  r.lits = lits;
  r.k = k;
  const std::size_t m = lits.size();
  if (k == 0) {
    for (Lit x : lits) f.add_unit(-x);
    return r;
  }
  if (m == 0) return r;
  r.reg.assign(m, {});
  for (std::size_t i = 0; i < m; ++i) {
    int first = f.new_vars(k);
    for (int j = 0; j < k; ++j) r.reg[i].push_back(first + j);
  }
  const Lit x0 = lits[0];
  f.add_clause({-x0, r.reg[0][0]});
  for (int j = 1; j < k; ++j) f.add_unit(-r.reg[0][j]);
  for (std::size_t i = 1; i < m; ++i) {
    const Lit x = lits[i];
    f.add_clause({-x, r.reg[i][0]});
    f.add_clause({-r.reg[i - 1][0], r.reg[i][0]});
    for (int j = 1; j < k; ++j) {
      f.add_clause({-x, -r.reg[i - 1][j - 1], r.reg[i][j]});
      f.add_clause({-r.reg[i - 1][j], r.reg[i][j]});
    }
    f.add_clause({-x, -r.reg[i - 1][k - 1]});
  }
  return r;
}

bool AtMostK::bound_prefix(CnfFormula& f, std::size_t prefix_len, int bound) const {
  if (prefix_len == 0 || bound >= k) return false;
  if (prefix_len > lits.size()) throw Error(ErrorCode::InvalidArgument, "prefix longer than counter");
  if (bound < 0) {
    f.add_clause(Clause{});  // explicit unsatisfiability
    return true;
  }
  f.add_unit(-reg[prefix_len - 1][static_cast<std::size_t>(bound)]);
  return true;
}

std::string emit_dimacs(const CnfFormula& f, const std::vector<int>* projection, bool annotate) {
  std::ostringstream os;
  if (annotate)
    for (const auto& [name, vars] : f.groups()) {
      os << "c group " << name;
      for (int v : vars) os << ' ' << v;
      os << '\n';
    }
  if (projection) {
    os << "c p show";
    for (int v : *projection) os << ' ' << v;
    os << " 0\n";
  }
  os << "p cnf " << f.var_count() << ' ' << f.clause_count();
  for (const auto& c : f.clauses()) {
    os << '\n';
    for (Lit l : c) os << l << ' ';
    os << '0';
  }
  return os.str();
}

CnfFormula parse_dimacs(std::string_view text, std::vector<int>* projection) {
  CnfFormula f;
  std::istringstream is{std::string(text)};
  std::string line;
  bool header = false;
  long declared_clauses = 0;
  Clause cur;
  while (std::getline(is, line)) {
    std::istringstream ls(line);
    std::string tok;
    if (!(ls >> tok)) continue;
    if (tok == "c") {
      std::string kw;
      if (ls >> kw) {
        if (kw == "group") {
          std::string name;
          ls >> name;
          std::vector<int> vars;
          int v;
          while (ls >> v) vars.push_back(v);
          f.add_group(name, vars);
        } else if (kw == "p" && projection) {
          std::string show;
          ls >> show;
          int v;
          while (ls >> v && v != 0) projection->push_back(v);
        }
      }
      continue;
    }
    if (tok == "p") {
      std::string fmt;
      long vars = 0;
      if (!(ls >> fmt >> vars >> declared_clauses) || fmt != "cnf")
        throw Error(ErrorCode::Parse, "bad DIMACS header");
      f.new_vars(static_cast<int>(vars));
      header = true;
      continue;
    }
    if (!header) throw Error(ErrorCode::Parse, "clause before DIMACS header");
    std::istringstream cs(line);
    long v;
    while (cs >> v) {
      if (v == 0) {
        f.add_clause(cur);
        cur.clear();
      } else {
        cur.push_back(static_cast<Lit>(v));
      }
    }
  }
  if (!cur.empty()) throw Error(ErrorCode::Parse, "unterminated clause");
  if (!header) throw Error(ErrorCode::Parse, "missing DIMACS header");
  if (static_cast<long>(f.clause_count()) != declared_clauses)
    throw Error(ErrorCode::Parse, "clause count does not match header");
  return f;
}

}  // namespace arxtrail
