#pragma once
#include <atomic>
#include <cstdint>
#include <vector>

#include "arxtrail/cnf.hpp"

namespace arxtrail {

enum class SatStatus { Sat, Unsat, Unknown };

// Small conflict-driven solver: two watched literals, first-UIP learning,
// VSIDS ordering, Luby restarts, phase saving and LBD-based clause cleanup.
class CdclSolver {
 public:
  CdclSolver() = default;
  explicit CdclSolver(const CnfFormula& f);

  void ensure_vars(int n);
  int num_vars() const { return nvars_; }
  // Returns false once the clause set is known to be unsatisfiable at level 0.
  bool add_clause(const std::vector<Lit>& lits);

  // time_limit_s <= 0 means unlimited.
  SatStatus solve(const std::vector<Lit>& assumptions = {}, double time_limit_s = 0,
                  const std::atomic<bool>* stop = nullptr);
  // Value of variable v (1-based) in the last model.
  bool model_value(int v) const { return model_[static_cast<std::size_t>(v)]; }
  const std::vector<bool>& model() const { return model_; }

  // Projected enumeration used by the internal counter: depth-first over the
  // given variables with unit propagation, returning the number of
  // assignments of those variables that extend to a model.
  unsigned long long count_projected(const std::vector<int>& vars, const std::atomic<bool>* stop = nullptr);

  std::uint64_t conflicts() const { return conflicts_; }
  std::uint64_t decisions() const { return decisions_; }

 private:
  struct ClauseData {
    std::vector<int> lits;  // internal literal codes
    bool learnt = false;
    bool deleted = false;
    int lbd = 0;
    double activity = 0;
  };
  struct Watcher {
    int cref;
    int blocker;
  };
  static constexpr int kNoReason = -1;
  static constexpr int8_t kUndef = 2;

  static int code(Lit l) { return l > 0 ? 2 * (l - 1) : 2 * (-l - 1) + 1; }
  static int var_of(int p) { return p >> 1; }
  static int neg(int p) { return p ^ 1; }
  int8_t value(int p) const {
    int8_t a = assign_[static_cast<std::size_t>(var_of(p))];
    return a == kUndef ? kUndef : static_cast<int8_t>(a ^ (p & 1));
  }
  int level() const { return static_cast<int>(trail_lim_.size()); }

  void enqueue(int p, int reason);
  int propagate();
  void analyze(int confl, std::vector<int>& out, int& bt_level, int& lbd);
  bool lit_redundant(int p, uint32_t abstract_levels);
  void cancel_until(int lvl);
  int pick_branch();
  void attach(int cref);
  void reduce_db();
  void bump_var(int v);
  void bump_clause(ClauseData& c);
  SatStatus search(long conflict_budget, const std::vector<int>& assumptions, double deadline,
                   const std::atomic<bool>* stop);
  bool clause_satisfied_now(const ClauseData& c) const;
  unsigned long long count_rec(const std::vector<int>& vars, std::size_t depth, CdclSolver& checker,
                               const std::atomic<bool>* stop);

  // heap over variables by activity
  void heap_insert(int v);
  void heap_up(int i);
  void heap_down(int i);
  int heap_pop();
  bool heap_contains(int v) const { return heap_pos_[static_cast<std::size_t>(v)] >= 0; }

  int nvars_ = 0;
  bool ok_ = true;
  std::vector<ClauseData> clauses_;
  std::vector<std::vector<Watcher>> watches_;
  std::vector<int8_t> assign_;
  std::vector<int> level_;
  std::vector<int> reason_;
  std::vector<int8_t> polarity_;
  std::vector<double> activity_;
  std::vector<int> heap_;
  std::vector<int> heap_pos_;
  std::vector<int> trail_;
  std::vector<int> trail_lim_;
  std::size_t qhead_ = 0;
  std::vector<char> seen_;
  std::vector<int> analyze_stack_;
  std::vector<int> analyze_clear_;
  std::vector<bool> model_;
  double var_inc_ = 1.0;
  double cla_inc_ = 1.0;
  std::size_t max_learnts_ = 4000;
  std::size_t num_learnts_ = 0;
  std::uint64_t conflicts_ = 0;
  std::uint64_t decisions_ = 0;
};

}  // namespace arxtrail
