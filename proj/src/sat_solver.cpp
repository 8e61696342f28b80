#include "arxtrail/sat_solver.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>

namespace arxtrail {

namespace {

double now_seconds() {
  using namespace std::chrono;
  return duration<double>(steady_clock::now().time_since_epoch()).count();
}

double luby(double y, int x) {
  int size = 1, seq = 0;
  while (size < x + 1) {
    ++seq;
    size = 2 * size + 1;
  }
  while (size - 1 != x) {
    size = (size - 1) >> 1;
    --seq;
    x = x % size;
  }
  return std::pow(y, seq);
}

}  // namespace

CdclSolver::CdclSolver(const CnfFormula& f) {
  ensure_vars(f.var_count());
  for (const auto& c : f.clauses())
    if (!add_clause(c)) break;
}

void CdclSolver::ensure_vars(int n) {
  while (nvars_ < n) {
    int v = nvars_++;
    assign_.push_back(kUndef);
    level_.push_back(0);
    reason_.push_back(kNoReason);
    polarity_.push_back(1);
    activity_.push_back(0.0);
    heap_pos_.push_back(-1);
    seen_.push_back(0);
    watches_.emplace_back();
    watches_.emplace_back();
    heap_insert(v);
  }
}

bool CdclSolver::add_clause(const std::vector<Lit>& lits) {
  if (!ok_) return false;
  cancel_until(0);
  int maxv = 0;
  for (Lit l : lits) maxv = std::max(maxv, std::abs(l));
  ensure_vars(maxv);
  std::vector<int> ps;
  ps.reserve(lits.size());
  for (Lit l : lits) ps.push_back(code(l));
  std::sort(ps.begin(), ps.end());
  std::vector<int> kept;
  int prev = -1;
  for (int p : ps) {
    if (p == prev) continue;
    if (prev >= 0 && p == neg(prev)) return true;  // tautology
    int8_t val = value(p);
    if (val == 1) return true;
    if (val == 0) {
      prev = p;
      continue;
    }
    kept.push_back(p);
    prev = p;
  }
  if (kept.empty()) {
    ok_ = false;
    return false;
  }
  if (kept.size() == 1) {
    enqueue(kept[0], kNoReason);
    if (propagate() != kNoReason) ok_ = false;
    return ok_;
  }
  ClauseData c;
  c.lits = std::move(kept);
  clauses_.push_back(std::move(c));
  attach(static_cast<int>(clauses_.size()) - 1);
  return true;
}

void CdclSolver::attach(int cref) {
  const auto& c = clauses_[static_cast<std::size_t>(cref)].lits;
  watches_[static_cast<std::size_t>(neg(c[0]))].push_back({cref, c[1]});
  watches_[static_cast<std::size_t>(neg(c[1]))].push_back({cref, c[0]});
}

void CdclSolver::enqueue(int p, int reason) {
  auto v = static_cast<std::size_t>(var_of(p));
  assign_[v] = (p & 1) ? 0 : 1;
  level_[v] = level();
  reason_[v] = reason;
  trail_.push_back(p);
}

int CdclSolver::propagate() {
  int confl = kNoReason;
  while (qhead_ < trail_.size()) {
    int p = trail_[qhead_++];
    auto& ws = watches_[static_cast<std::size_t>(p)];
    int false_lit = neg(p);
    std::size_t i = 0, j = 0;
    const std::size_t end = ws.size();
    while (i < end) {
      Watcher w = ws[i];
      if (value(w.blocker) == 1) {
        ws[j++] = ws[i++];
        continue;
      }
      ClauseData& c = clauses_[static_cast<std::size_t>(w.cref)];
      if (c.deleted) {
        ++i;
        continue;
      }
      if (c.lits[0] == false_lit) std::swap(c.lits[0], c.lits[1]);
      ++i;
      int first = c.lits[0];
      if (first != w.blocker && value(first) == 1) {
        ws[j++] = {w.cref, first};
        continue;
      }
      bool moved = false;
      for (std::size_t k = 2; k < c.lits.size(); ++k) {
        if (value(c.lits[k]) != 0) {
          std::swap(c.lits[1], c.lits[k]);
          watches_[static_cast<std::size_t>(neg(c.lits[1]))].push_back({w.cref, first});
          moved = true;
          break;
        }
      }
      if (moved) continue;
      ws[j++] = {w.cref, first};
      if (value(first) == 0) {
        confl = w.cref;
        qhead_ = trail_.size();
        while (i < end) ws[j++] = ws[i++];
      } else {
        enqueue(first, w.cref);
      }
    }
    ws.resize(j);
    if (confl != kNoReason) return confl;
  }
  return kNoReason;
}

void CdclSolver::bump_var(int v) {
  auto sv = static_cast<std::size_t>(v);
  if ((activity_[sv] += var_inc_) > 1e100) {
    for (auto& a : activity_) a *= 1e-100;
    var_inc_ *= 1e-100;
  }
  if (heap_contains(v)) heap_up(heap_pos_[sv]);
}

void CdclSolver::bump_clause(ClauseData& c) {
  if ((c.activity += cla_inc_) > 1e20) {
    for (auto& cl : clauses_)
      if (cl.learnt) cl.activity *= 1e-20;
    cla_inc_ *= 1e-20;
  }
}

void CdclSolver::analyze(int confl, std::vector<int>& out, int& bt_level, int& lbd) {
  out.clear();
  out.push_back(-1);
  int path = 0;
  int p = -1;
  std::size_t index = trail_.size();
  do {
    ClauseData& c = clauses_[static_cast<std::size_t>(confl)];
    if (c.learnt) bump_clause(c);
    for (std::size_t k = (p == -1 ? 0 : 1); k < c.lits.size(); ++k) {
      int q = c.lits[k];
      auto v = static_cast<std::size_t>(var_of(q));
      if (!seen_[v] && level_[v] > 0) {
        bump_var(static_cast<int>(v));
        seen_[v] = 1;
        if (level_[v] >= level())
          ++path;
        else
          out.push_back(q);
      }
    }
    while (!seen_[static_cast<std::size_t>(var_of(trail_[--index]))]) {
    }
    p = trail_[index];
    confl = reason_[static_cast<std::size_t>(var_of(p))];
    seen_[static_cast<std::size_t>(var_of(p))] = 0;
    --path;
  } while (path > 0);
  out[0] = neg(p);

  // Recursive minimisation.
  analyze_clear_.assign(out.begin(), out.end());
  uint32_t abstract = 0;
  for (std::size_t k = 1; k < out.size(); ++k) abstract |= 1u << (level_[static_cast<std::size_t>(var_of(out[k]))] & 31);
  std::size_t j = 1;
  for (std::size_t k = 1; k < out.size(); ++k) {
    auto v = static_cast<std::size_t>(var_of(out[k]));
    if (reason_[v] == kNoReason || !lit_redundant(out[k], abstract)) out[j++] = out[k];
  }
  out.resize(j);

  bt_level = 0;
  if (out.size() > 1) {
    std::size_t max_i = 1;
    for (std::size_t k = 2; k < out.size(); ++k)
      if (level_[static_cast<std::size_t>(var_of(out[k]))] > level_[static_cast<std::size_t>(var_of(out[max_i]))]) max_i = k;
    std::swap(out[1], out[max_i]);
    bt_level = level_[static_cast<std::size_t>(var_of(out[1]))];
  }
  std::vector<int> levels;
  for (int q : out) levels.push_back(level_[static_cast<std::size_t>(var_of(q))]);
  std::sort(levels.begin(), levels.end());
  lbd = static_cast<int>(std::unique(levels.begin(), levels.end()) - levels.begin());

  for (int q : analyze_clear_) seen_[static_cast<std::size_t>(var_of(q))] = 0;
}

bool CdclSolver::lit_redundant(int p, uint32_t abstract_levels) {
  analyze_stack_.clear();
  analyze_stack_.push_back(p);
  std::size_t top = analyze_clear_.size();
  while (!analyze_stack_.empty()) {
    int q = analyze_stack_.back();
    analyze_stack_.pop_back();
    const ClauseData& c = clauses_[static_cast<std::size_t>(reason_[static_cast<std::size_t>(var_of(q))])];
    for (std::size_t k = 1; k < c.lits.size(); ++k) {
      int l = c.lits[k];
      auto v = static_cast<std::size_t>(var_of(l));
      if (!seen_[v] && level_[v] > 0) {
        if (reason_[v] != kNoReason && ((1u << (level_[v] & 31)) & abstract_levels)) {
          seen_[v] = 1;
          analyze_stack_.push_back(l);
          analyze_clear_.push_back(l);
        } else {
          for (std::size_t k2 = top; k2 < analyze_clear_.size(); ++k2)
            seen_[static_cast<std::size_t>(var_of(analyze_clear_[k2]))] = 0;
          analyze_clear_.resize(top);
          return false;
        }
      }
    }
  }
  return true;
}

void CdclSolver::cancel_until(int lvl) {
  if (level() <= lvl) return;
  for (std::size_t c = trail_.size(); c-- > static_cast<std::size_t>(trail_lim_[static_cast<std::size_t>(lvl)]);) {
    int p = trail_[c];
    auto v = static_cast<std::size_t>(var_of(p));
    assign_[v] = kUndef;
    reason_[v] = kNoReason;
    polarity_[v] = static_cast<int8_t>(p & 1);
    if (!heap_contains(static_cast<int>(v))) heap_insert(static_cast<int>(v));
  }
  qhead_ = static_cast<std::size_t>(trail_lim_[static_cast<std::size_t>(lvl)]);
  trail_.resize(qhead_);
  trail_lim_.resize(static_cast<std::size_t>(lvl));
}

int CdclSolver::pick_branch() {
  while (!heap_.empty()) {
    int v = heap_pop();
    if (assign_[static_cast<std::size_t>(v)] == kUndef) return 2 * v + polarity_[static_cast<std::size_t>(v)];
  }
  return -1;
}

void CdclSolver::reduce_db() {
  std::vector<int> cand;
  for (std::size_t i = 0; i < clauses_.size(); ++i) {
    const ClauseData& c = clauses_[i];
    if (!c.learnt || c.deleted || c.lbd <= 2) continue;
    int first = c.lits[0];
    bool locked = value(first) == 1 && reason_[static_cast<std::size_t>(var_of(first))] == static_cast<int>(i);
    if (!locked) cand.push_back(static_cast<int>(i));
  }
  std::sort(cand.begin(), cand.end(), [&](int a, int b) {
    const auto& ca = clauses_[static_cast<std::size_t>(a)];
    const auto& cb = clauses_[static_cast<std::size_t>(b)];
    if (ca.lbd != cb.lbd) return ca.lbd > cb.lbd;
    return ca.activity < cb.activity;
  });
  for (std::size_t k = 0; k < cand.size() / 2; ++k) {
    auto& c = clauses_[static_cast<std::size_t>(cand[k])];
    c.deleted = true;
    std::vector<int>().swap(c.lits);
    --num_learnts_;
  }
  for (auto& ws : watches_)
    ws.erase(std::remove_if(ws.begin(), ws.end(), [&](const Watcher& w) { return clauses_[static_cast<std::size_t>(w.cref)].deleted; }),
             ws.end());
  max_learnts_ = static_cast<std::size_t>(static_cast<double>(max_learnts_) * 1.1);
}

SatStatus CdclSolver::search(long budget, const std::vector<int>& assumptions, double deadline,
                             const std::atomic<bool>* stop) {
  long local_conflicts = 0;
  std::vector<int> learnt;
  for (;;) {
    int confl = propagate();
    if (confl != kNoReason) {
      ++conflicts_;
      ++local_conflicts;
      if (level() == 0) {
        ok_ = false;
        return SatStatus::Unsat;
      }
      int bt = 0, lbd = 0;
      analyze(confl, learnt, bt, lbd);
      cancel_until(bt);
      if (learnt.size() == 1) {
        enqueue(learnt[0], kNoReason);
      } else {
        ClauseData c;
        c.lits = learnt;
        c.learnt = true;
        c.lbd = lbd;
        clauses_.push_back(std::move(c));
        int cref = static_cast<int>(clauses_.size()) - 1;
        attach(cref);
        bump_clause(clauses_.back());
        enqueue(learnt[0], cref);
        ++num_learnts_;
      }
      var_inc_ /= 0.95;
      cla_inc_ /= 0.999;
      if ((conflicts_ & 255) == 0) {
        if ((deadline > 0 && now_seconds() > deadline) || (stop && stop->load())) {
          cancel_until(0);
          return SatStatus::Unknown;
        }
      }
    } else {
      if (local_conflicts >= budget) {
        cancel_until(0);
        return SatStatus::Unknown;
      }
      if (num_learnts_ >= max_learnts_ + trail_.size()) reduce_db();
      int next = -1;
      while (static_cast<std::size_t>(level()) < assumptions.size()) {
        int p = assumptions[static_cast<std::size_t>(level())];
        int8_t val = value(p);
        if (val == 1) {
          trail_lim_.push_back(static_cast<int>(trail_.size()));
        } else if (val == 0) {
          cancel_until(0);
          return SatStatus::Unsat;
        } else {
          next = p;
          break;
        }
      }
      if (next == -1) {
        next = pick_branch();
        if (next == -1) {
          model_.assign(static_cast<std::size_t>(nvars_) + 1, false);
          for (int v = 0; v < nvars_; ++v) model_[static_cast<std::size_t>(v) + 1] = assign_[static_cast<std::size_t>(v)] == 1;
          cancel_until(0);
          return SatStatus::Sat;
        }
        ++decisions_;
      }
      trail_lim_.push_back(static_cast<int>(trail_.size()));
      enqueue(next, kNoReason);
    }
  }
}

SatStatus CdclSolver::solve(const std::vector<Lit>& assumptions, double time_limit_s, const std::atomic<bool>* stop) {
  model_.clear();
  if (!ok_) return SatStatus::Unsat;
  cancel_until(0);
  std::vector<int> as;
  for (Lit l : assumptions) {
    ensure_vars(std::abs(l));
    as.push_back(code(l));
  }
  if (propagate() != kNoReason) {
    ok_ = false;
    return SatStatus::Unsat;
  }
  const double deadline = time_limit_s > 0 ? now_seconds() + time_limit_s : 0;
  for (int r = 0;; ++r) {
    long budget = static_cast<long>(luby(2.0, r) * 100);
    SatStatus st = search(budget, as, deadline, stop);
    if (st == SatStatus::Unsat) {
      // Unsat under assumptions does not poison the solver.
      return st;
    }
    if (st == SatStatus::Sat) return st;
    if ((deadline > 0 && now_seconds() > deadline) || (stop && stop->load())) return SatStatus::Unknown;
  }
}

bool CdclSolver::clause_satisfied_now(const ClauseData& c) const {
  for (int p : c.lits)
    if (value(p) == 1) return true;
  return false;
}

unsigned long long CdclSolver::count_projected(const std::vector<int>& vars, const std::atomic<bool>* stop) {
  cancel_until(0);
  if (!ok_) return 0;
  for (int v : vars) ensure_vars(v);
  if (propagate() != kNoReason) {
    ok_ = false;
    return 0;
  }
  CdclSolver checker = *this;
  return count_rec(vars, 0, checker, stop);
}

unsigned long long CdclSolver::count_rec(const std::vector<int>& vars, std::size_t depth, CdclSolver& checker,
                                         const std::atomic<bool>* stop) {
  if (stop && stop->load()) return 0;
  if (depth == vars.size()) {
    if (trail_.size() == static_cast<std::size_t>(nvars_)) return 1;
    bool all = true;
    for (const auto& c : clauses_)
      if (!c.learnt && !c.deleted && !clause_satisfied_now(c)) {
        all = false;
        break;
      }
    if (all) return 1;
    std::vector<Lit> as;
    for (int v : vars) as.push_back(assign_[static_cast<std::size_t>(v - 1)] == 1 ? v : -v);
    return checker.solve(as) == SatStatus::Sat ? 1 : 0;
  }
  const int v = vars[depth];
  if (assign_[static_cast<std::size_t>(v - 1)] != kUndef) return count_rec(vars, depth + 1, checker, stop);
  unsigned long long total = 0;
  const int base = level();
  for (int phase = 0; phase < 2; ++phase) {
    trail_lim_.push_back(static_cast<int>(trail_.size()));
    enqueue(2 * (v - 1) + phase, kNoReason);
    if (propagate() == kNoReason) total += count_rec(vars, depth + 1, checker, stop);
    cancel_until(base);
  }
  return total;
}

void CdclSolver::heap_insert(int v) {
  heap_pos_[static_cast<std::size_t>(v)] = static_cast<int>(heap_.size());
  heap_.push_back(v);
  heap_up(static_cast<int>(heap_.size()) - 1);
}

void CdclSolver::heap_up(int i) {
  int v = heap_[static_cast<std::size_t>(i)];
  double a = activity_[static_cast<std::size_t>(v)];
  while (i > 0) {
    int parent = (i - 1) >> 1;
    int pv = heap_[static_cast<std::size_t>(parent)];
    if (activity_[static_cast<std::size_t>(pv)] >= a) break;
    heap_[static_cast<std::size_t>(i)] = pv;
    heap_pos_[static_cast<std::size_t>(pv)] = i;
    i = parent;
  }
  heap_[static_cast<std::size_t>(i)] = v;
  heap_pos_[static_cast<std::size_t>(v)] = i;
}

void CdclSolver::heap_down(int i) {
  int v = heap_[static_cast<std::size_t>(i)];
  double a = activity_[static_cast<std::size_t>(v)];
  const int size = static_cast<int>(heap_.size());
  for (;;) {
    int child = 2 * i + 1;
    if (child >= size) break;
    if (child + 1 < size &&
        activity_[static_cast<std::size_t>(heap_[static_cast<std::size_t>(child + 1)])] >
            activity_[static_cast<std::size_t>(heap_[static_cast<std::size_t>(child)])])
      ++child;
    int cv = heap_[static_cast<std::size_t>(child)];
    if (activity_[static_cast<std::size_t>(cv)] <= a) break;
    heap_[static_cast<std::size_t>(i)] = cv;
    heap_pos_[static_cast<std::size_t>(cv)] = i;
    i = child;
  }
  heap_[static_cast<std::size_t>(i)] = v;
  heap_pos_[static_cast<std::size_t>(v)] = i;
}

int CdclSolver::heap_pop() {
  int top = heap_[0];
  int last = heap_.back();
  heap_.pop_back();
  heap_pos_[static_cast<std::size_t>(top)] = -1;
  if (!heap_.empty()) {
    heap_[0] = last;
    heap_pos_[static_cast<std::size_t>(last)] = 0;
    heap_down(0);
  }
  return top;
}

}  // namespace arxtrail
