#include "polycsp/sat.hpp"

#include <algorithm>
#include <utility>

namespace polycsp {

namespace {

std::size_t luby(std::size_t i) {
  // i-th element (0-based) of 1 1 2 1 1 2 4 ...
  std::size_t size = 1, seq = 0;
  while (size < i + 1) {
    ++seq;
    size = 2 * size + 1;
  }
  while (size - 1 != i) {
    size = (size - 1) / 2;
    --seq;
    i %= size;
  }
  return std::size_t{1} << seq;
}

}  // namespace

SatSolver::SatSolver(int vars) {
  for (int i = 0; i < vars; ++i) new_var();
}

int SatSolver::new_var() {
  int v = var_count();
  value_.push_back(-1);
  phase_.push_back(0);
  level_.push_back(0);
  reason_.push_back(-1);
  activity_.push_back(0.0);
  seen_.push_back(0);
  heap_pos_.push_back(-1);
  watches_.emplace_back();
  watches_.emplace_back();
  heap_insert(v);
  return v;
}

int SatSolver::lit_value(int lit) const {
  int v = value_[lit >> 1];
  return v < 0 ? -1 : v ^ (lit & 1);
}

void SatSolver::enqueue(int lit, int reason) {
  int v = lit >> 1;
  value_[v] = static_cast<int8_t>(1 ^ (lit & 1));
  level_[v] = static_cast<int>(trail_lim_.size());
  reason_[v] = reason;
  trail_.push_back(lit);
}

void SatSolver::add_clause(std::vector<int> lits) {
  if (unsat_) return;
  std::sort(lits.begin(), lits.end());
  lits.erase(std::unique(lits.begin(), lits.end()), lits.end());
  for (std::size_t i = 0; i + 1 < lits.size(); ++i)
    if ((lits[i] ^ 1) == lits[i + 1]) return;  // tautology
  // Clauses are only added at level 0; drop false literals.
  std::erase_if(lits, [&](int l) { return lit_value(l) == 0; });
  for (int l : lits)
    if (lit_value(l) == 1) return;
  if (lits.empty()) {
    unsat_ = true;
    return;
  }
  if (lits.size() == 1) {
    enqueue(lits[0], -1);
    if (propagate() >= 0) unsat_ = true;
    return;
  }
  int idx = static_cast<int>(clauses_.size());
  watches_[lits[0]].push_back(idx);
  watches_[lits[1]].push_back(idx);
  clauses_.push_back(std::move(lits));
}

int SatSolver::propagate() {
  while (qhead_ < trail_.size()) {
    int p = trail_[qhead_++];
    int falselit = p ^ 1;
    auto& ws = watches_[falselit];
    std::size_t keep = 0;
    for (std::size_t k = 0; k < ws.size(); ++k) {
      int ci = ws[k];
      auto& c = clauses_[ci];
      if (c[0] == falselit) std::swap(c[0], c[1]);
      if (lit_value(c[0]) == 1) {
        ws[keep++] = ci;
        continue;
      }
      bool moved = false;
      for (std::size_t j = 2; j < c.size(); ++j)
        if (lit_value(c[j]) != 0) {
          std::swap(c[1], c[j]);
          watches_[c[1]].push_back(ci);
          moved = true;
          break;
        }
      if (moved) continue;
      ws[keep++] = ci;
      if (lit_value(c[0]) == 0) {
        for (std::size_t j = k + 1; j < ws.size(); ++j) ws[keep++] = ws[j];
        ws.resize(keep);
        qhead_ = trail_.size();
        return ci;
      }
      enqueue(c[0], ci);
    }
    ws.resize(keep);
  }
  return -1;
}

void SatSolver::bump(int var) {
  activity_[var] += inc_;
  if (activity_[var] > 1e100) {
    for (double& a : activity_) a *= 1e-100;
    inc_ *= 1e-100;
  }
  if (heap_pos_[var] >= 0) heap_up(heap_pos_[var]);
}

void SatSolver::analyze(int confl, std::vector<int>& learnt, int& back_level) {
  learnt.assign(1, -1);
  int counter = 0;
  int p = -1;
  std::size_t idx = trail_.size();
  const int cur = static_cast<int>(trail_lim_.size());
  do {
    const auto& c = clauses_[confl];
    for (std::size_t j = (p < 0 ? 0 : 1); j < c.size(); ++j) {
      int q = c[j];
      int v = q >> 1;
      if (seen_[v] || level_[v] == 0) continue;
      seen_[v] = 1;
      bump(v);
      if (level_[v] >= cur) ++counter;
      else learnt.push_back(q);
    }
    while (!seen_[trail_[--idx] >> 1]) {
    }
    p = trail_[idx];
    confl = reason_[p >> 1];
    seen_[p >> 1] = 0;
    --counter;
    if (counter > 0) {
      // Reason clauses keep the implied literal first.
      auto& rc = clauses_[confl];
      if (rc[0] != p) std::swap(rc[0], rc[1]);
    }
  } while (counter > 0);
  learnt[0] = p ^ 1;
  back_level = 0;
  std::size_t maxi = 1;
  for (std::size_t j = 1; j < learnt.size(); ++j) {
    seen_[learnt[j] >> 1] = 0;
    if (level_[learnt[j] >> 1] > back_level) {
      back_level = level_[learnt[j] >> 1];
      maxi = j;
    }
  }
  if (learnt.size() > 1) std::swap(learnt[1], learnt[maxi]);
  inc_ *= 1.05;
}

void SatSolver::backtrack(int level) {
  if (static_cast<int>(trail_lim_.size()) <= level) return;
  for (std::size_t i = trail_.size(); i-- > static_cast<std::size_t>(trail_lim_[level]);) {
    int v = trail_[i] >> 1;
    phase_[v] = static_cast<int8_t>(trail_[i] & 1);
    value_[v] = -1;
    reason_[v] = -1;
    if (heap_pos_[v] < 0) heap_insert(v);
  }
  trail_.resize(trail_lim_[level]);
  trail_lim_.resize(level);
  qhead_ = trail_.size();
}

int SatSolver::pick_branch() {
  while (!heap_.empty()) {
    int v = heap_pop();
    if (value_[v] < 0) return 2 * v + phase_[v];
  }
  return -1;
}

SatSolver::Result SatSolver::solve(std::size_t conflict_cap) {
  if (unsat_) return Result::Unsat;
  if (propagate() >= 0) {
    unsat_ = true;
    return Result::Unsat;
  }
  std::size_t restart = 0;
  std::size_t budget = 100 * luby(restart);
  std::vector<int> learnt;
  for (;;) {
    int confl = propagate();
    if (confl >= 0) {
      ++conflicts_;
      if (trail_lim_.empty()) {
        unsat_ = true;
        return Result::Unsat;
      }
      int back = 0;
      analyze(confl, learnt, back);
      backtrack(back);
      if (learnt.size() == 1) {
        enqueue(learnt[0], -1);
      } else {
        int idx = static_cast<int>(clauses_.size());
        watches_[learnt[0]].push_back(idx);
        watches_[learnt[1]].push_back(idx);
        clauses_.push_back(learnt);
        enqueue(learnt[0], idx);
      }
      if (conflicts_ >= conflict_cap) {
        backtrack(0);
        return Result::Unknown;
      }
      if (budget > 0) --budget;
      continue;
    }
    if (budget == 0) {
      backtrack(0);
      budget = 100 * luby(++restart);
    }
    int lit = pick_branch();
    if (lit < 0) return Result::Sat;
    trail_lim_.push_back(static_cast<int>(trail_.size()));
    enqueue(lit, -1);
  }
}

void SatSolver::heap_up(int i) {
  int v = heap_[i];
  while (i > 0) {
    int parent = (i - 1) / 2;
    if (activity_[heap_[parent]] >= activity_[v]) break;
    heap_[i] = heap_[parent];
    heap_pos_[heap_[i]] = i;
    i = parent;
  }
  heap_[i] = v;
  heap_pos_[v] = i;
}

void SatSolver::heap_down(int i) {
  int v = heap_[i];
  const int n = static_cast<int>(heap_.size());
  for (;;) {
    int child = 2 * i + 1;
    if (child >= n) break;
    if (child + 1 < n && activity_[heap_[child + 1]] > activity_[heap_[child]]) ++child;
    if (activity_[heap_[child]] <= activity_[v]) break;
    heap_[i] = heap_[child];
    heap_pos_[heap_[i]] = i;
    i = child;
  }
  heap_[i] = v;
  heap_pos_[v] = i;
}

void SatSolver::heap_insert(int var) {
  heap_pos_[var] = static_cast<int>(heap_.size());
  heap_.push_back(var);
  heap_up(heap_pos_[var]);
}

int SatSolver::heap_pop() {
  int v = heap_[0];
  heap_pos_[v] = -1;
  int last = heap_.back();
  heap_.pop_back();
  if (!heap_.empty()) {
    heap_[0] = last;
    heap_pos_[last] = 0;
    heap_down(0);
  }
  return v;
}

}  // namespace polycsp
