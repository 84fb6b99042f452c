#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

namespace polycsp {

/// Small complete CDCL solver used as the back end of the edge-coloring
/// searches. Literals are 2*var for the positive and 2*var+1 for the negated
/// form.
class SatSolver {
 public:
  enum class Result { Sat, Unsat, Unknown };

  explicit SatSolver(int vars = 0);
  int new_var();
  int var_count() const { return static_cast<int>(value_.size()); }
  void add_clause(std::vector<int> lits);
  /// Unknown only when the conflict cap is hit.
  Result solve(std::size_t conflict_cap);
  bool value(int var) const { return value_[var] == 1; }
  std::size_t conflicts() const { return conflicts_; }

  static int pos(int var) { return 2 * var; }
  static int neg(int var) { return 2 * var + 1; }

 private:
  int lit_value(int lit) const;
  void enqueue(int lit, int reason);
  int propagate();
  void analyze(int confl, std::vector<int>& learnt, int& back_level);
  void backtrack(int level);
  int pick_branch();
  void bump(int var);
  void heap_up(int i);
  void heap_down(int i);
  void heap_insert(int var);
  int heap_pop();

  std::vector<std::vector<int>> clauses_;
  std::vector<std::vector<int>> watches_;
  std::vector<int8_t> value_;  // -1 unassigned
  std::vector<int8_t> phase_;
  std::vector<int> level_;
  std::vector<int> reason_;
  std::vector<int> trail_;
  std::vector<int> trail_lim_;
  std::size_t qhead_ = 0;
  std::vector<double> activity_;
  double inc_ = 1.0;
  std::vector<int> heap_;
  std::vector<int> heap_pos_;
  std::vector<char> seen_;
  bool unsat_ = false;
  std::size_t conflicts_ = 0;
};

}  // namespace polycsp
