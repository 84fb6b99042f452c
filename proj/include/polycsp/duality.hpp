#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "polycsp/consistency.hpp"
#include "polycsp/search.hpp"
#include "polycsp/structure.hpp"

namespace polycsp {

struct Lift {
  Instance instance;
  std::vector<int> lift_map;        // Y variable -> X variable
  bool claimed_acyclic = true;
  std::optional<int> distinguished;  // X variable whose fiber matters
  std::vector<int> fiber;            // Y variables over it
  std::vector<std::string> notes;
};

/// lift_map is a homomorphism into x and, when claimed, the instance is
/// acyclic.
bool verify_lift(const Lift& l, const Instance& x);
/// The identity lift of x.
Lift identity_lift(const Instance& x);

/// The refinement U^0 = D, U^{i+1} = U^i with the least bad triple
/// (variable, relation, tuple rank, position) repaired, tracking for each
/// variable an acyclic lift whose root takes exactly the values U^i_x.
class AcyclicLiftBuilder {
 public:
  AcyclicLiftBuilder(const Instance& x, const Structure& s, const Caps& caps = {});

  /// Repairs the least bad triple; false once none is left.
  bool step();
  /// Runs to the fixpoint or the first empty set; true iff some set emptied.
  bool run();

  DomainMask allowed(int var) const { return u_[var]; }
  std::optional<int> empty_variable() const;
  std::size_t steps() const { return steps_; }
  /// Y^i_var, with its root variable.
  Lift lift(int var, int* root = nullptr) const;
  std::size_t lift_size(int var) const;

 private:
  struct Node;
  int materialize(const Node& n, Lift& out) const;

  const Instance& x_;
  const Structure& s_;
  Caps caps_;
  std::vector<DomainMask> u_;
  std::vector<std::shared_ptr<const Node>> node_;
  std::size_t steps_ = 0;
};

/// nullopt iff x is arc-consistent; otherwise a verified acyclic lift with no
/// solution.
std::optional<Lift> unsolvable_acyclic_lift(const Instance& x, const Structure& s,
                                            const SearchOptions& opts = {});

/// Acyclic lift of x with solutions, none constant on the fiber over
/// p.vars.front(). Throws InvalidInput "path does not witness
/// cycle-inconsistency" unless x is arc-consistent and adding the path's
/// unary constraint breaks arc-consistency.
Lift cycle_obstruction_lift(const Instance& x, const Structure& s, const ClosedPath& p,
                            const SearchOptions& opts = {});

/// Tuples a such that fiber[i] -> a[i] extends to a solution of l.
Table fiber_relation(const Lift& l, const Structure& s, const SearchOptions& opts = {});

}  // namespace polycsp
