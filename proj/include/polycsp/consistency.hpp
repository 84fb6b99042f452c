#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "polycsp/operation.hpp"
#include "polycsp/polymorphism.hpp"
#include "polycsp/search.hpp"
#include "polycsp/structure.hpp"

namespace polycsp {

/// Per-variable EXCLUDED sets f(x); the allowed set is U_x = D \ f(x).
struct Witness {
  int domain_size = 0;
  std::vector<DomainMask> excluded;

  static Witness empty(int variables, int domain_size);
  DomainMask allowed(int x) const { return full_mask(domain_size) & ~excluded[x]; }
  /// No variable has every value excluded.
  bool good() const;
  bool operator==(const Witness&) const = default;
};

/// Least closed witness containing `seed`. A value a enters f(x_i) once every
/// tuple of R with a at position i meets an excluded value somewhere.
/// `order_seed` != 0 shuffles the worklist; the fixpoint does not change.
Witness ac_closure(const Instance& x, const Structure& s, const Witness& seed,
                   std::uint64_t order_seed = 0);

std::optional<Witness> good_witness(const Instance& x, const Structure& s);

/// Solves x with a totally symmetric polymorphism of arity >= |D| * N
/// (N the largest arity of s). Throws InvalidInput "not a valid extractor"
/// when the operation fails any of those checks.
std::optional<Assignment> width1_solve(const Instance& x, const Structure& s, const Operation& ts);
std::optional<Assignment> width1_solve(const Instance& x, const Structure& s,
                                       const SetFunction& ts);

/// Cycles of the variable/constraint incidence multigraph. A tuple naming a
/// variable twice is a cycle, as are two tuples sharing two variables.
bool is_acyclic(const Instance& x);

/// Throws InvalidInput "instance has a cycle" on cyclic input.
std::optional<Assignment> acyclic_solve(const Instance& x, const Structure& s);

struct PathStep {
  int relation = 0;
  Tuple tuple;   // the constraint tuple e_i
  int from = 0;  // 0-based coordinate j_i
  int to = 0;    // 0-based coordinate k_i
};

/// x_1, (e_1, R_1), x_2, ..., x_n with x_n = x_1; vars has steps.size() + 1
/// entries.
struct ClosedPath {
  std::vector<int> vars;
  std::vector<PathStep> steps;
};

/// Checks the tuple membership and projection conditions; closed or not.
bool is_path(const Instance& x, const ClosedPath& p);

/// Values a_1 in U_{x_1} that cannot be carried around p and back to a_1.
DomainMask path_failures(const Structure& s, const Witness& w, const ClosedPath& p);

struct AuditResult {
  bool pass = true;
  std::optional<ClosedPath> path;  // first failing path
  int value = -1;                  // a_1 that fails on it
  std::size_t cycles = 0;          // undirected simple cycles examined
  std::size_t max_len = 0;
  std::string label() const;
};

/// Checks every simple cycle of length <= max_len in both orientations and
/// from every starting variable. The verdict only covers those paths.
/// Throws CapExceeded("cycles") when there are more cycles than the cap.
AuditResult cycle_consistency_audit(const Instance& x, const Structure& s, const Witness& w,
                                    std::size_t max_len, const Caps& caps = {});

}  // namespace polycsp
