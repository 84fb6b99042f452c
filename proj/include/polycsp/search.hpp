#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <vector>

#include "polycsp/caps.hpp"
#include "polycsp/structure.hpp"

namespace polycsp {

enum class VarOrder { Mrv, Lex };

struct SearchOptions {
  Caps caps{};
  VarOrder order = VarOrder::Mrv;
};

/// Template domains are represented as 64-bit masks.
constexpr int kMaxTemplateDomain = 64;
using DomainMask = std::uint64_t;

inline DomainMask full_mask(int n) {
  return n >= 64 ? ~DomainMask{0} : ((DomainMask{1} << n) - 1);
}

/// Backtracking search with generalized arc consistency.
///
/// Variables are chosen by minimum remaining values, ties broken by the
/// lowest variable id (or purely by id under VarOrder::Lex), and values are
/// tried in ascending order. Results are therefore deterministic.
class HomSearch {
 public:
  HomSearch(const Instance& x, const Structure& s, SearchOptions opts = {});

  /// Restricts the candidate set of `var`; returns false if it becomes empty.
  bool restrict(int var, DomainMask allowed);
  bool apply_seed(const PartialAssignment& seed);

  /// Runs propagation to a fixpoint. False means some domain emptied.
  bool propagate();

  std::optional<Assignment> solve();
  /// Distinct restrictions of solutions to `vars`; CapExceeded past `limit`.
  std::set<Tuple> project(const std::vector<int>& vars,
                          std::size_t limit = static_cast<std::size_t>(-1));

  const std::vector<DomainMask>& domains() const { return dom_; }
  std::size_t nodes() const { return nodes_; }

 private:
  struct Rel {
    int arity = 0;
    std::vector<int> flat;              // tuples concatenated
    std::vector<DomainMask> succ, pred;  // binary relations only
    DomainMask diag = 0;                // binary: {a : (a,a) in R}
    DomainMask unary = 0;
  };
  struct Con {
    int rel;
    std::uint32_t off;  // into cvars_
    int arity;
  };

  void set_dom(int v, DomainMask m);
  bool revise(int c);
  bool propagate_queue();
  void undo_to(std::size_t mark);
  int select_var() const;
  void tree_update(int v);
  bool search_from_here(Assignment* out);

  const Structure& s_;
  int n_vars_;
  int dsize_;
  SearchOptions opts_;
  std::vector<Rel> rels_;
  std::vector<Con> cons_;
  std::vector<int> cvars_;
  std::vector<std::uint32_t> adj_off_;
  std::vector<int> adj_;
  std::vector<DomainMask> dom_;
  std::vector<std::pair<int, DomainMask>> trail_;
  std::vector<int> queue_;
  std::vector<char> in_queue_;
  std::vector<std::uint64_t> tree_;  // min-segment tree of (key << 32 | var)
  int tree_size_ = 1;
  std::size_t nodes_ = 0;
  bool failed_ = false;
};

std::optional<Assignment> find_homomorphism(const Instance& x, const Structure& s,
                                            const PartialAssignment& seed = {},
                                            const SearchOptions& opts = {});

/// Search with an explicit initial candidate set per variable.
std::optional<Assignment> find_homomorphism_within(const Instance& x, const Structure& s,
                                                   const std::vector<DomainMask>& domains,
                                                   const SearchOptions& opts = {});

bool is_homomorphism(const Assignment& f, const Instance& x, const Structure& s);

std::set<Tuple> project_solutions(const Instance& x, const Structure& s,
                                  const std::vector<int>& vars,
                                  const SearchOptions& opts = {});

/// Substructure induced on `keep` (listed in increasing order), relabeled
/// 0..keep.size()-1.
Structure induced_substructure(const Structure& s, const std::vector<int>& keep);

struct CoreResult {
  Structure core;
  std::vector<int> elements;    // core element i is s-element elements[i]
  std::vector<int> retraction;  // s-element -> core element index
};

CoreResult find_core(const Structure& s, const SearchOptions& opts = {});
bool hom_equivalent(const Structure& s, const Structure& t, const SearchOptions& opts = {});

/// Every endomorphism of s (exhaustive; intended for small structures).
std::vector<Assignment> all_homomorphisms(const Instance& x, const Structure& s,
                                          std::size_t limit, const SearchOptions& opts = {});

}  // namespace polycsp
