#pragma once

#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "polycsp/search.hpp"
#include "polycsp/structure.hpp"

namespace polycsp {

struct Atom {
  std::string relation;
  std::vector<int> vars;  // indices into free_vars then bound_vars
};

/// (exists bound) /\ atoms. Variable i < free_vars.size() is free, the rest
/// are bound. Equalities are only legal with pp_mode set.
struct SimpleFormula {
  std::vector<std::string> free_vars;
  std::vector<std::string> bound_vars;
  std::vector<Atom> atoms;
  std::vector<std::pair<int, int>> equalities;
  bool pp_mode = false;

  int variable_count() const { return static_cast<int>(free_vars.size() + bound_vars.size()); }
  /// Sum of atom arities; bounds how often one variable is used.
  std::size_t weight() const;
  /// Throws InvalidInput on unknown relations, arity or index errors.
  void validate(const Signature& sig) const;
};

std::string to_string(const SimpleFormula& f);

bool evaluate_formula(const Structure& s, const SimpleFormula& f, const Tuple& args,
                      const SearchOptions& opts = {});
/// Least witness for the bound variables (lexicographic), if any.
std::optional<Tuple> formula_witness(const Structure& s, const SimpleFormula& f,
                                     const Tuple& args, const SearchOptions& opts = {});
/// Every satisfying tuple of free values.
Table formula_table(const Structure& s, const SimpleFormula& f, const SearchOptions& opts = {});

/// The orbit diagonal {(a,a) : some automorphism sends c to a} as an
/// equality-free formula. Throws InvalidInput when s is not a core.
SimpleFormula eq_c_formula(const Structure& s, int c, const SearchOptions& opts = {});
/// The same relation from automorphism enumeration.
Table orbit_diagonal(const Structure& s, int c, const SearchOptions& opts = {});

struct EquationFreeResult {
  std::optional<SimpleFormula> formula;
  std::optional<std::pair<int, int>> equation;  // 1-based, when r implies one
  std::string reason;
};

/// Equality-free definition of r through the power-structure predicate.
EquationFreeResult simple_definition_equation_free(const Structure& s, const Table& r, int k,
                                                   const SearchOptions& opts = {});

}  // namespace polycsp
