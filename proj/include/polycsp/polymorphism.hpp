#pragma once

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "polycsp/operation.hpp"
#include "polycsp/search.hpp"
#include "polycsp/structure.hpp"

namespace polycsp {

/// Preservation check, parallel over row selections.
bool preserves(const Operation& op, const Structure& s);
/// Single-threaded reference for preserves().
bool preserves_serial(const Operation& op, const Structure& s);

/// First row selection (one tuple index per argument) whose image leaves
/// the relation, or nullopt when op preserves s.
struct PreservationFailure {
  std::string relation;
  std::vector<Tuple> rows;
  Tuple image;
};
std::optional<PreservationFailure> preservation_failure(const Operation& op, const Structure& s);

struct FlatTerm {
  std::string symbol;
  std::vector<std::string> args;
};

struct IdentitySystem {
  std::vector<Symbol> symbols;
  std::vector<std::pair<FlatTerm, FlatTerm>> equations;

  /// Throws InvalidInput on undeclared symbols or arity mismatches.
  void validate() const;
};

namespace identities {
IdentitySystem siggers();
IdentitySystem wnu(int n);
IdentitySystem cyclic(int p);
IdentitySystem none(const std::string& symbol, int arity);
}  // namespace identities

struct PolymorphismWitness {
  std::map<std::string, Operation> operations;
  std::vector<std::string> certificate;
};

struct Indicator {
  Instance instance;
  std::vector<std::size_t> offset;  // per symbol, into the raw tuple index space
  std::vector<int> class_of;        // raw index -> instance variable
};

Indicator indicator_instance(const Structure& s, const IdentitySystem& ids,
                             const Caps& caps = {});

/// True iff every equation holds pointwise for the given operations.
bool satisfies(const std::map<std::string, Operation>& ops, const IdentitySystem& ids);

std::optional<PolymorphismWitness> find_polymorphism(const Structure& s,
                                                     const IdentitySystem& ids,
                                                     const SearchOptions& opts = {});

std::optional<PolymorphismWitness> check_siggers(const Structure& s,
                                                 const SearchOptions& opts = {});
std::optional<PolymorphismWitness> check_wnu(const Structure& s, int n,
                                             const SearchOptions& opts = {});
std::optional<PolymorphismWitness> check_cyclic(const Structure& s, int p,
                                                const SearchOptions& opts = {});

/// A totally symmetric operation given by its value on each argument set
/// (bitmask over the domain); dense() expands it when the table fits.
struct SetFunction {
  int domain_size = 0;
  int arity = 0;
  std::vector<int> by_set;  // indexed by mask; -1 where |mask| > arity or mask = 0

  int operator()(const Tuple& args) const;
  Operation dense(const Caps& caps = {}) const;
};

struct TotallySymmetricResult {
  SetFunction set_function;
  std::optional<Operation> dense;  // present when the table fits the cap
  std::vector<std::string> certificate;
};

/// Searches a totally symmetric polymorphism of arity n over argument sets.
std::optional<TotallySymmetricResult> check_totally_symmetric(const Structure& s, int n,
                                                              const SearchOptions& opts = {});

/// Column-set tuples realizable by at most n rows of each relation, with the
/// minimal row count; exposed for testing.
std::vector<std::map<std::vector<std::uint64_t>, int>> ts_column_sets(const Structure& s,
                                                                       int n,
                                                                       const Caps& caps = {});

/// Preservation for a set function, decided on column-set tuples instead of
/// row selections.
bool set_function_preserves(const SetFunction& f, const Structure& s, const Caps& caps = {});

/// Set function of a dense operation; nullopt unless the table depends only
/// on the argument set.
std::optional<SetFunction> as_set_function(const Operation& op);

bool check_dual_discriminator(const Structure& s);

/// Least 1-based (i, j), i < j, such that every tuple of r has t[i] = t[j].
std::optional<std::pair<int, int>> implies_equation(const Table& r, int k);

Table pp_closure(const Structure& s, const Table& r, int k, const SearchOptions& opts = {});
bool is_pp_definable(const Structure& s, const Table& r, int k, const SearchOptions& opts = {});

}  // namespace polycsp
