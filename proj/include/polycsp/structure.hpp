#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "polycsp/caps.hpp"

namespace polycsp {

using Tuple = std::vector<int>;
using Table = std::vector<Tuple>;  // canonical: sorted, duplicate-free

struct Symbol {
  std::string name;
  int arity = 0;
  bool operator==(const Symbol&) const = default;
};

struct Signature {
  std::vector<Symbol> relations;

  std::optional<std::size_t> index_of(const std::string& name) const;
  std::size_t size() const { return relations.size(); }
  int max_arity() const;
  bool operator==(const Signature&) const = default;
};

/// A finite relational structure on {0, ..., domain_size-1}.
///
/// Instances use the same type: variables are the domain elements and the
/// tables hold constraint tuples. Tables are kept canonical by `canonicalize`
/// and by every constructor in the library, so equality is table equality.
struct Structure {
  int domain_size = 0;
  Signature signature;
  std::vector<Table> tables;

  Structure() = default;
  Structure(int n, Signature sig);

  /// Adds a relation and returns its index.
  std::size_t add_relation(const std::string& name, int arity, Table tuples = {});
  const Table& table(const std::string& name) const;
  Table& table(const std::string& name);
  bool holds(std::size_t rel, const Tuple& t) const;

  void canonicalize();
  std::size_t tuple_count() const;
  bool operator==(const Structure&) const = default;
};

using Instance = Structure;
using Assignment = std::vector<int>;
using PartialAssignment = std::vector<std::optional<int>>;

void canonicalize(Table& t);

struct Violation {
  std::string relation;
  Tuple tuple;
  std::string message;
};

/// Empty result means the structure is well formed.
std::vector<Violation> validate_structure(const Structure& s);
/// Throws InvalidInput listing the first violation.
void require_valid(const Structure& s);
void require_same_signature(const Structure& a, const Structure& b);

/// Mixed-radix encoding used by power(): the first coordinate is the most
/// significant digit.
std::size_t encode_tuple(const Tuple& t, int base);
Tuple decode_tuple(std::size_t code, int base, int length);
std::size_t checked_pow(std::size_t base, std::size_t exp, std::size_t cap,
                        const char* cap_name);

Structure power(const Structure& s, int n, const Caps& caps = {});

struct UnionResult {
  Instance instance;
  std::vector<int> left_map;   // x variable -> union variable
  std::vector<int> right_map;  // y variable -> union variable
};
UnionResult disjoint_union(const Instance& x, const Instance& y);

/// Instance with the given structure's signature, `n` variables, no tuples.
Instance empty_instance(const Signature& sig, int n);

/// Number of tuples each variable occurs in (with multiplicity per position).
std::vector<std::size_t> occurrence_counts(const Instance& x);
std::size_t max_occurrence(const Instance& x);

}  // namespace polycsp
