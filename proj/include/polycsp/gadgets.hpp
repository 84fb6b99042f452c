#pragma once

#include <array>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "polycsp/caps.hpp"
#include "polycsp/structure.hpp"

namespace polycsp {

/// Simple undirected graph.
struct Graph {
  int vertex_count = 0;
  std::vector<std::pair<int, int>> edges;

  int add_vertex();
  /// Throws InvalidInput on loops, duplicates and unknown vertices.
  int add_edge(int u, int v);
  int degree(int v) const;
  int max_degree() const;
  void validate() const;
  bool operator==(const Graph&) const = default;
};

/// Edge id -> color in {0,1,2}; -1 marks an uncolored edge where partial
/// colorings are accepted.
using EdgeColoring = std::vector<int>;

/// Total and proper.
bool is_proper_coloring(const Graph& g, const EdgeColoring& c);

/// A graph with designated coding edges. Each coding edge joins an internal
/// vertex (its anchor, the first endpoint) to a degree-1 stub; stubs are
/// dropped when gadgets are wired together.
struct Gadget {
  std::string name;
  Graph graph;
  std::vector<int> coding_edges;
  /// Boundary predicate on colors of the coding edges, in order. Closed under
  /// permutations of the colors.
  std::function<bool(const Tuple&)> admits;

  int anchor(std::size_t i) const { return graph.edges[coding_edges[i]].first; }
  int stub(std::size_t i) const { return graph.edges[coding_edges[i]].second; }
  int internal_vertex_count() const;
  /// The predicate as an explicit list of admissible patterns that are proper
  /// on the boundary.
  Table admissible(const Caps& caps = {}) const;
  void validate() const;
};

/// The inverter with coding edges (a, b, c, d, e): extendable iff a = b and
/// c, d, e pairwise distinct, or c = d and a, b, e pairwise distinct.
Gadget inverter();

/// Three coding pairs; extendable iff some pair agrees.
Gadget or_gate();
/// The or-gate drawing read literally (degree-1 ends kept as pendant edges).
/// Does not satisfy the or-gate predicate; kept as a verification fixture.
Gadget or_gate_as_drawn();

/// n coding pairs; extendable iff all pairs agree or all pairs disagree.
/// Sizes up to 4 are built directly and verified exhaustively on first use;
/// larger sizes chain verified blocks.
Gadget variable_setter(int n, const Caps& caps = {});

/// Extends a partial coloring (-1 = free) to a proper total one, or nullopt.
/// Complete search; components of free edges are solved independently.
std::optional<EdgeColoring> extend_edge_coloring(const Graph& g, const EdgeColoring& partial,
                                                 const Caps& caps = {});

/// Proper 3-edge-coloring or nullopt. Refuses graphs above caps.coloring_edges.
std::optional<EdgeColoring> brute_force_edge_coloring(const Graph& g, const Caps& caps = {});

struct GadgetVerdict {
  bool pass = true;
  std::size_t patterns = 0;  // proper boundary patterns covered
  std::size_t searched = 0;  // patterns searched (one per color-permutation class)
  std::optional<Tuple> counterexample;
  bool counterexample_admitted = false;
  /// Every covered pattern with its extendability, in lexicographic order.
  std::vector<std::pair<Tuple, bool>> transcript;
};

/// Checks that a boundary pattern extends exactly when the predicate admits
/// it. Parallel over patterns; the reported counterexample is the least one.
GadgetVerdict verify_gadget(const Gadget& g, const Caps& caps = {}, bool transcript = false);
/// Single-threaded reference for verify_gadget.
GadgetVerdict verify_gadget_serial(const Gadget& g, const Caps& caps = {},
                                   bool transcript = false);

struct Literal {
  int var = 0;
  bool negated = false;
  bool operator==(const Literal&) const = default;
};

struct CNFInstance {
  int variable_count = 0;
  std::vector<std::array<Literal, 3>> clauses;

  /// Literals reference declared variables; no variable twice in a clause.
  void validate() const;
  bool satisfied_by(const Assignment& a) const;
  bool operator==(const CNFInstance&) const = default;
};

/// One gadget copy inside a reduction graph.
struct GadgetCopy {
  std::string kind;  // "setter", "or", "inverter"
  int first_vertex = 0;
  int vertex_count = 0;
};

struct CodingRecord {
  std::vector<GadgetCopy> copies;
  std::vector<std::optional<int>> setter;  // per variable, copy index
  std::vector<int> gate;                   // per clause, copy index
  std::vector<int> inverters;              // copy indices, one per negated occurrence
  /// Per variable, per occurrence: the two edges leaving the setter.
  std::vector<std::vector<std::array<int, 2>>> setter_pairs;
  /// Per clause, per position: the two edges entering the or-gate.
  std::vector<std::array<std::array<int, 2>, 3>> gate_pairs;
};

struct SatReduction {
  Graph graph;
  CodingRecord record;
};

/// One setter per occurring variable, one or-gate per clause, an inverter on
/// each negated occurrence. Every vertex of the output has degree <= 3.
SatReduction reduce_3sat(const CNFInstance& phi, const Caps& caps = {});

/// Variable true iff its setter's pairs agree; unused variables are false.
/// Throws InvalidInput for improper colorings and VerificationFailure if the
/// result does not satisfy phi.
Assignment coloring_to_assignment(const EdgeColoring& c, const SatReduction& r,
                                  const CNFInstance& phi);
/// Proper coloring inducing `a`, built gadget by gadget.
EdgeColoring assignment_to_coloring(const Assignment& a, const SatReduction& r,
                                    const CNFInstance& phi, const Caps& caps = {});

/// DIMACS CNF; every clause must have exactly three literals.
CNFInstance parse_dimacs(std::istream& in);
std::string to_dimacs(const CNFInstance& phi);
/// "n m" header then m lines "u v".
Graph parse_edge_list(std::istream& in);
std::string to_edge_list(const Graph& g);

}  // namespace polycsp
