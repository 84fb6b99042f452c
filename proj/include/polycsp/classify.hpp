#pragma once

#include <optional>
#include <string>
#include <vector>

#include "polycsp/operation.hpp"
#include "polycsp/polymorphism.hpp"
#include "polycsp/search.hpp"
#include "polycsp/structure.hpp"

namespace polycsp {

enum class Answer { Yes, No, Unknown };
std::string to_string(Answer a);

enum class BooleanBucket { TotallySymmetric = 1, TwoSatConstructible = 2, Intractable = 3, Affine = 4 };
std::string to_string(BooleanBucket b);

struct BooleanVerdict {
  BooleanBucket bucket = BooleanBucket::Intractable;
  std::string operation;             // name of the first polymorphism found, empty for bucket 3
  std::optional<Operation> witness;  // that polymorphism
};

/// Tests constants, and, or, majority, minority in that order.
BooleanVerdict classify_boolean(const Structure& s);

struct Width1Verdict {
  Answer answer = Answer::Unknown;
  int arity = 0;  // |D| * N, the single arity that is searched
  std::optional<TotallySymmetricResult> extractor;
  std::string note;
};

/// Totally symmetric polymorphism of arity |D| * N, N the largest arity.
Width1Verdict is_width1(const Structure& s, const SearchOptions& opts = {});

struct GraphVerdict {
  bool bipartite = false;
  std::vector<int> odd_cycle;  // closed walk v0..vk=v0 when not bipartite
  int core_size = 0;
  bool siggers = false;  // on the core with singleton relations
};

/// `g` has one symmetric irreflexive binary relation. Throws
/// VerificationFailure if the bipartite test and the Siggers search disagree.
GraphVerdict classify_graph(const Structure& g, const SearchOptions& opts = {});

struct SmoothVerdict {
  bool tractable = false;
  std::vector<int> core_elements;
  bool cycle_union = false;  // core is a disjoint union of directed cycles
  Answer siggers = Answer::Unknown;
};

/// One binary relation, every vertex with an in- and an out-neighbour
/// (InvalidInput "not smooth" otherwise).
SmoothVerdict classify_smooth_digraph(const Structure& d, const SearchOptions& opts = {});

struct Verdict {
  std::string template_id;
  Answer tractable = Answer::Unknown;
  std::optional<PolymorphismWitness> siggers;  // on the core with singletons
  std::vector<int> core_elements;
  Structure expanded_core;  // the core with singleton relations
  Width1Verdict width1;
  Answer dual_discriminator = Answer::Unknown;
  std::optional<BooleanVerdict> boolean;
  std::optional<GraphVerdict> graph;
  std::optional<SmoothVerdict> smooth;
  std::vector<std::string> labels;
  std::vector<std::string> evidence;
};

/// Cap overruns leave the affected fields Unknown and add a note to evidence.
Verdict classify_template(const Structure& s, const std::string& id = "",
                          const SearchOptions& opts = {});

/// Propagation solver for templates with the dual discriminator polymorphism.
/// Throws InvalidInput when s lacks it.
std::optional<Assignment> dual_discriminator_solve(const Instance& x, const Structure& s);

/// Solver for the rock-paper-scissors fixture (relations "pi" and "star").
std::optional<Assignment> rps_solve(const Instance& x, const Structure& s);

struct SolveResult {
  std::optional<Assignment> solution;
  std::string method;  // rps | width1 | dual-discriminator | search
  std::vector<std::string> notes;
};

/// Picks a solver from the template's properties; solutions are verified.
SolveResult solve(const Instance& x, const Structure& s, const SearchOptions& opts = {});

}  // namespace polycsp
