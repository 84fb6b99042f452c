#pragma once

#include <map>
#include <memory>
#include <string>
#include <variant>
#include <vector>

#include "polycsp/formula.hpp"
#include "polycsp/search.hpp"
#include "polycsp/structure.hpp"

namespace polycsp {

/// E as a quotient of a subset A of D^n: A by domain_formula (n free
/// variables), c by quotient_map, c^-1(R) by preimage[R] (n * arity free
/// variables, blocks of n per argument).
struct SimpleInterpretation {
  int dimension = 1;
  SimpleFormula domain_formula;
  std::map<Tuple, int> quotient_map;
  std::vector<SimpleFormula> preimage;  // one per relation of target
  Structure target;

  /// Checks every invariant against the source template by enumeration.
  void validate(const Structure& source, const SearchOptions& opts = {}) const;
};

/// source and target are homomorphically equivalent through the stored maps.
struct HomEquivalence {
  Structure target;
  Assignment to_target;    // source -> target
  Assignment from_target;  // target -> source
};
/// Finds both maps; nullopt when the structures are not equivalent.
std::optional<HomEquivalence> hom_equivalence(const Structure& source, const Structure& target,
                                              const SearchOptions& opts = {});

/// Expansion of a core by the singleton relations of with_singletons().
struct SingletonExpansion {};

using ConstructionStep = std::variant<SimpleInterpretation, HomEquivalence, SingletonExpansion>;

struct SimpleConstruction {
  Structure base;
  std::vector<ConstructionStep> steps;

  /// Template after every step.
  Structure target() const;
};

/// Relations eq0..eq{n-1} (the orbit diagonals) appended to s.
Structure with_orbit_relations(const Structure& s, const SearchOptions& opts = {});

/// Simple interpretation of `target` in `source` with n = 1, A = D and the
/// identity quotient, one formula per target relation.
SimpleInterpretation definitional_expansion(const Structure& source, const Structure& target,
                                            const std::vector<SimpleFormula>& formulas);

/// One compiled step: source is an instance of source_template, output of
/// output_template.
struct ReductionStep {
  std::string kind;  // singleton | interpretation | hom-equivalence
  Instance source;
  Structure source_template;
  Instance output;
  Structure output_template;
  std::vector<std::string> provenance;  // per output variable
  std::size_t multiplier = 1;           // N for this step
  std::vector<std::string> notes;

  // interpretation
  std::shared_ptr<const SimpleInterpretation> interp;
  std::vector<std::vector<int>> y;  // output variables for each source variable
  struct Block {
    int formula = -1;  // -1: domain formula, else target relation index
    std::vector<int> vars;  // output variable per formula variable
  };
  std::vector<Block> blocks;

  // hom-equivalence
  Assignment to_target, from_target;
};

struct ReductionCertificate {
  std::vector<ReductionStep> steps;  // in application order
  std::size_t multiplier = 1;        // product of the step multipliers
  std::size_t input_degree = 0;      // max occurrences in the input
  std::size_t output_degree = 0;
  std::vector<std::string> notes;

  const Instance& output() const { return steps.back().output; }
};

/// Case (1): x over with_singletons(s), s a core. Output over s (orbit
/// relations are injected and then expanded away when s lacks them).
ReductionCertificate reduce_singleton_expansion(const Instance& x, const Structure& s,
                                                const SearchOptions& opts = {});
/// Case (2): x over interp.target, output over `source`.
ReductionCertificate reduce_interpretation(const Instance& x, const Structure& source,
                                           const SimpleInterpretation& interp,
                                           const SearchOptions& opts = {});
ReductionCertificate reduce_hom_equivalence(const Instance& x, const Structure& source,
                                            const HomEquivalence& eq);
/// Whole chain; x is an instance of c.target(), the output one of c.base.
ReductionCertificate compile(const Instance& x, const SimpleConstruction& c,
                             const SearchOptions& opts = {});

/// Both verify their input and output; VerificationFailure otherwise.
Assignment pushforward_solution(const Assignment& g, const ReductionCertificate& cert,
                                const SearchOptions& opts = {});
Assignment pullback_solution(const Assignment& h, const ReductionCertificate& cert);

}  // namespace polycsp
