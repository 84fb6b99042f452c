#pragma once

#include <cstddef>
#include <string>

namespace polycsp {

/// Size caps shared by every search in the library. Exceeding one raises
/// CapExceeded rather than returning a truncated answer.
struct Caps {
  std::size_t power_elements = 1'000'000;     // domain_size^n for power()
  std::size_t search_nodes = 10'000'000;      // backtracking nodes per search
  std::size_t indicator_variables = 2'000'000;
  std::size_t indicator_constraints = 4'000'000;
  std::size_t pp_rows = 6;                    // |r| for pp_closure
  std::size_t operation_table = 1'000'000;    // dense operation entries
  std::size_t ts_states = 200'000;            // column-set states for total symmetry
  std::size_t cycles = 10'000;                // simple cycles for the audit
  std::size_t lift_nodes = 100'000;           // variables in an obstruction lift
  std::size_t coloring_edges = 60;            // brute_force_edge_coloring
  std::size_t gadget_patterns = 1'000'000;    // boundary patterns in verify_gadget
  std::size_t setter_pairs = 64;              // variable_setter(n)

  /// Defaults overridden by POLYCSP_CAP_<NAME> environment variables
  /// (e.g. POLYCSP_CAP_SEARCH_NODES=5000000).
  static Caps from_env();

  /// Sets a cap by its snake_case name; returns false for unknown names.
  bool set(const std::string& name, std::size_t value);
};

}  // namespace polycsp
