#include "polycsp/caps.hpp"

#include <cctype>
#include <cstdlib>
#include <utility>
#include <vector>

namespace polycsp {

namespace {

std::vector<std::pair<const char*, std::size_t Caps::*>> cap_fields() {
  return {
      {"power_elements", &Caps::power_elements},
      {"search_nodes", &Caps::search_nodes},
      {"indicator_variables", &Caps::indicator_variables},
      {"indicator_constraints", &Caps::indicator_constraints},
      {"pp_rows", &Caps::pp_rows},
      {"operation_table", &Caps::operation_table},
      {"ts_states", &Caps::ts_states},
      {"cycles", &Caps::cycles},
      {"lift_nodes", &Caps::lift_nodes},
      {"coloring_edges", &Caps::coloring_edges},
      {"gadget_patterns", &Caps::gadget_patterns},
      {"setter_pairs", &Caps::setter_pairs},
  };
}

}  // namespace

bool Caps::set(const std::string& name, std::size_t value) {
  for (auto [key, field] : cap_fields()) {
    if (name == key) {
      this->*field = value;
      return true;
    }
  }
  return false;
}

Caps Caps::from_env() {
  Caps caps;
  for (auto [key, field] : cap_fields()) {
    std::string var = "POLYCSP_CAP_";
    for (const char* p = key; *p; ++p) var += static_cast<char>(std::toupper(*p));
    if (const char* v = std::getenv(var.c_str())) {
      char* end = nullptr;
      unsigned long long parsed = std::strtoull(v, &end, 10);
      if (end != v && *end == '\0') caps.*field = static_cast<std::size_t>(parsed);
    }
  }
  return caps;
}

}  // namespace polycsp
