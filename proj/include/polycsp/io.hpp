#pragma once

#include <iosfwd>
#include <string>

#include "polycsp/structure.hpp"

namespace polycsp {

/// Text format:
///
///   # comment
///   domain 3            (templates; instances use "variables N")
///   rel E 2
///   0 1
///   1 0
///
/// Every error is a ParseError with line and column.
Structure parse_template(std::istream& in);
Instance parse_instance(std::istream& in);
/// Relations are matched to `sig` by name and reordered to it; relations the
/// file omits are empty.
Instance parse_instance(std::istream& in, const Signature& sig);

/// Canonical text: header, then each relation with its tuples sorted.
std::string emit_template(const Structure& s);
std::string emit_instance(const Instance& x);

Structure read_template_file(const std::string& path);
Instance read_instance_file(const std::string& path, const Signature& sig);

}  // namespace polycsp
