#pragma once

#include <functional>
#include <vector>

#include "polycsp/caps.hpp"
#include "polycsp/structure.hpp"

namespace polycsp {

/// An n-ary operation on {0..domain_size-1} stored as a dense table indexed
/// by the mixed-radix code of the argument tuple (first argument most
/// significant, as in power()).
struct Operation {
  int domain_size = 0;
  int arity = 0;
  std::vector<int> table;

  int operator()(const Tuple& args) const { return table[encode_tuple(args, domain_size)]; }
  bool operator==(const Operation&) const = default;

  static Operation from_function(int d, int arity, const std::function<int(const Tuple&)>& fn,
                                 const Caps& caps = {});
  static Operation projection(int d, int arity, int coord);
  static Operation constant(int d, int arity, int value);
};

/// Throws InvalidInput unless the table is total and in range.
void validate_operation(const Operation& op);

namespace ops {
Operation min2(int d);
Operation max2(int d);
Operation and_n(int n);
Operation majority();  // Boolean
Operation minority();  // x xor y xor z
Operation dual_discriminator(int d);
}  // namespace ops

}  // namespace polycsp
