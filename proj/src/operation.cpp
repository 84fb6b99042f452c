#include "polycsp/operation.hpp"

#include <algorithm>

#include "polycsp/errors.hpp"

namespace polycsp {

Operation Operation::from_function(int d, int arity, const std::function<int(const Tuple&)>& fn,
                                   const Caps& caps) {
  if (arity < 1) throw InvalidInput("operation arity must be positive");
  std::size_t size = checked_pow(d, arity, caps.operation_table, "operation_table");
  Operation op{d, arity, std::vector<int>(size)};
  for (std::size_t c = 0; c < size; ++c) op.table[c] = fn(decode_tuple(c, d, arity));
  validate_operation(op);
  return op;
}

Operation Operation::projection(int d, int arity, int coord) {
  return from_function(d, arity, [coord](const Tuple& t) { return t[coord]; });
}

Operation Operation::constant(int d, int arity, int value) {
  return from_function(d, arity, [value](const Tuple&) { return value; });
}

void validate_operation(const Operation& op) {
  if (op.arity < 1 || op.domain_size < 1) throw InvalidInput("malformed operation");
  std::size_t size = 1;
  for (int i = 0; i < op.arity; ++i) size *= op.domain_size;
  if (op.table.size() != size) throw InvalidInput("operation table is not total");
  for (int v : op.table)
    if (v < 0 || v >= op.domain_size) throw InvalidInput("operation value out of range");
}

namespace ops {

Operation min2(int d) {
  return Operation::from_function(d, 2, [](const Tuple& t) { return std::min(t[0], t[1]); });
}

Operation max2(int d) {
  return Operation::from_function(d, 2, [](const Tuple& t) { return std::max(t[0], t[1]); });
}

Operation and_n(int n) {
  return Operation::from_function(
      2, n, [](const Tuple& t) { return *std::min_element(t.begin(), t.end()); });
}

Operation majority() {
  return Operation::from_function(2, 3, [](const Tuple& t) { return t[0] + t[1] + t[2] >= 2; });
}

Operation minority() {
  return Operation::from_function(2, 3, [](const Tuple& t) { return t[0] ^ t[1] ^ t[2]; });
}

Operation dual_discriminator(int d) {
  return Operation::from_function(d, 3, [](const Tuple& t) {
    if (t[1] == t[2]) return t[1];
    return t[0];
  });
}

}  // namespace ops

}  // namespace polycsp
