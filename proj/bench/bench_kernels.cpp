// Parallel kernels against their serial references.

#include <benchmark/benchmark.h>

#include <random>

#include "polycsp/gadgets.hpp"
#include "polycsp/polymorphism.hpp"

using namespace polycsp;

namespace {

// A projection preserves everything, so the whole tuple product is scanned.
Structure dense_structure(int d, int arity, std::size_t tuples) {
  std::mt19937_64 rng(7);
  std::uniform_int_distribution<int> pick(0, d - 1);
  Table t;
  while (t.size() < tuples) {
    Tuple x(arity);
    for (int& v : x) v = pick(rng);
    t.push_back(x);
    canonicalize(t);
  }
  Structure s(d, {});
  s.add_relation("R", arity, t);
  return s;
}

void BM_preserves(benchmark::State& state) {
  Structure s = dense_structure(6, 3, static_cast<std::size_t>(state.range(0)));
  Operation op = Operation::projection(6, 4, 2);
  for (auto _ : state) benchmark::DoNotOptimize(preserves(op, s));
  state.SetItemsProcessed(state.iterations() * state.range(0) * state.range(0) * state.range(0) * state.range(0));
}

void BM_preserves_serial(benchmark::State& state) {
  Structure s = dense_structure(6, 3, static_cast<std::size_t>(state.range(0)));
  Operation op = Operation::projection(6, 4, 2);
  for (auto _ : state) benchmark::DoNotOptimize(preserves_serial(op, s));
  state.SetItemsProcessed(state.iterations() * state.range(0) * state.range(0) * state.range(0) * state.range(0));
}

Gadget gadget_arg(int which) {
  switch (which) {
    case 0: return inverter();
    case 1: return or_gate();
    default: return variable_setter(which, {});
  }
}

void BM_verify_gadget(benchmark::State& state) {
  Gadget g = gadget_arg(static_cast<int>(state.range(0)));
  state.SetLabel(g.name);
  for (auto _ : state) benchmark::DoNotOptimize(verify_gadget(g).pass);
}

void BM_verify_gadget_serial(benchmark::State& state) {
  Gadget g = gadget_arg(static_cast<int>(state.range(0)));
  state.SetLabel(g.name);
  for (auto _ : state) benchmark::DoNotOptimize(verify_gadget_serial(g).pass);
}

}  // namespace

BENCHMARK(BM_preserves)->Arg(20)->Arg(40)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_preserves_serial)->Arg(20)->Arg(40)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_verify_gadget)->Arg(0)->Arg(1)->Arg(3)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_verify_gadget_serial)->Arg(0)->Arg(1)->Arg(3)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
