#include <benchmark/benchmark.h>

#include <map>

#include "dls/solve.hpp"

using namespace dls;

namespace {

struct Problem {
  Discretization disc;
  ManufacturedCase data;
  Vector<cdouble> lift;
};

const Problem& problem(int n) {
  static std::map<int, Problem> cache;
  auto it = cache.find(n);
  if (it == cache.end()) {
    auto data = make_case("poisson-sine");
    auto disc = discretize(n, make_formulation("ultraweak-dpg", 2, 1));
    auto lift = default_lift(disc, data);
    it = cache.emplace(n, Problem{std::move(disc), std::move(data), std::move(lift)}).first;
  }
  return it->second;
}

Execution mode(const benchmark::State& state) { return state.range(1) ? Execution::parallel : Execution::serial; }

void assemble_ls(benchmark::State& state) {
  const auto& pr = problem(int(state.range(0)));
  const AssemblyOptions opts{true, true, mode(state)};
  for (auto _ : state) benchmark::DoNotOptimize(assemble_overdetermined<double>(pr.disc, pr.data, opts, pr.lift));
}

void assemble_normal(benchmark::State& state) {
  const auto& pr = problem(int(state.range(0)));
  const AssemblyOptions opts{true, true, mode(state)};
  for (auto _ : state) benchmark::DoNotOptimize(assemble_ne<double>(pr.disc, pr.data, opts, pr.lift));
}

void solve_qr(benchmark::State& state) {
  const auto& pr = problem(int(state.range(0)));
  const auto ls = assemble_overdetermined<double>(pr.disc, pr.data, {}, pr.lift);
  for (auto _ : state) benchmark::DoNotOptimize(solve_ls(ls, {true, false, mode(state)}));
}

void solve_normal(benchmark::State& state) {
  const auto& pr = problem(int(state.range(0)));
  const auto ne = assemble_ne<double>(pr.disc, pr.data, {}, pr.lift);
  for (auto _ : state) benchmark::DoNotOptimize(solve_ne(ne, {true, false, mode(state)}));
}

void sizes(benchmark::internal::Benchmark* b) {
  for (int n : {8, 16, 32})
    for (int parallel : {0, 1}) b->Args({n, parallel});
  b->ArgNames({"n", "parallel"})->Unit(benchmark::kMillisecond);
}

}  // namespace

BENCHMARK(assemble_ls)->Apply(sizes);
BENCHMARK(assemble_normal)->Apply(sizes);
BENCHMARK(solve_qr)->Apply(sizes);
BENCHMARK(solve_normal)->Apply(sizes);

BENCHMARK_MAIN();
