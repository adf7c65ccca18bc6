// bench.cpp — microbenchmarks for the hot paths: Sigma(z) assembly,
// propensity tables via the design support, and the solver routes at
// simulation-study sizes.

#include <benchmark/benchmark.h>

#include "mivnet/evaluate.hpp"
#include "mivnet/solver.hpp"

using namespace mivnet;

namespace {

struct Fixture {
  Graph g;
  Design d;
  Fixture(int n, double p, std::int64_t cap)
      : g(generate_graph(GraphFamily::erdos_renyi, n, 7, p)),
        d(bernoulli_design(n, 0.5, true, cap, 11)) {}
};

void BM_sigma_assembly_constant(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  Fixture f(n, 0.5, 256);
  PriorCov prior = make_sania_constant(std::max(1, f.g.max_degree()), 1.0, 1.0, 1.0, 1e-4);
  SigmaAssembler as(prior, f.g);
  int k = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(as.sigma(f.d.allocation(k)));
    k = (k + 1) % f.d.size();
  }
}
BENCHMARK(BM_sigma_assembly_constant)->Arg(10)->Arg(20)->Arg(40);

void BM_treated_degrees(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  Fixture f(n, 0.5, 256);
  int k = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(f.g.treated_degrees(f.d.allocation(k)));
    k = (k + 1) % f.d.size();
  }
}
BENCHMARK(BM_treated_degrees)->Arg(10)->Arg(40);

void BM_bernoulli_design_sampled(benchmark::State& state) {
  for (auto _ : state)
    benchmark::DoNotOptimize(bernoulli_design(40, 0.5, true, state.range(0), 3));
}
BENCHMARK(BM_bernoulli_design_sampled)->Arg(1024)->Arg(4096);

void BM_solve_sania_uncorrelated(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  Fixture f(n, 0.5, 1024);
  PriorCov prior = make_sania_uncorrelated(n, std::max(1, f.g.max_degree()), 1.0, 1.0, 1.0);
  for (auto _ : state) benchmark::DoNotOptimize(solve_sania_uncorrelated(f.g, f.d, prior));
}
BENCHMARK(BM_solve_sania_uncorrelated)->Arg(10)->Arg(20);

void BM_solve_equal_nonsingular(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  Fixture f(n, 0.5, 512);
  PriorCov prior = make_sania_constant(std::max(1, f.g.max_degree()), 1.0, 1.0, 1.0, 1e-4);
  for (auto _ : state)
    benchmark::DoNotOptimize(solve_nonsingular(ModelKind::SANIA, f.g, f.d, prior));
}
BENCHMARK(BM_solve_equal_nonsingular)->Arg(10)->Arg(16);

void BM_solve_sanasia(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  Fixture f(n, 0.5, 512);
  PriorCov prior = make_sanasia_independent(n, 1.0, 1.0, 1.0 / n);
  for (auto _ : state) benchmark::DoNotOptimize(solve_sanasia(f.g, f.d, prior));
}
BENCHMARK(BM_solve_sanasia)->Arg(10)->Arg(16);

void BM_solve_general_small(benchmark::State& state) {
  Graph g = generate_graph(GraphFamily::triangle_tail_v1, 4, 0);
  Design d = bernoulli_design(4, 0.5, true, 100, 0);
  PriorCov prior = make_sania_constant(3, 1.0, 1.0, 1.0, 0.0);
  for (auto _ : state)
    benchmark::DoNotOptimize(solve_general(ModelKind::SANIA, g, d, prior));
}
BENCHMARK(BM_solve_general_small);

void BM_exact_moments(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  Fixture f(n, 0.5, 1024);
  SamplingSpec spec;
  ParamSet params = sample_params(ModelKind::SANIA, f.g, spec, 5);
  WeightScheme ws = ht_weights(f.d);
  for (auto _ : state) benchmark::DoNotOptimize(exact_moments(ws, f.d, params, f.g));
}
BENCHMARK(BM_exact_moments)->Arg(10)->Arg(20);

}  // namespace

BENCHMARK_MAIN();
