#include <benchmark/benchmark.h>

#include "coupdoob/chain_ops.hpp"
#include "coupdoob/coupling.hpp"
#include "coupdoob/exact.hpp"
#include "coupdoob/gallery.hpp"
#include "coupdoob/monte_carlo.hpp"

using namespace coupdoob;

namespace {

FiniteChain bench_chain(std::size_t n_states) {
    return random_chain(n_states, {.sparsity = 0.5, .force_irreducible = true}, 8675309);
}

void BM_NStep(benchmark::State &state) {
    FiniteChain chain = bench_chain(static_cast<std::size_t>(state.range(0)));
    for (auto _ : state)
        benchmark::DoNotOptimize(n_step(chain, 0, 64));
    state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_NStep)->RangeMultiplier(2)->Range(8, 64)->Complexity();

void BM_InvariantMeasures(benchmark::State &state) {
    FiniteChain chain = bench_chain(static_cast<std::size_t>(state.range(0)));
    for (auto _ : state)
        benchmark::DoNotOptimize(invariant_measures(chain));
    state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_InvariantMeasures)->RangeMultiplier(2)->Range(8, 64)->Complexity();

void BM_MaximalRows(benchmark::State &state) {
    FiniteChain chain = bench_chain(static_cast<std::size_t>(state.range(0)));
    for (auto _ : state)
        for (std::size_t x1 = 0; x1 < chain.size(); ++x1)
            for (std::size_t x2 = 0; x2 < chain.size(); ++x2)
                benchmark::DoNotOptimize(maximal_coupling_row(chain, x1, x2));
    state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_MaximalRows)->RangeMultiplier(2)->Range(4, 32)->Complexity();

void BM_EvolveCoupled(benchmark::State &state) {
    FiniteChain chain = bench_chain(16);
    CouplingKernel s = maximal_kernel(chain);
    for (auto _ : state)
        benchmark::DoNotOptimize(evolve_coupled(s, {0, 1}, state.range(0)));
}
BENCHMARK(BM_EvolveCoupled)->Arg(16)->Arg(64)->Arg(256);

void BM_SamplePathCountable(benchmark::State &state) {
    CountableChain cc = std::get<CountableChain>(build_gallery("doob-counterexample"));
    std::uint64_t seed = 0;
    for (auto _ : state)
        benchmark::DoNotOptimize(sample_path(cc, 3, static_cast<std::size_t>(state.range(0)),
                                             ++seed));
}
BENCHMARK(BM_SamplePathCountable)->Arg(1000)->Arg(10000);

void BM_SampleCoupled(benchmark::State &state) {
    FiniteChain chain = bench_chain(8);
    CouplingKernel s = maximal_kernel(chain);
    std::uint64_t seed = 0;
    for (auto _ : state)
        benchmark::DoNotOptimize(sample_coupled(s, {0, 1}, 64, ++seed));
}
BENCHMARK(BM_SampleCoupled);

} // namespace

BENCHMARK_MAIN();
