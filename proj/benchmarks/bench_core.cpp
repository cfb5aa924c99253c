#include <benchmark/benchmark.h>

#include <random>

#include "morsehb/complex.hpp"
#include "morsehb/corpus.hpp"
#include "morsehb/flow.hpp"
#include "morsehb/homology.hpp"

using namespace morsehb;

namespace {

int_matrix random_matrix(std::mt19937_64& rng, std::size_t n) {
    std::uniform_int_distribution<std::int64_t> entry(-3, 3);
    int_matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) m.at(i, j) = entry(rng);
    return m;
}

void BM_SmithNormalForm(benchmark::State& state) {
    // desk-scale sizes; larger inputs can overflow checked 64-bit arithmetic
    std::mt19937_64 rng(7);
    std::vector<int_matrix> inputs;
    for (int i = 0; i < 64; ++i) inputs.push_back(random_matrix(rng, state.range(0)));
    std::size_t i = 0;
    for (auto _ : state) {
        smith_form snf = smith_normal_form(inputs[i++ % inputs.size()]);
        benchmark::DoNotOptimize(snf.rank);
    }
}
BENCHMARK(BM_SmithNormalForm)->Arg(4)->Arg(6)->Arg(8);

void BM_CorpusPipeline(benchmark::State& state) {
    const auto& entry = corpus_entry_by_name("annulus-cross");
    for (auto _ : state) {
        morse_data data = parse_morse_data(entry.morse_json);
        graded_complex cx = assemble_boundary(data);
        homology_result h = homology(cx);
        benchmark::DoNotOptimize(h.groups.size());
    }
}
BENCHMARK(BM_CorpusPipeline);

void BM_CollarTrajectory(benchmark::State& state) {
    flow_problem fp = parse_flow_problem(corpus_entry_by_name("disk-neg").flow_json);
    shooting_config cfg;
    for (auto _ : state) {
        trajectory tr = integrate_trajectory(fp, {0.4, 0.1}, flow_direction::forward, cfg);
        benchmark::DoNotOptimize(tr.samples.size());
    }
}
BENCHMARK(BM_CollarTrajectory);

} // namespace

BENCHMARK_MAIN();
