// Serial vs. OpenMP comparison for the two chart kernels and batch decoding.
#include <benchmark/benchmark.h>

#include <string>
#include <vector>

#include "cfsample/enumerate.hpp"
#include "cfsample/forest.hpp"
#include "cfsample/grammar.hpp"
#include "cfsample/recognizer.hpp"
#include "cfsample/sampler.hpp"

namespace {

using namespace cfsample;

CNFGrammar dyck() {
    return to_cnf(parse_grammar("S -> S S | ( S ) | ( )\n"));
}

PorousString holes(std::size_t n) {
    return PorousString(std::vector<std::string>(n, "_"));
}

void bm_set_chart(benchmark::State& state, Schedule sched) {
    const CNFGrammar g = dyck();
    const PorousString s = holes(static_cast<std::size_t>(state.range(0)));
    for (auto _ : state) {
        benchmark::DoNotOptimize(build_set_chart(g, s, sched));
    }
}

void bm_forest_chart(benchmark::State& state, Schedule sched) {
    const CNFGrammar g = dyck();
    const PorousString s = holes(static_cast<std::size_t>(state.range(0)));
    for (auto _ : state) {
        benchmark::DoNotOptimize(build_forest_chart(g, s, sched));
    }
}

void bm_decode(benchmark::State& state, int jobs) {
    const CNFGrammar g = dyck();
    const auto forest = build_forest(g, holes(24));
    const auto root = root_forest(forest, g);
    CountTable counts(root);
    const TreeCount total = counts.count(root.get());
    std::vector<TreeCount> indices;
    SampleRng rng(11);
    for (int i = 0; i < 4096; ++i) indices.push_back(rng.below(total));
    for (auto _ : state) {
        benchmark::DoNotOptimize(decode_batch(root, counts, indices, jobs));
    }
}

}  // namespace

BENCHMARK_CAPTURE(bm_set_chart, serial, Schedule::serial)->Arg(64)->Arg(128)->Arg(256)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(bm_set_chart, parallel, Schedule::parallel)->Arg(64)->Arg(128)->Arg(256)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(bm_forest_chart, serial, Schedule::serial)->Arg(64)->Arg(128)->Arg(256)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(bm_forest_chart, parallel, Schedule::parallel)->Arg(64)->Arg(128)->Arg(256)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(bm_decode, serial, 1)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(bm_decode, parallel, 0)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
