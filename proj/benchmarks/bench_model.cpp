// Whole-step timings: frozen forward pass plus both rules' update
// computation on one mini-batch, desk and paper widths.

#include <benchmark/benchmark.h>

#include "pepita/mlp.hpp"
#include "pepita/rng.hpp"
#include "pepita/train.hpp"

namespace {

using namespace pepita;

struct Fixture {
    Mlp m;
    Tensor2 x;
    Tensor2 y;
};

Fixture make_fixture(std::size_t hidden) {
    Rng rng(11);
    Fixture f{Mlp::make({784, hidden, 10}, rng), Tensor2(784, 64),
              Tensor2(10, 64)};
    for (double& v : f.x.v) v = rng.uniform(0.0, 1.0);
    for (std::size_t j = 0; j < 64; ++j) f.y(rng.next_below(10), j) = 1.0;
    return f;
}

void BM_ForwardFrozen(benchmark::State& state) {
    const Fixture f = make_fixture(static_cast<std::size_t>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(forward_frozen(f.m, f.x));
    state.SetItemsProcessed(state.iterations() * 64);
}

void BM_BpUpdates(benchmark::State& state) {
    const Fixture f = make_fixture(static_cast<std::size_t>(state.range(0)));
    for (auto _ : state)
        benchmark::DoNotOptimize(bp_updates(f.m, f.x, f.y, Mode::eval()));
    state.SetItemsProcessed(state.iterations() * 64);
}

void BM_PepitaUpdates(benchmark::State& state) {
    const Fixture f = make_fixture(static_cast<std::size_t>(state.range(0)));
    for (auto _ : state)
        benchmark::DoNotOptimize(pepita_updates(f.m, f.x, f.y, Mode::eval()));
    state.SetItemsProcessed(state.iterations() * 64);
}

}  // namespace

BENCHMARK(BM_ForwardFrozen)->Arg(256)->Arg(1024);
BENCHMARK(BM_BpUpdates)->Arg(256)->Arg(1024);
BENCHMARK(BM_PepitaUpdates)->Arg(256)->Arg(1024);

BENCHMARK_MAIN();
