// Dense kernel timings at the shapes the training loop actually hits:
// 28x28 inputs, hidden width 256 (desk) or 1024 (paper), batch 64.

#include <benchmark/benchmark.h>

#include "pepita/rng.hpp"
#include "pepita/tensor.hpp"

namespace {

using pepita::Rng;
using pepita::Tensor2;

Tensor2 random_tensor(std::size_t rows, std::size_t cols, std::uint64_t seed) {
    Rng rng(seed);
    Tensor2 t(rows, cols);
    for (double& v : t.v) v = rng.uniform(-1.0, 1.0);
    return t;
}

void BM_MatmulForward(benchmark::State& state) {
    const std::size_t hidden = static_cast<std::size_t>(state.range(0));
    const Tensor2 w = random_tensor(hidden, 784, 1);
    const Tensor2 x = random_tensor(784, 64, 2);
    for (auto _ : state) benchmark::DoNotOptimize(pepita::matmul(w, x));
    state.SetItemsProcessed(state.iterations() * hidden * 784 * 64);
}

void BM_MatmulBackwardDelta(benchmark::State& state) {
    const std::size_t hidden = static_cast<std::size_t>(state.range(0));
    const Tensor2 w = random_tensor(10, hidden, 3);
    const Tensor2 delta = random_tensor(10, 64, 4);
    for (auto _ : state)
        benchmark::DoNotOptimize(pepita::matmul_at_b(w, delta));
    state.SetItemsProcessed(state.iterations() * hidden * 10 * 64);
}

void BM_MatmulWeightUpdate(benchmark::State& state) {
    const std::size_t hidden = static_cast<std::size_t>(state.range(0));
    const Tensor2 delta = random_tensor(hidden, 64, 5);
    const Tensor2 presyn = random_tensor(784, 64, 6);
    for (auto _ : state)
        benchmark::DoNotOptimize(pepita::matmul_a_bt(delta, presyn));
    state.SetItemsProcessed(state.iterations() * hidden * 784 * 64);
}

void BM_Matvec(benchmark::State& state) {
    const std::size_t hidden = static_cast<std::size_t>(state.range(0));
    const Tensor2 w = random_tensor(hidden, 784, 7);
    pepita::Tensor1 x(784);
    Rng rng(8);
    for (double& v : x.v) v = rng.uniform(0.0, 1.0);
    for (auto _ : state) benchmark::DoNotOptimize(pepita::matvec(w, x));
    state.SetItemsProcessed(state.iterations() * hidden * 784);
}

}  // namespace

BENCHMARK(BM_MatmulForward)->Arg(256)->Arg(1024);
BENCHMARK(BM_MatmulBackwardDelta)->Arg(256)->Arg(1024);
BENCHMARK(BM_MatmulWeightUpdate)->Arg(256)->Arg(1024);
BENCHMARK(BM_Matvec)->Arg(256)->Arg(1024);

BENCHMARK_MAIN();
