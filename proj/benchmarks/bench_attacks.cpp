// Adversarial example generation cost per sample: one-shot FGSM versus
// iterated PGD at the evaluation depths used for desk and paper runs.

#include <benchmark/benchmark.h>

#include "pepita/attacks.hpp"
#include "pepita/mlp.hpp"
#include "pepita/rng.hpp"

namespace {

using namespace pepita;

struct Fixture {
    Mlp m;
    Tensor1 x;
    Tensor1 y;
};

Fixture make_fixture() {
    Rng rng(13);
    Fixture f{Mlp::make({784, 256, 10}, rng), Tensor1(784), Tensor1(10)};
    for (double& v : f.x.v) v = rng.uniform(0.0, 1.0);
    f.y[3] = 1.0;
    return f;
}

void BM_Fgsm(benchmark::State& state) {
    const Fixture f = make_fixture();
    const AttackConfig cfg = AttackConfig::fgsm_default();
    for (auto _ : state) benchmark::DoNotOptimize(fgsm(f.m, f.x, f.y, cfg));
}

void BM_Pgd(benchmark::State& state) {
    const Fixture f = make_fixture();
    AttackConfig cfg = AttackConfig::pgd_default();
    cfg.iterations = static_cast<std::size_t>(state.range(0));
    Rng rng(17);
    for (auto _ : state)
        benchmark::DoNotOptimize(pgd(f.m, f.x, f.y, cfg, rng));
}

}  // namespace

BENCHMARK(BM_Fgsm);
BENCHMARK(BM_Pgd)->Arg(10)->Arg(40);

BENCHMARK_MAIN();
