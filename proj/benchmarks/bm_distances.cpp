#include <benchmark/benchmark.h>

#include "fot/distances.hpp"

namespace {

fot::Matrix gaussian(std::size_t n, std::size_t d, fot::Rng& rng) {
    std::normal_distribution<double> normal;
    fot::Matrix m(n, d);
    for (double& v : m.data()) v = normal(rng);
    return m;
}

// Forward and gradient, the per-step generator cost.
void BM_FrechetGrad(benchmark::State& state) {
    fot::Rng rng(11);
    const auto n = static_cast<std::size_t>(state.range(0));
    const fot::GaussianStats pd = fot::estimate_gaussian(gaussian(n, 64, rng));
    const fot::Matrix feat = gaussian(n, 64, rng);
    for (auto _ : state) benchmark::DoNotOptimize(fot::frechet_grad(feat, pd));
}
BENCHMARK(BM_FrechetGrad)->RangeMultiplier(2)->Range(64, 512)->Unit(benchmark::kMillisecond);

void BM_OtGrad(benchmark::State& state) {
    fot::Rng rng(12);
    const auto n = static_cast<std::size_t>(state.range(0));
    const fot::Matrix x = gaussian(n, 64, rng);
    const fot::Matrix y = gaussian(n, 64, rng);
    for (auto _ : state) {
        const fot::OtResult r = fot::ot_cost(x, y, 2);
        benchmark::DoNotOptimize(fot::ot_grad(x, y, r.assignment, 2));
    }
}
BENCHMARK(BM_OtGrad)->RangeMultiplier(2)->Range(64, 512)->Unit(benchmark::kMillisecond);

void BM_SlicedGrad(benchmark::State& state) {
    fot::Rng rng(13);
    const auto n = static_cast<std::size_t>(state.range(0));
    const fot::Matrix x = gaussian(n, 64, rng);
    const fot::Matrix y = gaussian(n, 64, rng);
    for (auto _ : state) benchmark::DoNotOptimize(fot::sliced_wasserstein_grad(x, y, 512, rng));
}
BENCHMARK(BM_SlicedGrad)->RangeMultiplier(2)->Range(64, 512)->Unit(benchmark::kMillisecond);

}  // namespace
