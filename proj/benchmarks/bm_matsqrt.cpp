#include <benchmark/benchmark.h>

#include <random>

#include "fot/matsqrt.hpp"

namespace {

fot::Matrix random_spd(std::size_t d, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal;
    fot::Matrix g(2 * d, d);
    for (double& v : g.data()) v = normal(rng);
    fot::Matrix a = fot::matmul_tn(g, g);
    a *= 1.0 / static_cast<double>(2 * d);
    return a;
}

void BM_NewtonSchulz(benchmark::State& state) {
    const auto d = static_cast<std::size_t>(state.range(0));
    const fot::Matrix a = random_spd(d, 1);
    for (auto _ : state) benchmark::DoNotOptimize(fot::newton_schulz_sqrt(a, 15));
}
BENCHMARK(BM_NewtonSchulz)->RangeMultiplier(2)->Range(16, 128);

void BM_EigSqrt(benchmark::State& state) {
    const auto d = static_cast<std::size_t>(state.range(0));
    const fot::Matrix a = random_spd(d, 2);
    for (auto _ : state) benchmark::DoNotOptimize(fot::eig_sqrt(a));
}
BENCHMARK(BM_EigSqrt)->RangeMultiplier(2)->Range(16, 128);

void BM_SylvesterEig(benchmark::State& state) {
    const auto d = static_cast<std::size_t>(state.range(0));
    const fot::Matrix b = fot::eig_sqrt(random_spd(d, 3));
    const fot::Matrix da = random_spd(d, 4);
    for (auto _ : state) benchmark::DoNotOptimize(fot::sylvester_grad_eig(b, da));
}
BENCHMARK(BM_SylvesterEig)->RangeMultiplier(2)->Range(16, 128);

}  // namespace
