// Serial versus OpenMP paths of the hot kernels. Each benchmark takes the
// execution path as its argument: 0 = serial, 1 = parallel.

#include <benchmark/benchmark.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "cascade/cover.hpp"
#include "cascade/cutoff.hpp"
#include "cascade/ensemble.hpp"
#include "cascade/generators.hpp"
#include "cascade/kernels.hpp"

using namespace cascade;

namespace {

kernels::Exec exec_of(const benchmark::State& state)
{
    return state.range(0) == 0 ? kernels::Exec::serial : kernels::Exec::parallel;
}

void BM_WeightedSum(benchmark::State& state)
{
    const Grid3 g = make_grid(128, 2.0 * std::numbers::pi);
    std::vector<double> a(g.size()), b(g.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        a[i] = std::sin(0.37 * static_cast<double>(i));
        b[i] = std::cos(0.11 * static_cast<double>(i));
    }
    for (auto _ : state) benchmark::DoNotOptimize(kernels::weighted_sum(exec_of(state), g, a, b));
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(g.size()));
}

void BM_SampleCutoff(benchmark::State& state)
{
    const Grid3 g = make_grid(128, 2.0 * std::numbers::pi);
    const SpatialCutoff psi = make_psi_interior({0.1, -0.2, 0.3}, 0.8, g);
    SampleRequest req;
    req.psi_delta = true;
    req.gradient = true;
    for (auto _ : state) benchmark::DoNotOptimize(psi.sample(g, req, exec_of(state)));
}

void BM_VerifyCover(benchmark::State& state)
{
    const Cover c = generate_cover(1.0, 0.125, 20, 40);
    for (auto _ : state) benchmark::DoNotOptimize(verify_cover(c, 1000000, 3, exec_of(state)));
}

void BM_EnsembleField(benchmark::State& state)
{
    const Grid3 g = make_grid(64, 2.0 * std::numbers::pi);
    const VectorField3 f = gen_abc(g, 1.0, 0.8, 0.6);
    const EnsembleSource src = EnsembleSource::field(f);
    const Cover c = generate_cover(1.2, 0.6, 20, 40);
    const TemporalCutoff eta(1.0, 0.5);
    const auto patches = sample_cover(src, c, eta.delta());
    for (auto _ : state) benchmark::DoNotOptimize(ensemble_average(src, c, eta, patches, exec_of(state)));
}

void BM_EnsembleDensity(benchmark::State& state)
{
    const Grid3 g = make_grid(64, 2.0 * std::numbers::pi);
    const ScalarDensity d = gen_blob_density(g, TimeAxis(2.0, 9), 6, 1.0, 5);
    const EnsembleSource src = EnsembleSource::density(d);
    const Cover c = generate_cover(1.0, 0.125, 20, 40);
    const TemporalCutoff eta(1.0, 0.5);
    const auto patches = sample_cover(src, c, eta.delta());
    for (auto _ : state) benchmark::DoNotOptimize(ensemble_average(src, c, eta, patches, exec_of(state)));
}

}  // namespace

BENCHMARK(BM_WeightedSum)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SampleCutoff)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_VerifyCover)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_EnsembleField)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_EnsembleDensity)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
