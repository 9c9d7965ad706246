// Serial reference kernels against the OpenMP versions on S3 meshes of
// growing size.
#include "qgnls/closed_forms.hpp"
#include "qgnls/kernels.hpp"
#include "qgnls/mesh.hpp"

#include <benchmark/benchmark.h>

#include <vector>

namespace {

using namespace qgnls;

struct Fixture {
    MeshPtr mesh;
    std::vector<double> u;
    std::vector<double> out;
};

Fixture make(std::int64_t nodes_per_branch) {
    const double trunc = 40.0;
    Fixture f;
    f.mesh = build_mesh(graphs::star(3), trunc / static_cast<double>(nodes_per_branch), trunc);
    f.u = sample(f.mesh, [](EdgeId, double x) { return star_stationary(1.0, 3, x); }).values;
    f.out.resize(f.u.size());
    return f;
}

template <class Fn>
void run(benchmark::State& state, Fn fn) {
    Fixture f = make(state.range(0));
    const auto view = kernels::MeshView::of(*f.mesh);
    for (auto _ : state) {
        fn(view, f);
        benchmark::ClobberMemory();
    }
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(f.mesh->segments().size()));
}

void BM_IntegralsSerial(benchmark::State& s) {
    run(s, [](const auto& v, Fixture& f) { benchmark::DoNotOptimize(kernels::serial::integrals(v, f.u, 4.0)); });
}
void BM_IntegralsOmp(benchmark::State& s) {
    run(s, [](const auto& v, Fixture& f) { benchmark::DoNotOptimize(kernels::omp::integrals(v, f.u, 4.0)); });
}
void BM_GradientSerial(benchmark::State& s) {
    run(s, [](const auto& v, Fixture& f) { kernels::serial::energy_gradient(v, f.u, 4.0, f.out); });
}
void BM_GradientOmp(benchmark::State& s) {
    run(s, [](const auto& v, Fixture& f) { kernels::omp::energy_gradient(v, f.u, 4.0, f.out); });
}
void BM_MassSerial(benchmark::State& s) {
    run(s, [](const auto& v, Fixture& f) { kernels::serial::mass_action(v, f.u, f.out); });
}
void BM_MassOmp(benchmark::State& s) {
    run(s, [](const auto& v, Fixture& f) { kernels::omp::mass_action(v, f.u, f.out); });
}

}  // namespace

BENCHMARK(BM_IntegralsSerial)->RangeMultiplier(8)->Range(1 << 10, 1 << 19);
BENCHMARK(BM_IntegralsOmp)->RangeMultiplier(8)->Range(1 << 10, 1 << 19);
BENCHMARK(BM_GradientSerial)->RangeMultiplier(8)->Range(1 << 10, 1 << 19);
BENCHMARK(BM_GradientOmp)->RangeMultiplier(8)->Range(1 << 10, 1 << 19);
BENCHMARK(BM_MassSerial)->RangeMultiplier(8)->Range(1 << 10, 1 << 19);
BENCHMARK(BM_MassOmp)->RangeMultiplier(8)->Range(1 << 10, 1 << 19);

BENCHMARK_MAIN();
