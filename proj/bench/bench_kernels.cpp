// Serial reference vs OpenMP kernels at the sizes the pipeline uses.
#include <benchmark/benchmark.h>

#include "mavpoint/kernels.hpp"
#include "mavpoint/report.hpp"
#include "mavpoint/rng.hpp"

using namespace mavpoint;

namespace {

Matrix random_matrix(std::size_t r, std::size_t c, std::uint64_t seed) {
    Rng rng(seed);
    Matrix m(r, c);
    for (double& v : m.data()) v = rng.normal();
    return m;
}

// Windows x padded MAV length times the projection.
template <Matrix (*Fn)(const Matrix&, const Matrix&)>
void BM_matmul(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    const Matrix a = random_matrix(n, 2048, 1);
    const Matrix p = random_matrix(2048, 15, 2);
    for (auto _ : state) benchmark::DoNotOptimize(Fn(a, p));
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(n));
}

template <Matrix (*Fn)(const Matrix&, std::span<const std::size_t>, Metric)>
void BM_block_mean(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    const Matrix m = random_matrix(n, 30, 3);
    const auto bounds = block_bounds(n, 500);
    for (auto _ : state) benchmark::DoNotOptimize(Fn(m, bounds, Metric::euclidean));
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(n * n));
}

template <std::size_t (*Fn)(const Matrix&, const Matrix&, kernels::Assignment&)>
void BM_assign(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    const Matrix pts = random_matrix(n, 30, 4);
    const Matrix cen = random_matrix(30, 30, 5);
    kernels::Assignment a;
    for (auto _ : state) {
        a.cluster.assign(n, 0);
        benchmark::DoNotOptimize(Fn(pts, cen, a));
    }
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(n));
}

}  // namespace

BENCHMARK(BM_matmul<kernels::serial::matmul>)->Name("matmul/serial")->Arg(2100)->Arg(8400);
BENCHMARK(BM_matmul<kernels::omp::matmul>)->Name("matmul/omp")->Arg(2100)->Arg(8400);
BENCHMARK(BM_block_mean<kernels::serial::block_mean_distances>)->Name("block_mean/serial")->Arg(2100)->Arg(4200);
BENCHMARK(BM_block_mean<kernels::omp::block_mean_distances>)->Name("block_mean/omp")->Arg(2100)->Arg(4200);
BENCHMARK(BM_assign<kernels::serial::assign_nearest>)->Name("assign/serial")->Arg(2100)->Arg(50000);
BENCHMARK(BM_assign<kernels::omp::assign_nearest>)->Name("assign/omp")->Arg(2100)->Arg(50000);

BENCHMARK_MAIN();
