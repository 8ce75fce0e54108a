#include <benchmark/benchmark.h>

#include <numeric>
#include <vector>

#include "skewlab/bohr.hpp"
#include "skewlab/detect.hpp"
#include "skewlab/norms.hpp"
#include "skewlab/rng.hpp"
#include "skewlab/tracer.hpp"

using namespace skewlab;

namespace {

PointSet2 random_cyclic_set(std::int64_t N, double p, std::uint64_t seed) {
    CounterRng rng(seed);
    std::vector<Point2> pts;
    for (std::int64_t x = 0; x < N; ++x)
        for (std::int64_t y = 0; y < N; ++y)
            if (rng.next_unit() < p) pts.push_back({x, y});
    return PointSet2(Domain::cyclic(N), std::move(pts));
}

std::vector<double> random_vec(std::int64_t N, std::uint64_t seed) {
    CounterRng rng(seed);
    std::vector<double> out(static_cast<std::size_t>(N));
    for (auto& v : out) v = 2 * rng.next_unit() - 1;
    return out;
}

void BM_find_skew_corner(benchmark::State& state) {
    const auto A = random_cyclic_set(state.range(0), 0.05, 11);
    for (auto _ : state) benchmark::DoNotOptimize(find_skew_corner(A));
}
BENCHMARK(BM_find_skew_corner)->Arg(16)->Arg(32)->Arg(64);

void BM_count_skew_corners(benchmark::State& state) {
    const auto A = random_cyclic_set(state.range(0), 0.2, 12);
    for (auto _ : state) benchmark::DoNotOptimize(count_skew_corners(A));
}
BENCHMARK(BM_count_skew_corners)->Arg(16)->Arg(32);

void BM_build_bohr(benchmark::State& state) {
    const std::int64_t N = state.range(0);
    for (auto _ : state) benchmark::DoNotOptimize(build_bohr(N, {3, 7, 11}, 0.6));
}
BENCHMARK(BM_build_bohr)->Arg(256)->Arg(1024)->Arg(4096);

void BM_certify_regular(benchmark::State& state) {
    const auto B = build_bohr(state.range(0), {3, 7}, 0.6);
    for (auto _ : state) benchmark::DoNotOptimize(certify_regular(B));
}
BENCHMARK(BM_certify_regular)->Arg(256)->Arg(1024);

void BM_u2_norm(benchmark::State& state) {
    const auto f = random_vec(state.range(0), 13);
    for (auto _ : state) benchmark::DoNotOptimize(u2_norm(f));
}
BENCHMARK(BM_u2_norm)->Arg(64)->Arg(256)->Arg(1024);

void BM_km_norm_r3(benchmark::State& state) {
    const auto f = random_vec(state.range(0), 14);
    for (auto _ : state) benchmark::DoNotOptimize(km_norm(f, 3));
}
BENCHMARK(BM_km_norm_r3)->Arg(64)->Arg(256);

void BM_grid_norm_22(benchmark::State& state) {
    CounterRng rng(15);
    const std::int64_t N = state.range(0);
    std::vector<std::int64_t> idx(static_cast<std::size_t>(N));
    std::iota(idx.begin(), idx.end(), 0);
    std::vector<double> vals(static_cast<std::size_t>(N * N));
    for (auto& v : vals) v = 2 * rng.next_unit() - 1;
    const FunctionTable2 f(idx, idx, vals);
    for (auto _ : state) benchmark::DoNotOptimize(grid_norm(f, 2, 2));
}
BENCHMARK(BM_grid_norm_22)->Arg(16)->Arg(32)->Arg(64);

void BM_step1_regularize(benchmark::State& state) {
    const std::int64_t N = state.range(0);
    TraceInput in{random_cyclic_set(N, 0.4, 16), {}, build_bohr(N, {}, 1.0)};
    in.X.resize(static_cast<std::size_t>(N));
    std::iota(in.X.begin(), in.X.end(), 0);
    IncrementConstants consts;
    consts.lambda = 1.0;
    for (auto _ : state) benchmark::DoNotOptimize(step1_regularize(in, consts));
}
BENCHMARK(BM_step1_regularize)->Arg(32)->Arg(64);

}  // namespace

BENCHMARK_MAIN();
