#include <benchmark/benchmark.h>

#include "ecw/exact.hpp"
#include "ecw/halfplane.hpp"
#include "ecw/search.hpp"

namespace {

void BM_enumerate_sl2z(benchmark::State& state) {
    const int height = static_cast<int>(state.range(0));
    for (auto _ : state) {
        auto v = ecw::enumerate_sl2z(height);
        benchmark::DoNotOptimize(v);
    }
}
BENCHMARK(BM_enumerate_sl2z)->Arg(3)->Arg(5)->Arg(10);

void BM_coset_approximate(benchmark::State& state) {
    const int height = static_cast<int>(state.range(0));
    const auto g = ecw::SL2Matrix::exact(ecw::QuadScalar(1), ecw::QuadScalar::sqrt_of(2),
                                         ecw::QuadScalar(0), ecw::QuadScalar(1));
    const auto target = ecw::connecting_matrix(ecw::HPoint(0.1, 1.2), ecw::HPoint(-0.3, 0.8), 1.1);
    for (auto _ : state) {
        auto ca = ecw::coset_approximate(g, target, height);
        benchmark::DoNotOptimize(ca);
    }
}
BENCHMARK(BM_coset_approximate)->Arg(5)->Arg(10)->Arg(20);

void BM_connecting_matrix(benchmark::State& state) {
    const ecw::HPoint z1(0.1, 1.2), z2(-0.3, 0.8);
    for (auto _ : state) {
        auto m = ecw::connecting_matrix(z1, z2, 0.7);
        benchmark::DoNotOptimize(m);
    }
}
BENCHMARK(BM_connecting_matrix);

}  // namespace

BENCHMARK_MAIN();
