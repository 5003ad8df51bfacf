#include <benchmark/benchmark.h>

#include "ecw/halfplane.hpp"
#include "ecw/modular.hpp"

namespace {

void BM_reduce(benchmark::State& state) {
    const ecw::HPoint z(17.318, 0.003);
    for (auto _ : state) {
        auto [zs, gamma] = ecw::reduce_to_fundamental_domain(z);
        benchmark::DoNotOptimize(zs);
        benchmark::DoNotOptimize(gamma);
    }
}
BENCHMARK(BM_reduce);

void BM_j_eval(benchmark::State& state) {
    const ecw::HPoint z(0.3123, 0.0421);
    for (auto _ : state) {
        auto r = ecw::j_eval(z, 1e-10);
        benchmark::DoNotOptimize(r);
    }
}
BENCHMARK(BM_j_eval);

void BM_j_derivatives(benchmark::State& state) {
    const ecw::HPoint z(0.3123, 0.0421);
    for (auto _ : state) {
        auto r = ecw::j_derivatives(z, 1e-10);
        benchmark::DoNotOptimize(r);
    }
}
BENCHMARK(BM_j_derivatives);

void BM_j_invert(benchmark::State& state) {
    const ecw::cplx w(40321.5, -2716.25);
    for (auto _ : state) {
        auto z = ecw::j_invert(w, 1e-9);
        benchmark::DoNotOptimize(z);
    }
}
BENCHMARK(BM_j_invert);

}  // namespace

BENCHMARK_MAIN();
