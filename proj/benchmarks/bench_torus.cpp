#include <benchmark/benchmark.h>

#include "ecw/exact.hpp"
#include "ecw/torus.hpp"

namespace {

const ecw::EllipticModel& square_model() {
    static const ecw::EllipticModel m = ecw::EllipticModel::from_tau(
        ecw::HPoint(0.0, 1.0), ecw::ExactComplex(ecw::QuadScalar(0), ecw::QuadScalar(1)));
    return m;
}

void BM_wp_eval(benchmark::State& state) {
    const auto& m = square_model();
    const ecw::cplx u(0.31, 0.27);
    for (auto _ : state) {
        auto r = ecw::wp_eval(u, m, 1e-10);
        benchmark::DoNotOptimize(r);
    }
}
BENCHMARK(BM_wp_eval);

void BM_wp_invert(benchmark::State& state) {
    const auto& m = square_model();
    const auto xy = ecw::wp_eval(ecw::cplx(0.31, 0.27), m, 1e-10);
    for (auto _ : state) {
        auto u = ecw::wp_invert(xy.first, xy.second, m, 1e-9);
        benchmark::DoNotOptimize(u);
    }
}
BENCHMARK(BM_wp_invert);

void BM_dual_lattice(benchmark::State& state) {
    const auto lam = ecw::Lattice::power_of_tau(
        ecw::HPoint(0.0, 1.0), 2, ecw::ExactComplex(ecw::QuadScalar(0), ecw::QuadScalar(1)));
    for (auto _ : state) {
        auto dual = ecw::dual_lattice(lam);
        benchmark::DoNotOptimize(dual);
    }
}
BENCHMARK(BM_dual_lattice);

void BM_density_test(benchmark::State& state) {
    const auto lam = ecw::Lattice::power_of_tau(
        ecw::HPoint(0.0, 1.0), 2, ecw::ExactComplex(ecw::QuadScalar(0), ecw::QuadScalar(1)));
    const auto L = ecw::LinearSubspace::from_rows(
        {{ecw::cplx(1, 0), ecw::cplx(1.4142135623730951, 0)}}, 2);
    for (auto _ : state) {
        auto r = ecw::hyperplane_density_test(L, lam);
        benchmark::DoNotOptimize(r);
    }
}
BENCHMARK(BM_density_test);

}  // namespace

BENCHMARK_MAIN();
