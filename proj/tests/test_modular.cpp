#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <complex>

#include "ecw/halfplane.hpp"
#include "ecw/modular.hpp"
#include "ecw/numeric.hpp"
#include "mpfr_oracle.hpp"

using namespace ecw;

namespace {
const SL2Matrix& rand_gamma(Rng& rng) {
    static const auto mats = enumerate_sl2z(6);
    return mats[rng() % mats.size()];
}
}  // namespace

TEST_CASE("special values: j(i) = 1728, j(rho) = 0, j(2i) = 287496") {
    const EvalResult ji = j_eval(HPoint(0, 1), 1e-12);
    CHECK(std::abs(ji.value - cplx(1728, 0)) < 1e-8);
    CHECK(std::abs(ji.value - cplx(1728, 0)) <= ji.error_bound + 1e-30);

    const EvalResult jr = j_eval(HPoint(0.5, std::sqrt(3.0) / 2.0), 1e-12);
    CHECK(std::abs(jr.value) < 1e-8);

    const EvalResult j2 = j_eval(HPoint(0, 2), 1e-12);
    CHECK(std::abs(j2.value - cplx(287496, 0)) < 1e-10 * 287496);
}

TEST_CASE("j matches the independent Eisenstein-series oracle on the axis") {
    for (double y : {1.0, 1.5, 2.0, 3.0}) {
        const double truth = ecw_test::oracle_j_iy(y);
        const EvalResult r = j_eval(HPoint(0, y), 1e-12);
        CHECK(std::abs(r.value.imag()) < 1e-9 * std::max(1.0, std::abs(truth)));
        CHECK(std::abs(r.value.real() - truth) <= r.error_bound + 1e-30);
    }
    const double corner = ecw_test::oracle_j_corner();
    CHECK(std::abs(corner) < 1e-40);  // oracle itself resolves the zero
}

TEST_CASE("j is Gamma-invariant") {
    Rng rng(42);
    for (int k = 0; k < 60; ++k) {
        const HPoint z(uniform(rng, -1.5, 1.5), uniform(rng, 0.4, 2.5));
        const auto& g = rand_gamma(rng);
        const cplx zi = moebius_apply(g, z.z());
        const cplx a = j_eval(z, 1e-10).value;
        const cplx b = j_eval(HPoint(zi), 1e-10).value;
        CHECK(std::abs(a - b) < 1e-9 * std::max(1.0, std::abs(a)));
    }
}

TEST_CASE("derivative transformation laws hold") {
    Rng rng(43);
    for (int k = 0; k < 40; ++k) {
        const HPoint z(uniform(rng, -1.0, 1.0), uniform(rng, 0.5, 2.0));
        const auto& g = rand_gamma(rng);
        const cplx w = moebius_apply(g, z.z());
        const cplx A = automorphy_factor(g, z.z());
        const auto [j0z, j1z, j2z] = j_derivatives(z, 1e-11);
        const auto [j0w, j1w, j2w] = j_derivatives(HPoint(w), 1e-11);
        const long c = g.integer_entries()[2];

        // j'(z) = j'(gz) / A^2
        const cplx law1 = j1w.value / (A * A);
        CHECK(std::abs(j1z.value - law1) < 1e-8 * std::max(1.0, std::abs(j1z.value)));

        // j''(z) = j''(gz)/A^4 - 2c j'(gz)/A^3
        const cplx law2 = j2w.value / (A * A * A * A) -
                          2.0 * static_cast<double>(c) * j1w.value / (A * A * A);
        CHECK(std::abs(j2z.value - law2) < 1e-7 * std::max(1.0, std::abs(j2z.value)));
    }
}

TEST_CASE("j'(i) = 0 and j' is imaginary on the imaginary axis") {
    const auto [j0, j1, j2] = j_derivatives(HPoint(0, 1), 1e-12);
    CHECK(std::abs(j1.value) < 1e-8);
    for (double y : {1.1, 1.5, 2.3}) {
        const auto d = std::get<1>(j_derivatives(HPoint(0, y), 1e-12));
        CHECK(std::abs(d.value.real()) < 1e-8 * std::max(1.0, std::abs(d.value)));
    }
}

TEST_CASE("j_invert hits the critical values exactly and round-trips") {
    const HPoint zi = j_invert(cplx(1728, 0), 1e-9);
    CHECK(zi.re == 0.0);
    CHECK(zi.im == 1.0);
    const HPoint zr = j_invert(cplx(0, 0), 1e-9);
    CHECK(zr.re == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(zr.im == doctest::Approx(std::sqrt(3.0) / 2.0).epsilon(1e-15));

    Rng rng(44);
    for (int k = 0; k < 20; ++k) {
        const cplx w(uniform(rng, -5e4, 5e4), uniform(rng, -5e4, 5e4));
        const HPoint z = j_invert(w, 1e-9);
        CHECK(std::abs(j_eval(z, 1e-10).value - w) <= 1e-9 * std::max(1.0, std::abs(w)) * 1.01);
        // inversion lands in the standard fundamental domain
        CHECK(std::abs(z.re) <= 0.5 + 1e-9);
        CHECK(std::abs(z.z()) >= 1.0 - 1e-9);
    }
}

TEST_CASE("jet2_action composes and jet2_j is invariant") {
    Rng rng(45);
    for (int k = 0; k < 25; ++k) {
        const Jet2Point p{cplx(uniform(rng, -1.0, 1.0), uniform(rng, 0.5, 2.0)),
                          cplx(uniform(rng, -1.0, 1.0), uniform(rng, -1.0, 1.0)),
                          cplx(uniform(rng, -1.0, 1.0), uniform(rng, -1.0, 1.0))};
        const auto& g = rand_gamma(rng);
        const auto& h = rand_gamma(rng);
        const Jet2Point a = jet2_action(g * h, p);
        const Jet2Point b = jet2_action(g, jet2_action(h, p));
        CHECK(std::abs(a.z - b.z) < 1e-10);
        CHECK(std::abs(a.r - b.r) < 1e-9 * std::max(1.0, std::abs(a.r)));
        CHECK(std::abs(a.s - b.s) < 1e-8 * std::max(1.0, std::abs(a.s)));

        const auto [f0, f1, f2] = jet2_j(p, 1e-11);
        const auto [g0, g1, g2] = jet2_j(jet2_action(g, p), 1e-11);
        CHECK(std::abs(f0 - g0) < 1e-8 * std::max(1.0, std::abs(f0)));
        CHECK(std::abs(f1 - g1) < 1e-8 * std::max(1.0, std::abs(f1)));
        CHECK(std::abs(f2 - g2) < 1e-7 * std::max(1.0, std::abs(f2)));
    }
}

TEST_CASE("modular polynomial tables match classical coefficients") {
    const ModularPolynomial& p1 = modular_poly(1);
    // Phi_1 = X - Y
    CHECK(p1.eval(cplx(5, 1), cplx(2, 0)) == cplx(3, 1));

    const ModularPolynomial& p2 = modular_poly(2);
    bool found_xy2 = false, found_const = false, found_x2y2 = false;
    for (const auto& t : p2.terms()) {
        if (t.xpow == 2 && t.ypow == 1) {
            CHECK(t.exact == 1488);
            found_xy2 = true;
        }
        if (t.xpow == 0 && t.ypow == 0) {
            CHECK(t.exact == mpz_class("-157464000000000"));
            found_const = true;
        }
        if (t.xpow == 2 && t.ypow == 2) {
            CHECK(t.exact == -1);
            found_x2y2 = true;
        }
    }
    CHECK(found_xy2);
    CHECK(found_const);
    CHECK(found_x2y2);
    CHECK_THROWS_AS(modular_poly(6), LevelUnsupported);
}

TEST_CASE("modular relations are detected along isogenies and absent generically") {
    Rng rng(46);
    for (int N = 1; N <= 5; ++N) {
        const HPoint z(0.137, 1.29);
        const cplx w1 = j_eval(z, 1e-10).value;
        // z -> N z realizes a cyclic N-isogeny
        const cplx w2 = j_eval(HPoint(z.re * N, z.im * N), 1e-10).value;
        const auto rel = modular_relation_test(w1, w2, 5);
        REQUIRE(rel.has_value());
        CHECK(*rel == N);
    }
    const cplx a = j_eval(HPoint(0.1, 1.1), 1e-10).value;
    const cplx b = j_eval(HPoint(-0.23, 1.42), 1e-10).value;
    CHECK_FALSE(modular_relation_test(a, b, 5).has_value());
}
