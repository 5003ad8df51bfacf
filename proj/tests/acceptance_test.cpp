// Acceptance suite: ten timed criteria covering the evaluators, the exact
// predicates, the coset and witness searches, and the frozen verdict table.
// Prints one pass/fail line per criterion; the exit code is the number of
// failures.  Each criterion carries a wall-clock budget enforced here.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <optional>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include "ecw/exact.hpp"
#include "ecw/halfplane.hpp"
#include "ecw/modular.hpp"
#include "ecw/numeric.hpp"
#include "ecw/polynomial.hpp"
#include "ecw/problem.hpp"
#include "ecw/search.hpp"
#include "ecw/torus.hpp"
#include "ecw/varieties.hpp"
#include "support/mpfr_oracle.hpp"

namespace {

using ecw::cplx;
using ecw::HPoint;
using ecw::Rng;
using ecw::SL2Matrix;

std::string test_dir() { return ECW_TEST_DIR; }

double rel_dev(cplx got, cplx want) {
    return std::abs(got - want) / std::max(1.0, std::abs(want));
}

std::string fmt_sci(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.1e", x);
    return buf;
}

long rand_long(Rng& rng, long lo, long hi) {
    return std::uniform_int_distribution<long>(lo, hi)(rng);
}

// Extended gcd on nonnegative inputs: returns (g, u, v) with u*m + v*n = g.
std::tuple<long, long, long> egcd(long m, long n) {
    long r0 = m, r1 = n, u0 = 1, u1 = 0, v0 = 0, v1 = 1;
    while (r1 != 0) {
        const long q = r0 / r1;
        std::tie(r0, r1) = std::make_tuple(r1, r0 - q * r1);
        std::tie(u0, u1) = std::make_tuple(u1, u0 - q * u1);
        std::tie(v0, v1) = std::make_tuple(v1, v0 - q * v1);
    }
    return {r0, u0, v0};
}

// Uniform-ish integer matrix with determinant 1 and entries bounded by cap:
// random coprime bottom row, top row completed by the extended gcd and
// shifted to the smallest representative.
SL2Matrix random_sl2z(Rng& rng, long cap) {
    for (;;) {
        const long c = rand_long(rng, -cap, cap);
        const long d = rand_long(rng, -cap, cap);
        if (c == 0 && d == 0) continue;
        auto [g, u, v] = egcd(std::abs(c), std::abs(d));
        if (g != 1) continue;
        // u*|c| + v*|d| = 1; fix signs so that a*d - b*c = 1.
        long b = -u * (c < 0 ? -1 : 1);
        long a = v * (d < 0 ? -1 : 1);
        // a -> a + t c, b -> b + t d keeps the determinant; center the row.
        const double denom = double(c) * c + double(d) * d;
        const long t = std::lround(-(double(a) * c + double(b) * d) / denom);
        a += t * c;
        b += t * d;
        if (std::max(std::abs(a), std::abs(b)) > cap) continue;
        return SL2Matrix::integer(a, b, c, d);
    }
}

SL2Matrix sqrt2_shift() {
    return SL2Matrix::exact(ecw::QuadScalar(1), ecw::QuadScalar::sqrt_of(2), ecw::QuadScalar(0),
                            ecw::QuadScalar(1));
}

// ---------------------------------------------------------------------------
// Criterion 1: invariance and transformation laws of j, j', j'' under 1000
// seeded integer matrices with entries up to 50, Im z in [0.2, 5].

bool c01(std::string& detail) {
    Rng rng(101);
    double worst0 = 0, worst1 = 0, worst2 = 0;
    for (int t = 0; t < 1000; ++t) {
        const SL2Matrix g = random_sl2z(rng, 50);
        const HPoint z(ecw::uniform(rng, -2, 2), ecw::uniform(rng, 0.2, 5));
        const HPoint gz = moebius_apply(g, z);
        const auto [j0, j1, j2] = ecw::j_derivatives(z, 1e-11);
        const auto [h0, h1, h2] = ecw::j_derivatives(gz, 1e-11);
        const cplx w = g.c() * z.z() + g.d();
        const cplx w2 = w * w;
        worst0 = std::max(worst0, rel_dev(h0.value, j0.value));
        worst1 = std::max(worst1, rel_dev(h1.value, w2 * j1.value));
        const cplx law2 = w2 * w2 * j2.value + 2.0 * g.c() * w2 * w * j1.value;
        worst2 = std::max(worst2, rel_dev(h2.value, law2));
    }
    detail = "max residuals j " + fmt_sci(worst0) + ", j' " + fmt_sci(worst1) + ", j'' " +
             fmt_sci(worst2);
    return worst0 <= 1e-9 && worst1 <= 1e-8 && worst2 <= 1e-7;
}

// ---------------------------------------------------------------------------
// Criterion 2: singular values j(i) = 1728 and j(e^{i pi/3}) = 0 to 1e-8
// absolute, j(2i) = 287496 to 1e-10 relative against the independent
// 256-bit series oracle.

bool c02(std::string& detail) {
    const double di = std::abs(ecw::j_eval(HPoint(0, 1), 1e-12).value - 1728.0);
    const double dr =
        std::abs(ecw::j_eval(HPoint(0.5, std::sqrt(3.0) / 2), 1e-12).value);
    const double oracle = ecw_test::oracle_j_iy(2.0);
    const double d2 =
        std::abs(ecw::j_eval(HPoint(0, 2), 1e-12).value - oracle) / std::abs(oracle);
    const double oracle_dev = std::abs(oracle - 287496.0);
    detail = "dev j(i) " + fmt_sci(di) + ", j(rho) " + fmt_sci(dr) + ", j(2i) rel " +
             fmt_sci(d2) + ", oracle vs 287496 " + fmt_sci(oracle_dev);
    return di <= 1e-8 && dr <= 1e-8 && d2 <= 1e-10 && oracle_dev <= 1e-6;
}

// ---------------------------------------------------------------------------
// Criterion 3: second-order jet invariance J2j(g.(z, r, s)) = J2j(z, r, s)
// over 100 seeded draws.

bool c03(std::string& detail) {
    Rng rng(303);
    double worst = 0;
    for (int t = 0; t < 100; ++t) {
        const SL2Matrix g = random_sl2z(rng, 20);
        const cplx z(ecw::uniform(rng, -2, 2), ecw::uniform(rng, 0.3, 3));
        const cplx r = std::polar(ecw::uniform(rng, 0.3, 1.5), ecw::uniform(rng, 0, 6.283));
        const cplx s = std::polar(ecw::uniform(rng, 0.0, 1.0), ecw::uniform(rng, 0, 6.283));
        const ecw::Jet2Point p(z, r, s);
        const ecw::Jet2Point q = ecw::jet2_action(g, p);
        const auto [a0, a1, a2] = ecw::jet2_j(p, 1e-11);
        const auto [b0, b1, b2] = ecw::jet2_j(q, 1e-11);
        worst = std::max({worst, rel_dev(b0, a0), rel_dev(b1, a1), rel_dev(b2, a2)});
    }
    detail = "max jet residual " + fmt_sci(worst);
    return worst <= 1e-8;
}

// ---------------------------------------------------------------------------
// Criterion 4: dual-basis pairing <theta_i, lambda_j> = delta_ij to 1e-10 on
// 500 random lattices; for Z + tau Z the closed forms 1 + i a/b and -i/b
// (tau = a + i b) must be reproduced exactly.

double real_pairing(const std::vector<cplx>& theta, const std::vector<cplx>& lam) {
    cplx s = 0;
    for (size_t i = 0; i < theta.size(); ++i) s += theta[i] * lam[i];
    return s.real();
}

bool c04(std::string& detail) {
    Rng rng(404);
    double worst = 0;
    for (int t = 0; t < 500; ++t) {
        const int g = 1 + t % 3;
        ecw::Lattice lat;
        for (;;) {
            std::vector<std::vector<cplx>> gens(2 * g, std::vector<cplx>(g));
            for (auto& v : gens)
                for (auto& e : v) e = cplx(ecw::uniform(rng, -2, 2), ecw::uniform(rng, -2, 2));
            lat = ecw::Lattice::from_generators(std::move(gens));
            if (lat.condition_number <= 1e5) break;
        }
        const ecw::Lattice dual = ecw::dual_lattice(lat);
        for (int i = 0; i < 2 * g; ++i)
            for (int j = 0; j < 2 * g; ++j)
                worst = std::max(worst, std::abs(real_pairing(dual.gens[i], lat.gens[j]) -
                                                 (i == j ? 1.0 : 0.0)));
    }
    int exact_misses = 0;
    for (int t = 0; t < 50; ++t) {
        const double a = ecw::uniform(rng, -3, 3);
        const double b = ecw::uniform(rng, 0.1, 4);
        const ecw::Lattice dual = ecw::dual_lattice(ecw::Lattice::power_of_tau(HPoint(a, b), 1));
        if (dual.gens[0][0] != cplx(1.0, a / b)) ++exact_misses;
        if (dual.gens[1][0] != cplx(0.0, -(1.0 / b))) ++exact_misses;
    }
    detail = "max pairing deviation " + fmt_sci(worst) + ", closed-form mismatches " +
             std::to_string(exact_misses) + "/100";
    return worst <= 1e-10 && exact_misses == 0;
}

// ---------------------------------------------------------------------------
// Criterion 5: exact density dichotomy for lines z2 = alpha z1 on E^2 at
// tau = i: Gaussian-rational slopes are contained in a closed subtorus,
// real Q(sqrt 2)-irrational slopes are dense.  Zero misclassifications.

bool c05(std::string& detail) {
    Rng rng(505);
    const ecw::ExactComplex tau_i(ecw::QuadScalar(0), ecw::QuadScalar(1));
    const ecw::Lattice lam = ecw::Lattice::power_of_tau(HPoint(0, 1), 2, tau_i);
    int wrong_contained = 0, wrong_dense = 0;
    for (int t = 0; t < 100; ++t) {
        long p = rand_long(rng, -9, 9), r = rand_long(rng, -9, 9);
        const long q = rand_long(rng, 1, 9), s = rand_long(rng, 1, 9);
        if (p == 0 && r == 0) p = 1;
        const ecw::ExactComplex alpha(ecw::QuadScalar(mpq_class(p, q)),
                                      ecw::QuadScalar(mpq_class(r, s)));
        const cplx af(double(p) / double(q), double(r) / double(s));
        const auto L = ecw::LinearSubspace::from_rows(
            {{cplx(1, 0), af}}, 2,
            std::vector<std::vector<ecw::ExactComplex>>{
                {ecw::ExactComplex(ecw::QuadScalar(1)), alpha}});
        if (ecw::hyperplane_density_test(L, lam).kind !=
            ecw::DensityResult::Kind::Contained)
            ++wrong_contained;
    }
    for (int t = 0; t < 100; ++t) {
        const long p = rand_long(rng, -9, 9);
        const long q = rand_long(rng, 1, 9), s = rand_long(rng, 1, 9);
        long r = rand_long(rng, 1, 9);
        if (rand_long(rng, 0, 1)) r = -r;
        const ecw::QuadScalar re(mpq_class(p, q), mpq_class(r, s), 2);
        const ecw::ExactComplex alpha(re, ecw::QuadScalar(0));
        const cplx af(double(p) / double(q) + double(r) / double(s) * std::sqrt(2.0), 0.0);
        const auto L = ecw::LinearSubspace::from_rows(
            {{cplx(1, 0), af}}, 2,
            std::vector<std::vector<ecw::ExactComplex>>{
                {ecw::ExactComplex(ecw::QuadScalar(1)), alpha}});
        if (ecw::hyperplane_density_test(L, lam).kind != ecw::DensityResult::Kind::Dense)
            ++wrong_dense;
    }
    detail = "misclassified " + std::to_string(wrong_contained) + " rational, " +
             std::to_string(wrong_dense) + " irrational slopes";
    return wrong_contained == 0 && wrong_dense == 0;
}

// ---------------------------------------------------------------------------
// Criterion 6: coset approximation quality.  For the sqrt(2) shift the
// median distance at height 40 beats half the median at height 5; for the
// integer shift the distance to non-coset targets stays above a fixed floor.

// Frozen golden floor: minimum height-40 distance over the 50 seed-606
// targets measured once at 0.097097.
constexpr double kRationalCosetFloor = 0.09;

bool c06(std::string& detail) {
    Rng rng(601);
    const SL2Matrix gs = sqrt2_shift();
    std::vector<double> d5, d40;
    for (int t = 0; t < 50; ++t) {
        const HPoint z1(ecw::uniform(rng, -2, 2), ecw::uniform(rng, 0.3, 3));
        const HPoint z2(ecw::uniform(rng, -2, 2), ecw::uniform(rng, 0.3, 3));
        const SL2Matrix target = ecw::connecting_matrix(z1, z2, ecw::uniform(rng, 0, 6.28));
        d5.push_back(ecw::coset_approximate(gs, target, 5).distance);
        d40.push_back(ecw::coset_approximate(gs, target, 40).distance);
    }
    std::sort(d5.begin(), d5.end());
    std::sort(d40.begin(), d40.end());
    const double m5 = 0.5 * (d5[24] + d5[25]);
    const double m40 = 0.5 * (d40[24] + d40[25]);

    Rng rng2(606);
    const SL2Matrix gt = SL2Matrix::integer(1, 1, 0, 1);
    double floor_min = std::numeric_limits<double>::infinity();
    for (int t = 0; t < 50; ++t) {
        const HPoint z1(ecw::uniform(rng2, -2, 2), ecw::uniform(rng2, 0.3, 3));
        const HPoint z2(ecw::uniform(rng2, -2, 2), ecw::uniform(rng2, 0.3, 3));
        const SL2Matrix target = ecw::connecting_matrix(z1, z2, ecw::uniform(rng2, 0, 6.28));
        floor_min = std::min(floor_min, ecw::coset_approximate(gt, target, 40).distance);
    }
    std::ostringstream os;
    os << "irrational medians " << m5 << " -> " << m40 << " (ratio " << m40 / m5
       << "), rational min " << floor_min << " vs floor " << kRationalCosetFloor;
    detail = os.str();
    return m40 < 0.5 * m5 && floor_min > kRationalCosetFloor;
}

// ---------------------------------------------------------------------------
// Criterion 7: planted witness recovery.  25 j-mode problems on lines
// z2 = z1 + beta with beta in Q(sqrt 2), 10 torus problems on E^2 at tau = i,
// 10 first-jet problems; each planted hyperplane passes through a known
// image point and every search must succeed with residual <= 1e-8.

struct StoredRun {
    std::string mode;
    ecw::Witness w;
    ecw::PolySystem W;
    std::optional<ecw::EllipticModel> model;
};

std::vector<StoredRun> g_runs;  // filled by c07, re-verified by c09

ecw::QuadScalar random_beta(Rng& rng) {
    const long qn = rand_long(rng, -3, 3);
    long rn = rand_long(rng, 1, 3);
    if (rand_long(rng, 0, 1)) rn = -rn;
    return ecw::QuadScalar(mpq_class(qn, 2), mpq_class(rn, 2), 2);
}

ecw::MultiPoly planted_plane(int nvars, int v1, int v2, cplx c1, cplx c2, cplx value1,
                             cplx value2) {
    ecw::MultiPoly f(nvars);
    std::vector<int> e1(nvars, 0), e2(nvars, 0);
    e1[v1] = 1;
    e2[v2] = 1;
    f.add_term(e1, c1);
    f.add_term(e2, c2);
    f.add_term(std::vector<int>(nvars, 0), -(c1 * value1 + c2 * value2));
    return f;
}

bool c07(std::string& detail) {
    Rng rng(707);
    g_runs.clear();
    int failures = 0;
    double worst = 0;
    std::string first_error;
    const auto note = [&](const std::string& what) {
        ++failures;
        if (first_error.empty()) first_error = what;
    };

    for (int t = 0; t < 25; ++t) {
        const ecw::QuadScalar beta = random_beta(rng);
        const SL2Matrix link = SL2Matrix::exact(ecw::QuadScalar(1), beta, ecw::QuadScalar(0),
                                                ecw::QuadScalar(1));
        const auto L =
            ecw::MoebiusVariety::build(2, {ecw::MoebiusConstraint::link(1, 2, link)});
        const HPoint zstar(ecw::uniform(rng, -0.4, 0.4), ecw::uniform(rng, 0.95, 1.8));
        const cplx a1 = ecw::j_eval(zstar, 1e-12).value;
        const cplx a2 =
            ecw::j_eval(HPoint(zstar.z() + beta.to_double()), 1e-12).value;
        const cplx c1(double(rand_long(rng, 1, 3)), 0), c2(double(rand_long(rng, 1, 3)), 0);
        const ecw::PolySystem W(2, {planted_plane(2, 0, 1, c1, c2, a1, a2)});
        ecw::SearchConfig cfg;
        cfg.newton_tol = 1e-9;
        cfg.seed = 7000 + t;
        try {
            ecw::Witness w = ecw::j_witness(L, W, cfg);
            for (double r : w.residuals) worst = std::max(worst, r);
            g_runs.push_back({"j", std::move(w), W, std::nullopt});
        } catch (const std::exception& e) {
            note("j plant " + std::to_string(t) + ": " + e.what());
        }
    }

    const ecw::ExactComplex tau_i(ecw::QuadScalar(0), ecw::QuadScalar(1));
    const ecw::EllipticModel model = ecw::EllipticModel::from_tau(HPoint(0, 1), tau_i);
    for (int t = 0; t < 10; ++t) {
        const ecw::QuadScalar alpha = random_beta(rng);
        const cplx af(alpha.to_double(), 0);
        const auto L = ecw::LinearSubspace::from_rows(
            {{cplx(1, 0), af}}, 2,
            std::vector<std::vector<ecw::ExactComplex>>{
                {ecw::ExactComplex(ecw::QuadScalar(1)), ecw::ExactComplex(alpha)}});
        cplx x1, x2;
        for (;;) {
            const cplx t0(ecw::uniform(rng, 0.08, 0.42), ecw::uniform(rng, 0.08, 0.42));
            try {
                x1 = ecw::wp_eval(t0, model, 1e-12).first;
                x2 = ecw::wp_eval(af * t0, model, 1e-12).first;
                break;
            } catch (const ecw::DomainError&) {
            }
        }
        const cplx c1(double(rand_long(rng, 1, 3)), 0), c2(double(rand_long(rng, 1, 3)), 0);
        const ecw::PolySystem W(4, {planted_plane(4, 0, 2, c1, c2, x1, x2)});
        ecw::SearchConfig cfg;
        cfg.newton_tol = 1e-9;
        cfg.seed = 7100 + t;
        cfg.height_schedule = {4, 8, 12};
        try {
            ecw::Witness w = ecw::torus_witness_search(L, W, model, cfg);
            for (double r : w.residuals) worst = std::max(worst, r);
            g_runs.push_back({"torus", std::move(w), W, model});
        } catch (const std::exception& e) {
            note("torus plant " + std::to_string(t) + ": " + e.what());
        }
    }

    for (int t = 0; t < 10; ++t) {
        const ecw::QuadScalar beta = random_beta(rng);
        const SL2Matrix link = SL2Matrix::exact(ecw::QuadScalar(1), beta, ecw::QuadScalar(0),
                                                ecw::QuadScalar(1));
        const auto L =
            ecw::MoebiusVariety::build(2, {ecw::MoebiusConstraint::link(1, 2, link)});
        const HPoint zstar(ecw::uniform(rng, -0.4, 0.4), ecw::uniform(rng, 0.95, 1.8));
        const cplx b1 = std::get<1>(ecw::j_derivatives(zstar, 1e-12)).value;
        const cplx b2 =
            std::get<1>(ecw::j_derivatives(HPoint(zstar.z() + beta.to_double()), 1e-12))
                .value;
        const cplx c1(double(rand_long(rng, 1, 3)), 0), c2(double(rand_long(rng, 1, 3)), 0);
        const ecw::PolySystem W(2, {planted_plane(2, 0, 1, c1, c2, b1, b2)});
        ecw::SearchConfig cfg;
        cfg.newton_tol = 1e-9;
        cfg.seed = 7200 + t;
        try {
            ecw::Witness w = ecw::blur_t1j_witness(L, W, cfg);
            for (double r : w.residuals) worst = std::max(worst, r);
            g_runs.push_back({"jprime", std::move(w), W, std::nullopt});
        } catch (const std::exception& e) {
            note("jprime plant " + std::to_string(t) + ": " + e.what());
        }
    }

    detail = std::to_string(g_runs.size()) + "/45 recovered, max residual " + fmt_sci(worst);
    if (failures) detail += "; first failure: " + first_error;
    return failures == 0 && worst <= 1e-8;
}

// ---------------------------------------------------------------------------
// Criterion 8: the sqrt(2) shift against w1 + w2 = 0.  A coarse grid scan
// over F(z) = j(z) + j(z + sqrt 2) runs before the search; afterwards the
// reported root must sit within 1e-7 of a true zero, next to a grid
// candidate (mod the period), and a winding-number count around it must
// certify an enclosed zero on an independent path.

cplx shift_f(cplx z, double prec) {
    return ecw::j_eval(HPoint(z), prec).value +
           ecw::j_eval(HPoint(z + std::sqrt(2.0)), prec).value;
}

double wrap_half(double x) { return x - std::round(x); }

bool c08(std::string& detail) {
    // Pre-search oracle: |F| on a 0.01 grid; x covers one full period.
    const double x0 = -0.8, x1 = 0.8, y0 = 0.5, y1 = 3.0, step = 0.01;
    const int nx = int(std::lround((x1 - x0) / step)) + 1;
    const int ny = int(std::lround((y1 - y0) / step)) + 1;
    std::vector<double> grid(size_t(nx) * ny);
    for (int iy = 0; iy < ny; ++iy)
        for (int ix = 0; ix < nx; ++ix)
            grid[size_t(iy) * nx + ix] =
                std::abs(shift_f(cplx(x0 + ix * step, y0 + iy * step), 1e-8));
    std::vector<cplx> candidates;
    for (int iy = 1; iy + 1 < ny; ++iy) {
        for (int ix = 1; ix + 1 < nx; ++ix) {
            const double v = grid[size_t(iy) * nx + ix];
            if (v >= 500.0) continue;
            bool is_min = true;
            for (int dy = -1; dy <= 1 && is_min; ++dy)
                for (int dx = -1; dx <= 1; ++dx) {
                    if (dx == 0 && dy == 0) continue;
                    if (grid[size_t(iy + dy) * nx + (ix + dx)] < v) {
                        is_min = false;
                        break;
                    }
                }
            if (is_min) candidates.emplace_back(x0 + ix * step, y0 + iy * step);
        }
    }

    const auto L =
        ecw::MoebiusVariety::build(2, {ecw::MoebiusConstraint::link(1, 2, sqrt2_shift())});
    const ecw::PolySystem W(2, {ecw::MultiPoly::parse("w1 + w2", 2)});
    ecw::SearchConfig cfg;  // default budget
    const ecw::Witness w = ecw::j_witness(L, W, cfg);

    // Root in the original coordinates: the shared right factor carries the
    // base parameter to coordinate 1 (the left factor only blurs j-values).
    const auto& ga = w.factors[0].gamma;
    const SL2Matrix gamma = SL2Matrix::integer(ga[0], ga[1], ga[2], ga[3]);
    const HPoint xw = moebius_apply(gamma, HPoint(w.bases[0]));
    const double direct = std::abs(shift_f(xw.z(), 1e-12));

    double near_candidate = std::numeric_limits<double>::infinity();
    for (const cplx& c : candidates)
        near_candidate = std::min(near_candidate,
                                  std::hypot(wrap_half(xw.re - c.real()), xw.im - c.imag()));

    // Argument principle on a small circle: F is holomorphic, so a winding
    // count >= 1 certifies an enclosed zero.
    const double radius = 0.04;
    const int nsamp = 512;
    double phase = 0, contour_min = std::numeric_limits<double>::infinity();
    cplx prev = shift_f(xw.z() + radius, 1e-10);
    contour_min = std::abs(prev);
    for (int k = 1; k <= nsamp; ++k) {
        const double th = 2 * M_PI * k / nsamp;
        const cplx fv = shift_f(xw.z() + std::polar(radius, th), 1e-10);
        contour_min = std::min(contour_min, std::abs(fv));
        phase += std::arg(fv / prev);
        prev = fv;
    }
    const long winding = std::lround(phase / (2 * M_PI));

    std::ostringstream os;
    os << candidates.size() << " grid candidates, |F(root)| " << fmt_sci(direct)
       << ", nearest candidate " << fmt_sci(near_candidate) << ", winding " << winding
       << ", contour min " << fmt_sci(contour_min);
    detail = os.str();
    return direct <= 1e-7 && near_candidate <= 0.05 && winding >= 1 && contour_min > 1e-4;
}

// ---------------------------------------------------------------------------
// Criterion 9: every stored success from the planted corpus carries a
// Kantorovich certificate whose inequality holds, and every reported root
// re-verifies on an independent evaluation path to twice the tolerance.

bool c09(std::string& detail) {
    if (g_runs.empty()) {
        detail = "no stored runs (criterion 7 must run first)";
        return false;
    }
    int bad_cert = 0, bad_reverify = 0;
    double worst = 0;
    for (const StoredRun& run : g_runs) {
        if (run.w.certificates.empty()) ++bad_cert;
        for (const auto& cert : run.w.certificates)
            if (!cert.holds()) ++bad_cert;

        std::vector<cplx> vals;
        if (run.mode == "torus") {
            for (const cplx& u : run.w.torus_point_u) {
                const auto [x, y] = ecw::wp_eval(u, *run.model, 1e-12);
                vals.push_back(x);
                vals.push_back(y);
            }
        } else if (run.mode == "jprime") {
            const cplx z = run.w.z->z();
            const SL2Matrix& gstar = run.w.matrices[1];
            const cplx A = ecw::automorphy_factor(gstar, z);
            vals.push_back(std::get<1>(ecw::j_derivatives(HPoint(z), 1e-12)).value);
            vals.push_back(
                std::get<1>(ecw::j_derivatives(moebius_apply(gstar, HPoint(z)), 1e-12)).value /
                (A * A));
        } else {
            for (size_t c = 0; c < run.w.matrices.size(); ++c)
                vals.push_back(
                    ecw::j_eval(moebius_apply(run.w.matrices[c], HPoint(run.w.bases[c])), 1e-12)
                        .value);
        }
        for (const auto& f : run.W.polys) {
            const double r = std::abs(f.eval(vals));
            worst = std::max(worst, r);
            if (r > 2e-9) ++bad_reverify;
        }
    }
    detail = std::to_string(g_runs.size()) + " runs, max re-verified residual " +
             fmt_sci(worst) + ", certificate failures " + std::to_string(bad_cert);
    return bad_cert == 0 && bad_reverify == 0;
}

// ---------------------------------------------------------------------------
// Criterion 10: the verdict table over the 20-problem corpus matches the
// frozen golden byte-for-byte under the seeds fixed in the files.

std::string verdict_str(const ecw::Verdict& v) {
    switch (v.kind) {
        case ecw::Verdict::Kind::Pass:
            return "pass";
        case ecw::Verdict::Kind::Probable:
            return "probable";
        case ecw::Verdict::Kind::Fail:
            return "fail[" + v.reason + "]";
    }
    return "?";
}

// Same pipeline as the check command: density and rotundity in torus mode,
// the three freeness/broadness predicates otherwise.
ecw::PairVerdict corpus_checks(const ecw::ProblemFile& p) {
    ecw::PairVerdict v;
    const ecw::PolySystem W = p.system();
    if (p.mode == "torus") {
        const ecw::LinearSubspace L = p.subspace();
        const ecw::EllipticModel model = p.model();
        const ecw::Lattice lam = ecw::Lattice::power_of_tau(model.tau, p.g, model.tau_exact);
        const ecw::DensityResult dens = ecw::hyperplane_density_test(L, lam);
        if (dens.kind == ecw::DensityResult::Kind::Contained) {
            std::ostringstream os;
            os << "exp(L) lies in a proper closed subtorus; dual coefficients [";
            for (size_t i = 0; i < dens.coeffs.size(); ++i)
                os << (i ? "," : "") << dens.coeffs[i];
            os << "]";
            v.density = ecw::Verdict::fail(os.str());
        } else if (dens.kind == ecw::DensityResult::Kind::Dense) {
            v.density = ecw::Verdict::pass();
        } else {
            v.density =
                ecw::Verdict::probable("no dual hyperplane found by enumeration", dens.bound);
        }
        Rng rng(p.config.seed);
        const ecw::RotundityResult rot = ecw::rotundity_check(L, W, model, 8, rng);
        v.rotund = rot.rotund
                       ? ecw::Verdict::pass()
                       : ecw::Verdict::fail("rotundity fails at quotient dimension k=" +
                                            std::to_string(rot.k));
    } else {
        const ecw::MoebiusVariety L = p.moebius();
        Rng rng(p.config.seed);
        v.free_domain = ecw::domain_freeness(L);
        if (p.mode == "j")
            v.free_codomain = ecw::codomain_freeness(W, 5, 20, rng);
        else
            v.free_codomain = ecw::Verdict::probable("not checked in first-jet mode", 0);
        v.broad = ecw::broadness(L, W, rng);
    }
    return v;
}

bool c10(std::string& detail) {
    std::ostringstream table;
    for (int k = 1; k <= 20; ++k) {
        char name[16];
        std::snprintf(name, sizeof name, "prob%02d", k);
        const ecw::ProblemFile p =
            ecw::ProblemFile::load(test_dir() + "/data/accept/" + name + ".json");
        const ecw::PairVerdict v = corpus_checks(p);
        table << name << " mode=" << p.mode;
        if (p.mode == "torus") {
            table << " density=" << verdict_str(*v.density)
                  << " rotund=" << verdict_str(*v.rotund) << "\n";
        } else {
            table << " free_domain=" << verdict_str(v.free_domain)
                  << " free_codomain=" << verdict_str(v.free_codomain)
                  << " broad=" << verdict_str(v.broad) << "\n";
        }
    }
    std::ifstream in(test_dir() + "/golden/verdicts.golden", std::ios::binary);
    if (!in) {
        detail = "golden table missing";
        return false;
    }
    std::ostringstream want;
    want << in.rdbuf();
    if (table.str() == want.str()) {
        detail = "20 verdict lines match golden";
        return true;
    }
    // Point at the first differing line to make failures diagnosable.
    std::istringstream got_s(table.str()), want_s(want.str());
    std::string got_line, want_line;
    int line_no = 0;
    while (std::getline(got_s, got_line) && std::getline(want_s, want_line)) {
        ++line_no;
        if (got_line != want_line) {
            detail = "line " + std::to_string(line_no) + " differs: got '" + got_line +
                     "', want '" + want_line + "'";
            return false;
        }
    }
    detail = "table length differs from golden";
    return false;
}

// ---------------------------------------------------------------------------

void run_criterion(int idx, const char* label, double budget_s, bool (*fn)(std::string&),
                   int& failures) {
    std::string detail;
    const auto t0 = std::chrono::steady_clock::now();
    bool ok = false;
    try {
        ok = fn(detail);
    } catch (const std::exception& e) {
        detail = std::string("exception: ") + e.what();
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (secs > budget_s) {
        ok = false;
        detail += (detail.empty() ? "" : "; ");
        detail += "over " + fmt_sci(budget_s) + "s budget";
    }
    std::printf("criterion %2d %s %7.2fs  %s%s%s\n", idx, ok ? "PASS" : "FAIL", secs, label,
                detail.empty() ? "" : ": ", detail.c_str());
    std::fflush(stdout);
    if (!ok) ++failures;
}

}  // namespace

int main() {
    int failures = 0;
    run_criterion(1, "invariance and transformation laws of j, j', j''", 10, c01, failures);
    run_criterion(2, "singular values against the independent series oracle", 1, c02, failures);
    run_criterion(3, "second-order jet invariance", 5, c03, failures);
    run_criterion(4, "dual lattice pairing and closed-form dual generators", 2, c04, failures);
    run_criterion(5, "exact density dichotomy on E^2 at tau = i", 5, c05, failures);
    run_criterion(6, "coset approximation: irrational gains, rational floor", 60, c06, failures);
    run_criterion(7, "planted witness recovery in j, torus, jprime modes", 300, c07, failures);
    run_criterion(8, "sqrt(2) shift witness with grid-scan and winding check", 120, c08,
                  failures);
    run_criterion(9, "certificates hold; roots re-verify independently", 30, c09, failures);
    run_criterion(10, "verdict table matches frozen golden", 30, c10, failures);
    std::printf("acceptance: %d/10 criteria pass\n", 10 - failures);
    return failures;
}
