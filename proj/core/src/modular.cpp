#include "ecw/modular.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "ecw/qseries.hpp"
#include "../src/modular_poly_tables.hpp"

namespace ecw {
namespace {

constexpr double kUlp = 2.3e-16;
// Covers the <= ~450 rounding operations of a 64-term Horner evaluation.
constexpr double kFloatSlack = 1e-13;

struct FundamentalEval {
    cplx j, d1, d2;        // j, j', j'' at the reduced point
    double e0, e1, e2;     // error bounds at the reduced point
    HPoint zs;             // reduced point
    SL2Matrix gamma;       // zs = gamma z
};

// Series evaluation at the reduced point, with tails sized so each returned
// component's truncation error is <= prec/2 and float slack is accounted via
// absolute-value sums.  delta_z is the rounding uncertainty of the reduced
// point itself; it propagates through the next-higher derivative sum.
FundamentalEval eval_in_domain(HPoint z, double prec, int max_dorder) {
    auto [zs0, gamma] = reduce_to_fundamental_domain(z);
    // Recompute the reduced point in one shot from the exact integer gamma;
    // a single Moebius application has a tight rounding bound.
    HPoint zs = moebius_apply(gamma, z);

    if (2.0 * kPi * zs.im > 700.0)
        throw PrecisionUnreachable("j_eval: value exceeds double range");

    const cplx q = std::exp(kTwoPiI * zs.z());
    const double aq = std::abs(q);

    const QSeries& tab = QSeries::instance();
    int trunc = QSeries::order_for(aq, 0.5 * prec);
    double twopi = 2.0 * kPi;
    if (max_dorder >= 1)
        trunc = std::max(trunc, QSeries::order_for(aq, 0.5 * prec / twopi, 1));
    if (max_dorder >= 2)
        trunc = std::max(trunc, QSeries::order_for(aq, 0.5 * prec / (twopi * twopi), 2));

    // Horner sums over n = trunc .. 0 (value) resp. 1 (derivatives).
    cplx s0 = 0, s1 = 0, s2 = 0;
    double a0 = 0, a1 = 0, a2 = 0, a3 = 0;
    for (int n = trunc; n >= 1; --n) {
        const double c = tab.coeff_d(n);
        const double dn = static_cast<double>(n);
        s0 = s0 * q + c;
        s1 = s1 * q + dn * c;
        s2 = s2 * q + dn * dn * c;
        a0 = a0 * aq + c;
        a1 = a1 * aq + dn * c;
        a2 = a2 * aq + dn * dn * c;
        a3 = a3 * aq + dn * dn * dn * c;
    }
    s0 = s0 * q + tab.coeff_d(0);
    a0 = a0 * aq + tab.coeff_d(0);
    s1 *= q;
    s2 *= q;
    a1 *= aq;
    a2 *= aq;
    a3 *= aq;

    const cplx qinv = 1.0 / q;
    const double aqinv = 1.0 / aq;
    FundamentalEval out{/*j=*/qinv + s0,
                        /*d1=*/kTwoPiI * (-qinv + s1),
                        /*d2=*/kTwoPiI * kTwoPiI * (qinv + s2),
                        0, 0, 0, zs, gamma};

    const double S0 = aqinv + a0;
    const double S1 = twopi * (aqinv + a1);
    const double S2 = twopi * twopi * (aqinv + a2);
    const double S3 = twopi * twopi * twopi * (aqinv + a3);

    const double t0 = QSeries::tail_bound(aq, trunc, 0);
    const double t1 = twopi * QSeries::tail_bound(aq, trunc, 1);
    const double t2 = twopi * twopi * QSeries::tail_bound(aq, trunc, 2);

    // Rounding uncertainty of zs = (az + b)/(cz + d) in doubles.
    const auto& e = gamma.entries();
    const double az = std::abs(z.z());
    const double denom = std::abs(automorphy_factor(gamma, z.z()));
    const double delta_z =
        16.0 * kUlp * ((std::abs(e[0]) * az + std::abs(e[1])) +
                       std::abs(zs.z()) * (std::abs(e[2]) * az + std::abs(e[3]))) /
        denom;

    out.e0 = t0 + kFloatSlack * S0 + S1 * delta_z;
    out.e1 = t1 + kFloatSlack * S1 + S2 * delta_z;
    out.e2 = t2 + kFloatSlack * S2 + S3 * delta_z;
    return out;
}

void check_prec(double prec) {
    if (!(prec > 0.0) || prec > 1e-2) throw DomainError("prec must lie in (0, 1e-2]");
}

}  // namespace

EvalResult j_eval(HPoint z, double prec) {
    check_prec(prec);
    FundamentalEval f = eval_in_domain(z, prec, 0);
    return {f.j, f.e0};
}

std::tuple<EvalResult, EvalResult, EvalResult> j_derivatives(HPoint z, double prec) {
    check_prec(prec);
    FundamentalEval f = eval_in_domain(z, prec, 2);

    // zs = gamma z, so j'(z) = j'(zs)/(cz+d)^2 and
    // j''(z) = j''(zs)/(cz+d)^4 - 2c j'(zs)/(cz+d)^3.
    const cplx A = automorphy_factor(f.gamma, z.z());
    const double aA = std::abs(A);
    const cplx A2 = A * A, A3 = A2 * A, A4 = A2 * A2;
    const double c = f.gamma.c();

    const cplx d1 = f.d1 / A2;
    const cplx term_a = f.d2 / A4;
    const cplx term_b = 2.0 * c * f.d1 / A3;
    const cplx d2 = term_a - term_b;

    const double e1 = f.e1 / (aA * aA) + 8.0 * kUlp * std::abs(d1);
    const double e2 = f.e2 / (aA * aA * aA * aA) + 2.0 * std::abs(c) * f.e1 / (aA * aA * aA) +
                      8.0 * kUlp * (std::abs(term_a) + std::abs(term_b));

    return {EvalResult{f.j, f.e0}, EvalResult{d1, e1}, EvalResult{d2, e2}};
}

HPoint j_invert(cplx w, double prec) {
    check_prec(prec);
    if (w == cplx(0.0, 0.0)) return HPoint(0.5, std::sqrt(3.0) / 2.0);
    if (w == cplx(1728.0, 0.0)) return HPoint(0.0, 1.0);

    const double target = prec * std::max(1.0, std::abs(w));
    const double eval_prec = 1e-8;

    // Seed candidates ranked by |j(seed) - w|.
    std::vector<std::pair<double, cplx>> seeds;
    seeds.reserve(40 * 40 + 1);
    for (int ix = 0; ix < 40; ++ix) {
        for (int iy = 0; iy < 40; ++iy) {
            const double x = -0.5 + (ix + 0.5) / 40.0;
            const double y = 0.85 + (3.5 - 0.85) * (iy + 0.5) / 40.0;
            const cplx jv = j_eval(HPoint(x, y), eval_prec).value;
            seeds.emplace_back(std::abs(jv - w), cplx(x, y));
        }
    }
    if (std::abs(w) > 1e5) {
        // Cusp asymptote: j ~ 1/q = e^{-2 pi i z}, so z ~ log(w)/(-2 pi i).
        const cplx zc = cplx(0.0, 1.0) * std::log(w) / (2.0 * kPi);
        if (zc.imag() > 0.0) {
            const cplx jv = j_eval(HPoint(zc), eval_prec).value;
            // Rank the cusp seed first; the grid cannot reach large |j|.
            seeds.emplace_back(0.5 * std::abs(jv - w), zc);
        }
    }
    std::sort(seeds.begin(), seeds.end(),
              [](const auto& p, const auto& q) { return p.first < q.first; });

    const std::size_t tries = std::min<std::size_t>(seeds.size(), 8);
    for (std::size_t s = 0; s < tries; ++s) {
        cplx zc = seeds[s].second;
        bool ok = false;
        for (int it = 0; it < 150; ++it) {
            auto [jr, d1r, d2r] = j_derivatives(HPoint(zc), eval_prec);
            const cplx F = jr.value - w;
            if (std::abs(F) <= target) {
                ok = true;
                break;
            }
            cplx dF = d1r.value;
            if (std::abs(dF) < 1e-10 * std::max(1.0, std::abs(d2r.value))) {
                // Stationary point of j (order-2/3 zeros at i, rho): nudge off.
                zc += cplx(3e-4, 2e-4);
                continue;
            }
            cplx step = -F / dF;
            // Keep the iterate safely inside the half plane.
            double damp = 1.0;
            while (damp > 1e-6 && zc.imag() + damp * step.imag() < 0.05) damp *= 0.5;
            if (damp <= 1e-6) break;
            zc += damp * step;
            if (std::abs(zc.real()) > 3.0 || zc.imag() > 200.0) break;
        }
        if (!ok) continue;
        auto [zred, gamma] = reduce_to_fundamental_domain(HPoint(zc));
        (void)gamma;
        if (std::abs(j_eval(zred, eval_prec).value - w) <= target) return zred;
    }
    throw NoConvergence("j_invert: no Newton seed reached the target residual");
}

Jet2Point jet2_action(const SL2Matrix& g, const Jet2Point& p) {
    const cplx A = automorphy_factor(g, p.z);
    const cplx A2 = A * A;
    const cplx z2 = moebius_apply(g, p.z);
    const cplx r2 = p.r / A2;
    const cplx s2 = p.s / A2 - 2.0 * g.c() * p.r * p.r / (A2 * A);
    return Jet2Point(z2, r2, s2);
}

std::tuple<cplx, cplx, cplx> jet2_j(const Jet2Point& p, double prec) {
    auto [j0, j1, j2] = j_derivatives(HPoint(p.z), prec);
    return {j0.value, j1.value * p.r, j2.value * p.r * p.r + j1.value * p.s};
}

ModularPolynomial::ModularPolynomial(int level, std::vector<Term> terms, int degree)
    : level_(level), degree_(degree), terms_(std::move(terms)) {}

namespace {

void powers(cplx x, int dmax, std::vector<cplx>& out) {
    out.assign(static_cast<std::size_t>(dmax) + 1, cplx(1.0, 0.0));
    for (int k = 1; k <= dmax; ++k) out[static_cast<std::size_t>(k)] = out[static_cast<std::size_t>(k - 1)] * x;
}

}  // namespace

cplx ModularPolynomial::eval(cplx x, cplx y) const {
    std::vector<cplx> xp, yp;
    powers(x, degree_, xp);
    powers(y, degree_, yp);
    cplx acc = 0;
    for (const Term& t : terms_)
        acc += t.coeff * xp[static_cast<std::size_t>(t.xpow)] * yp[static_cast<std::size_t>(t.ypow)];
    return acc;
}

double ModularPolynomial::scale(cplx x, cplx y) const {
    const double ax = std::abs(x), ay = std::abs(y);
    std::vector<double> xp(static_cast<std::size_t>(degree_) + 1, 1.0),
        yp(static_cast<std::size_t>(degree_) + 1, 1.0);
    for (int k = 1; k <= degree_; ++k) {
        xp[static_cast<std::size_t>(k)] = xp[static_cast<std::size_t>(k - 1)] * ax;
        yp[static_cast<std::size_t>(k)] = yp[static_cast<std::size_t>(k - 1)] * ay;
    }
    double m = 0;
    for (const Term& t : terms_)
        m = std::max(m, std::abs(t.coeff) * xp[static_cast<std::size_t>(t.xpow)] *
                            yp[static_cast<std::size_t>(t.ypow)]);
    return m;
}

std::pair<cplx, cplx> ModularPolynomial::gradient(cplx x, cplx y) const {
    std::vector<cplx> xp, yp;
    powers(x, degree_, xp);
    powers(y, degree_, yp);
    cplx gx = 0, gy = 0;
    for (const Term& t : terms_) {
        if (t.xpow > 0)
            gx += t.coeff * static_cast<double>(t.xpow) * xp[static_cast<std::size_t>(t.xpow - 1)] *
                  yp[static_cast<std::size_t>(t.ypow)];
        if (t.ypow > 0)
            gy += t.coeff * static_cast<double>(t.ypow) * xp[static_cast<std::size_t>(t.xpow)] *
                  yp[static_cast<std::size_t>(t.ypow - 1)];
    }
    return {gx, gy};
}

namespace {

ModularPolynomial load_table(int level, const detail::ModularPolyEntry* entries,
                             std::size_t count, int degree) {
    std::vector<ModularPolynomial::Term> terms;
    terms.reserve(count);
    for (std::size_t k = 0; k < count; ++k)
        terms.push_back({entries[k].xpow, entries[k].ypow, entries[k].value,
                         mpz_class(entries[k].exact)});
    return ModularPolynomial(level, std::move(terms), degree);
}

std::vector<ModularPolynomial> load_all_tables() {
    std::vector<ModularPolynomial> tabs;
    tabs.push_back(load_table(1, detail::kPhi1, detail::kPhi1Count, detail::kPhi1Degree));
    tabs.push_back(load_table(2, detail::kPhi2, detail::kPhi2Count, detail::kPhi2Degree));
    tabs.push_back(load_table(3, detail::kPhi3, detail::kPhi3Count, detail::kPhi3Degree));
    tabs.push_back(load_table(4, detail::kPhi4, detail::kPhi4Count, detail::kPhi4Degree));
    tabs.push_back(load_table(5, detail::kPhi5, detail::kPhi5Count, detail::kPhi5Degree));

    // Validate each table against the numeric identity Phi_N(j(z), j(Nz)) = 0
    // at 5 seeded random points.
    Rng rng(0x9e3779b97f4a7c15ULL);
    for (const ModularPolynomial& phi : tabs) {
        for (int rep = 0; rep < 5; ++rep) {
            const double x = uniform(rng, -0.45, 0.45);
            const double y = uniform(rng, 0.9, 1.3);
            const cplx j1 = j_eval(HPoint(x, y), 1e-9).value;
            const cplx j2 = j_eval(HPoint(phi.level() * x, phi.level() * y), 1e-9).value;
            const double resid = std::abs(phi.eval(j1, j2));
            if (!(resid <= 1e-4 * phi.scale(j1, j2)))
                throw std::logic_error("modular polynomial table failed identity validation");
        }
    }
    return tabs;
}

}  // namespace

const ModularPolynomial& modular_poly(int N) {
    if (N < 1 || N > 5) throw LevelUnsupported("modular_poly: level outside embedded range 1..5");
    static const std::vector<ModularPolynomial> tables = load_all_tables();
    return tables[static_cast<std::size_t>(N - 1)];
}

std::optional<int> modular_relation_test(cplx w1, cplx w2, int Nmax, double tol) {
    if (Nmax > 5) throw LevelUnsupported("modular_relation_test: Nmax outside embedded range 1..5");
    for (int N = 1; N <= Nmax; ++N) {
        const ModularPolynomial& phi = modular_poly(N);
        if (std::abs(phi.eval(w1, w2)) <= tol * phi.scale(w1, w2)) return N;
    }
    return std::nullopt;
}

}  // namespace ecw
