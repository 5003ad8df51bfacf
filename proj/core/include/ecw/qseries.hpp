#pragma once

#include <gmpxx.h>

#include <vector>

#include "ecw/numeric.hpp"

namespace ecw {

// Exact integer q-expansions around the cusp: the modular invariant
// j = q^{-1} + 744 + sum_{n>=1} c_n q^n together with the Eisenstein series
// E4, E6 and the discriminant Delta it is built from.
//
// Tables are built once at first use by exact integer power-series
// arithmetic (j = E4^3 / Delta, Delta from the Jacobi eta^3 octic) and
// self-checked against the classical leading coefficients and the exact
// identity E4^3 - E6^2 = 1728 * Delta.
class QSeries {
public:
    static constexpr int kMaxOrder = 64;

    static const QSeries& instance();

    int max_order() const { return kMaxOrder; }

    // c_n for n in [-1, max_order()]; c_{-1} = 1, c_0 = 744, c_n > 0.
    const mpz_class& coeff(int n) const;
    double coeff_d(int n) const;

    // E4 = 1 + 240 sum sigma_3(n) q^n, E6 = 1 - 504 sum sigma_5(n) q^n,
    // Delta = sum_{n>=1} tau(n) q^n; indices run up to max_order() + 1.
    const mpz_class& e4_coeff(int n) const;
    const mpz_class& e6_coeff(int n) const;
    const mpz_class& delta_coeff(int n) const;

    // Rigorous bound on sum_{n>trunc} n^dorder * c_n * |q|^n via the growth
    // bound c_n <= e^{4 pi sqrt(n)}: the first omitted term times a geometric
    // domination factor 1/(1-r), r = 2^dorder * e^{2 pi / sqrt(trunc+1)} |q|.
    // Returns +inf when r >= 1 (bound inapplicable, |q| too large).
    static double tail_bound(double abs_q, int trunc, int dorder = 0);

    // Smallest truncation order whose tail_bound is <= eps.  Throws
    // PrecisionUnreachable when no order <= kMaxOrder suffices.
    static int order_for(double abs_q, double eps, int dorder = 0);

private:
    QSeries();

    std::vector<mpz_class> c_;   // c_[k] holds c_{k-1}
    std::vector<double> cd_;
    std::vector<mpz_class> e4_, e6_, delta_;
};

}  // namespace ecw
