#include "mpfr_oracle.hpp"

#include <mpfr.h>

#include <stdexcept>

namespace ecw_test {

namespace {

constexpr mpfr_prec_t kBits = 256;  // ~77 decimal digits
constexpr int kTerms = 200;

long divisor_power_sum(long n, int k) {
    long s = 0;
    for (long d = 1; d * d <= n; ++d) {
        if (n % d) continue;
        long dk = 1;
        for (int i = 0; i < k; ++i) dk *= d;
        s += dk;
        const long e = n / d;
        if (e != d) {
            long ek = 1;
            for (int i = 0; i < k; ++i) ek *= e;
            s += ek;
        }
    }
    return s;
}

}  // namespace

double oracle_j_real_q_from_y(double y, bool negate_q) {
    if (!negate_q && !(y > 0)) throw std::invalid_argument("oracle: need y > 0");

    mpfr_t pi, x, q, qn, e4, e6, t, num, den;
    mpfr_inits2(kBits, pi, x, q, qn, e4, e6, t, num, den, static_cast<mpfr_ptr>(nullptr));

    // q = e^{-2 pi y} on the imaginary axis; q = -e^{-pi sqrt 3} at the corner.
    mpfr_const_pi(pi, MPFR_RNDN);
    if (negate_q) {
        mpfr_sqrt_ui(x, 3, MPFR_RNDN);
        mpfr_mul(x, x, pi, MPFR_RNDN);
    } else {
        mpfr_mul_d(x, pi, 2.0 * y, MPFR_RNDN);
    }
    mpfr_neg(x, x, MPFR_RNDN);
    mpfr_exp(q, x, MPFR_RNDN);
    if (negate_q) mpfr_neg(q, q, MPFR_RNDN);

    mpfr_set_si(e4, 1, MPFR_RNDN);
    mpfr_set_si(e6, 1, MPFR_RNDN);
    mpfr_set_si(qn, 1, MPFR_RNDN);
    for (long n = 1; n <= kTerms; ++n) {
        mpfr_mul(qn, qn, q, MPFR_RNDN);
        mpfr_mul_si(t, qn, 240 * divisor_power_sum(n, 3), MPFR_RNDN);
        mpfr_add(e4, e4, t, MPFR_RNDN);
        mpfr_mul_si(t, qn, 504 * divisor_power_sum(n, 5), MPFR_RNDN);
        mpfr_sub(e6, e6, t, MPFR_RNDN);
    }

    // j = 1728 E4^3 / (E4^3 - E6^2)
    mpfr_pow_ui(num, e4, 3, MPFR_RNDN);
    mpfr_sqr(t, e6, MPFR_RNDN);
    mpfr_sub(den, num, t, MPFR_RNDN);
    mpfr_mul_si(num, num, 1728, MPFR_RNDN);
    mpfr_div(t, num, den, MPFR_RNDN);

    const double out = mpfr_get_d(t, MPFR_RNDN);
    mpfr_clears(pi, x, q, qn, e4, e6, t, num, den, static_cast<mpfr_ptr>(nullptr));
    return out;
}

double oracle_j_iy(double y) { return oracle_j_real_q_from_y(y, false); }

double oracle_j_corner() { return oracle_j_real_q_from_y(0.0, true); }

}  // namespace ecw_test
