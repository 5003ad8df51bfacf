#include "ecw/qseries.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace ecw {
namespace {

// Truncated product of integer power series, orders 0..top.
std::vector<mpz_class> mul_trunc(const std::vector<mpz_class>& a,
                                 const std::vector<mpz_class>& b, int top) {
    std::vector<mpz_class> out(static_cast<std::size_t>(top) + 1, mpz_class(0));
    for (std::size_t i = 0; i < a.size() && i <= static_cast<std::size_t>(top); ++i) {
        if (a[i] == 0) continue;
        std::size_t jmax = std::min(b.size() - 1, static_cast<std::size_t>(top) - i);
        for (std::size_t j = 0; j <= jmax; ++j) out[i + j] += a[i] * b[j];
    }
    return out;
}

mpz_class sigma_pow(int n, int k) {
    mpz_class s = 0;
    for (int d = 1; d <= n; ++d) {
        if (n % d != 0) continue;
        mpz_class t = d;
        mpz_class p = 1;
        for (int e = 0; e < k; ++e) p *= t;
        s += p;
    }
    return s;
}

}  // namespace

QSeries::QSeries() {
    const int top = kMaxOrder + 1;  // series order needed for c_{kMaxOrder}

    e4_.resize(top + 1);
    e6_.resize(top + 1);
    e4_[0] = 1;
    e6_[0] = 1;
    for (int n = 1; n <= top; ++n) {
        e4_[n] = 240 * sigma_pow(n, 3);
        e6_[n] = -504 * sigma_pow(n, 5);
    }

    // Delta = q * (eta-cube series)^8 with
    // eta-cube series = sum_k (-1)^k (2k+1) q^{k(k+1)/2}.
    std::vector<mpz_class> eta3(static_cast<std::size_t>(top) + 1, mpz_class(0));
    for (int k = 0; k * (k + 1) / 2 <= top; ++k)
        eta3[static_cast<std::size_t>(k * (k + 1) / 2)] = (k % 2 == 0 ? 2 * k + 1 : -(2 * k + 1));
    std::vector<mpz_class> p2 = mul_trunc(eta3, eta3, top);
    std::vector<mpz_class> p4 = mul_trunc(p2, p2, top);
    std::vector<mpz_class> p8 = mul_trunc(p4, p4, top);  // Delta / q, order top
    delta_.assign(static_cast<std::size_t>(top) + 2, mpz_class(0));
    for (int n = 0; n <= top; ++n) delta_[static_cast<std::size_t>(n) + 1] = p8[n];

    std::vector<mpz_class> e4cube = mul_trunc(mul_trunc(e4_, e4_, top), e4_, top);

    // j = E4^3 / Delta; with A = Delta/q (A_0 = 1) the quotient C = E4^3 / A
    // satisfies C_n = E4^3_n - sum_{k=1..n} A_k C_{n-k}, and c_{n-1} = C_n.
    std::vector<mpz_class> C(static_cast<std::size_t>(top) + 1);
    for (int n = 0; n <= top; ++n) {
        mpz_class acc = e4cube[n];
        for (int k = 1; k <= n; ++k) acc -= p8[k] * C[static_cast<std::size_t>(n - k)];
        C[static_cast<std::size_t>(n)] = acc;
    }
    c_.assign(C.begin(), C.end());  // c_[k] = c_{k-1}

    // Startup self-checks: classical leading coefficients, positivity, and
    // the exact identity E4^3 - E6^2 = 1728 * Delta.
    if (c_[0] != 1 || c_[1] != 744 || c_[2] != 196884 || c_[3] != 21493760)
        throw std::logic_error("j-coefficient self-check failed: leading terms");
    for (const mpz_class& v : c_)
        if (v <= 0) throw std::logic_error("j-coefficient self-check failed: positivity");
    std::vector<mpz_class> e6sq = mul_trunc(e6_, e6_, top);
    for (int n = 0; n <= top; ++n) {
        mpz_class lhs = e4cube[n] - e6sq[n];
        mpz_class rhs = 1728 * delta_[static_cast<std::size_t>(n)];
        if (lhs != rhs)
            throw std::logic_error("j-coefficient self-check failed: E4^3 - E6^2 = 1728 Delta");
    }

    cd_.resize(c_.size());
    for (std::size_t k = 0; k < c_.size(); ++k) cd_[k] = c_[k].get_d();
}

const QSeries& QSeries::instance() {
    static const QSeries table;
    return table;
}

const mpz_class& QSeries::coeff(int n) const {
    if (n < -1 || n > kMaxOrder) throw std::out_of_range("QSeries::coeff index");
    return c_[static_cast<std::size_t>(n + 1)];
}

double QSeries::coeff_d(int n) const {
    if (n < -1 || n > kMaxOrder) throw std::out_of_range("QSeries::coeff index");
    return cd_[static_cast<std::size_t>(n + 1)];
}

const mpz_class& QSeries::e4_coeff(int n) const {
    if (n < 0 || n >= static_cast<int>(e4_.size())) throw std::out_of_range("QSeries::e4_coeff index");
    return e4_[static_cast<std::size_t>(n)];
}

const mpz_class& QSeries::e6_coeff(int n) const {
    if (n < 0 || n >= static_cast<int>(e6_.size())) throw std::out_of_range("QSeries::e6_coeff index");
    return e6_[static_cast<std::size_t>(n)];
}

const mpz_class& QSeries::delta_coeff(int n) const {
    if (n < 0 || n >= static_cast<int>(delta_.size()))
        throw std::out_of_range("QSeries::delta_coeff index");
    return delta_[static_cast<std::size_t>(n)];
}

double QSeries::tail_bound(double abs_q, int trunc, int dorder) {
    if (abs_q <= 0.0) return 0.0;
    const double n1 = static_cast<double>(trunc + 1);
    const double ratio = std::pow(2.0, dorder) * std::exp(2.0 * kPi / std::sqrt(n1)) * abs_q;
    if (!(ratio < 1.0)) return std::numeric_limits<double>::infinity();
    const double first =
        std::pow(n1, dorder) * std::exp(4.0 * kPi * std::sqrt(n1)) * std::pow(abs_q, n1);
    return first / (1.0 - ratio);
}

int QSeries::order_for(double abs_q, double eps, int dorder) {
    for (int trunc = 1; trunc <= kMaxOrder; ++trunc)
        if (tail_bound(abs_q, trunc, dorder) <= eps) return trunc;
    throw PrecisionUnreachable("series truncation order exceeds configured maximum");
}

}  // namespace ecw
