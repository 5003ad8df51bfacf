#include "ecw/halfplane.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace ecw {

SL2Matrix SL2Matrix::exact(QuadScalar a, QuadScalar b, QuadScalar c, QuadScalar d) {
    QuadScalar det = a * d - b * c;
    if (!(det == QuadScalar(1)))
        throw DomainError("SL2Matrix: exact determinant != 1");
    SL2Matrix m;
    m.f_ = {a.to_double(), b.to_double(), c.to_double(), d.to_double()};
    m.exact_ = {std::move(a), std::move(b), std::move(c), std::move(d)};
    return m;
}

SL2Matrix SL2Matrix::floating(double a, double b, double c, double d, const Tolerances& tol) {
    double det = a * d - b * c;
    double scale = std::max({1.0, std::abs(a * d), std::abs(b * c)});
    if (std::abs(det - 1.0) > tol.det_slack * scale)
        throw DomainError("SL2Matrix: float determinant != 1");
    SL2Matrix m;
    m.f_ = {a, b, c, d};
    return m;
}

SL2Matrix SL2Matrix::integer(long a, long b, long c, long d) {
    return exact(QuadScalar(a), QuadScalar(b), QuadScalar(c), QuadScalar(d));
}

const std::array<QuadScalar, 4>& SL2Matrix::exact_entries() const {
    if (!exact_) throw DomainError("SL2Matrix: no exact entries");
    return *exact_;
}

SL2Matrix SL2Matrix::operator*(const SL2Matrix& o) const {
    if (exact_ && o.exact_) {
        const auto& x = *exact_;
        const auto& y = *o.exact_;
        return SL2Matrix::exact(x[0] * y[0] + x[1] * y[2], x[0] * y[1] + x[1] * y[3],
                                x[2] * y[0] + x[3] * y[2], x[2] * y[1] + x[3] * y[3]);
    }
    SL2Matrix m;
    m.f_ = {f_[0] * o.f_[0] + f_[1] * o.f_[2], f_[0] * o.f_[1] + f_[1] * o.f_[3],
            f_[2] * o.f_[0] + f_[3] * o.f_[2], f_[2] * o.f_[1] + f_[3] * o.f_[3]};
    return m;
}

SL2Matrix SL2Matrix::inverse() const {
    if (exact_) {
        const auto& x = *exact_;
        return SL2Matrix::exact(x[3], -x[1], -x[2], x[0]);
    }
    SL2Matrix m;
    m.f_ = {f_[3], -f_[1], -f_[2], f_[0]};
    return m;
}

SL2Matrix SL2Matrix::operator-() const {
    if (exact_) {
        const auto& x = *exact_;
        return SL2Matrix::exact(-x[0], -x[1], -x[2], -x[3]);
    }
    SL2Matrix m;
    m.f_ = {-f_[0], -f_[1], -f_[2], -f_[3]};
    return m;
}

bool SL2Matrix::operator==(const SL2Matrix& o) const { return f_ == o.f_; }

bool SL2Matrix::is_integral() const {
    if (exact_) {
        for (const auto& e : *exact_) {
            if (!e.is_rational()) return false;
            if (e.rat().get_den() != 1) return false;
        }
        return true;
    }
    for (double v : f_)
        if (v != std::nearbyint(v)) return false;
    return true;
}

std::array<long, 4> SL2Matrix::integer_entries() const {
    if (!is_integral()) throw DomainError("SL2Matrix: entries not integral");
    std::array<long, 4> out{};
    if (exact_) {
        for (int i = 0; i < 4; ++i) out[i] = (*exact_)[i].rat().get_num().get_si();
    } else {
        for (int i = 0; i < 4; ++i) out[i] = static_cast<long>(std::llround(f_[i]));
    }
    return out;
}

double SL2Matrix::frobenius_norm() const {
    return std::sqrt(f_[0] * f_[0] + f_[1] * f_[1] + f_[2] * f_[2] + f_[3] * f_[3]);
}

double SL2Matrix::max_abs_entry() const {
    return std::max({std::abs(f_[0]), std::abs(f_[1]), std::abs(f_[2]), std::abs(f_[3])});
}

cplx moebius_apply(const SL2Matrix& g, cplx z) {
    cplx den = g.c() * z + g.d();
    double scale = std::max(1.0, std::abs(g.c()) * std::abs(z) + std::abs(g.d()));
    if (std::abs(den) < 1e-15 * scale)
        throw DegenerateDenominator("moebius_apply: cz + d ~ 0");
    return (g.a() * z + g.b()) / den;
}

HPoint moebius_apply(const SL2Matrix& g, HPoint z) {
    // Im(gz) = Im z / |cz + d|^2 > 0 structurally; recompute in a cancellation-
    // safe form rather than trusting the quotient's float imaginary part.
    cplx den = g.c() * z.z() + g.d();
    double n2 = std::norm(den);
    if (n2 < 1e-300) throw DegenerateDenominator("moebius_apply: cz + d ~ 0");
    cplx num = g.a() * z.z() + g.b();
    double re = (num.real() * den.real() + num.imag() * den.imag()) / n2;
    double im = z.im / n2;  // exact transformation law for det 1
    return HPoint(re, im);
}

cplx automorphy_factor(const SL2Matrix& g, cplx z) { return g.c() * z + g.d(); }

std::pair<HPoint, SL2Matrix> reduce_to_fundamental_domain(HPoint z) {
    SL2Matrix gamma = SL2Matrix::identity();
    static const SL2Matrix S = SL2Matrix::integer(0, -1, 1, 0);
    double x = z.re, y = z.im;
    for (long step = 0; step < 1000000; ++step) {
        // Translate Re into [-1/2, 1/2).
        double n = std::floor(x + 0.5);
        if (n != 0.0) {
            x -= n;
            gamma = SL2Matrix::integer(1, -static_cast<long>(n), 0, 1) * gamma;
        }
        double norm2 = x * x + y * y;
        if (norm2 < 1.0) {
            // Invert: z -> -1/z.
            double nx = -x / norm2, ny = y / norm2;
            x = nx;
            y = ny;
            gamma = S * gamma;
            continue;
        }
        // In the closed domain; resolve boundary ties toward Re >= 0.
        if (x == -0.5) {
            x = 0.5;
            gamma = SL2Matrix::integer(1, 1, 0, 1) * gamma;
        }
        if (norm2 == 1.0 && x < 0.0) {
            x = -x;
            gamma = S * gamma;
        }
        return {HPoint(x, y), gamma};
    }
    throw NonTermination("reduce_to_fundamental_domain: step limit");
}

SL2Matrix connecting_matrix(HPoint z1, HPoint z2, double theta) {
    double s1 = std::sqrt(z1.im), s2 = std::sqrt(z2.im);
    double ct = std::cos(theta), st = std::sin(theta);
    // M(z2) * R(theta) * M(z1)^{-1}, all det 1.
    // M(z) = (sqrt(y), x/sqrt(y); 0, 1/sqrt(y)); M(z)^{-1} = (1/sqrt(y), -x/sqrt(y); 0, sqrt(y)).
    double m2[4] = {s2, z2.re / s2, 0.0, 1.0 / s2};
    double r[4] = {ct, st, -st, ct};
    double m1i[4] = {1.0 / s1, -z1.re / s1, 0.0, s1};
    double t[4] = {m2[0] * r[0] + m2[1] * r[2], m2[0] * r[1] + m2[1] * r[3],
                   m2[2] * r[0] + m2[3] * r[2], m2[2] * r[1] + m2[3] * r[3]};
    return SL2Matrix::floating(t[0] * m1i[0] + t[1] * m1i[2], t[0] * m1i[1] + t[1] * m1i[3],
                               t[2] * m1i[0] + t[3] * m1i[2], t[2] * m1i[1] + t[3] * m1i[3]);
}

std::vector<SL2Matrix> enumerate_sl2z(int height) {
    if (height < 1) throw DomainError("enumerate_sl2z: height < 1");
    std::vector<SL2Matrix> out;
    const long h = height;
    for (long c = -h; c <= h; ++c) {
        for (long d = -h; d <= h; ++d) {
            if (std::gcd(c, d) != 1) continue;  // gcd(0, 0) == 0 also skipped
            // Solve a*d - b*c = 1; solutions (a0 + t*c, b0 + t*d).
            long a0, b0;
            if (c == 0) {
                // d = +-1, a = d, b free.
                a0 = d;
                b0 = 0;
            } else if (d == 0) {
                // c = +-1, b = -c, a free.
                a0 = 0;
                b0 = -c;
            } else {
                // Extended gcd for a*d + (-b)*c = 1.
                long g0 = 0, x = 0, y = 0;
                std::tie(g0, x, y) = [](long m, long n) {
                    long old_r = m, r = n, old_s = 1, s = 0, old_t = 0, t = 1;
                    while (r != 0) {
                        long q = old_r / r;
                        std::tie(old_r, r) = std::make_pair(r, old_r - q * r);
                        std::tie(old_s, s) = std::make_pair(s, old_s - q * s);
                        std::tie(old_t, t) = std::make_pair(t, old_t - q * t);
                    }
                    return std::make_tuple(old_r, old_s, old_t);
                }(d, c);
                // x*d + y*c = g0 = +-1.
                a0 = x * g0;  // normalize to a*d + (b')*c = 1 with b' = y*g0
                b0 = -y * g0;
            }
            // Collect all t with |a0 + t c| <= h and |b0 + t d| <= h.
            std::vector<std::array<long, 2>> ab;
            auto t_range = [h](long base, long stepv, long& lo, long& hi) {
                if (stepv == 0) {
                    if (std::abs(base) > h) {
                        lo = 1;
                        hi = 0;
                    }
                    return;
                }
                double t1 = (-h - base) / static_cast<double>(stepv);
                double t2 = (h - base) / static_cast<double>(stepv);
                if (t1 > t2) std::swap(t1, t2);
                lo = std::max(lo, static_cast<long>(std::ceil(t1 - 1e-9)));
                hi = std::min(hi, static_cast<long>(std::floor(t2 + 1e-9)));
            };
            long lo = -4 * h - 2, hi = 4 * h + 2;
            t_range(a0, c, lo, hi);
            t_range(b0, d, lo, hi);
            for (long t = lo; t <= hi; ++t) {
                long a = a0 + t * c, b = b0 + t * d;
                if (std::abs(a) > h || std::abs(b) > h) continue;
                if (a * d - b * c != 1) continue;
                ab.push_back({a, b});
            }
            std::sort(ab.begin(), ab.end());
            for (const auto& e : ab) out.push_back(SL2Matrix::integer(e[0], e[1], c, d));
        }
    }
    return out;
}

RationalApprox rational_reconstruct(double x, long qmax) {
    // Continued-fraction convergents; track the best approximation.
    RationalApprox best;
    best.p = static_cast<long>(std::llround(x));
    best.q = 1;
    best.err = std::abs(x - static_cast<double>(best.p));
    long p0 = 1, q0 = 0;  // h_{-1}, k_{-1}
    long p1 = static_cast<long>(std::floor(x)), q1 = 1;
    double frac = x - std::floor(x);
    for (int it = 0; it < 64; ++it) {
        double err = std::abs(x - static_cast<double>(p1) / static_cast<double>(q1));
        if (err < best.err || (err == best.err && q1 < best.q)) best = {p1, q1, err};
        if (frac < 1e-18) break;
        double inv = 1.0 / frac;
        double af = std::floor(inv);
        if (af > 9e17) break;
        long a = static_cast<long>(af);
        frac = inv - af;
        long p2 = a * p1 + p0, q2 = a * q1 + q0;
        if (q2 > qmax || q2 <= 0) break;
        p0 = p1;
        q0 = q1;
        p1 = p2;
        q1 = q2;
    }
    double err1 = std::abs(x - static_cast<double>(p1) / static_cast<double>(q1));
    if (err1 < best.err) best = {p1, q1, err1};
    return best;
}

RationalityResult is_rational_up_to_scalar(const SL2Matrix& g, const Tolerances& tol) {
    RationalityResult res;
    if (g.is_exact()) {
        const auto& e = g.exact_entries();
        // g = lambda * rational-matrix iff the (irr, rat) part vectors of all
        // entries are pairwise parallel: b_i a_j - b_j a_i = 0.
        for (int i = 0; i < 4; ++i) {
            for (int j = i + 1; j < 4; ++j) {
                mpq_class det = e[i].irr() * e[j].rat() - e[j].irr() * e[i].rat();
                if (det != 0) {
                    res.kind = RationalityResult::Kind::No;
                    return res;
                }
            }
        }
        // Clear the scalar: divide by the first nonzero entry, then scale the
        // rational matrix to a primitive integer one.
        int k = 0;
        while (k < 4 && e[k].is_zero()) ++k;
        std::array<mpq_class, 4> rat;
        for (int i = 0; i < 4; ++i) {
            QuadScalar r = e[i] / e[k];
            if (!r.is_rational()) {
                res.kind = RationalityResult::Kind::No;  // unreachable given parallel test
                return res;
            }
            rat[i] = r.rat();
        }
        mpz_class lcm_den(1);
        for (const auto& r : rat) mpz_lcm(lcm_den.get_mpz_t(), lcm_den.get_mpz_t(), r.get_den().get_mpz_t());
        std::array<mpz_class, 4> num;
        mpz_class gcd_all(0);
        for (int i = 0; i < 4; ++i) {
            num[i] = rat[i].get_num() * (lcm_den / rat[i].get_den());
            mpz_gcd(gcd_all.get_mpz_t(), gcd_all.get_mpz_t(), num[i].get_mpz_t());
        }
        for (int i = 0; i < 4; ++i) num[i] /= gcd_all;
        mpz_class det = num[0] * num[3] - num[1] * num[2];
        if (det < 0)
            throw DomainError("is_rational_up_to_scalar: negative determinant (non-positive scalar)");
        res.kind = RationalityResult::Kind::Yes;
        res.det = det.get_si();
        for (int i = 0; i < 4; ++i) res.primitive[i] = num[i].get_si();
        return res;
    }

    // Float path: reconstruct entry ratios with continued fractions.
    const auto& f = g.entries();
    double scale = g.max_abs_entry();
    int k = 0;
    while (k < 4 && std::abs(f[k]) < 1e-14 * scale) ++k;
    std::array<long, 4> num{};
    std::array<long, 4> den{};
    bool ambiguous = false;
    for (int i = 0; i < 4; ++i) {
        double ratio = f[i] / f[k];
        if (std::abs(ratio) < 1e-14) {
            num[i] = 0;
            den[i] = 1;
            continue;
        }
        RationalApprox ap = rational_reconstruct(ratio, tol.denom_bound);
        double rel = ap.err / std::max(1.0, std::abs(ratio));
        if (rel <= tol.rational_noise) {
            num[i] = ap.p;
            den[i] = ap.q;
        } else if (rel <= tol.reconstruction) {
            ambiguous = true;  // plausible but not machine-exact
            num[i] = ap.p;
            den[i] = ap.q;
        } else {
            res.kind = RationalityResult::Kind::No;
            return res;
        }
    }
    long l = 1;
    for (int i = 0; i < 4; ++i) l = std::lcm(l, den[i]);
    std::array<long, 4> m{};
    long gall = 0;
    for (int i = 0; i < 4; ++i) {
        m[i] = num[i] * (l / den[i]);
        gall = std::gcd(gall, m[i]);
    }
    if (gall == 0) {
        res.kind = RationalityResult::Kind::Unknown;
        return res;
    }
    for (auto& v : m) v /= gall;
    long det = m[0] * m[3] - m[1] * m[2];
    if (det <= 0) {
        res.kind = RationalityResult::Kind::Unknown;
        return res;
    }
    // Verify proportionality g ~ mu * M against the float entries.
    double mu = f[k] / static_cast<double>(m[k]);
    double werr = 0;
    for (int i = 0; i < 4; ++i)
        werr = std::max(werr, std::abs(f[i] - mu * static_cast<double>(m[i])));
    if (werr > tol.reconstruction * std::max(1.0, scale)) {
        res.kind = RationalityResult::Kind::Unknown;
        return res;
    }
    res.kind = ambiguous ? RationalityResult::Kind::Unknown : RationalityResult::Kind::Yes;
    res.det = det;
    res.primitive = m;
    return res;
}

}  // namespace ecw
