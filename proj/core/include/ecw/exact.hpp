#pragma once

#include <gmpxx.h>

#include <complex>
#include <string>

#include "ecw/numeric.hpp"

namespace ecw {

// Element of Q(sqrt(D)): a + b*sqrt(D) with exact rational a, b and a
// squarefree discriminant D >= 2.  D == 0 encodes a plain rational (b == 0).
// Mixing two different irrational discriminants in one operation throws.
class QuadScalar {
  public:
    QuadScalar() : a_(0), b_(0), d_(0) {}
    QuadScalar(long n) : a_(n), b_(0), d_(0) {}  // NOLINT: implicit by design
    QuadScalar(const mpq_class& a) : a_(a), b_(0), d_(0) { a_.canonicalize(); }
    QuadScalar(mpq_class a, mpq_class b, long d);

    // sqrt(n) for n >= 0; square factors are pulled out, so sqrt(8) has
    // discriminant 2 with b = 2.
    static QuadScalar sqrt_of(long n);

    QuadScalar operator-() const { return QuadScalar(-a_, -b_, d_); }
    QuadScalar operator+(const QuadScalar& o) const;
    QuadScalar operator-(const QuadScalar& o) const;
    QuadScalar operator*(const QuadScalar& o) const;
    QuadScalar operator/(const QuadScalar& o) const;
    bool operator==(const QuadScalar& o) const;
    bool operator!=(const QuadScalar& o) const { return !(*this == o); }

    bool is_zero() const { return a_ == 0 && b_ == 0; }
    bool is_rational() const { return d_ == 0; }
    int sign() const;  // exact sign of a + b*sqrt(D)
    const mpq_class& rat() const { return a_; }
    const mpq_class& irr() const { return b_; }
    long disc() const { return d_; }
    double to_double() const;
    std::string str() const;

  private:
    mpq_class a_, b_;
    long d_;
    void normalize();
    static long merge_disc(const QuadScalar& x, const QuadScalar& y);
};

// Exact complex scalar with both parts in one Q(sqrt(D)).
struct ExactComplex {
    QuadScalar re, im;

    ExactComplex() = default;
    ExactComplex(QuadScalar r) : re(std::move(r)) {}  // NOLINT
    ExactComplex(QuadScalar r, QuadScalar i) : re(std::move(r)), im(std::move(i)) {}

    ExactComplex operator-() const { return {-re, -im}; }
    ExactComplex operator+(const ExactComplex& o) const { return {re + o.re, im + o.im}; }
    ExactComplex operator-(const ExactComplex& o) const { return {re - o.re, im - o.im}; }
    ExactComplex operator*(const ExactComplex& o) const {
        return {re * o.re - im * o.im, re * o.im + im * o.re};
    }
    ExactComplex operator/(const ExactComplex& o) const;
    bool operator==(const ExactComplex& o) const { return re == o.re && im == o.im; }
    bool is_zero() const { return re.is_zero() && im.is_zero(); }
    cplx to_complex() const { return {re.to_double(), im.to_double()}; }
    std::string str() const;
};

// Parses exact scalar tokens: "sqrt(2)", "1/2+sqrt(5)/3", "-3/4", "2-sqrt(8)".
QuadScalar parse_exact_scalar(const std::string& text);

}  // namespace ecw
