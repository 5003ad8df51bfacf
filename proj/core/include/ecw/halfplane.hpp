#pragma once

#include <array>
#include <optional>
#include <utility>
#include <vector>

#include "ecw/exact.hpp"
#include "ecw/numeric.hpp"

namespace ecw {

// Point of the upper half plane; construction enforces Im > 0.
struct HPoint {
    double re, im;
    HPoint(double r, double i) : re(r), im(i) {
        if (!(im > 0.0)) throw DomainError("HPoint: Im <= 0");
    }
    explicit HPoint(cplx z) : HPoint(z.real(), z.imag()) {}
    cplx z() const { return {re, im}; }
};

// Order-2 jet over the half plane: base point z, first/second jet coordinates.
struct Jet2Point {
    cplx z, r, s;
    Jet2Point(cplx z_, cplx r_, cplx s_) : z(z_), r(r_), s(s_) {
        if (!(z.imag() > 0.0)) throw DomainError("Jet2Point: Im z <= 0");
    }
};

// Real 2x2 matrix of determinant 1.  Entries are either exact elements of one
// Q(sqrt(D)) (det checked exactly) or floats (|det - 1| <= det_slack).  Exact
// matrices carry a float mirror for numeric work.  Entry order: a, b, c, d for
// (a b; c d).
class SL2Matrix {
  public:
    static SL2Matrix exact(QuadScalar a, QuadScalar b, QuadScalar c, QuadScalar d);
    static SL2Matrix floating(double a, double b, double c, double d,
                              const Tolerances& tol = default_tolerances());
    static SL2Matrix integer(long a, long b, long c, long d);
    static SL2Matrix identity() { return integer(1, 0, 0, 1); }

    bool is_exact() const { return exact_.has_value(); }
    const std::array<QuadScalar, 4>& exact_entries() const;
    const std::array<double, 4>& entries() const { return f_; }
    double a() const { return f_[0]; }
    double b() const { return f_[1]; }
    double c() const { return f_[2]; }
    double d() const { return f_[3]; }

    SL2Matrix operator*(const SL2Matrix& o) const;  // exact*exact stays exact
    SL2Matrix inverse() const;                      // adjugate; det == 1
    SL2Matrix operator-() const;
    bool operator==(const SL2Matrix& o) const;  // float-entry equality

    // True if every entry is an integer (within exact representation).
    bool is_integral() const;
    std::array<long, 4> integer_entries() const;  // throws if not integral

    double frobenius_norm() const;
    double max_abs_entry() const;

  private:
    SL2Matrix() = default;
    std::optional<std::array<QuadScalar, 4>> exact_;
    std::array<double, 4> f_{};
};

// Moebius action g.z = (az + b)/(cz + d).  Throws DegenerateDenominator when
// |cz + d| underflows the working scale (cannot happen for det-1 matrices
// acting on the open half plane with sane floats).
cplx moebius_apply(const SL2Matrix& g, cplx z);
HPoint moebius_apply(const SL2Matrix& g, HPoint z);

// Automorphy factor cz + d.
cplx automorphy_factor(const SL2Matrix& g, cplx z);

// Standard fundamental domain reduction: returns (z*, gamma) with z* =
// gamma.z, |Re z*| <= 1/2, |z*| >= 1; boundary ties resolved toward
// Re z* >= 0.  gamma has exact integer entries.  Throws NonTermination after
// 10^6 steps (unreachable for valid inputs).
std::pair<HPoint, SL2Matrix> reduce_to_fundamental_domain(HPoint z);

// Connecting family g(theta) = M(z2) R(theta) M(z1)^{-1} with M(x + iy) =
// (sqrt(y), x/sqrt(y); 0, 1/sqrt(y)) and R the rotation by theta.  Every
// g(theta) maps z1 to z2; theta parametrizes the full fiber.
SL2Matrix connecting_matrix(HPoint z1, HPoint z2, double theta);

// All gamma in SL2(Z) with max |entry| <= height, each exactly once, ordered
// lexicographically by (c, d, a, b).  height >= 1.
std::vector<SL2Matrix> enumerate_sl2z(int height);

// Decision: is g a real scalar multiple of a rational matrix?  Exact inputs
// are decided exactly; float inputs use continued-fraction reconstruction
// (denominators <= tol.denom_bound) and may return Unknown.  On Yes, returns
// the primitive integer matrix M and its (positive) determinant N.
struct RationalityResult {
    enum class Kind { Yes, No, Unknown } kind;
    long det = 0;
    std::array<long, 4> primitive{};
};
RationalityResult is_rational_up_to_scalar(const SL2Matrix& g,
                                           const Tolerances& tol = default_tolerances());

// Best rational approximation p/q to x with q <= qmax (continued fractions).
// Returns (p, q, |x - p/q|).
struct RationalApprox {
    long p = 0, q = 1;
    double err = 0;
};
RationalApprox rational_reconstruct(double x, long qmax);

}  // namespace ecw
