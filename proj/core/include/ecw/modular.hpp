#pragma once

#include <gmpxx.h>

#include <optional>
#include <tuple>
#include <utility>
#include <vector>

#include "ecw/halfplane.hpp"
#include "ecw/numeric.hpp"

namespace ecw {

// Value with a rigorous error bound: series truncation tail plus first-order
// float slack (rounding of the summation and of the reduction step).
struct EvalResult {
    cplx value;
    double error_bound;
};

// j(z) evaluated after fundamental-domain reduction, where |q| <= e^{-pi
// sqrt(3)} and the q-series tail is bounded by prec/2.  prec in (0, 1e-2].
// Throws PrecisionUnreachable when the required truncation order exceeds the
// table maximum or the value exceeds double range.
EvalResult j_eval(HPoint z, double prec);

// (j, j', j'') at z: termwise-differentiated series in the fundamental
// domain, pushed back to z through the inverse transformation laws
// j'(z) = j'(z*)/(cz+d)^2 and j''(z) = j''(z*)/(cz+d)^4 - 2c j'(z*)/(cz+d)^3
// for z* = gamma z.
std::tuple<EvalResult, EvalResult, EvalResult> j_derivatives(HPoint z, double prec);

// A point z in the closed fundamental domain with |j(z) - w| <=
// prec * max(1, |w|).  w = 0 and w = 1728 return e^{i pi/3} and i exactly
// (Newton stalls where j' vanishes).  Seeds: a 40x40 grid over
// [-0.5, 0.5] x [0.85, 3.5] plus the cusp asymptote log(w)/(2 pi i) for
// |w| > 1e5.  Throws NoConvergence when every seed fails.
HPoint j_invert(cplx w, double prec);

// Jet-2 action g.(z, r, s) = (gz, r/(cz+d)^2, s/(cz+d)^2 - 2cr^2/(cz+d)^3).
Jet2Point jet2_action(const SL2Matrix& g, const Jet2Point& p);

// Jet evaluation (j(z), j'(z) r, j''(z) r^2 + j'(z) s); invariant under
// jet2_action by integer matrices.
std::tuple<cplx, cplx, cplx> jet2_j(const Jet2Point& p, double prec);

// Classical modular polynomial Phi_N with exact integer coefficients,
// N = 1..5.  Phi_1 = X - Y; Phi_N is symmetric for N > 1.
class ModularPolynomial {
  public:
    struct Term {
        int xpow, ypow;
        double coeff;
        mpz_class exact;
    };

    ModularPolynomial(int level, std::vector<Term> terms, int degree);

    int level() const { return level_; }
    int degree() const { return degree_; }
    const std::vector<Term>& terms() const { return terms_; }

    cplx eval(cplx x, cplx y) const;
    // Max monomial magnitude at (x, y); the natural residual scale.
    double scale(cplx x, cplx y) const;
    std::pair<cplx, cplx> gradient(cplx x, cplx y) const;

  private:
    int level_, degree_;
    std::vector<Term> terms_;
};

// Embedded table lookup; validated once per process by checking
// |Phi_N(j(z), j(Nz))| <= 1e-4 * scale at 5 seeded random z.  Throws
// LevelUnsupported outside 1..5.
const ModularPolynomial& modular_poly(int N);

// Least N <= Nmax with |Phi_N(w1, w2)| <= tol * scale(Phi_N, w1, w2), if any.
// Nmax <= 5 (LevelUnsupported beyond the table).
std::optional<int> modular_relation_test(cplx w1, cplx w2, int Nmax, double tol = 1e-8);

}  // namespace ecw
