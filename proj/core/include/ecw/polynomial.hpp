#pragma once

#include <map>
#include <string>
#include <vector>

#include "ecw/numeric.hpp"

namespace ecw {

// Sparse multivariate polynomial over C in a fixed number of variables.
// Terms map exponent vectors (length nvars) to complex coefficients; zero
// coefficients are never stored.
class MultiPoly {
  public:
    explicit MultiPoly(int nvars) : nvars_(nvars) {}

    static MultiPoly constant(cplx c, int nvars);
    static MultiPoly variable(int idx, int nvars);  // 0-based index

    // Parses an expression in w1..w<nvars> with +, -, *, ^, parentheses,
    // decimal numbers, and the imaginary unit i (also as a suffix: "2i").
    // Throws ParseError with position information.
    static MultiPoly parse(const std::string& expr, int nvars);

    int nvars() const { return nvars_; }
    const std::map<std::vector<int>, cplx>& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }
    int degree() const;
    double max_coeff_abs() const;

    cplx eval(const std::vector<cplx>& w) const;
    MultiPoly partial(int var) const;
    // Replaces variable var by a constant; the variable slot remains (with
    // zero exponent everywhere) so indices stay stable.
    MultiPoly substitute(int var, cplx value) const;

    MultiPoly operator+(const MultiPoly& o) const;
    MultiPoly operator-(const MultiPoly& o) const;
    MultiPoly operator*(const MultiPoly& o) const;
    MultiPoly operator*(cplx s) const;
    MultiPoly operator-() const;

    void add_term(const std::vector<int>& exps, cplx coeff);
    std::string str() const;  // w1..wn notation, deterministic term order

  private:
    int nvars_;
    std::map<std::vector<int>, cplx> terms_;
};

// Algebraic subvariety of C^n as a finite polynomial system.  Construction
// rejects zero polynomials; dim_estimate is filled in by numeric sampling
// (varieties module) and cached here.
struct PolySystem {
    int n = 0;
    std::vector<MultiPoly> polys;
    int dim_estimate = -1;

    PolySystem() = default;
    PolySystem(int n_, std::vector<MultiPoly> polys_);

    std::vector<cplx> eval(const std::vector<cplx>& w) const;
    // Row k = gradient of poly k at w.
    std::vector<std::vector<cplx>> jacobian_rows(const std::vector<cplx>& w) const;
};

}  // namespace ecw
