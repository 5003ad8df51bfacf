#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "ecw/polynomial.hpp"

using namespace ecw;

TEST_CASE("parse handles the documented expression grammar") {
    const MultiPoly p = MultiPoly::parse("w1^2*w2 - 3*w1 + 0.5", 2);
    const std::vector<cplx> at{cplx(2, 1), cplx(-1, 0)};
    // (2+i)^2 * (-1) - 3(2+i) + 0.5 = -(3+4i) - 6-3i + 0.5
    const cplx expect = -(cplx(3, 4)) - cplx(6, 3) + cplx(0.5, 0);
    CHECK(std::abs(p.eval(at) - expect) < 1e-14);

    const MultiPoly q = MultiPoly::parse("2i*w1 + (w2 - i)^2", 2);
    const cplx qv = q.eval({cplx(1, 0), cplx(0, 1)});
    // 2i + (i - i)^2 = 2i
    CHECK(std::abs(qv - cplx(0, 2)) < 1e-14);

    const MultiPoly dec = MultiPoly::parse("0.25*w1 - 1.5e2", 1);
    CHECK(std::abs(dec.eval({cplx(4, 0)}) - cplx(1 - 150, 0)) < 1e-12);
}

TEST_CASE("parse rejects malformed input") {
    CHECK_THROWS_AS(MultiPoly::parse("w3 + 1", 2), ParseError);   // variable out of range
    CHECK_THROWS_AS(MultiPoly::parse("w1 +", 1), ParseError);
    CHECK_THROWS_AS(MultiPoly::parse("(w1", 1), ParseError);
    CHECK_THROWS_AS(MultiPoly::parse("w1 ^ w2", 2), ParseError);  // non-constant exponent
    CHECK_THROWS_AS(MultiPoly::parse("", 1), ParseError);
}

TEST_CASE("partial derivatives follow the product rule") {
    const MultiPoly p = MultiPoly::parse("w1^3*w2 + 5*w2^2", 2);
    const MultiPoly d1 = p.partial(0);
    const MultiPoly d2 = p.partial(1);
    const std::vector<cplx> at{cplx(1.5, -0.5), cplx(2, 1)};
    const cplx w1 = at[0], w2 = at[1];
    CHECK(std::abs(d1.eval(at) - 3.0 * w1 * w1 * w2) < 1e-12);
    CHECK(std::abs(d2.eval(at) - (w1 * w1 * w1 + 10.0 * w2)) < 1e-12);
    // derivative of a constant is the zero polynomial
    CHECK(MultiPoly::constant(cplx(3, 0), 2).partial(0).is_zero());
}

TEST_CASE("substitute pins a variable but keeps the arity") {
    const MultiPoly p = MultiPoly::parse("w1*w2 + w2^2", 2);
    const MultiPoly q = p.substitute(0, cplx(3, 0));
    CHECK(q.nvars() == 2);
    const cplx v = q.eval({cplx(99, 99), cplx(2, 0)});  // w1 slot now inert
    CHECK(std::abs(v - cplx(10, 0)) < 1e-13);
}

TEST_CASE("algebra: ring operations agree with pointwise evaluation") {
    const MultiPoly a = MultiPoly::parse("w1 + 2*w2", 2);
    const MultiPoly b = MultiPoly::parse("w1 - w2^2", 2);
    const std::vector<cplx> at{cplx(0.3, 0.7), cplx(-1.2, 0.4)};
    CHECK(std::abs((a + b).eval(at) - (a.eval(at) + b.eval(at))) < 1e-13);
    CHECK(std::abs((a - b).eval(at) - (a.eval(at) - b.eval(at))) < 1e-13);
    CHECK(std::abs((a * b).eval(at) - (a.eval(at) * b.eval(at))) < 1e-13);
    CHECK(std::abs((-a).eval(at) + a.eval(at)) < 1e-15);
    CHECK(a.degree() == 1);
    CHECK((a * b).degree() == 3);
}

TEST_CASE("PolySystem rejects zero polynomials and exposes Jacobian rows") {
    CHECK_THROWS_AS(PolySystem(2, {MultiPoly::constant(cplx(0, 0), 2)}), DomainError);

    PolySystem W(2, {MultiPoly::parse("w1^2 - w2", 2)});
    const std::vector<cplx> at{cplx(2, 0), cplx(1, 1)};
    const auto vals = W.eval(at);
    REQUIRE(vals.size() == 1);
    CHECK(std::abs(vals[0] - (cplx(4, 0) - cplx(1, 1))) < 1e-14);
    const auto rows = W.jacobian_rows(at);
    REQUIRE(rows.size() == 1);
    REQUIRE(rows[0].size() == 2);
    CHECK(std::abs(rows[0][0] - cplx(4, 0)) < 1e-14);
    CHECK(std::abs(rows[0][1] + cplx(1, 0)) < 1e-14);
}
