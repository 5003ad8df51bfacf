#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "ecw/exact.hpp"

using namespace ecw;

TEST_CASE("parse_exact_scalar accepts the documented token grammar") {
    const QuadScalar a = parse_exact_scalar("sqrt(2)");
    CHECK(a.rat() == 0);
    CHECK(a.irr() != 0);
    CHECK(a.to_double() == doctest::Approx(std::sqrt(2.0)).epsilon(1e-15));

    const QuadScalar b = parse_exact_scalar("1/2+sqrt(5)/3");
    CHECK(b.to_double() ==
          doctest::Approx(0.5 + std::sqrt(5.0) / 3.0).epsilon(1e-15));
    CHECK(b.disc() == 5);

    const QuadScalar c = parse_exact_scalar("-3/4");
    CHECK(c.rat() == mpq_class(-3, 4));
    CHECK(c.irr() == 0);

    // sqrt(8) = 2 sqrt(2): the representation must still square correctly
    const QuadScalar d = parse_exact_scalar("2-sqrt(8)");
    CHECK(d.to_double() == doctest::Approx(2.0 - std::sqrt(8.0)).epsilon(1e-15));
    const QuadScalar sq = d * d;  // (2 - 2 rt2)^2 = 12 - 8 rt2
    CHECK(sq.to_double() == doctest::Approx(12.0 - 8.0 * std::sqrt(2.0)).epsilon(1e-14));
}

TEST_CASE("parse_exact_scalar rejects garbage") {
    CHECK_THROWS_AS(parse_exact_scalar(""), ParseError);
    CHECK_THROWS_AS(parse_exact_scalar("sqrt(-2)"), ParseError);
    CHECK_THROWS_AS(parse_exact_scalar("1//2"), ParseError);
    CHECK_THROWS_AS(parse_exact_scalar("sqrt(2)+sqrt(3)"), ParseError);
}

TEST_CASE("QuadScalar field arithmetic is exact") {
    const QuadScalar rt2 = QuadScalar::sqrt_of(2);
    const QuadScalar one(1);

    // (1 + rt2)(1 - rt2) = -1
    const QuadScalar prod = (one + rt2) * (one - rt2);
    CHECK(prod == QuadScalar(-1));

    // rt2 * rt2 = 2 exactly, leaving the rational subfield
    CHECK(rt2 * rt2 == QuadScalar(2));

    // division: 1 / (1 + rt2) = rt2 - 1
    const QuadScalar inv = one / (one + rt2);
    CHECK(inv == rt2 - one);

    CHECK_THROWS_AS(one / QuadScalar(0), DomainError);
}

TEST_CASE("QuadScalar rejects mixing incompatible discriminants") {
    const QuadScalar rt2 = QuadScalar::sqrt_of(2);
    const QuadScalar rt3 = QuadScalar::sqrt_of(3);
    CHECK_THROWS_AS(rt2 + rt3, DomainError);
    CHECK_THROWS_AS(rt2 * rt3, DomainError);
    // rationals embed in any field
    CHECK((rt2 + QuadScalar(1)).to_double() ==
          doctest::Approx(1.0 + std::sqrt(2.0)).epsilon(1e-15));
}

TEST_CASE("ExactComplex arithmetic matches complex doubles") {
    const QuadScalar rt2 = QuadScalar::sqrt_of(2);
    const ExactComplex z(QuadScalar(1), rt2);   // 1 + i rt2
    const ExactComplex w(rt2, QuadScalar(-1));  // rt2 - i

    const ExactComplex p = z * w;
    const cplx pd = z.to_complex() * w.to_complex();
    CHECK(p.to_complex().real() == doctest::Approx(pd.real()).epsilon(1e-15));
    CHECK(p.to_complex().imag() == doctest::Approx(pd.imag()).epsilon(1e-15));

    const ExactComplex q = z / w;
    const cplx qd = z.to_complex() / w.to_complex();
    CHECK(q.to_complex().real() == doctest::Approx(qd.real()).epsilon(1e-14));
    CHECK(q.to_complex().imag() == doctest::Approx(qd.imag()).epsilon(1e-14));

    CHECK((z - z).is_zero());
    CHECK_THROWS_AS(z / ExactComplex(QuadScalar(0)), DomainError);
}

TEST_CASE("str round trips through parse_exact_scalar") {
    const QuadScalar vals[] = {QuadScalar(0), QuadScalar(-7), parse_exact_scalar("1/2+sqrt(5)/3"),
                               parse_exact_scalar("2-sqrt(8)"), QuadScalar::sqrt_of(13)};
    for (const QuadScalar& v : vals) {
        const QuadScalar back = parse_exact_scalar(v.str());
        CHECK(back == v);
    }
}
