#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "ecw/exact.hpp"
#include "ecw/numeric.hpp"
#include "ecw/problem.hpp"
#include "ecw/searchtypes.hpp"

using namespace ecw;

namespace {

const char* kShiftProblem = R"json({
  "schema": "1",
  "mode": "j",
  "L": {"n": 2,
        "constraints": [{"type": "link", "i": 1, "k": 2,
                         "matrix": {"exact": ["1", "sqrt(2)", "0", "1"]}}]},
  "W": ["w1 + w2"],
  "config": {"height_schedule": [5, 10], "newton_tol": 1e-9, "seed": 11}
})json";

const char* kTorusProblem = R"json({
  "schema": "1",
  "mode": "torus",
  "L": {"g": 2, "basis": [["1", "sqrt(2)"]]},
  "model": {"tau": {"re": "0", "im": "1"}},
  "W": ["w1 - w3"],
  "config": {"seed": 5}
})json";

}  // namespace

TEST_CASE("problem files round-trip through parse and dump") {
    const auto p = ProblemFile::parse(kShiftProblem);
    CHECK(p.mode == "j");
    CHECK(p.n == 2);
    CHECK(p.ambient() == 2);
    REQUIRE(p.constraints.size() == 1);
    CHECK(p.config.newton_tol == 1e-9);
    CHECK(p.config.seed == 11);
    REQUIRE(p.config.height_schedule.size() == 2);

    const std::string once = p.dump();
    const auto p2 = ProblemFile::parse(once);
    CHECK(p2.dump() == once);

    // Link direction: the stored matrix maps z1 to z2.
    const auto L = p.moebius();
    CHECK(L.dim() == 1);
    CHECK(L.root_of(1) == 0);
    const auto& g = L.link_from_root(1);
    CHECK(g.is_exact());
    CHECK(g.exact_entries()[1] == QuadScalar::sqrt_of(2));

    const auto W = p.system();
    CHECK(W.n == 2);
    REQUIRE(W.polys.size() == 1);
    CHECK(std::abs(W.polys[0].eval({cplx(2, 0), cplx(3, 0)}) - 5.0) < 1e-15);
}

TEST_CASE("torus problems expose subspace and model") {
    const auto p = ProblemFile::parse(kTorusProblem);
    CHECK(p.mode == "torus");
    CHECK(p.g == 2);
    CHECK(p.ambient() == 4);
    REQUIRE(p.basis.size() == 1);
    REQUIRE(p.basis_exact.has_value());

    const auto S = p.subspace();
    CHECK(S.g == 2);
    CHECK(S.d == 1);
    CHECK(S.exact.has_value());

    const auto m = p.model();
    REQUIRE(m.cm_disc.has_value());
    CHECK(*m.cm_disc == -4);
    REQUIRE(m.tau_exact.has_value());

    const std::string once = p.dump();
    CHECK(ProblemFile::parse(once).dump() == once);
}

TEST_CASE("entry encodings cover floats, rationals, exact tokens, and pairs") {
    const char* mixed = R"json({
      "schema": "1",
      "mode": "j",
      "L": {"n": 2,
            "constraints": [
              {"type": "pin", "i": 1, "tau": [0.25, 1.5]},
              {"type": "link", "i": 1, "k": 2,
               "matrix": {"float": [1.0, 0.5, 0.0, 1.0]}}]},
      "W": ["w1 - w2"]
    })json";
    const auto p = ProblemFile::parse(mixed);
    REQUIRE(p.constraints.size() == 2);
    CHECK(p.constraints[0].kind == MoebiusConstraint::Kind::Pin);
    REQUIRE(p.constraints[0].tau.has_value());
    CHECK(p.constraints[0].tau->z() == cplx(0.25, 1.5));
    REQUIRE(p.constraints[1].matrix.has_value());
    CHECK_FALSE(p.constraints[1].matrix->is_exact());
    const std::string once = p.dump();
    CHECK(ProblemFile::parse(once).dump() == once);

    // A plain 4-array of exact tokens is accepted as an exact matrix.
    const char* plain = R"json({
      "schema": "1", "mode": "j",
      "L": {"n": 2,
            "constraints": [{"type": "link", "i": 1, "k": 2,
                             "matrix": ["1", "sqrt(2)", "0", "1"]}]},
      "W": ["w1"]
    })json";
    CHECK(ProblemFile::parse(plain).constraints[0].matrix->is_exact());
}

TEST_CASE("malformed problems raise ParseError") {
    CHECK_THROWS_AS(ProblemFile::parse("not json"), ParseError);
    CHECK_THROWS_AS(
        ProblemFile::parse(R"json({"schema": "2", "mode": "j", "L": {"n": 1}, "W": ["w1"]})json"),
        ParseError);
    CHECK_THROWS_AS(
        ProblemFile::parse(R"json({"schema": "1", "mode": "cubic", "L": {"n": 1}, "W": ["w1"]})json"),
        ParseError);
    CHECK_THROWS_AS(
        ProblemFile::parse(R"json({"schema": "1", "mode": "j", "L": {"n": 0}, "W": ["w1"]})json"),
        ParseError);
    CHECK_THROWS_AS(
        ProblemFile::parse(R"json({"schema": "1", "mode": "j", "L": {"n": 1}, "W": []})json"),
        ParseError);
    // Pin below the real axis.
    CHECK_THROWS_AS(ProblemFile::parse(R"json({
        "schema": "1", "mode": "j",
        "L": {"n": 1, "constraints": [{"type": "pin", "i": 1, "tau": [0.0, -1.0]}]},
        "W": ["w1"]})json"),
                    ParseError);
    // Link matrix with determinant 2.
    CHECK_THROWS_AS(ProblemFile::parse(R"json({
        "schema": "1", "mode": "j",
        "L": {"n": 2, "constraints": [{"type": "link", "i": 1, "k": 2,
                                       "matrix": ["2", "0", "0", "1"]}]},
        "W": ["w1"]})json"),
                    ParseError);
    // Bad config values are reported as parse errors.
    CHECK_THROWS_AS(ProblemFile::parse(R"json({
        "schema": "1", "mode": "j", "L": {"n": 1}, "W": ["w1"],
        "config": {"newton_tol": -1.0}})json"),
                    ParseError);
}

TEST_CASE("witness reports round-trip losslessly") {
    WitnessReport r;
    r.timestamp = "2026-01-02T03:04:05Z";
    r.problem = ProblemFile::parse(kShiftProblem);

    Witness& w = r.witness;
    w.mode = "j";
    w.z = HPoint(0.125, 1.75);
    w.bases = {cplx(0.125, 1.75), cplx(0.125, 1.75)};
    w.matrices = {SL2Matrix::identity(),
                  SL2Matrix::exact(QuadScalar(1), QuadScalar::sqrt_of(2), QuadScalar(0),
                                   QuadScalar(1))};
    w.factors.resize(2);
    w.factors[1].gamma1 = {1, -1, 0, 1};
    w.point = {cplx(100.5, -3.25), cplx(-100.5, 3.25)};
    w.residuals = {1.25e-11};
    w.eval_error_bounds = {2e-10, 3e-10};
    KantorovichCertificate cert;
    cert.base = {cplx(0.125, 1.75)};
    cert.eta = 1e-4;
    cert.deriv = 2.5;
    cert.lipschitz = 10.0;
    cert.radius = 2e-4;
    cert.h = 4e-4;
    w.certificates = {cert};
    w.verdicts.free_domain = Verdict::pass();
    w.verdicts.free_codomain = Verdict::probable("no relation across samples", 20);
    Verdict broad = Verdict::fail("projection too small");
    broad.failing_index_set = {1, 2};
    w.verdicts.broad = broad;
    w.budget.newton_steps = 7;
    w.budget.coset_candidates = 1234;
    w.budget.max_height_used = 10;
    w.budget.tolerance = 1e-9;
    w.budget.best_residual = 1.25e-11;
    w.height_trace = {{5, 0.25}, {10, 0.0625}};
    w.newton_trace = {{0, 1.0}, {1, 1e-6}, {2, 1e-12}};

    const std::string once = r.dump();
    const auto back = WitnessReport::parse(once);
    CHECK(back.dump() == once);
    CHECK(back.timestamp == r.timestamp);
    CHECK(back.witness.point == w.point);
    CHECK(back.witness.residuals == w.residuals);
    REQUIRE(back.witness.certificates.size() == 1);
    CHECK(back.witness.certificates[0].h == cert.h);
    CHECK(back.witness.matrices[1].is_exact());
    CHECK(back.witness.verdicts.broad.failing_index_set == std::vector<int>{1, 2});
    CHECK(back.witness.budget.best_residual == 1.25e-11);

    // An unmeasured residual is encoded as null and restored as infinity.
    r.witness.budget.best_residual = std::numeric_limits<double>::infinity();
    const std::string null_form = r.dump();
    CHECK(null_form.find("\"best_residual\": null") != std::string::npos);
    CHECK(std::isinf(WitnessReport::parse(null_form).witness.budget.best_residual));
}

TEST_CASE("csv tables carry their headers") {
    const std::string h = heights_csv({{5, 0.5}, {10, 0.25}});
    CHECK(h.rfind("height,best_distance\n", 0) == 0);
    CHECK(h.find("5,0.5\n") != std::string::npos);
    CHECK(h.find("10,0.25\n") != std::string::npos);
    const std::string nt = newton_csv({{0, 1.0}});
    CHECK(nt.rfind("step,abs_residual\n", 0) == 0);
    CHECK(nt.find("0,1\n") != std::string::npos);
}

TEST_CASE("double formatting is shortest-form and 17-digit exact") {
    CHECK(format_double(0.5) == "0.5");
    CHECK(format_double(1728.0) == "1728");
    CHECK(format_double(std::numeric_limits<double>::infinity()) == "inf");

    const double pi = 3.14159265358979323846;
    CHECK(std::stod(format_double(pi)) == pi);
    CHECK(std::stod(format_double17(pi)) == pi);
    CHECK(format_double17(1.0 / 3.0).find("0.33333333333333331") == 0);
}
