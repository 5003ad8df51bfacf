#pragma once

#include <array>
#include <optional>
#include <utility>
#include <vector>

#include "ecw/exact.hpp"
#include "ecw/numeric.hpp"
#include "ecw/polynomial.hpp"
#include "ecw/searchtypes.hpp"

namespace ecw {

// Full-rank lattice in C^g given by 2g generators (complex g-vectors).  The
// real 2g x 2g generator matrix stacks each generator as (Re z1, Im z1, ...,
// Re zg, Im zg) columnwise; it must be invertible.
struct Lattice {
    int g = 0;
    std::vector<std::vector<cplx>> gens;  // 2g generators, each length g
    std::optional<std::vector<std::vector<ExactComplex>>> exact;
    double condition_number = 0;

    static Lattice from_generators(std::vector<std::vector<cplx>> gens,
                                   std::optional<std::vector<std::vector<ExactComplex>>> exact =
                                       std::nullopt);
    // (Z + tau Z)^g with generators ordered (e_1, tau e_1, e_2, tau e_2, ...).
    static Lattice power_of_tau(HPoint tau, int g,
                                std::optional<ExactComplex> tau_exact = std::nullopt);
};

// Linear (optionally translated) subspace of C^g given by a complex row basis.
struct LinearSubspace {
    int g = 0;  // ambient complex dimension
    int d = 0;  // subspace complex dimension
    std::vector<std::vector<cplx>> basis;  // d rows of length g
    std::optional<std::vector<std::vector<ExactComplex>>> exact;
    std::optional<std::vector<cplx>> translate;

    static LinearSubspace from_rows(std::vector<std::vector<cplx>> rows, int g,
                                    std::optional<std::vector<std::vector<ExactComplex>>> exact =
                                        std::nullopt);
};

// Dual basis for the real pairing <theta, lambda> = Re(sum_i theta_i
// lambda_i): row j of B^{-1}, reinterpreting each real coordinate pair
// (r1, r2) as the complex number r1 - i r2.  <theta_i, lambda_j> = delta_ij.
// Exact generators produce an exact dual.  Throws IllConditioned when the
// generator matrix condition number exceeds 1e12.
Lattice dual_lattice(const Lattice& lat);

// Dichotomy for L + Lambda: dense in C^g versus contained in a complex
// hyperplane sum theta_i z_i = 0 with theta in the dual lattice.  Exact
// inputs are decided exactly (rational kernel); float inputs search dual
// coefficients up to `bound` (direct enumeration at low height plus kernel
// reconstruction) and report DenseProbable when nothing is found.
struct DensityResult {
    enum class Kind { Dense, DenseProbable, Contained } kind = Kind::Dense;
    std::vector<cplx> theta;              // hyperplane coefficients on Contained
    std::vector<long> coeffs;             // theta in dual-generator coordinates
    std::optional<std::vector<ExactComplex>> theta_exact;
    int bound = 0;                        // search bound backing a probable verdict
};
DensityResult hyperplane_density_test(const LinearSubspace& L, const Lattice& lat,
                                      int bound = 100);

// Elliptic curve C/(Z + tau Z) in Weierstrass form y^2 = 4x^3 - g2 x - g3.
// cm_eq = (A, B, C) with A tau^2 + B tau + C = 0 when tau is imaginary
// quadratic; cm_disc = B^2 - 4AC.
struct EllipticModel {
    HPoint tau;
    cplx g2, g3;
    std::optional<std::array<long, 3>> cm_eq;
    std::optional<long> cm_disc;
    std::optional<ExactComplex> tau_exact;

    static EllipticModel from_tau(HPoint tau,
                                  std::optional<ExactComplex> tau_exact = std::nullopt);
};

// (wp(u), wp'(u)) for the model lattice, via tau-reduction and the
// q-expansion of wp.  The curve identity wp'^2 = 4 wp^3 - g2 wp - g3 is
// checked to prec * scale on every call (PrecisionUnreachable on violation).
// Throws NearPole when u is within 1e-8 of a lattice point.
std::pair<cplx, cplx> wp_eval(cplx u, const EllipticModel& model, double prec);

// wp''(u) = 6 wp(u)^2 - g2/2 (for Jacobians of maps through (wp, wp')).
cplx wp_second(cplx u, const EllipticModel& model, double prec);

// u in the fundamental cell with wp(u) = x, wp'(u) = y (grid-seeded Newton).
cplx wp_invert(cplx x, cplx y, const EllipticModel& model, double prec);

// Rotundity of (L, W) in E^g.  W lives in the affine chart with variables
// (x_1, y_1, ..., x_g, y_g), x_i = wp(u_i), y_i = wp'(u_i); the curve
// relations are implicit.  Enumerates quotients E^g -> E^k induced by
// primitive integer k x g matrices of height <= height (entries m + n tau
// over the CM order when the model has one) and checks
// dim L f(L) + dim f(W) >= k; the trivial quotient requires
// dim L + dim W >= g.
struct RotundityResult {
    bool rotund = true;
    int k = 0;  // violated quotient dimension; 0 encodes the trivial quotient
    std::vector<std::vector<std::array<long, 2>>> quotient;  // entries (m, n): m + n tau
    int dim_image_L = 0, dim_image_W = 0;
};
RotundityResult rotundity_check(const LinearSubspace& L, const PolySystem& W,
                                const EllipticModel& model, int height, Rng& rng);

// Witness search for exp(L) meeting W in E^g: samples a base point of W,
// lifts it through wp, walks lattice translates sorted by distance to L, and
// runs Newton in the L-chart.  Preconditions: density test must return Dense
// (ClosedSubtorus otherwise), rotundity must hold (PreconditionFailed), and
// dim L + dim W >= g (generic hyperplane cuts reduce the sum to g).
Witness torus_witness_search(const LinearSubspace& L, const PolySystem& W,
                             const EllipticModel& model, const SearchConfig& config);

}  // namespace ecw
