#pragma once

#include <functional>
#include <vector>

#include "ecw/halfplane.hpp"
#include "ecw/numeric.hpp"
#include "ecw/polynomial.hpp"
#include "ecw/searchtypes.hpp"
#include "ecw/varieties.hpp"

namespace ecw {

// Factorization target = gamma1 * g * gamma (up to sign) with integer factors
// of entry height <= the requested bound.  `product` always equals
// gamma1 * g * gamma recomputed from the stored factors.
struct CosetApproximation {
    SL2Matrix gamma1 = SL2Matrix::identity();
    SL2Matrix gamma = SL2Matrix::identity();
    SL2Matrix product = SL2Matrix::identity();
    double distance = 0.0;  // Frobenius distance min over target sign
};

// Minimizes ||gamma1 * g * gamma -+ target||_F over integer matrices of entry
// height <= `height`.  Deterministic: ties keep the first candidate in
// enumeration order.  `budget` (a distance) warm-starts the pruning; the
// default searches unconditionally.
CosetApproximation coset_approximate(const SL2Matrix& g, const SL2Matrix& target, int height,
                                     double budget = -1.0);

// Same search with a single right factor gamma shared across all pairs
// (gs[i], targets[i]), minimizing the summed squared distance.
struct SharedCosetResult {
    std::vector<CosetApproximation> per_target;
    SL2Matrix gamma = SL2Matrix::identity();
    double total_score = 0.0;  // sum of squared Frobenius distances
};
SharedCosetResult coset_approximate_shared(const std::vector<SL2Matrix>& gs,
                                           const std::vector<SL2Matrix>& targets, int height,
                                           double budget = -1.0);

// Guarded scalar Newton iteration on the disk |z - z0| <= radius.  Success
// requires |F| <= config.newton_tol and a Kantorovich certificate whose
// checked inequality holds; the Lipschitz constant is estimated from 32
// boundary samples of dF with a x2 safety factor.  Throws DerivativeTooSmall
// when |dF(z0)| < 1e-12 and LeftDomain when an iterate exits the disk or the
// upper half-plane.
NewtonResult newton_kantorovich(const std::function<cplx(cplx)>& F,
                                const std::function<cplx(cplx)>& dF, cplx z0, double radius,
                                const SearchConfig& config);

// Witness search on a one-component constraint variety rooted at coordinate
// 1: finds z with f(j(M_1 z), ..., j(M_n z)) = 0 for all f in W, every M_i
// factoring as gamma_i * g_i * gamma with one shared gamma.  Fills only the
// domain-freeness verdict; callers wanting the full verdict sheet use
// j_witness.
Witness j_witness_1d(const MoebiusVariety& L, const PolySystem& W, const SearchConfig& config);

// General witness search on products: every coordinate must be linked or
// pinned (PredicateFailed otherwise, likewise on failing freeness/broadness).
// Splits off the last one-dimensional factor, recurses on the projected
// system, restricts to the fiber numerically and retries with fresh samples
// when the fiber degenerates.
Witness j_witness(const MoebiusVariety& L, const PolySystem& W, const SearchConfig& config);

// First-jet witness search for L: z2 = g z1 in the plane.  Finds z with
// f(j'(z), j'(g* z) / (cz + d)^2) = 0 where g* = gamma1 * g * gamma is the
// blurred link; records the blurring pair.
Witness blur_t1j_witness(const MoebiusVariety& L, const PolySystem& W, const SearchConfig& config);

}  // namespace ecw
