#pragma once

#include <optional>
#include <vector>

#include "ecw/halfplane.hpp"
#include "ecw/numeric.hpp"
#include "ecw/polynomial.hpp"
#include "ecw/searchtypes.hpp"

namespace ecw {

// One defining condition of a Moebius subvariety of H^n: a link z_k = g z_i
// or a pin z_i = tau.
struct MoebiusConstraint {
    enum class Kind { Link, Pin } kind = Kind::Link;
    int i = 0;  // source coordinate (1-based)
    int k = 0;  // linked coordinate (1-based), Link only
    std::optional<SL2Matrix> matrix;
    std::optional<HPoint> tau;

    static MoebiusConstraint link(int i, int k, SL2Matrix g);
    static MoebiusConstraint pin(int i, HPoint tau);
};

// Moebius subvariety in normalized form: the constraint graph is split into
// connected components, each rooted at its least coordinate; every member
// carries the composed matrix mapping the root to it.  Pinned components
// store the root value.  dim = number of unpinned components.  Cycles whose
// composed matrix is not the identity must fix a point of H (elliptic);
// such a cycle pins its component, anything else is InconsistentCycle.
class MoebiusVariety {
  public:
    struct Component {
        int root = 0;                  // 0-based root coordinate
        std::vector<int> members;      // 0-based, ascending, includes root
        std::optional<HPoint> pin;     // root value when pinned
    };

    static MoebiusVariety build(int n, const std::vector<MoebiusConstraint>& constraints);

    int n() const { return n_; }
    int dim() const { return dim_; }
    const std::vector<Component>& components() const { return components_; }
    // Matrix g with z_coord = g z_root(coord); identity at roots.
    const SL2Matrix& link_from_root(int coord) const;
    int root_of(int coord) const;
    bool pinned(int coord) const;
    // Normalized constraint list (deterministic order: pins first per
    // component root, then links by target coordinate).
    std::vector<MoebiusConstraint> normalized_constraints() const;

  private:
    MoebiusVariety() = default;
    int n_ = 0, dim_ = 0;
    std::vector<Component> components_;
    std::vector<int> comp_of_;        // coordinate -> component index
    std::vector<SL2Matrix> from_root_;
};

// Domain freeness: no pinned coordinate and no rational-up-to-scalar link.
// Exact links decide Pass/Fail; float links can leave a Probable verdict.
Verdict domain_freeness(const MoebiusVariety& L);

// Codomain freeness by sampling: no coordinate constant across samples, no
// modular relation Phi_N (N <= Nmax) vanishing across all samples.
Verdict codomain_freeness(const PolySystem& W, int Nmax, int samples, Rng& rng);

// Broadness: dim pi_I(L) + dim pi_I(W) >= |I| for every index subset I.
Verdict broadness(const MoebiusVariety& L, const PolySystem& W, Rng& rng);

// Sample points of W by solving the system against seeded random affine
// slices.  Throws SamplingFailed when fewer than count/2 points are found.
std::vector<std::vector<cplx>> sample_points(const PolySystem& W, int count, Rng& rng);

// A sampled point of maximal observed Jacobian rank whose coordinates stay
// at distance >= 1e-3 from every avoided value.  Throws NoRegularPoint.
std::vector<cplx> regular_point_sample(const PolySystem& W, const std::vector<cplx>& avoid,
                                       Rng& rng);

// Numeric dimension: max Jacobian corank over sampled regular points.
int numeric_dimension(const PolySystem& W, Rng& rng, int samples = 20);

// Numeric rank of a complex matrix given as rows (SVD, relative threshold).
int numeric_rank(const std::vector<std::vector<cplx>>& rows);

// Orthonormal kernel basis (columns) of the matrix given as rows.
std::vector<std::vector<cplx>> kernel_basis(const std::vector<std::vector<cplx>>& rows, int ncols);

}  // namespace ecw
