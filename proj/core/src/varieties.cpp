#include "ecw/varieties.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <string>
#include <utility>

#include "ecw/modular.hpp"

namespace ecw {

namespace {

Eigen::MatrixXcd to_eigen(const std::vector<std::vector<cplx>>& rows, int ncols) {
    Eigen::MatrixXcd A(static_cast<int>(rows.size()), ncols);
    for (int r = 0; r < static_cast<int>(rows.size()); ++r)
        for (int c = 0; c < ncols; ++c) A(r, c) = rows[r][c];
    return A;
}

// |coeff| * prod |w_i|^e_i summed over terms: the residual scale of a
// polynomial at a point.
double abs_eval(const MultiPoly& p, const std::vector<cplx>& w) {
    double s = 0;
    for (const auto& [exps, coeff] : p.terms()) {
        double t = std::abs(coeff);
        for (size_t v = 0; v < exps.size(); ++v)
            for (int e = 0; e < exps[v]; ++e) t *= std::abs(w[v]);
        s += t;
    }
    return s;
}

// One Gauss-Newton solve of the (possibly rectangular) system; success means
// every residual is below 1e-10 of its term scale.
std::optional<std::vector<cplx>> solve_system(const std::vector<MultiPoly>& polys, int n,
                                              std::vector<cplx> pt) {
    const int m = static_cast<int>(polys.size());
    for (int step = 0; step < 60; ++step) {
        Eigen::VectorXcd F(m);
        bool done = true;
        for (int k = 0; k < m; ++k) {
            F(k) = polys[k].eval(pt);
            if (std::abs(F(k)) > 1e-10 * std::max(1.0, abs_eval(polys[k], pt))) done = false;
        }
        if (done) return pt;
        Eigen::MatrixXcd J(m, n);
        for (int k = 0; k < m; ++k)
            for (int v = 0; v < n; ++v) J(k, v) = polys[k].partial(v).eval(pt);
        const Eigen::VectorXcd delta = J.colPivHouseholderQr().solve(-F);
        if (!delta.allFinite() || delta.norm() > 1e9) return std::nullopt;
        for (int v = 0; v < n; ++v) pt[v] += delta(v);
        if (!std::isfinite(std::abs(pt[0]))) return std::nullopt;
    }
    return std::nullopt;
}

// Random affine slices through a random target point cut W down to isolated
// points; the 2500 radius keeps sampled coordinates at the working scale.
std::optional<std::vector<cplx>> sample_once(const PolySystem& W, Rng& rng) {
    const int n = W.n;
    const int m = static_cast<int>(W.polys.size());
    const int free_dims =
        W.dim_estimate >= 0 ? W.dim_estimate : std::max(0, n - m);
    std::vector<MultiPoly> polys = W.polys;
    std::vector<cplx> start(n);
    for (int v = 0; v < n; ++v) start[v] = 2500.0 * unit_disk_sample(rng);
    for (int s = 0; s < free_dims; ++s) {
        MultiPoly slice(n);
        std::vector<int> e(n, 0);
        cplx b(0, 0);
        for (int v = 0; v < n; ++v) {
            cplx c = unit_disk_sample(rng);
            while (std::abs(c) < 0.3) c = unit_disk_sample(rng);
            std::fill(e.begin(), e.end(), 0);
            e[v] = 1;
            slice.add_term(e, c);
            b += c * start[v];
        }
        std::fill(e.begin(), e.end(), 0);
        slice.add_term(e, -b);
        polys.push_back(std::move(slice));
    }
    return solve_system(polys, n, start);
}

HPoint elliptic_fixed_point(const SL2Matrix& D) {
    const auto [a, b, c, dd] = D.entries();
    (void)b;
    if (c == 0.0) throw InconsistentCycle("elliptic cycle with c = 0");
    const double tr = a + dd;
    const double disc = 4.0 - tr * tr;
    if (!(disc > 0)) throw InconsistentCycle("cycle matrix has no fixed point in H");
    const double re = (a - dd) / (2.0 * c);
    const double im = std::sqrt(disc) / (2.0 * std::abs(c));
    return HPoint(re, im);
}

bool is_pm_identity(const SL2Matrix& D) {
    const auto [a, b, c, dd] = D.entries();
    const double tol = 1e-9;
    return (std::abs(b) <= tol && std::abs(c) <= tol &&
            ((std::abs(a - 1) <= tol && std::abs(dd - 1) <= tol) ||
             (std::abs(a + 1) <= tol && std::abs(dd + 1) <= tol)));
}

}  // namespace

MoebiusConstraint MoebiusConstraint::link(int i, int k, SL2Matrix g) {
    MoebiusConstraint c;
    c.kind = Kind::Link;
    c.i = i;
    c.k = k;
    c.matrix = std::move(g);
    return c;
}

MoebiusConstraint MoebiusConstraint::pin(int i, HPoint tau) {
    MoebiusConstraint c;
    c.kind = Kind::Pin;
    c.i = i;
    c.tau = tau;
    return c;
}

MoebiusVariety MoebiusVariety::build(int n, const std::vector<MoebiusConstraint>& constraints) {
    if (n < 1) throw DomainError("Moebius variety: need at least one coordinate");
    struct Edge {
        int to;
        SL2Matrix g;  // z_to = g z_from
    };
    std::vector<std::vector<Edge>> adj(n);
    std::vector<std::optional<HPoint>> pins(n);
    const auto check_index = [n](int idx) {
        if (idx < 1 || idx > n) throw DomainError("Moebius variety: coordinate index out of range");
        return idx - 1;
    };
    for (const auto& c : constraints) {
        if (c.kind == MoebiusConstraint::Kind::Link) {
            const int i = check_index(c.i), k = check_index(c.k);
            if (i == k) {
                // Self-link: z = g z.  Identity is vacuous; an elliptic g
                // pins the coordinate at its fixed point.
                if (is_pm_identity(*c.matrix)) continue;
                const HPoint fp = elliptic_fixed_point(*c.matrix);
                if (pins[i] && std::abs(pins[i]->z() - fp.z()) > 1e-9)
                    throw InconsistentCycle("conflicting pins on one coordinate");
                pins[i] = fp;
                continue;
            }
            adj[i].push_back({k, *c.matrix});
            adj[k].push_back({i, c.matrix->inverse()});
        } else {
            const int i = check_index(c.i);
            if (pins[i] && std::abs(pins[i]->z() - c.tau->z()) > 1e-9)
                throw InconsistentCycle("conflicting pins on one coordinate");
            pins[i] = *c.tau;
        }
    }

    MoebiusVariety V;
    V.n_ = n;
    V.comp_of_.assign(n, -1);
    V.from_root_.assign(n, SL2Matrix::identity());
    for (int root = 0; root < n; ++root) {
        if (V.comp_of_[root] >= 0) continue;
        const int ci = static_cast<int>(V.components_.size());
        Component comp;
        comp.root = root;
        std::queue<int> bfs;
        bfs.push(root);
        V.comp_of_[root] = ci;
        V.from_root_[root] = SL2Matrix::identity();
        comp.members.push_back(root);
        while (!bfs.empty()) {
            const int at = bfs.front();
            bfs.pop();
            for (const auto& e : adj[at]) {
                const SL2Matrix cand = e.g * V.from_root_[at];
                if (V.comp_of_[e.to] < 0) {
                    V.comp_of_[e.to] = ci;
                    V.from_root_[e.to] = cand;
                    comp.members.push_back(e.to);
                    bfs.push(e.to);
                } else {
                    // Cycle: both expressions of z_to must agree on the
                    // component, so D = existing^{-1} * cand fixes it.
                    const SL2Matrix D = V.from_root_[e.to].inverse() * cand;
                    if (is_pm_identity(D)) continue;
                    const HPoint fp = elliptic_fixed_point(D);
                    if (comp.pin && std::abs(comp.pin->z() - fp.z()) > 1e-9)
                        throw InconsistentCycle("conflicting cycle pins in one component");
                    comp.pin = fp;
                }
            }
        }
        std::sort(comp.members.begin(), comp.members.end());
        // Fold explicit pins into the component (translated to the root).
        for (int mcoord : comp.members) {
            if (!pins[mcoord]) continue;
            const HPoint at_root = moebius_apply(V.from_root_[mcoord].inverse(), *pins[mcoord]);
            if (comp.pin && std::abs(comp.pin->z() - at_root.z()) > 1e-9)
                throw InconsistentCycle("pin conflicts with component structure");
            comp.pin = at_root;
        }
        V.components_.push_back(std::move(comp));
    }
    V.dim_ = 0;
    for (const auto& c : V.components_)
        if (!c.pin) ++V.dim_;
    return V;
}

const SL2Matrix& MoebiusVariety::link_from_root(int coord) const {
    if (coord < 0 || coord >= n_) throw DomainError("Moebius variety: coordinate out of range");
    return from_root_[coord];
}

int MoebiusVariety::root_of(int coord) const {
    if (coord < 0 || coord >= n_) throw DomainError("Moebius variety: coordinate out of range");
    return components_[comp_of_[coord]].root;
}

bool MoebiusVariety::pinned(int coord) const {
    if (coord < 0 || coord >= n_) throw DomainError("Moebius variety: coordinate out of range");
    return components_[comp_of_[coord]].pin.has_value();
}

std::vector<MoebiusConstraint> MoebiusVariety::normalized_constraints() const {
    std::vector<MoebiusConstraint> out;
    for (const auto& comp : components()) {
        if (comp.pin) out.push_back(MoebiusConstraint::pin(comp.root + 1, *comp.pin));
        for (int mcoord : comp.members) {
            if (mcoord == comp.root) continue;
            out.push_back(MoebiusConstraint::link(comp.root + 1, mcoord + 1, from_root_[mcoord]));
        }
    }
    return out;
}

Verdict domain_freeness(const MoebiusVariety& L) {
    const auto& tol = default_tolerances();
    for (const auto& comp : L.components()) {
        if (comp.pin) {
            Verdict v = Verdict::fail("coordinate z" + std::to_string(comp.root + 1) +
                                      " is pinned to a point");
            v.failing_index_set = {comp.root + 1};
            return v;
        }
    }
    bool unknown = false;
    for (const auto& comp : L.components()) {
        for (size_t a = 0; a < comp.members.size(); ++a) {
            for (size_t b = a + 1; b < comp.members.size(); ++b) {
                const int i = comp.members[a], k = comp.members[b];
                const SL2Matrix rel = L.link_from_root(k) * L.link_from_root(i).inverse();
                const auto r = is_rational_up_to_scalar(rel, tol);
                if (r.kind == RationalityResult::Kind::Yes) {
                    Verdict v = Verdict::fail("coordinates z" + std::to_string(i + 1) + " and z" +
                                              std::to_string(k + 1) +
                                              " are related by a rational matrix");
                    v.witness_matrix = r.primitive;
                    v.failing_index_set = {i + 1, k + 1};
                    return v;
                }
                if (r.kind == RationalityResult::Kind::Unknown) unknown = true;
            }
        }
    }
    if (unknown)
        return Verdict::probable("link rationality undecided at the denominator bound",
                                 static_cast<double>(tol.denom_bound));
    return Verdict::pass();
}

Verdict codomain_freeness(const PolySystem& W, int Nmax, int samples, Rng& rng) {
    if (Nmax < 1) throw DomainError("codomain freeness: Nmax must be positive");
    const auto pts = sample_points(W, samples, rng);
    const int n = W.n;
    for (int v = 0; v < n; ++v) {
        double dev = 0;
        for (const auto& pt : pts) dev = std::max(dev, std::abs(pt[v] - pts[0][v]));
        if (dev <= 1e-8 * std::max(1.0, std::abs(pts[0][v]))) {
            Verdict verdict =
                Verdict::fail("coordinate w" + std::to_string(v + 1) + " is constant on W");
            verdict.failing_index_set = {v + 1};
            return verdict;
        }
    }
    for (int v1 = 0; v1 < n; ++v1) {
        for (int v2 = v1 + 1; v2 < n; ++v2) {
            for (int N = 1; N <= Nmax; ++N) {
                const ModularPolynomial& phi = modular_poly(N);
                bool all = true;
                for (const auto& pt : pts) {
                    const double resid = std::abs(phi.eval(pt[v1], pt[v2]));
                    if (resid > 1e-6 * std::max(1.0, phi.scale(pt[v1], pt[v2]))) {
                        all = false;
                        break;
                    }
                }
                if (all) {
                    Verdict verdict = Verdict::fail(
                        "coordinates w" + std::to_string(v1 + 1) + " and w" +
                        std::to_string(v2 + 1) + " satisfy a modular relation of level " +
                        std::to_string(N));
                    verdict.modular_level = N;
                    verdict.failing_index_set = {v1 + 1, v2 + 1};
                    return verdict;
                }
            }
        }
    }
    return Verdict::probable("no constant coordinate or modular relation across samples",
                             static_cast<double>(pts.size()));
}

Verdict broadness(const MoebiusVariety& L, const PolySystem& W, Rng& rng) {
    const int n = L.n();
    if (W.n != n) throw DomainError("broadness: coordinate count mismatch");
    if (n > 16) throw DomainError("broadness: too many coordinates for subset enumeration");

    // dim pi_I(L) is exact: unpinned components meeting I project onto full
    // factors, pinned ones onto points.
    const auto dim_L_proj = [&](unsigned mask) {
        int dim = 0;
        for (const auto& comp : L.components()) {
            if (comp.pin) continue;
            for (int mcoord : comp.members) {
                if (mask & (1u << mcoord)) {
                    ++dim;
                    break;
                }
            }
        }
        return dim;
    };

    // Tangent kernels of W are sampled lazily: subsets that L alone covers
    // never touch them.
    std::vector<std::vector<std::vector<cplx>>> kernels;
    bool sampled = false;
    int nsamples = 0;
    const auto dim_W_proj = [&](unsigned mask, int size) {
        if (!sampled) {
            const auto pts = sample_points(W, 20, rng);
            nsamples = static_cast<int>(pts.size());
            for (const auto& pt : pts)
                kernels.push_back(kernel_basis(W.jacobian_rows(pt), n));
            sampled = true;
        }
        int best = 0;
        for (const auto& ker : kernels) {
            const int cols = static_cast<int>(ker.size());
            if (cols == 0) continue;
            std::vector<std::vector<cplx>> rows(size, std::vector<cplx>(cols));
            int r = 0;
            for (int v = 0; v < n; ++v) {
                if (!(mask & (1u << v))) continue;
                for (int c = 0; c < cols; ++c) rows[r][c] = ker[c][v];
                ++r;
            }
            best = std::max(best, numeric_rank(rows));
        }
        return best;
    };

    std::vector<unsigned> masks;
    for (unsigned m = 1; m < (1u << n); ++m) masks.push_back(m);
    std::stable_sort(masks.begin(), masks.end(), [](unsigned a, unsigned b) {
        const int pa = __builtin_popcount(a), pb = __builtin_popcount(b);
        if (pa != pb) return pa < pb;
        return a < b;
    });

    bool used_samples = false;
    for (unsigned mask : masks) {
        const int size = __builtin_popcount(mask);
        const int dl = dim_L_proj(mask);
        if (dl >= size) continue;
        const int dw = dim_W_proj(mask, size);
        used_samples = true;
        if (dl + dw < size) {
            Verdict v = Verdict::fail("projection to the marked coordinates is too small: dim " +
                                      std::to_string(dl) + " + " + std::to_string(dw) + " < " +
                                      std::to_string(size));
            for (int c = 0; c < n; ++c)
                if (mask & (1u << c)) v.failing_index_set.push_back(c + 1);
            return v;
        }
    }
    if (used_samples)
        return Verdict::probable("projection dimensions of W estimated from samples",
                                 static_cast<double>(nsamples));
    return Verdict::pass();
}

std::vector<std::vector<cplx>> sample_points(const PolySystem& W, int count, Rng& rng) {
    if (count < 1) throw DomainError("sampling: count must be positive");
    std::vector<std::vector<cplx>> out;
    const int budget = 12 * count;
    for (int attempt = 0; attempt < budget && static_cast<int>(out.size()) < count; ++attempt) {
        auto pt = sample_once(W, rng);
        if (pt) out.push_back(std::move(*pt));
    }
    if (static_cast<int>(out.size()) * 2 < count)
        throw SamplingFailed("sampling: found " + std::to_string(out.size()) + " of " +
                             std::to_string(count) + " requested points");
    return out;
}

std::vector<cplx> regular_point_sample(const PolySystem& W, const std::vector<cplx>& avoid,
                                       Rng& rng) {
    const int n = W.n;
    int best_rank = -1;
    std::vector<cplx> best;
    int found = 0;
    for (int attempt = 0; attempt < 100 && found < 12; ++attempt) {
        auto pt = sample_once(W, rng);
        if (!pt) continue;
        bool clear = true;
        for (const cplx& value : *pt) {
            for (const cplx& a : avoid) {
                if (std::abs(value - a) < 1e-3) {
                    clear = false;
                    break;
                }
            }
            if (!clear) break;
        }
        if (!clear) continue;
        ++found;
        const int rank = numeric_rank(W.jacobian_rows(*pt));
        if (rank > best_rank) {
            best_rank = rank;
            best = std::move(*pt);
        }
        if (best_rank == std::min<int>(static_cast<int>(W.polys.size()), n) && found >= 3) break;
    }
    if (best_rank < 0)
        throw NoRegularPoint("no sample point of W clears the avoided values");
    return best;
}

int numeric_dimension(const PolySystem& W, Rng& rng, int samples) {
    const auto pts = sample_points(W, samples, rng);
    std::vector<int> coranks;
    int dim = 0;
    for (const auto& pt : pts) {
        const int corank = W.n - numeric_rank(W.jacobian_rows(pt));
        coranks.push_back(corank);
        dim = std::max(dim, corank);
    }
    int hits = 0;
    for (int c : coranks)
        if (c == dim) ++hits;
    if (hits < std::max<int>(2, static_cast<int>(coranks.size()) / 4))
        throw DimensionSamplingFailed("variety dimension unstable across samples");
    return dim;
}

int numeric_rank(const std::vector<std::vector<cplx>>& rows) {
    if (rows.empty() || rows[0].empty()) return 0;
    const Eigen::MatrixXcd A = to_eigen(rows, static_cast<int>(rows[0].size()));
    const Eigen::JacobiSVD<Eigen::MatrixXcd> svd(A);
    const auto& sing = svd.singularValues();
    if (sing.size() == 0) return 0;
    const double thresh = std::max(1e-10, 1e-8 * sing(0));
    int rank = 0;
    for (int i = 0; i < sing.size(); ++i)
        if (sing(i) > thresh) ++rank;
    return rank;
}

std::vector<std::vector<cplx>> kernel_basis(const std::vector<std::vector<cplx>>& rows,
                                            int ncols) {
    if (rows.empty()) {
        std::vector<std::vector<cplx>> id(ncols, std::vector<cplx>(ncols, cplx(0, 0)));
        for (int i = 0; i < ncols; ++i) id[i][i] = cplx(1, 0);
        return id;
    }
    const Eigen::MatrixXcd A = to_eigen(rows, ncols);
    const Eigen::JacobiSVD<Eigen::MatrixXcd> svd(A, Eigen::ComputeFullV);
    const auto& sing = svd.singularValues();
    const double smax = sing.size() ? sing(0) : 0.0;
    const double thresh = std::max(1e-10, 1e-8 * smax);
    int rank = 0;
    for (int i = 0; i < sing.size(); ++i)
        if (sing(i) > thresh) ++rank;
    std::vector<std::vector<cplx>> kernel;
    for (int c = rank; c < ncols; ++c) {
        std::vector<cplx> v(ncols);
        for (int i = 0; i < ncols; ++i) v[i] = svd.matrixV()(i, c);
        kernel.push_back(std::move(v));
    }
    return kernel;
}

}  // namespace ecw
