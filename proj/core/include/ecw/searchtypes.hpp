#pragma once

#include <array>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ecw/halfplane.hpp"
#include "ecw/numeric.hpp"

namespace ecw {

// Knobs shared by all witness searches.  The schedule bounds coset / lattice
// enumeration heights; every random draw goes through the seed.
struct SearchConfig {
    std::vector<int> height_schedule{5, 10, 20, 40};
    double newton_tol = 1e-10;
    int max_newton_steps = 50;
    int retries = 25;
    unsigned long long seed = 1;
    // Skip the predicate gates and search anyway (the verdicts stay honest);
    // set by the CLI --force flag, never read from problem files.
    bool force = false;

    void validate() const {
        if (height_schedule.empty()) throw DomainError("SearchConfig: empty height schedule");
        int prev = 0;
        for (int h : height_schedule) {
            if (h <= prev) throw DomainError("SearchConfig: schedule must be strictly increasing");
            prev = h;
        }
        if (!(newton_tol > 0)) throw DomainError("SearchConfig: newton_tol must be positive");
        if (max_newton_steps <= 0 || retries < 0) throw DomainError("SearchConfig: bad budget");
    }
};

// Kantorovich data recorded at the certificate base point; the checked
// inequality is h = eta * lipschitz / deriv <= 1/2.
struct KantorovichCertificate {
    std::vector<cplx> base;  // certificate base point (length 1 for scalar problems)
    double eta = 0;          // norm of the first Newton step at base
    double deriv = 0;        // |dF| (smallest singular value for systems)
    double lipschitz = 0;    // sampled Lipschitz bound for dF on the disk
    double radius = 0;       // disk radius of the Lipschitz estimate
    double h = std::numeric_limits<double>::infinity();
    bool holds() const { return h <= 0.5; }
};

struct NewtonResult {
    bool success = false;
    cplx root{};
    double residual = std::numeric_limits<double>::infinity();
    KantorovichCertificate certificate;
    std::string failure;  // which Kantorovich quantity failed, when !success
    std::vector<std::pair<int, double>> trace;  // (step, |F|) per iteration
};

struct BudgetStats {
    long newton_steps = 0;
    long coset_candidates = 0;
    int resamples = 0;
    int max_height_used = 0;
    double tolerance = 0;
    double best_residual = std::numeric_limits<double>::infinity();
};

// Three-valued predicate outcome with its evidence.
struct Verdict {
    enum class Kind { Pass, Probable, Fail } kind = Kind::Pass;
    std::string reason;
    double bound = 0;  // sampling count / reconstruction bound backing Probable
    std::optional<int> modular_level;               // codomain Fail evidence
    std::optional<std::array<long, 4>> witness_matrix;  // domain Fail evidence
    std::vector<int> failing_index_set;             // broadness Fail evidence

    bool ok() const { return kind != Kind::Fail; }
    static Verdict pass() { return {}; }
    static Verdict probable(std::string why, double b) {
        Verdict v;
        v.kind = Kind::Probable;
        v.reason = std::move(why);
        v.bound = b;
        return v;
    }
    static Verdict fail(std::string why) {
        Verdict v;
        v.kind = Kind::Fail;
        v.reason = std::move(why);
        return v;
    }
};

struct PairVerdict {
    Verdict free_domain, free_codomain, broad;
    std::optional<Verdict> density;   // torus mode
    std::optional<Verdict> rotund;    // torus mode
    bool all_ok() const {
        return free_domain.ok() && free_codomain.ok() && broad.ok() &&
               (!density || density->ok()) && (!rotund || rotund->ok());
    }
};

// Integer factorization gamma1 * g * gamma of a stored coset element.
struct CosetFactors {
    std::array<long, 4> gamma1{1, 0, 0, 1};
    std::array<long, 4> gamma{1, 0, 0, 1};
};

struct Witness {
    std::string mode;  // "j", "jprime", "torus"
    std::optional<HPoint> z;            // base point (j / jprime modes)
    std::vector<cplx> bases;            // per-coordinate base parameter (product blocks)
    std::vector<SL2Matrix> matrices;    // coset element per coordinate
    std::vector<CosetFactors> factors;  // integer factors per coordinate
    std::vector<cplx> point;            // image point in C^n
    std::vector<double> residuals;      // per-polynomial absolute residuals
    std::vector<double> eval_error_bounds;  // per-coordinate evaluation bounds
    std::vector<KantorovichCertificate> certificates;
    PairVerdict verdicts;
    BudgetStats budget;
    // scan traces: (height, best coset distance) and (step, |F|) of the
    // successful Newton run
    std::vector<std::pair<int, double>> height_trace;
    std::vector<std::pair<int, double>> newton_trace;
    // torus mode payload:
    std::vector<cplx> torus_param;      // chart parameter t
    std::vector<cplx> torus_point_u;    // point of L in C^g
    // jprime mode payload: blurring matrix pair (gamma1, gamma)
    std::vector<std::array<long, 4>> blur;
};

// Search budget ran out; carries the best attempt for reporting.
struct SearchExhausted : DomainError {
    SearchExhausted(const std::string& what, BudgetStats stats_)
        : DomainError(what), stats(std::move(stats_)) {}
    BudgetStats stats;
};
struct PreconditionFailed : DomainError {
    using DomainError::DomainError;
};
struct PredicateFailed : DomainError {
    using DomainError::DomainError;
};
struct DerivativeTooSmall : DomainError {
    using DomainError::DomainError;
};
struct LeftDomain : DomainError {
    using DomainError::DomainError;
};
struct LevelSetEmpty : DomainError {
    using DomainError::DomainError;
};
struct ClosedSubtorus : DomainError {
    using DomainError::DomainError;
};

}  // namespace ecw
