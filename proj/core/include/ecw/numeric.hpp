#pragma once

#include <complex>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>

namespace ecw {

using cplx = std::complex<double>;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr cplx kTwoPiI{0.0, 2.0 * kPi};

// Central float tolerance configuration.  Every tolerance-based comparison in
// the library routes through one of these knobs.
struct Tolerances {
    double geometric = 1e-10;       // matrix / lattice / pairing identities
    double reconstruction = 1e-9;   // rational reconstruction acceptance
    double rational_noise = 1e-13;  // below this a float ratio counts as exact
    long denom_bound = 1000000;     // continued-fraction denominator cap
    double det_slack = 1e-12;       // float SL2 determinant tolerance
};

inline const Tolerances& default_tolerances() {
    static const Tolerances t{};
    return t;
}

// Error taxonomy.  Hard contract violations throw; expected negative outcomes
// of searches and predicates are returned as values, not thrown.
struct DomainError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct DegenerateDenominator : DomainError {
    using DomainError::DomainError;
};
struct NonTermination : DomainError {
    using DomainError::DomainError;
};
struct PrecisionUnreachable : DomainError {
    using DomainError::DomainError;
};
struct NoConvergence : DomainError {
    using DomainError::DomainError;
};
struct LevelUnsupported : DomainError {
    using DomainError::DomainError;
};
struct IllConditioned : DomainError {
    using DomainError::DomainError;
};
struct NearPole : DomainError {
    using DomainError::DomainError;
};
struct InconsistentCycle : DomainError {
    using DomainError::DomainError;
};
struct SamplingFailed : DomainError {
    using DomainError::DomainError;
};
struct NoRegularPoint : DomainError {
    using DomainError::DomainError;
};
struct DimensionSamplingFailed : DomainError {
    using DomainError::DomainError;
};
struct ParseError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Seeded RNG used everywhere randomness is needed; never std::random_device.
using Rng = std::mt19937_64;

inline double uniform(Rng& rng, double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(rng);
}

inline cplx unit_disk_sample(Rng& rng) {
    for (;;) {
        double x = uniform(rng, -1.0, 1.0), y = uniform(rng, -1.0, 1.0);
        if (x * x + y * y <= 1.0) return {x, y};
    }
}

}  // namespace ecw
