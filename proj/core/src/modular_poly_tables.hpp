// Coefficient tables for the classical modular polynomials Phi_N(X, Y),
// N = 1..5, stored sparsely as (xpow, ypow, value) triples.  The exact
// integer is kept as a decimal string because the largest coefficients
// (level 5) exceed the 53-bit mantissa.
#pragma once

#include <cstddef>

namespace ecw::detail {

struct ModularPolyEntry {
    int xpow;
    int ypow;
    double value;
    const char* exact;
};

extern const ModularPolyEntry kPhi1[];
extern const std::size_t kPhi1Count;
extern const int kPhi1Degree;

extern const ModularPolyEntry kPhi2[];
extern const std::size_t kPhi2Count;
extern const int kPhi2Degree;

extern const ModularPolyEntry kPhi3[];
extern const std::size_t kPhi3Count;
extern const int kPhi3Degree;

extern const ModularPolyEntry kPhi4[];
extern const std::size_t kPhi4Count;
extern const int kPhi4Degree;

extern const ModularPolyEntry kPhi5[];
extern const std::size_t kPhi5Count;
extern const int kPhi5Degree;

}  // namespace ecw::detail
