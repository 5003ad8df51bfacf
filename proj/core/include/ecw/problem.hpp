#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ecw/exact.hpp"
#include "ecw/polynomial.hpp"
#include "ecw/searchtypes.hpp"
#include "ecw/torus.hpp"
#include "ecw/varieties.hpp"

namespace ecw {

// On-disk problem description (JSON, schema version "1").  j / jprime modes
// carry a Moebius constraint list over z1..zn: {"type":"link","i":I,"k":K,
// "matrix":M} encodes z_K = M z_I, {"type":"pin","i":I,"tau":[re,im]}
// encodes z_I = tau.  torus mode carries a row basis over C^g (entries as
// floats or exact tokens like "sqrt(2)", "1/2+sqrt(5)/3") plus the model
// parameter tau.  W is a list of polynomial strings in w1..w<ambient>;
// torus problems read (x_i, y_i) as (w_{2i-1}, w_{2i}).
struct ProblemFile {
    std::string mode;  // "j", "jprime", "torus"
    SearchConfig config;
    std::vector<std::string> w_exprs;

    // j / jprime payload
    int n = 0;
    std::vector<MoebiusConstraint> constraints;

    // torus payload
    int g = 0;
    std::vector<std::vector<cplx>> basis;
    std::optional<std::vector<std::vector<ExactComplex>>> basis_exact;
    std::optional<std::vector<cplx>> translate;
    cplx tau{0.0, 1.0};
    std::optional<ExactComplex> tau_exact;

    static ProblemFile parse(const std::string& text);  // throws ParseError
    static ProblemFile load(const std::string& path);
    std::string dump(int indent = 2) const;

    int ambient() const { return mode == "torus" ? 2 * g : n; }
    MoebiusVariety moebius() const;   // j / jprime modes
    PolySystem system() const;        // W over the ambient variables
    LinearSubspace subspace() const;  // torus mode
    EllipticModel model() const;      // torus mode
};

// Self-contained witness report: embeds the problem (with the seed actually
// used), so re-running it reproduces the witness.  Serialization is
// deterministic; `timestamp` is the only field excluded from comparisons.
// Floats are written as shortest round-trip decimals, so parse(dump(r))
// reproduces r losslessly.
struct WitnessReport {
    std::string tool_version = "0.1.0";
    std::string timestamp;  // ISO 8601 UTC, informational only
    ProblemFile problem;
    Witness witness;

    std::string dump(int indent = 2) const;
    static WitnessReport parse(const std::string& text);
};

// Scan tables as CSV; the header line is mandatory.
std::string heights_csv(const std::vector<std::pair<int, double>>& trace);  // height,best_distance
std::string newton_csv(const std::vector<std::pair<int, double>>& trace);   // step,abs_residual

// Locale-independent decimal formatting: shortest string that parses back to
// exactly x, and the fixed 17-significant-digit form used by eval output.
std::string format_double(double x);
std::string format_double17(double x);

}  // namespace ecw
