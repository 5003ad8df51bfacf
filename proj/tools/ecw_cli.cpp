// Command-line front end: eval / check / witness over JSON problem files.
// Exit codes: 0 success, 1 predicate fail, 2 parse error, 3 precision
// unreachable, 4 search exhausted (report still written).

#include <ctime>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "ecw/modular.hpp"
#include "ecw/problem.hpp"
#include "ecw/search.hpp"
#include "ecw/torus.hpp"
#include "ecw/varieties.hpp"

namespace {

constexpr int kOk = 0;
constexpr int kPredicateFail = 1;
constexpr int kParse = 2;
constexpr int kPrecision = 3;
constexpr int kExhausted = 4;

std::string now_iso8601() {
    const std::time_t t = std::time(nullptr);
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%04d-%02d-%02dT%02d:%02d:%02dZ", tm.tm_year + 1900,
                  tm.tm_mon + 1, tm.tm_mday, tm.tm_hour, tm.tm_min, tm.tm_sec);
    return buf;
}

void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ecw::DomainError("cannot write: " + path);
    out << text;
}

// Report sink: --out path, or stdout when no path was given.
void emit_report(const ecw::WitnessReport& r, const std::string& out_path) {
    const std::string text = r.dump(2) + "\n";
    if (out_path.empty())
        std::cout << text;
    else
        write_text(out_path, text);
}

std::string scan_stem(const std::string& out_path) {
    const std::string suffix = ".json";
    if (out_path.size() > suffix.size() &&
        out_path.compare(out_path.size() - suffix.size(), suffix.size(), suffix) == 0)
        return out_path.substr(0, out_path.size() - suffix.size());
    return out_path;
}

void emit_scans(const ecw::Witness& w, const std::string& out_path) {
    const std::string stem = scan_stem(out_path);
    write_text(stem + ".heights.csv", ecw::heights_csv(w.height_trace));
    write_text(stem + ".newton.csv", ecw::newton_csv(w.newton_trace));
}

std::string eval_line(const std::string& name, const ecw::EvalResult& r) {
    return name + " " + ecw::format_double17(r.value.real()) + " " +
           ecw::format_double17(r.value.imag()) + " " + ecw::format_double(r.error_bound) + "\n";
}

int cmd_eval(double re, double im, double prec, bool derivs) {
    if (!(im > 0)) {
        std::cerr << "eval: z must lie in the upper half plane\n";
        return kParse;
    }
    const ecw::HPoint z(ecw::cplx{re, im});
    std::string out;
    if (derivs) {
        const auto [j0, j1, j2] = ecw::j_derivatives(z, prec);
        out = eval_line("j", j0) + eval_line("jprime", j1) + eval_line("jsecond", j2);
    } else {
        out = eval_line("j", ecw::j_eval(z, prec));
    }
    std::cout << out;
    return kOk;
}

ecw::PairVerdict run_checks(const ecw::ProblemFile& p) {
    ecw::PairVerdict v;
    const ecw::PolySystem W = p.system();
    if (p.mode == "torus") {
        const ecw::LinearSubspace L = p.subspace();
        const ecw::EllipticModel model = p.model();
        const ecw::Lattice lam = ecw::Lattice::power_of_tau(model.tau, p.g, model.tau_exact);
        const ecw::DensityResult dens = ecw::hyperplane_density_test(L, lam);
        if (dens.kind == ecw::DensityResult::Kind::Contained) {
            std::ostringstream os;
            os << "exp(L) lies in a proper closed subtorus; dual coefficients [";
            for (size_t i = 0; i < dens.coeffs.size(); ++i)
                os << (i ? "," : "") << dens.coeffs[i];
            os << "]";
            v.density = ecw::Verdict::fail(os.str());
        } else if (dens.kind == ecw::DensityResult::Kind::Dense) {
            v.density = ecw::Verdict::pass();
        } else {
            v.density = ecw::Verdict::probable("no dual hyperplane found by enumeration",
                                               dens.bound);
        }
        ecw::Rng rng(p.config.seed);
        const ecw::RotundityResult rot = ecw::rotundity_check(L, W, model, 8, rng);
        v.rotund = rot.rotund
                       ? ecw::Verdict::pass()
                       : ecw::Verdict::fail("rotundity fails at quotient dimension k=" +
                                            std::to_string(rot.k));
        v.free_domain.reason = "not applicable in torus mode";
        v.free_codomain.reason = "not applicable in torus mode";
        v.broad.reason = "not applicable in torus mode";
    } else {
        const ecw::MoebiusVariety L = p.moebius();
        ecw::Rng rng(p.config.seed);
        v.free_domain = ecw::domain_freeness(L);
        if (p.mode == "j")
            v.free_codomain = ecw::codomain_freeness(W, 5, 20, rng);
        else
            v.free_codomain = ecw::Verdict::probable("not checked in first-jet mode", 0);
        v.broad = ecw::broadness(L, W, rng);
    }
    return v;
}

ecw::WitnessReport verdict_report(const ecw::ProblemFile& p, const ecw::PairVerdict& v) {
    ecw::WitnessReport r;
    r.timestamp = now_iso8601();
    r.problem = p;
    r.witness.mode = p.mode;
    r.witness.verdicts = v;
    r.witness.budget.tolerance = p.config.newton_tol;
    return r;
}

void print_failures(const ecw::PairVerdict& v) {
    const auto one = [](const char* name, const ecw::Verdict& verdict) {
        if (!verdict.ok()) std::cerr << name << ": fail: " << verdict.reason << "\n";
    };
    one("free_domain", v.free_domain);
    one("free_codomain", v.free_codomain);
    one("broad", v.broad);
    if (v.density) one("density", *v.density);
    if (v.rotund) one("rotund", *v.rotund);
}

int cmd_check(const std::string& in_path, const std::string& out_path,
              std::optional<unsigned long long> seed) {
    ecw::ProblemFile p = ecw::ProblemFile::load(in_path);
    if (seed) p.config.seed = *seed;
    const ecw::PairVerdict v = run_checks(p);
    emit_report(verdict_report(p, v), out_path);
    if (v.all_ok()) return kOk;
    print_failures(v);
    return kPredicateFail;
}

ecw::Witness dispatch_search(const ecw::ProblemFile& p) {
    const ecw::PolySystem W = p.system();
    if (p.mode == "torus")
        return ecw::torus_witness_search(p.subspace(), W, p.model(), p.config);
    const ecw::MoebiusVariety L = p.moebius();
    if (p.mode == "jprime") return ecw::blur_t1j_witness(L, W, p.config);
    if (p.n == 1 && L.components().size() == 1 && !L.pinned(0))
        return ecw::j_witness_1d(L, W, p.config);
    return ecw::j_witness(L, W, p.config);
}

int cmd_witness(const std::string& in_path, const std::string& out_path,
                std::optional<unsigned long long> seed, bool force, bool scan) {
    ecw::ProblemFile p = ecw::ProblemFile::load(in_path);
    if (seed) p.config.seed = *seed;
    p.config.force = force;
    if (scan && out_path.empty()) {
        std::cerr << "witness: --scan needs --out to name the CSV files\n";
        return kParse;
    }

    const ecw::PairVerdict checks = run_checks(p);
    // Mirror the search's own gates: a codomain failure caused by a constant
    // coordinate (no modular relation found) is handled inside the search by
    // pinning that coordinate, so it does not block the run.
    const bool codomain_blocks =
        !checks.free_codomain.ok() && checks.free_codomain.modular_level.has_value();
    const bool blocked = !checks.free_domain.ok() || codomain_blocks || !checks.broad.ok() ||
                         (checks.density && !checks.density->ok()) ||
                         (checks.rotund && !checks.rotund->ok());
    if (blocked && !force) {
        emit_report(verdict_report(p, checks), out_path);
        print_failures(checks);
        std::cerr << "witness: predicate checks fail (rerun with --force to search anyway)\n";
        return kPredicateFail;
    }

    try {
        const ecw::Witness w = dispatch_search(p);
        ecw::WitnessReport r;
        r.timestamp = now_iso8601();
        r.problem = p;
        r.witness = w;
        emit_report(r, out_path);
        if (scan) emit_scans(w, out_path);
        return kOk;
    } catch (const ecw::SearchExhausted& e) {
        ecw::WitnessReport r = verdict_report(p, checks);
        r.witness.budget = e.stats;
        emit_report(r, out_path);
        if (scan) emit_scans(r.witness, out_path);
        std::cerr << "witness: search exhausted: " << e.what() << "\n";
        return kExhausted;
    } catch (const ecw::NoConvergence& e) {
        ecw::WitnessReport r = verdict_report(p, checks);
        emit_report(r, out_path);
        if (scan) emit_scans(r.witness, out_path);
        std::cerr << "witness: search exhausted: " << e.what() << "\n";
        return kExhausted;
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"witness search for intersections of modular/exponential images with varieties"};
    app.require_subcommand(1);

    auto* eval = app.add_subcommand("eval", "evaluate j at a point of the upper half plane");
    std::vector<double> zz;
    double prec = 1e-12;
    bool derivs = false;
    eval->add_option("--z", zz, "point RE IM, Im > 0")->expected(2)->required();
    eval->add_option("--prec", prec, "target precision (default 1e-12)");
    eval->add_flag("--derivs", derivs, "also print j' and j''");

    std::string in_path, out_path;
    std::optional<unsigned long long> seed;
    int threads = 1;
    bool force = false, scan = false;

    auto* check = app.add_subcommand("check", "run the predicate checks for a problem file");
    check->add_option("--in", in_path, "problem file (JSON)")->required();
    check->add_option("--out", out_path, "report path (stdout when omitted)");
    check->add_option("--seed", seed, "override the problem seed");
    check->add_option("--threads", threads, "reserved; the search is single-threaded")
        ->check(CLI::PositiveNumber);

    auto* witness = app.add_subcommand("witness", "search for a witness point");
    witness->add_option("--in", in_path, "problem file (JSON)")->required();
    witness->add_option("--out", out_path, "report path (stdout when omitted)");
    witness->add_option("--seed", seed, "override the problem seed");
    witness->add_option("--threads", threads, "reserved; the search is single-threaded")
        ->check(CLI::PositiveNumber);
    witness->add_flag("--force", force, "search even when the predicate checks fail");
    witness->add_flag("--scan", scan, "also write height/Newton trace CSVs next to --out");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kParse;
    }

    try {
        if (eval->parsed()) return cmd_eval(zz[0], zz[1], prec, derivs);
        if (check->parsed()) return cmd_check(in_path, out_path, seed);
        return cmd_witness(in_path, out_path, seed, force, scan);
    } catch (const ecw::PrecisionUnreachable& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kPrecision;
    } catch (const ecw::SearchExhausted& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExhausted;
    } catch (const ecw::PredicateFailed& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kPredicateFail;
    } catch (const ecw::PreconditionFailed& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kPredicateFail;
    } catch (const ecw::ClosedSubtorus& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kPredicateFail;
    } catch (const ecw::ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kParse;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kParse;
    }
}
