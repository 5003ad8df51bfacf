#include "ecw/problem.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>
#include <utility>

#include "json.hpp"

namespace ecw {

using ojson = nlohmann::ordered_json;

namespace {

// ---- scalar encodings ------------------------------------------------------
// QuadScalar: {"rat": "p/q", "irr": "r/s", "disc": D} (exact decimal-free
// round trip).  Problem files may instead use human tokens ("sqrt(2)",
// "1/2+sqrt(5)/3") or integers.

ojson qs_to_json(const QuadScalar& q) {
    ojson o;
    o["rat"] = q.rat().get_str();
    o["irr"] = q.irr().get_str();
    o["disc"] = q.disc();
    return o;
}

QuadScalar qs_from_json(const ojson& o) {
    mpq_class a(o.at("rat").get<std::string>());
    mpq_class b(o.at("irr").get<std::string>());
    a.canonicalize();
    b.canonicalize();
    return QuadScalar(a, b, o.at("disc").get<long>());
}

struct RealPart {
    double v = 0;
    std::optional<QuadScalar> exact;
};

RealPart real_part(const ojson& e) {
    if (e.is_string()) {
        const QuadScalar q = parse_exact_scalar(e.get<std::string>());
        return {q.to_double(), q};
    }
    if (e.is_number_integer()) {
        const QuadScalar q(e.get<long>());
        return {q.to_double(), q};
    }
    if (e.is_number()) return {e.get<double>(), std::nullopt};
    if (e.is_object() && e.contains("rat")) {
        const QuadScalar q = qs_from_json(e);
        return {q.to_double(), q};
    }
    throw ParseError("expected a real scalar (number, token, or rat/irr/disc object)");
}

struct ComplexEntry {
    cplx v{0, 0};
    std::optional<ExactComplex> exact;
};

ComplexEntry complex_entry(const ojson& e) {
    if (e.is_object() && e.contains("re")) {
        const RealPart re = real_part(e.at("re"));
        const RealPart im = e.contains("im") ? real_part(e.at("im")) : RealPart{0.0, QuadScalar(0)};
        ComplexEntry out;
        out.v = {re.v, im.v};
        if (re.exact && im.exact) out.exact = ExactComplex(*re.exact, *im.exact);
        return out;
    }
    if (e.is_array()) {
        if (e.size() != 2) throw ParseError("complex entry arrays must be [re, im]");
        const RealPart re = real_part(e[0]);
        const RealPart im = real_part(e[1]);
        ComplexEntry out;
        out.v = {re.v, im.v};
        if (re.exact && im.exact) out.exact = ExactComplex(*re.exact, *im.exact);
        return out;
    }
    const RealPart re = real_part(e);
    ComplexEntry out;
    out.v = {re.v, 0.0};
    if (re.exact) out.exact = ExactComplex(*re.exact);
    return out;
}

ojson cplx_to_json(cplx z) { return ojson::array({z.real(), z.imag()}); }

cplx cplx_from_json(const ojson& e) {
    if (!e.is_array() || e.size() != 2) throw ParseError("expected [re, im]");
    return {e[0].get<double>(), e[1].get<double>()};
}

ojson exact_complex_to_json(const ExactComplex& z) {
    ojson o;
    o["re"] = qs_to_json(z.re);
    o["im"] = qs_to_json(z.im);
    return o;
}

// ---- matrices --------------------------------------------------------------

ojson sl2_to_json(const SL2Matrix& m) {
    ojson o;
    if (m.is_exact()) {
        ojson arr = ojson::array();
        for (const QuadScalar& q : m.exact_entries()) arr.push_back(qs_to_json(q));
        o["exact"] = std::move(arr);
    } else {
        const auto& f = m.entries();
        o["float"] = ojson::array({f[0], f[1], f[2], f[3]});
    }
    return o;
}

SL2Matrix sl2_from_json_inner(const ojson& o) {
    if (o.is_object() && o.contains("exact")) {
        const ojson& arr = o.at("exact");
        if (!arr.is_array() || arr.size() != 4) throw ParseError("matrix needs 4 entries");
        QuadScalar e[4] = {QuadScalar(0), QuadScalar(0), QuadScalar(0), QuadScalar(0)};
        for (int k = 0; k < 4; ++k) {
            const RealPart p = real_part(arr[k]);
            if (!p.exact) throw ParseError("exact matrix entry is not exact");
            e[k] = *p.exact;
        }
        return SL2Matrix::exact(e[0], e[1], e[2], e[3]);
    }
    if (o.is_object() && o.contains("float")) {
        const ojson& arr = o.at("float");
        if (!arr.is_array() || arr.size() != 4) throw ParseError("matrix needs 4 entries");
        return SL2Matrix::floating(arr[0].get<double>(), arr[1].get<double>(),
                                   arr[2].get<double>(), arr[3].get<double>());
    }
    if (o.is_array()) {
        if (o.size() != 4) throw ParseError("matrix needs 4 entries");
        RealPart p[4];
        bool all_exact = true;
        for (int k = 0; k < 4; ++k) {
            p[k] = real_part(o[k]);
            all_exact = all_exact && p[k].exact.has_value();
        }
        if (all_exact) return SL2Matrix::exact(*p[0].exact, *p[1].exact, *p[2].exact, *p[3].exact);
        return SL2Matrix::floating(p[0].v, p[1].v, p[2].v, p[3].v);
    }
    throw ParseError("expected a 2x2 matrix (entry array or exact/float object)");
}

SL2Matrix sl2_from_json(const ojson& o) {
    try {
        return sl2_from_json_inner(o);
    } catch (const ParseError&) {
        throw;
    } catch (const DomainError& e) {
        // Determinant and domain violations in a matrix literal are parse
        // failures of the problem file.
        throw ParseError(std::string("matrix: ") + e.what());
    }
}

ojson long4_to_json(const std::array<long, 4>& a) {
    return ojson::array({a[0], a[1], a[2], a[3]});
}

std::array<long, 4> long4_from_json(const ojson& e) {
    if (!e.is_array() || e.size() != 4) throw ParseError("expected 4 integers");
    return {e[0].get<long>(), e[1].get<long>(), e[2].get<long>(), e[3].get<long>()};
}

// ---- config ----------------------------------------------------------------

ojson config_to_json(const SearchConfig& c) {
    ojson o;
    o["height_schedule"] = c.height_schedule;
    o["newton_tol"] = c.newton_tol;
    o["max_newton_steps"] = c.max_newton_steps;
    o["retries"] = c.retries;
    o["seed"] = c.seed;
    return o;
}

SearchConfig config_from_json(const ojson& o) {
    SearchConfig c;
    if (o.contains("height_schedule"))
        c.height_schedule = o.at("height_schedule").get<std::vector<int>>();
    if (o.contains("newton_tol")) c.newton_tol = o.at("newton_tol").get<double>();
    if (o.contains("max_newton_steps"))
        c.max_newton_steps = o.at("max_newton_steps").get<int>();
    if (o.contains("retries")) c.retries = o.at("retries").get<int>();
    if (o.contains("seed")) c.seed = o.at("seed").get<unsigned long long>();
    try {
        c.validate();
    } catch (const DomainError& e) {
        throw ParseError(std::string("config: ") + e.what());
    }
    return c;
}

// ---- constraints -----------------------------------------------------------

ojson constraint_to_json(const MoebiusConstraint& c) {
    ojson o;
    if (c.kind == MoebiusConstraint::Kind::Link) {
        o["type"] = "link";
        o["i"] = c.i;
        o["k"] = c.k;
        o["matrix"] = sl2_to_json(*c.matrix);
    } else {
        o["type"] = "pin";
        o["i"] = c.i;
        o["tau"] = cplx_to_json(c.tau->z());
    }
    return o;
}

MoebiusConstraint constraint_from_json(const ojson& o) {
    const std::string type = o.at("type").get<std::string>();
    if (type == "link")
        return MoebiusConstraint::link(o.at("i").get<int>(), o.at("k").get<int>(),
                                       sl2_from_json(o.at("matrix")));
    if (type == "pin") {
        const cplx t = cplx_from_json(o.at("tau"));
        if (!(t.imag() > 0)) throw ParseError("pin value must lie in the upper half plane");
        return MoebiusConstraint::pin(o.at("i").get<int>(), HPoint(t));
    }
    throw ParseError("constraint type must be \"link\" or \"pin\"");
}

// ---- problem ---------------------------------------------------------------

ojson problem_to_json(const ProblemFile& p) {
    ojson o;
    o["schema"] = "1";
    o["mode"] = p.mode;
    ojson L;
    if (p.mode == "torus") {
        L["g"] = p.g;
        ojson rows = ojson::array();
        for (size_t r = 0; r < p.basis.size(); ++r) {
            ojson row = ojson::array();
            for (size_t i = 0; i < p.basis[r].size(); ++i) {
                if (p.basis_exact)
                    row.push_back(exact_complex_to_json((*p.basis_exact)[r][i]));
                else
                    row.push_back(cplx_to_json(p.basis[r][i]));
            }
            rows.push_back(std::move(row));
        }
        L["basis"] = std::move(rows);
        if (p.translate) {
            ojson tr = ojson::array();
            for (cplx t : *p.translate) tr.push_back(cplx_to_json(t));
            L["translate"] = std::move(tr);
        }
    } else {
        L["n"] = p.n;
        ojson cs = ojson::array();
        for (const auto& c : p.constraints) cs.push_back(constraint_to_json(c));
        L["constraints"] = std::move(cs);
    }
    o["L"] = std::move(L);
    if (p.mode == "torus") {
        ojson model;
        if (p.tau_exact)
            model["tau"] = exact_complex_to_json(*p.tau_exact);
        else
            model["tau"] = cplx_to_json(p.tau);
        o["model"] = std::move(model);
    }
    o["W"] = p.w_exprs;
    o["config"] = config_to_json(p.config);
    return o;
}

ProblemFile problem_from_json(const ojson& o) {
    ProblemFile p;
    if (o.value("schema", std::string()) != "1")
        throw ParseError("problem file: unsupported schema (want \"1\")");
    p.mode = o.at("mode").get<std::string>();
    if (p.mode != "j" && p.mode != "jprime" && p.mode != "torus")
        throw ParseError("mode must be one of \"j\", \"jprime\", \"torus\"");
    const ojson& L = o.at("L");
    if (p.mode == "torus") {
        p.g = L.at("g").get<int>();
        if (p.g < 1) throw ParseError("torus problems need g >= 1");
        const ojson& rows = L.at("basis");
        if (!rows.is_array() || rows.empty()) throw ParseError("basis must be a nonempty array");
        bool all_exact = true;
        std::vector<std::vector<ExactComplex>> ex;
        for (const ojson& row : rows) {
            if (!row.is_array() || static_cast<int>(row.size()) != p.g)
                throw ParseError("every basis row needs g entries");
            std::vector<cplx> frow;
            std::vector<ExactComplex> erow;
            for (const ojson& e : row) {
                const ComplexEntry ce = complex_entry(e);
                frow.push_back(ce.v);
                if (ce.exact)
                    erow.push_back(*ce.exact);
                else
                    all_exact = false;
            }
            p.basis.push_back(std::move(frow));
            ex.push_back(std::move(erow));
        }
        if (all_exact) p.basis_exact = std::move(ex);
        if (L.contains("translate")) {
            std::vector<cplx> tr;
            for (const ojson& e : L.at("translate")) tr.push_back(complex_entry(e).v);
            if (static_cast<int>(tr.size()) != p.g)
                throw ParseError("translate needs g entries");
            p.translate = std::move(tr);
        }
        const ojson& model = o.at("model");
        const ComplexEntry te = complex_entry(model.at("tau"));
        if (!(te.v.imag() > 0)) throw ParseError("tau must lie in the upper half plane");
        p.tau = te.v;
        p.tau_exact = te.exact;
    } else {
        p.n = L.at("n").get<int>();
        if (p.n < 1) throw ParseError("problems need n >= 1");
        if (L.contains("constraints"))
            for (const ojson& c : L.at("constraints"))
                p.constraints.push_back(constraint_from_json(c));
    }
    const ojson& W = o.at("W");
    if (!W.is_array() || W.empty()) throw ParseError("W must be a nonempty array of polynomials");
    for (const ojson& e : W) p.w_exprs.push_back(e.get<std::string>());
    if (o.contains("config")) p.config = config_from_json(o.at("config"));
    return p;
}

// ---- witness ---------------------------------------------------------------

ojson cert_to_json(const KantorovichCertificate& c) {
    ojson o;
    ojson base = ojson::array();
    for (cplx b : c.base) base.push_back(cplx_to_json(b));
    o["base"] = std::move(base);
    o["eta"] = c.eta;
    o["deriv"] = c.deriv;
    o["lipschitz"] = c.lipschitz;
    o["radius"] = c.radius;
    o["h"] = c.h;
    return o;
}

KantorovichCertificate cert_from_json(const ojson& o) {
    KantorovichCertificate c;
    for (const ojson& b : o.at("base")) c.base.push_back(cplx_from_json(b));
    c.eta = o.at("eta").get<double>();
    c.deriv = o.at("deriv").get<double>();
    c.lipschitz = o.at("lipschitz").get<double>();
    c.radius = o.at("radius").get<double>();
    c.h = o.at("h").get<double>();
    return c;
}

ojson verdict_to_json(const Verdict& v) {
    ojson o;
    switch (v.kind) {
        case Verdict::Kind::Pass: o["kind"] = "pass"; break;
        case Verdict::Kind::Probable: o["kind"] = "probable"; break;
        case Verdict::Kind::Fail: o["kind"] = "fail"; break;
    }
    o["reason"] = v.reason;
    o["bound"] = v.bound;
    if (v.modular_level) o["modular_level"] = *v.modular_level;
    if (v.witness_matrix) o["witness_matrix"] = long4_to_json(*v.witness_matrix);
    if (!v.failing_index_set.empty()) o["failing_index_set"] = v.failing_index_set;
    return o;
}

Verdict verdict_from_json(const ojson& o) {
    Verdict v;
    const std::string kind = o.at("kind").get<std::string>();
    if (kind == "pass")
        v.kind = Verdict::Kind::Pass;
    else if (kind == "probable")
        v.kind = Verdict::Kind::Probable;
    else if (kind == "fail")
        v.kind = Verdict::Kind::Fail;
    else
        throw ParseError("verdict kind must be pass/probable/fail");
    v.reason = o.value("reason", std::string());
    v.bound = o.value("bound", 0.0);
    if (o.contains("modular_level")) v.modular_level = o.at("modular_level").get<int>();
    if (o.contains("witness_matrix")) v.witness_matrix = long4_from_json(o.at("witness_matrix"));
    if (o.contains("failing_index_set"))
        v.failing_index_set = o.at("failing_index_set").get<std::vector<int>>();
    return v;
}

ojson verdicts_to_json(const PairVerdict& v) {
    ojson o;
    o["free_domain"] = verdict_to_json(v.free_domain);
    o["free_codomain"] = verdict_to_json(v.free_codomain);
    o["broad"] = verdict_to_json(v.broad);
    if (v.density) o["density"] = verdict_to_json(*v.density);
    if (v.rotund) o["rotund"] = verdict_to_json(*v.rotund);
    return o;
}

PairVerdict verdicts_from_json(const ojson& o) {
    PairVerdict v;
    v.free_domain = verdict_from_json(o.at("free_domain"));
    v.free_codomain = verdict_from_json(o.at("free_codomain"));
    v.broad = verdict_from_json(o.at("broad"));
    if (o.contains("density")) v.density = verdict_from_json(o.at("density"));
    if (o.contains("rotund")) v.rotund = verdict_from_json(o.at("rotund"));
    return v;
}

ojson budget_to_json(const BudgetStats& b) {
    ojson o;
    o["newton_steps"] = b.newton_steps;
    o["coset_candidates"] = b.coset_candidates;
    o["resamples"] = b.resamples;
    o["max_height_used"] = b.max_height_used;
    o["tolerance"] = b.tolerance;
    // JSON has no infinity; null encodes "no residual measured yet"
    if (std::isfinite(b.best_residual))
        o["best_residual"] = b.best_residual;
    else
        o["best_residual"] = nullptr;
    return o;
}

BudgetStats budget_from_json(const ojson& o) {
    BudgetStats b;
    b.newton_steps = o.at("newton_steps").get<long>();
    b.coset_candidates = o.at("coset_candidates").get<long>();
    b.resamples = o.at("resamples").get<int>();
    b.max_height_used = o.at("max_height_used").get<int>();
    b.tolerance = o.at("tolerance").get<double>();
    const ojson& r = o.at("best_residual");
    b.best_residual = r.is_null() ? std::numeric_limits<double>::infinity() : r.get<double>();
    return b;
}

template <typename T>
ojson trace_to_json(const std::vector<std::pair<T, double>>& t) {
    ojson o = ojson::array();
    for (const auto& [a, b] : t) o.push_back(ojson::array({a, b}));
    return o;
}

template <typename T>
std::vector<std::pair<T, double>> trace_from_json(const ojson& o) {
    std::vector<std::pair<T, double>> t;
    for (const ojson& e : o) t.emplace_back(e[0].get<T>(), e[1].get<double>());
    return t;
}

ojson witness_to_json(const Witness& w) {
    ojson o;
    o["mode"] = w.mode;
    o["z"] = w.z ? cplx_to_json(w.z->z()) : ojson(nullptr);
    ojson bases = ojson::array();
    for (cplx b : w.bases) bases.push_back(cplx_to_json(b));
    o["bases"] = std::move(bases);
    ojson mats = ojson::array();
    for (const auto& m : w.matrices) mats.push_back(sl2_to_json(m));
    o["matrices"] = std::move(mats);
    ojson facs = ojson::array();
    for (const auto& f : w.factors) {
        ojson fo;
        fo["gamma1"] = long4_to_json(f.gamma1);
        fo["gamma"] = long4_to_json(f.gamma);
        facs.push_back(std::move(fo));
    }
    o["factors"] = std::move(facs);
    ojson pt = ojson::array();
    for (cplx v : w.point) pt.push_back(cplx_to_json(v));
    o["point"] = std::move(pt);
    o["residuals"] = w.residuals;
    o["eval_error_bounds"] = w.eval_error_bounds;
    ojson certs = ojson::array();
    for (const auto& c : w.certificates) certs.push_back(cert_to_json(c));
    o["certificates"] = std::move(certs);
    o["verdicts"] = verdicts_to_json(w.verdicts);
    o["budget"] = budget_to_json(w.budget);
    o["height_trace"] = trace_to_json(w.height_trace);
    o["newton_trace"] = trace_to_json(w.newton_trace);
    if (!w.torus_param.empty()) {
        ojson tp = ojson::array();
        for (cplx v : w.torus_param) tp.push_back(cplx_to_json(v));
        o["torus_param"] = std::move(tp);
    }
    if (!w.torus_point_u.empty()) {
        ojson tu = ojson::array();
        for (cplx v : w.torus_point_u) tu.push_back(cplx_to_json(v));
        o["torus_point_u"] = std::move(tu);
    }
    if (!w.blur.empty()) {
        ojson bl = ojson::array();
        for (const auto& b : w.blur) bl.push_back(long4_to_json(b));
        o["blur"] = std::move(bl);
    }
    return o;
}

Witness witness_from_json(const ojson& o) {
    Witness w;
    w.mode = o.at("mode").get<std::string>();
    if (!o.at("z").is_null()) w.z = HPoint(cplx_from_json(o.at("z")));
    for (const ojson& b : o.at("bases")) w.bases.push_back(cplx_from_json(b));
    for (const ojson& m : o.at("matrices")) w.matrices.push_back(sl2_from_json(m));
    for (const ojson& f : o.at("factors")) {
        CosetFactors cf;
        cf.gamma1 = long4_from_json(f.at("gamma1"));
        cf.gamma = long4_from_json(f.at("gamma"));
        w.factors.push_back(cf);
    }
    for (const ojson& v : o.at("point")) w.point.push_back(cplx_from_json(v));
    w.residuals = o.at("residuals").get<std::vector<double>>();
    w.eval_error_bounds = o.at("eval_error_bounds").get<std::vector<double>>();
    for (const ojson& c : o.at("certificates")) w.certificates.push_back(cert_from_json(c));
    w.verdicts = verdicts_from_json(o.at("verdicts"));
    w.budget = budget_from_json(o.at("budget"));
    w.height_trace = trace_from_json<int>(o.at("height_trace"));
    w.newton_trace = trace_from_json<int>(o.at("newton_trace"));
    if (o.contains("torus_param"))
        for (const ojson& v : o.at("torus_param")) w.torus_param.push_back(cplx_from_json(v));
    if (o.contains("torus_point_u"))
        for (const ojson& v : o.at("torus_point_u")) w.torus_point_u.push_back(cplx_from_json(v));
    if (o.contains("blur"))
        for (const ojson& b : o.at("blur")) w.blur.push_back(long4_from_json(b));
    return w;
}

ojson parse_json_text(const std::string& text) {
    try {
        return ojson::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("invalid JSON: ") + e.what());
    }
}

}  // namespace

ProblemFile ProblemFile::parse(const std::string& text) {
    const ojson o = parse_json_text(text);
    try {
        return problem_from_json(o);
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("problem file: ") + e.what());
    }
}

ProblemFile ProblemFile::load(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot open problem file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse(ss.str());
}

std::string ProblemFile::dump(int indent) const { return problem_to_json(*this).dump(indent); }

MoebiusVariety ProblemFile::moebius() const {
    if (mode == "torus") throw DomainError("torus problems have no Moebius variety");
    return MoebiusVariety::build(n, constraints);
}

PolySystem ProblemFile::system() const {
    const int vars = ambient();
    std::vector<MultiPoly> polys;
    polys.reserve(w_exprs.size());
    for (const std::string& expr : w_exprs) polys.push_back(MultiPoly::parse(expr, vars));
    return PolySystem(vars, std::move(polys));
}

LinearSubspace ProblemFile::subspace() const {
    if (mode != "torus") throw DomainError("only torus problems carry a linear subspace");
    LinearSubspace L = LinearSubspace::from_rows(basis, g, basis_exact);
    L.translate = translate;
    return L;
}

EllipticModel ProblemFile::model() const {
    if (mode != "torus") throw DomainError("only torus problems carry an elliptic model");
    return EllipticModel::from_tau(HPoint(tau), tau_exact);
}

std::string WitnessReport::dump(int indent) const {
    ojson o;
    o["schema"] = "1";
    o["tool_version"] = tool_version;
    o["timestamp"] = timestamp;
    o["problem"] = problem_to_json(problem);
    o["witness"] = witness_to_json(witness);
    return o.dump(indent);
}

WitnessReport WitnessReport::parse(const std::string& text) {
    const ojson o = parse_json_text(text);
    try {
        if (o.value("schema", std::string()) != "1")
            throw ParseError("witness report: unsupported schema (want \"1\")");
        WitnessReport r;
        r.tool_version = o.at("tool_version").get<std::string>();
        r.timestamp = o.value("timestamp", std::string());
        r.problem = problem_from_json(o.at("problem"));
        r.witness = witness_from_json(o.at("witness"));
        return r;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("witness report: ") + e.what());
    }
}

std::string format_double(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), x);
    return std::string(buf, res.ptr);
}

std::string format_double17(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), x, std::chars_format::general, 17);
    return std::string(buf, res.ptr);
}

std::string heights_csv(const std::vector<std::pair<int, double>>& trace) {
    std::string out = "height,best_distance\n";
    for (const auto& [h, d] : trace) out += std::to_string(h) + "," + format_double(d) + "\n";
    return out;
}

std::string newton_csv(const std::vector<std::pair<int, double>>& trace) {
    std::string out = "step,abs_residual\n";
    for (const auto& [s, r] : trace) out += std::to_string(s) + "," + format_double(r) + "\n";
    return out;
}

}  // namespace ecw
