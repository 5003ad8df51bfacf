#include "ecw/polynomial.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <sstream>

namespace ecw {

MultiPoly MultiPoly::constant(cplx c, int nvars) {
    MultiPoly p(nvars);
    p.add_term(std::vector<int>(static_cast<std::size_t>(nvars), 0), c);
    return p;
}

MultiPoly MultiPoly::variable(int idx, int nvars) {
    if (idx < 0 || idx >= nvars) throw DomainError("MultiPoly::variable: index out of range");
    MultiPoly p(nvars);
    std::vector<int> e(static_cast<std::size_t>(nvars), 0);
    e[static_cast<std::size_t>(idx)] = 1;
    p.add_term(e, 1.0);
    return p;
}

void MultiPoly::add_term(const std::vector<int>& exps, cplx coeff) {
    if (static_cast<int>(exps.size()) != nvars_)
        throw DomainError("MultiPoly::add_term: exponent arity mismatch");
    auto it = terms_.find(exps);
    if (it == terms_.end()) {
        if (coeff != cplx(0.0, 0.0)) terms_.emplace(exps, coeff);
        return;
    }
    it->second += coeff;
    if (it->second == cplx(0.0, 0.0)) terms_.erase(it);
}

int MultiPoly::degree() const {
    int d = 0;
    for (const auto& [e, c] : terms_) {
        int t = 0;
        for (int k : e) t += k;
        d = std::max(d, t);
    }
    return d;
}

double MultiPoly::max_coeff_abs() const {
    double m = 0;
    for (const auto& [e, c] : terms_) m = std::max(m, std::abs(c));
    return m;
}

cplx MultiPoly::eval(const std::vector<cplx>& w) const {
    if (static_cast<int>(w.size()) != nvars_) throw DomainError("MultiPoly::eval: arity mismatch");
    cplx acc = 0;
    for (const auto& [e, c] : terms_) {
        cplx m = c;
        for (int v = 0; v < nvars_; ++v)
            for (int k = 0; k < e[static_cast<std::size_t>(v)]; ++k)
                m *= w[static_cast<std::size_t>(v)];
        acc += m;
    }
    return acc;
}

MultiPoly MultiPoly::partial(int var) const {
    if (var < 0 || var >= nvars_) throw DomainError("MultiPoly::partial: index out of range");
    MultiPoly out(nvars_);
    for (const auto& [e, c] : terms_) {
        int k = e[static_cast<std::size_t>(var)];
        if (k == 0) continue;
        std::vector<int> e2 = e;
        e2[static_cast<std::size_t>(var)] = k - 1;
        out.add_term(e2, c * static_cast<double>(k));
    }
    return out;
}

MultiPoly MultiPoly::substitute(int var, cplx value) const {
    if (var < 0 || var >= nvars_) throw DomainError("MultiPoly::substitute: index out of range");
    MultiPoly out(nvars_);
    for (const auto& [e, c] : terms_) {
        cplx m = c;
        for (int k = 0; k < e[static_cast<std::size_t>(var)]; ++k) m *= value;
        std::vector<int> e2 = e;
        e2[static_cast<std::size_t>(var)] = 0;
        out.add_term(e2, m);
    }
    return out;
}

MultiPoly MultiPoly::operator+(const MultiPoly& o) const {
    if (o.nvars_ != nvars_) throw DomainError("MultiPoly: arity mismatch");
    MultiPoly out = *this;
    for (const auto& [e, c] : o.terms_) out.add_term(e, c);
    return out;
}

MultiPoly MultiPoly::operator-(const MultiPoly& o) const {
    if (o.nvars_ != nvars_) throw DomainError("MultiPoly: arity mismatch");
    MultiPoly out = *this;
    for (const auto& [e, c] : o.terms_) out.add_term(e, -c);
    return out;
}

MultiPoly MultiPoly::operator*(const MultiPoly& o) const {
    if (o.nvars_ != nvars_) throw DomainError("MultiPoly: arity mismatch");
    MultiPoly out(nvars_);
    for (const auto& [e1, c1] : terms_) {
        for (const auto& [e2, c2] : o.terms_) {
            std::vector<int> e = e1;
            for (int v = 0; v < nvars_; ++v) e[static_cast<std::size_t>(v)] += e2[static_cast<std::size_t>(v)];
            out.add_term(e, c1 * c2);
        }
    }
    return out;
}

MultiPoly MultiPoly::operator*(cplx s) const {
    MultiPoly out(nvars_);
    for (const auto& [e, c] : terms_) out.add_term(e, c * s);
    return out;
}

MultiPoly MultiPoly::operator-() const { return *this * cplx(-1.0, 0.0); }

namespace {

// Recursive-descent parser for polynomial expressions.
struct PolyParser {
    const std::string& s;
    std::size_t pos = 0;
    int nvars;

    explicit PolyParser(const std::string& text, int nv) : s(text), nvars(nv) {}

    [[noreturn]] void fail(const std::string& what) const {
        std::ostringstream os;
        os << "polynomial parse error at position " << pos << ": " << what;
        throw ParseError(os.str());
    }

    void skip_ws() {
        while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
    }

    bool peek(char c) {
        skip_ws();
        return pos < s.size() && s[pos] == c;
    }

    bool accept(char c) {
        if (!peek(c)) return false;
        ++pos;
        return true;
    }

    MultiPoly parse_expr() {
        MultiPoly acc = accept('-') ? -parse_term() : (accept('+'), parse_term());
        for (;;) {
            if (accept('+'))
                acc = acc + parse_term();
            else if (accept('-'))
                acc = acc - parse_term();
            else
                break;
        }
        return acc;
    }

    MultiPoly parse_term() {
        MultiPoly acc = parse_power();
        while (accept('*')) acc = acc * parse_power();
        return acc;
    }

    MultiPoly parse_power() {
        MultiPoly base = parse_atom();
        if (!accept('^')) return base;
        skip_ws();
        std::size_t start = pos;
        while (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos]))) ++pos;
        if (pos == start) fail("expected integer exponent after '^'");
        int e = std::atoi(s.substr(start, pos - start).c_str());
        MultiPoly acc = MultiPoly::constant(1.0, nvars);
        for (int k = 0; k < e; ++k) acc = acc * base;
        return acc;
    }

    MultiPoly parse_atom() {
        skip_ws();
        if (pos >= s.size()) fail("unexpected end of expression");
        char c = s[pos];
        if (c == '(') {
            ++pos;
            MultiPoly inner = parse_expr();
            if (!accept(')')) fail("expected ')'");
            return inner;
        }
        if (c == '-') {
            ++pos;
            return -parse_atom();
        }
        if (c == 'i') {
            ++pos;
            return MultiPoly::constant(cplx(0.0, 1.0), nvars);
        }
        if (c == 'w') {
            ++pos;
            std::size_t start = pos;
            while (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos]))) ++pos;
            if (pos == start) fail("expected variable index after 'w'");
            int idx = std::atoi(s.substr(start, pos - start).c_str());
            if (idx < 1 || idx > nvars) fail("variable index out of range");
            return MultiPoly::variable(idx - 1, nvars);
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
            std::size_t start = pos;
            while (pos < s.size() &&
                   (std::isdigit(static_cast<unsigned char>(s[pos])) || s[pos] == '.')) ++pos;
            if (pos < s.size() && (s[pos] == 'e' || s[pos] == 'E')) {
                std::size_t mark = pos;
                ++pos;
                if (pos < s.size() && (s[pos] == '+' || s[pos] == '-')) ++pos;
                if (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos]))) {
                    while (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos]))) ++pos;
                } else {
                    pos = mark;  // not an exponent
                }
            }
            double v = std::strtod(s.substr(start, pos - start).c_str(), nullptr);
            if (pos < s.size() && s[pos] == 'i') {  // imaginary suffix: "2i"
                ++pos;
                return MultiPoly::constant(cplx(0.0, v), nvars);
            }
            return MultiPoly::constant(cplx(v, 0.0), nvars);
        }
        fail(std::string("unexpected character '") + c + "'");
    }
};

}  // namespace

MultiPoly MultiPoly::parse(const std::string& expr, int nvars) {
    PolyParser p(expr, nvars);
    MultiPoly out = p.parse_expr();
    p.skip_ws();
    if (p.pos != expr.size()) p.fail("trailing input");
    return out;
}

std::string MultiPoly::str() const {
    if (terms_.empty()) return "0";
    std::ostringstream os;
    bool first = true;
    for (const auto& [e, c] : terms_) {
        if (!first) os << " + ";
        first = false;
        os << "(" << c.real() << (c.imag() < 0 ? "" : "+") << c.imag() << "i)";
        for (int v = 0; v < nvars_; ++v) {
            int k = e[static_cast<std::size_t>(v)];
            if (k == 0) continue;
            os << "*w" << (v + 1);
            if (k > 1) os << "^" << k;
        }
    }
    return os.str();
}

PolySystem::PolySystem(int n_, std::vector<MultiPoly> polys_) : n(n_), polys(std::move(polys_)) {
    for (const MultiPoly& p : polys) {
        if (p.nvars() != n) throw DomainError("PolySystem: arity mismatch");
        if (p.is_zero()) throw DomainError("PolySystem: zero polynomial");
    }
}

std::vector<cplx> PolySystem::eval(const std::vector<cplx>& w) const {
    std::vector<cplx> out;
    out.reserve(polys.size());
    for (const MultiPoly& p : polys) out.push_back(p.eval(w));
    return out;
}

std::vector<std::vector<cplx>> PolySystem::jacobian_rows(const std::vector<cplx>& w) const {
    std::vector<std::vector<cplx>> rows;
    rows.reserve(polys.size());
    for (const MultiPoly& p : polys) {
        std::vector<cplx> row;
        row.reserve(static_cast<std::size_t>(n));
        for (int v = 0; v < n; ++v) row.push_back(p.partial(v).eval(w));
        rows.push_back(std::move(row));
    }
    return rows;
}

}  // namespace ecw
