#include "ecw/exact.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>

namespace ecw {

namespace {

// Largest square divisor split: n = s*s*d with d squarefree.
void split_square(long n, long& s, long& d) {
    s = 1;
    d = n;
    for (long p = 2; p * p <= d; ++p) {
        while (d % (p * p) == 0) {
            d /= p * p;
            s *= p;
        }
    }
}

}  // namespace

QuadScalar::QuadScalar(mpq_class a, mpq_class b, long d)
    : a_(std::move(a)), b_(std::move(b)), d_(d) {
    a_.canonicalize();
    b_.canonicalize();
    if (d_ < 0) throw DomainError("QuadScalar: negative discriminant");
    normalize();
}

void QuadScalar::normalize() {
    if (b_ == 0) {
        d_ = 0;
        return;
    }
    if (d_ == 0) throw DomainError("QuadScalar: irrational part with zero discriminant");
    if (d_ == 1) {  // sqrt(1) collapses to rational
        a_ += b_;
        b_ = 0;
        d_ = 0;
    }
}

long QuadScalar::merge_disc(const QuadScalar& x, const QuadScalar& y) {
    if (x.d_ == 0) return y.d_;
    if (y.d_ == 0 || x.d_ == y.d_) return x.d_;
    throw DomainError("QuadScalar: mixed quadratic discriminants");
}

QuadScalar QuadScalar::sqrt_of(long n) {
    if (n < 0) throw DomainError("QuadScalar::sqrt_of: negative argument");
    long s, d;
    split_square(n, s, d);
    if (d <= 1) return QuadScalar(mpq_class(s * d), 0, 0);
    return QuadScalar(0, mpq_class(s), d);
}

QuadScalar QuadScalar::operator+(const QuadScalar& o) const {
    long d = merge_disc(*this, o);
    return QuadScalar(a_ + o.a_, b_ + o.b_, d);
}

QuadScalar QuadScalar::operator-(const QuadScalar& o) const {
    long d = merge_disc(*this, o);
    return QuadScalar(a_ - o.a_, b_ - o.b_, d);
}

QuadScalar QuadScalar::operator*(const QuadScalar& o) const {
    long d = merge_disc(*this, o);
    return QuadScalar(a_ * o.a_ + b_ * o.b_ * d, a_ * o.b_ + b_ * o.a_, d);
}

QuadScalar QuadScalar::operator/(const QuadScalar& o) const {
    if (o.is_zero()) throw DomainError("QuadScalar: division by zero");
    long d = merge_disc(*this, o);
    // 1/(a + b sqrt(D)) = (a - b sqrt(D)) / (a^2 - b^2 D)
    mpq_class norm = o.a_ * o.a_ - o.b_ * o.b_ * d;
    if (norm == 0) throw DomainError("QuadScalar: division by zero norm");
    QuadScalar conj(o.a_ / norm, -o.b_ / norm, d);
    return *this * conj;
}

bool QuadScalar::operator==(const QuadScalar& o) const {
    if (a_ != o.a_ || b_ != o.b_) return false;
    if (b_ == 0) return true;
    return d_ == o.d_;
}

int QuadScalar::sign() const {
    int sa = sgn(a_), sb = sgn(b_);
    if (sb == 0) return sa;
    if (sa == 0) return sb;
    if (sa == sb) return sa;
    // Opposite signs: compare a^2 against b^2 D exactly.
    mpq_class lhs = a_ * a_, rhs = b_ * b_ * d_;
    int c = cmp(lhs, rhs);
    if (c == 0) return 0;
    return c > 0 ? sa : sb;
}

double QuadScalar::to_double() const {
    double v = a_.get_d();
    if (b_ != 0) v += b_.get_d() * std::sqrt(static_cast<double>(d_));
    return v;
}

std::string QuadScalar::str() const {
    if (b_ == 0) return a_.get_str();
    std::string out;
    if (a_ != 0) out = a_.get_str();
    std::string irr = "sqrt(" + std::to_string(d_) + ")";
    if (b_ == 1) {
    } else if (b_ == -1) {
        irr = "-" + irr;
    } else {
        irr = b_.get_str() + "*" + irr;
    }
    if (out.empty()) return irr;
    if (irr[0] != '-') return out + "+" + irr;
    return out + irr;
}

ExactComplex ExactComplex::operator/(const ExactComplex& o) const {
    QuadScalar norm = o.re * o.re + o.im * o.im;
    if (norm.is_zero()) throw DomainError("ExactComplex: division by zero");
    ExactComplex conj{o.re / norm, -(o.im / norm)};
    return *this * conj;
}

std::string ExactComplex::str() const {
    if (im.is_zero()) return re.str();
    return re.str() + " + (" + im.str() + ")*i";
}

namespace {

struct TokenParser {
    const std::string& s;
    size_t pos = 0;

    explicit TokenParser(const std::string& text) : s(text) {}

    void skip_ws() {
        while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
    }
    bool eat(char c) {
        skip_ws();
        if (pos < s.size() && s[pos] == c) {
            ++pos;
            return true;
        }
        return false;
    }
    bool peek_alpha() {
        skip_ws();
        return pos < s.size() && std::isalpha(static_cast<unsigned char>(s[pos]));
    }

    long parse_integer() {
        skip_ws();
        size_t start = pos;
        if (pos < s.size() && (s[pos] == '+' || s[pos] == '-')) ++pos;
        size_t digits = pos;
        while (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos]))) ++pos;
        if (pos == digits) throw ParseError("exact scalar: expected integer in '" + s + "'");
        return std::strtol(s.substr(start, pos - start).c_str(), nullptr, 10);
    }

    // term := integer ['/' integer] | ['-'] 'sqrt' '(' integer ')' ['/' integer]
    //       | integer '*' 'sqrt' '(' integer ')' ['/' integer]
    QuadScalar parse_term(int outer_sign) {
        skip_ws();
        mpq_class coeff(outer_sign);
        bool have_coeff = false;
        if (!peek_alpha()) {
            long num = parse_integer();
            coeff = mpq_class(num) * outer_sign;
            have_coeff = true;
            if (eat('/')) {
                long den = parse_integer();
                if (den == 0) throw ParseError("exact scalar: zero denominator");
                coeff /= den;
            }
            skip_ws();
            if (!eat('*')) return QuadScalar(coeff);
        }
        skip_ws();
        if (s.compare(pos, 4, "sqrt") != 0)
            throw ParseError("exact scalar: expected sqrt in '" + s + "'");
        pos += 4;
        if (!eat('(')) throw ParseError("exact scalar: expected '(' after sqrt");
        long rad = parse_integer();
        if (!eat(')')) throw ParseError("exact scalar: expected ')' in sqrt");
        QuadScalar root = QuadScalar::sqrt_of(rad);
        if (eat('/')) {
            long den = parse_integer();
            if (den == 0) throw ParseError("exact scalar: zero denominator");
            coeff /= den;
        }
        (void)have_coeff;
        return root * QuadScalar(coeff);
    }

    QuadScalar parse() {
        int sign = 1;
        if (eat('-')) sign = -1;
        else eat('+');
        QuadScalar acc = parse_term(sign);
        for (;;) {
            skip_ws();
            if (eat('+')) acc = acc + parse_term(1);
            else if (eat('-')) acc = acc + parse_term(-1);
            else break;
        }
        skip_ws();
        if (pos != s.size()) throw ParseError("exact scalar: trailing input in '" + s + "'");
        return acc;
    }
};

}  // namespace

QuadScalar parse_exact_scalar(const std::string& text) {
    TokenParser p(text);
    try {
        return p.parse();
    } catch (const ParseError&) {
        throw;
    } catch (const DomainError& e) {
        // Semantic rejections (negative radicand, mixed discriminants) are
        // still failures to parse the given token.
        throw ParseError("exact scalar '" + text + "': " + e.what());
    }
}

}  // namespace ecw
