#include "freetorus/scalar.hpp"

#include <cctype>
#include <cmath>
#include <sstream>
#include <vector>

namespace freetorus {

// ---------------------------------------------------------------------------
// LaurentPoly division and gcd

LaurentPoly LaurentPoly::div_rem(const LaurentPoly& a, const LaurentPoly& b, LaurentPoly& rem) {
    if (b.is_zero()) throw DomainError("LaurentPoly: division by zero");
    LaurentPoly q;
    rem = a;
    const long db = b.max_exp();
    const QSqrt3 lb_inv = b.leading().inverse();
    while (!rem.is_zero() && rem.max_exp() >= db) {
        const long shift = rem.max_exp() - db;
        const QSqrt3 c = rem.leading() * lb_inv;
        q.add_term(shift, c);
        rem -= b.shifted(shift).scaled(c);
    }
    return q;
}

LaurentPoly LaurentPoly::div_exact(const LaurentPoly& a, const LaurentPoly& b) {
    if (a.is_zero()) return LaurentPoly();
    // Align Laurent shifts so the divisor divides as an ordinary polynomial.
    const long sa = a.min_exp(), sb = b.min_exp();
    LaurentPoly rem;
    LaurentPoly q = div_rem(a.shifted(-sa), b.shifted(-sb), rem);
    if (!rem.is_zero()) throw DomainError("LaurentPoly: inexact division");
    return q.shifted(sa - sb);
}

LaurentPoly LaurentPoly::gcd(const LaurentPoly& a, const LaurentPoly& b) {
    LaurentPoly x = a.is_zero() ? a : a.shifted(-a.min_exp());
    LaurentPoly y = b.is_zero() ? b : b.shifted(-b.min_exp());
    while (!y.is_zero()) {
        LaurentPoly rem;
        div_rem(x, y, rem);
        x = std::move(y);
        y = rem.is_zero() ? rem : rem.shifted(-rem.min_exp());
    }
    if (x.is_zero()) return x;
    return x.scaled(x.leading().inverse());  // monic, min exponent 0
}

// ---------------------------------------------------------------------------
// Scalar canonical form and arithmetic

Scalar::Scalar(LaurentPoly num, LaurentPoly den) : num_(std::move(num)), den_(std::move(den)) {
    if (den_.is_zero()) throw DomainError("Scalar: zero denominator");
    canonicalize();
}

void Scalar::canonicalize() {
    if (num_.is_zero()) {
        den_ = LaurentPoly(1);
        return;
    }
    const long sn = num_.min_exp(), sd = den_.min_exp();
    LaurentPoly n0 = num_.shifted(-sn);
    LaurentPoly d0 = den_.shifted(-sd);
    const LaurentPoly g = LaurentPoly::gcd(n0, d0);
    if (!g.is_one()) {
        n0 = LaurentPoly::div_exact(n0, g);
        d0 = LaurentPoly::div_exact(d0, g);
    }
    const QSqrt3 lc_inv = d0.leading().inverse();
    num_ = n0.scaled(lc_inv).shifted(sn - sd);
    den_ = d0.scaled(lc_inv);
}

Scalar Scalar::sqrt3_pow(long n) {
    const long half = (n >= 0) ? n / 2 : -((-n + 1) / 2);  // floor(n/2)
    Rational q(1);
    for (long i = 0; i < std::abs(half); ++i) q *= 3;
    Scalar r = (half >= 0) ? Scalar(q) : Scalar(Rational(1) / q);
    if (n - 2 * half == 1) r = r * sqrt3();  // 3^{n/2} = 3^{floor(n/2)} * sqrt(3)^{n mod 2}
    return r;
}

Scalar Scalar::operator-() const {
    Scalar r = *this;
    r.num_ = -r.num_;
    return r;
}

Scalar operator+(const Scalar& x, const Scalar& y) {
    if (x.is_zero()) return y;
    if (y.is_zero()) return x;
    if (x.den_ == y.den_) return Scalar(x.num_ + y.num_, x.den_);
    return Scalar(x.num_ * y.den_ + y.num_ * x.den_, x.den_ * y.den_);
}

Scalar operator-(const Scalar& x, const Scalar& y) {
    if (y.is_zero()) return x;
    if (x.is_zero()) return -y;
    if (x.den_ == y.den_) return Scalar(x.num_ - y.num_, x.den_);
    return Scalar(x.num_ * y.den_ - y.num_ * x.den_, x.den_ * y.den_);
}

Scalar operator*(const Scalar& x, const Scalar& y) {
    if (x.is_zero() || y.is_zero()) return Scalar();
    if (x.den_.is_one() && y.den_.is_one()) {
        Scalar r;
        r.num_ = x.num_ * y.num_;
        r.den_ = LaurentPoly(1);
        return r;  // product of polynomials needs no reduction
    }
    return Scalar(x.num_ * y.num_, x.den_ * y.den_);
}

Scalar operator/(const Scalar& x, const Scalar& y) {
    if (y.is_zero()) throw DomainError("Scalar: division by zero");
    if (x.is_zero()) return Scalar();
    return Scalar(x.num_ * y.den_, x.den_ * y.num_);
}

Scalar Scalar::conj() const {
    if (is_zero()) return Scalar();
    return Scalar(num_.conj(), den_.conj());
}

Scalar Scalar::inverse() const {
    if (is_zero()) throw DomainError("Scalar: inverse of zero");
    return Scalar(den_, num_);
}

std::complex<double> unit_circle_point(double theta) {
    const double arg = 2.0 * M_PI * theta;
    return {std::cos(arg), std::sin(arg)};
}

std::complex<double> Scalar::eval_at(std::complex<double> z) const {
    const std::complex<double> dv = den_.eval(z);
    if (std::abs(dv) < 1e-12 * std::max(1.0, den_.abs_coeff_sum()))
        throw DomainError("Scalar: evaluation at a numeric pole of the denominator");
    return num_.eval(z) / dv;
}

std::complex<double> Scalar::eval_numeric(double theta) const {
    return eval_at(unit_circle_point(theta));
}

// ---------------------------------------------------------------------------
// Text form.
//
//   scalar := poly [ '/' poly ]
//   poly   := [sign] term { sign term }
//   term   := factor { '*' factor }
//   factor := '(' poly ')' | RATIONAL | 's3' | 'd' [ '^' SIGNED-INT ]
//
// Rationals are printed as p or p/q with no spaces; the fraction bar between
// num and den is surrounded by spaces and multi-term operands get parentheses,
// e.g. "(d^2 + 1) / d" or "(1/2 + 3/2*s3)*d^-2".

namespace {

std::string rational_str(const Rational& q) { return q.get_str(); }

std::string qsqrt3_str(const QSqrt3& c) {
    if (c.is_zero()) return "0";
    if (sgn(c.b) == 0) return rational_str(c.a);
    std::string s3part = (c.b == 1) ? "s3" : (c.b == -1 ? "-s3" : rational_str(c.b) + "*s3");
    if (sgn(c.a) == 0) return s3part;
    std::string out = "(" + rational_str(c.a);
    if (sgn(c.b) > 0)
        out += " + " + (c.b == 1 ? std::string("s3") : rational_str(c.b) + "*s3");
    else
        out += " - " + (c.b == -1 ? std::string("s3") : rational_str(-c.b) + "*s3");
    return out + ")";
}

std::string dpow_str(long k) {
    if (k == 1) return "d";
    return "d^" + std::to_string(k);
}

std::string term_str(long k, const QSqrt3& c) {
    if (k == 0) return qsqrt3_str(c);
    if (c.is_one()) return dpow_str(k);
    if ((-c).is_one()) return "-" + dpow_str(k);
    return qsqrt3_str(c) + "*" + dpow_str(k);
}

std::string poly_str(const LaurentPoly& p) {
    if (p.is_zero()) return "0";
    std::string out;
    bool first = true;
    for (const auto& [k, c] : p.terms()) {
        std::string t = term_str(k, c);
        if (first) {
            out = t;
            first = false;
        } else if (!t.empty() && t[0] == '-') {
            out += " - " + t.substr(1);
        } else {
            out += " + " + t;
        }
    }
    return out;
}

std::string poly_operand_str(const LaurentPoly& p) {
    std::string s = poly_str(p);
    if (p.term_count() > 1) return "(" + s + ")";
    return s;
}

// --- parsing ---------------------------------------------------------------

struct Token {
    enum Kind { Rat, S3, DPow, Plus, Minus, Star, Slash, LParen, RParen, End } kind;
    Rational value;  // Rat
    long exponent = 1;  // DPow
    std::size_t pos = 0;
};

class Lexer {
public:
    explicit Lexer(const std::string& s) : s_(s) {}

    Token next() {
        skip_ws();
        Token t;
        t.pos = i_;
        if (i_ >= s_.size()) { t.kind = Token::End; return t; }
        const char c = s_[i_];
        if (std::isdigit(static_cast<unsigned char>(c))) {
            t.kind = Token::Rat;
            t.value = lex_rational();
            return t;
        }
        switch (c) {
            case '+': ++i_; t.kind = Token::Plus; return t;
            case '-': ++i_; t.kind = Token::Minus; return t;
            case '*': ++i_; t.kind = Token::Star; return t;
            case '/': ++i_; t.kind = Token::Slash; return t;
            case '(': ++i_; t.kind = Token::LParen; return t;
            case ')': ++i_; t.kind = Token::RParen; return t;
            case 's':
                if (i_ + 1 < s_.size() && s_[i_ + 1] == '3') {
                    i_ += 2;
                    t.kind = Token::S3;
                    return t;
                }
                throw ParseError("unexpected 's'", i_);
            case 'd': {
                ++i_;
                t.kind = Token::DPow;
                t.exponent = 1;
                if (i_ < s_.size() && s_[i_] == '^') {
                    ++i_;
                    t.exponent = lex_signed_int();
                }
                return t;
            }
            default:
                throw ParseError(std::string("unexpected character '") + c + "'", i_);
        }
    }

private:
    void skip_ws() { while (i_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[i_]))) ++i_; }

    Rational lex_rational() {
        std::string digits = lex_digits();
        // A '/' directly between digits is part of the rational literal.
        if (i_ < s_.size() && s_[i_] == '/' && i_ + 1 < s_.size() &&
            std::isdigit(static_cast<unsigned char>(s_[i_ + 1]))) {
            ++i_;
            std::string den = lex_digits();
            Rational q(digits + "/" + den);
            q.canonicalize();
            return q;
        }
        return Rational(digits);
    }

    std::string lex_digits() {
        std::size_t start = i_;
        while (i_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[i_]))) ++i_;
        if (i_ == start) throw ParseError("expected digits", i_);
        return s_.substr(start, i_ - start);
    }

    long lex_signed_int() {
        bool neg = false;
        if (i_ < s_.size() && (s_[i_] == '-' || s_[i_] == '+')) {
            neg = (s_[i_] == '-');
            ++i_;
        }
        return (neg ? -1 : 1) * std::stol(lex_digits());
    }

    const std::string& s_;
    std::size_t i_ = 0;
};

class ScalarParser {
public:
    explicit ScalarParser(const std::string& s) : lex_(s) { advance(); }

    Scalar parse() {
        Scalar num = parse_poly();
        if (cur_.kind == Token::Slash) {
            advance();
            Scalar den = parse_poly();
            expect_end();
            return num / den;  // throws on zero denominator
        }
        expect_end();
        return num;
    }

private:
    void advance() { cur_ = lex_.next(); }
    void expect_end() const {
        if (cur_.kind != Token::End) throw ParseError("trailing input", cur_.pos);
    }

    Scalar parse_poly() {
        Scalar acc;
        bool neg = false;
        if (cur_.kind == Token::Minus) { neg = true; advance(); }
        else if (cur_.kind == Token::Plus) { advance(); }
        acc = parse_term();
        if (neg) acc = -acc;
        while (cur_.kind == Token::Plus || cur_.kind == Token::Minus) {
            const bool minus = cur_.kind == Token::Minus;
            advance();
            Scalar t = parse_term();
            acc = minus ? acc - t : acc + t;
        }
        return acc;
    }

    Scalar parse_term() {
        Scalar acc = parse_factor();
        while (cur_.kind == Token::Star) {
            advance();
            acc = acc * parse_factor();
        }
        return acc;
    }

    Scalar parse_factor() {
        switch (cur_.kind) {
            case Token::Rat: {
                Scalar r{cur_.value};
                advance();
                return r;
            }
            case Token::S3: advance(); return Scalar::sqrt3();
            case Token::DPow: {
                Scalar r = Scalar::d_pow(cur_.exponent);
                advance();
                return r;
            }
            case Token::LParen: {
                advance();
                Scalar inner = parse_poly();
                if (cur_.kind != Token::RParen) throw ParseError("expected ')'", cur_.pos);
                advance();
                return inner;
            }
            default:
                throw ParseError("expected a scalar factor", cur_.pos);
        }
    }

    Lexer lex_;
    Token cur_;
};

}  // namespace

std::string Scalar::to_string() const {
    if (den_.is_one()) return poly_str(num_);
    return poly_operand_str(num_) + " / " + poly_operand_str(den_);
}

Scalar Scalar::parse(const std::string& text) { return ScalarParser(text).parse(); }

}  // namespace freetorus
