#pragma once

#include <complex>
#include <cstdint>
#include <map>

#include "freetorus/qsqrt3.hpp"

namespace freetorus {

/// Laurent polynomial in the formal unit d with QSqrt3 coefficients.
/// Finite support, no stored zero coefficients; the empty map is zero.
class LaurentPoly {
public:
    using Terms = std::map<long, QSqrt3>;

    LaurentPoly() = default;
    LaurentPoly(long v) { if (v != 0) terms_[0] = QSqrt3(v); }
    LaurentPoly(const QSqrt3& c) { if (!c.is_zero()) terms_[0] = c; }

    static LaurentPoly d_pow(long k) {
        LaurentPoly p;
        p.terms_[k] = QSqrt3(1);
        return p;
    }

    const Terms& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }
    bool is_one() const {
        return terms_.size() == 1 && terms_.begin()->first == 0 && terms_.begin()->second.is_one();
    }
    bool is_monomial() const { return terms_.size() == 1; }
    std::size_t term_count() const { return terms_.size(); }

    long min_exp() const { return terms_.begin()->first; }      // pre: nonzero
    long max_exp() const { return terms_.rbegin()->first; }     // pre: nonzero
    const QSqrt3& leading() const { return terms_.rbegin()->second; }

    QSqrt3 coeff(long k) const {
        auto it = terms_.find(k);
        return it == terms_.end() ? QSqrt3() : it->second;
    }

    void add_term(long k, const QSqrt3& c) {
        if (c.is_zero()) return;
        auto [it, inserted] = terms_.emplace(k, c);
        if (!inserted) {
            it->second += c;
            if (it->second.is_zero()) terms_.erase(it);
        }
    }

    friend bool operator==(const LaurentPoly& x, const LaurentPoly& y) {
        return x.terms_ == y.terms_;
    }
    friend bool operator!=(const LaurentPoly& x, const LaurentPoly& y) { return !(x == y); }

    LaurentPoly operator-() const {
        LaurentPoly r;
        for (const auto& [k, c] : terms_) r.terms_.emplace(k, -c);
        return r;
    }

    friend LaurentPoly operator+(const LaurentPoly& x, const LaurentPoly& y) {
        LaurentPoly r = x;
        for (const auto& [k, c] : y.terms_) r.add_term(k, c);
        return r;
    }
    friend LaurentPoly operator-(const LaurentPoly& x, const LaurentPoly& y) {
        LaurentPoly r = x;
        for (const auto& [k, c] : y.terms_) r.add_term(k, -c);
        return r;
    }
    friend LaurentPoly operator*(const LaurentPoly& x, const LaurentPoly& y) {
        LaurentPoly r;
        for (const auto& [kx, cx] : x.terms_)
            for (const auto& [ky, cy] : y.terms_) r.add_term(kx + ky, cx * cy);
        return r;
    }

    LaurentPoly& operator+=(const LaurentPoly& y) { for (const auto& [k, c] : y.terms_) add_term(k, c); return *this; }
    LaurentPoly& operator-=(const LaurentPoly& y) { for (const auto& [k, c] : y.terms_) add_term(k, -c); return *this; }
    LaurentPoly& operator*=(const LaurentPoly& y) { *this = *this * y; return *this; }

    /// Multiply by d^k.
    LaurentPoly shifted(long k) const {
        LaurentPoly r;
        for (const auto& [e, c] : terms_) r.terms_.emplace(e + k, c);
        return r;
    }

    /// Scale by a field constant.
    LaurentPoly scaled(const QSqrt3& c) const {
        LaurentPoly r;
        if (c.is_zero()) return r;
        for (const auto& [e, t] : terms_) r.terms_.emplace(e, t * c);
        return r;
    }

    /// The star involution d -> d^{-1}; coefficients are fixed (sqrt 3 is real).
    LaurentPoly conj() const {
        LaurentPoly r;
        for (const auto& [e, c] : terms_) r.terms_.emplace(-e, c);
        return r;
    }

    std::complex<double> eval(std::complex<double> z) const {
        std::complex<double> acc{0.0, 0.0};
        for (const auto& [e, c] : terms_) acc += c.to_double() * std::pow(z, static_cast<double>(e));
        return acc;
    }

    double abs_coeff_sum() const {
        double s = 0.0;
        for (const auto& [e, c] : terms_) s += std::abs(c.to_double());
        return s;
    }

    /// Euclidean division by a nonzero divisor of the d^0..d^n polynomial parts;
    /// caller handles Laurent shifts.  Returns quotient, stores remainder.
    static LaurentPoly div_rem(const LaurentPoly& a, const LaurentPoly& b, LaurentPoly& rem);

    /// Exact division: requires b | a (Bareiss updates guarantee it); throws otherwise.
    static LaurentPoly div_exact(const LaurentPoly& a, const LaurentPoly& b);

    /// Monic gcd with min exponent 0.  gcd(0,0) = 0.
    static LaurentPoly gcd(const LaurentPoly& a, const LaurentPoly& b);

private:
    Terms terms_;
};

}  // namespace freetorus
