#pragma once

#include <complex>
#include <optional>
#include <string>

#include "freetorus/laurent.hpp"

namespace freetorus {

struct ParseError : DomainError {
    ParseError(const std::string& msg, std::size_t column)
        : DomainError(msg + " (column " + std::to_string(column + 1) + ")"), column(column) {}
    std::size_t column;
};

/// Element of the coefficient field K = Q(sqrt 3)(d): a reduced fraction of
/// Laurent polynomials in d.  Canonical form: num/den in lowest terms, den with
/// minimal exponent 0 and leading coefficient 1, so equality is structural.
///
/// The star involution conj() models the adjoint on scalars: it fixes Q(sqrt 3)
/// and sends d to d^{-1} (|d| = 1 in the intended evaluation).
class Scalar {
public:
    Scalar() : num_(), den_(1) {}
    Scalar(long v) : num_(v), den_(1) {}
    Scalar(const Rational& q) : num_(QSqrt3(q)), den_(1) {}
    Scalar(const QSqrt3& c) : num_(c), den_(1) {}
    explicit Scalar(LaurentPoly p) : num_(std::move(p)), den_(1) {}
    Scalar(LaurentPoly num, LaurentPoly den);  // canonicalizes; den must be nonzero

    static Scalar d_pow(long k) { return Scalar(LaurentPoly::d_pow(k)); }
    static Scalar sqrt3() { return Scalar(QSqrt3::sqrt3()); }
    /// 3^{n/2} for any integer n (uses the sqrt(3) component when n is odd).
    static Scalar sqrt3_pow(long n);

    const LaurentPoly& num() const { return num_; }
    const LaurentPoly& den() const { return den_; }

    bool is_zero() const { return num_.is_zero(); }
    bool is_one() const { return num_.is_one() && den_.is_one(); }
    bool is_d_monomial() const { return den_.is_one() && num_.is_monomial(); }

    friend bool operator==(const Scalar& x, const Scalar& y) {
        return x.num_ == y.num_ && x.den_ == y.den_;
    }
    friend bool operator!=(const Scalar& x, const Scalar& y) { return !(x == y); }

    Scalar operator-() const;
    friend Scalar operator+(const Scalar& x, const Scalar& y);
    friend Scalar operator-(const Scalar& x, const Scalar& y);
    friend Scalar operator*(const Scalar& x, const Scalar& y);
    friend Scalar operator/(const Scalar& x, const Scalar& y);  // throws on y == 0

    Scalar& operator+=(const Scalar& y) { *this = *this + y; return *this; }
    Scalar& operator-=(const Scalar& y) { *this = *this - y; return *this; }
    Scalar& operator*=(const Scalar& y) { *this = *this * y; return *this; }
    Scalar& operator/=(const Scalar& y) { *this = *this / y; return *this; }

    Scalar conj() const;
    Scalar inverse() const;

    /// Substitute d = exp(2 pi i theta).  Throws DomainError at a numeric pole
    /// of the denominator.  theta is assumed irrational at the given precision;
    /// this is not (and cannot be) verified here.
    std::complex<double> eval_numeric(double theta) const;
    std::complex<double> eval_at(std::complex<double> z) const;

    std::string to_string() const;
    static Scalar parse(const std::string& text);

private:
    void canonicalize();

    LaurentPoly num_;
    LaurentPoly den_;
};

std::complex<double> unit_circle_point(double theta);

}  // namespace freetorus
