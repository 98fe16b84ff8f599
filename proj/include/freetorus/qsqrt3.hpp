#pragma once

#include <gmpxx.h>
#include <stdexcept>
#include <string>

namespace freetorus {

using Rational = mpq_class;

/// Thrown by operations whose preconditions are violated (division by zero,
/// evaluation at a pole, malformed input vectors, ...).
struct DomainError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

inline Rational make_rational(long num, long den = 1) {
    Rational q(num, den);
    q.canonicalize();
    return q;
}

/// Element a + b*sqrt(3) of the real quadratic field Q(sqrt 3).
/// The rationals are kept canonical by GMP (lowest terms, positive denominator).
struct QSqrt3 {
    Rational a;  // rational part
    Rational b;  // coefficient of sqrt(3)

    QSqrt3() : a(0), b(0) {}
    QSqrt3(long v) : a(v), b(0) {}
    QSqrt3(Rational ra) : a(std::move(ra)), b(0) {}
    QSqrt3(Rational ra, Rational rb) : a(std::move(ra)), b(std::move(rb)) {}

    static QSqrt3 sqrt3() { return QSqrt3(Rational(0), Rational(1)); }

    bool is_zero() const { return sgn(a) == 0 && sgn(b) == 0; }
    bool is_one() const { return a == 1 && sgn(b) == 0; }
    bool is_rational() const { return sgn(b) == 0; }

    friend bool operator==(const QSqrt3& x, const QSqrt3& y) {
        return x.a == y.a && x.b == y.b;
    }
    friend bool operator!=(const QSqrt3& x, const QSqrt3& y) { return !(x == y); }

    QSqrt3 operator-() const { return QSqrt3(-a, -b); }

    friend QSqrt3 operator+(const QSqrt3& x, const QSqrt3& y) {
        return QSqrt3(x.a + y.a, x.b + y.b);
    }
    friend QSqrt3 operator-(const QSqrt3& x, const QSqrt3& y) {
        return QSqrt3(x.a - y.a, x.b - y.b);
    }
    friend QSqrt3 operator*(const QSqrt3& x, const QSqrt3& y) {
        // (a + b s)(a' + b' s) = (aa' + 3bb') + (ab' + a'b) s
        return QSqrt3(x.a * y.a + 3 * x.b * y.b, x.a * y.b + x.b * y.a);
    }

    QSqrt3 inverse() const {
        // 1/(a + b s) = (a - b s)/(a^2 - 3 b^2); the norm vanishes only at 0
        // because sqrt(3) is irrational.
        Rational n = a * a - 3 * b * b;
        if (sgn(n) == 0)
            throw DomainError("QSqrt3: inverse of zero");
        return QSqrt3(a / n, -b / n);
    }

    friend QSqrt3 operator/(const QSqrt3& x, const QSqrt3& y) { return x * y.inverse(); }

    QSqrt3& operator+=(const QSqrt3& y) { *this = *this + y; return *this; }
    QSqrt3& operator-=(const QSqrt3& y) { *this = *this - y; return *this; }
    QSqrt3& operator*=(const QSqrt3& y) { *this = *this * y; return *this; }

    double to_double() const;
};

inline double QSqrt3::to_double() const {
    static const double kSqrt3 = 1.7320508075688772935;
    return a.get_d() + b.get_d() * kSqrt3;
}

}  // namespace freetorus
