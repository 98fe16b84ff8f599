#pragma once

#include <complex>
#include <map>
#include <string>
#include <vector>

#include "freetorus/parallel.hpp"
#include "freetorus/word.hpp"

namespace freetorus {

/// Grading labels for subspaces of W_l.  Zero/One/Two are the coarse classes
/// (by the number of syllables with nonzero v-exponent); OneAlpha/OneBeta and
/// the refinements OneAlpha1/OneAlpha2 follow the W_l^{1,*} decomposition and
/// are only defined for l >= 1.
enum class GradedClass { Zero, OneAlpha, OneAlpha1, OneAlpha2, OneBeta, One, Two };

std::string graded_class_name(GradedClass g);

/// Finitely supported Scalar-valued function on the word basis; models
/// elements of the algebraic free product and of L^2 M.  No stored zero
/// coefficients; equality is support equality.  The support map is ordered by
/// the canonical word order, so iteration and serialization are deterministic.
class Vector {
public:
    using Support = std::map<Word, Scalar>;

    Vector() = default;
    explicit Vector(const Word& w) { sup_.emplace(w, Scalar(1)); }
    Vector(const Scalar& c, const Word& w) { if (!c.is_zero()) sup_.emplace(w, c); }
    explicit Vector(const ScaledWord& sw) : Vector(sw.coeff, sw.word) {}

    static Vector identity() { return Vector(Word::identity()); }

    const Support& support() const { return sup_; }
    bool is_zero() const { return sup_.empty(); }
    std::size_t term_count() const { return sup_.size(); }

    Scalar coeff(const Word& w) const {
        auto it = sup_.find(w);
        return it == sup_.end() ? Scalar() : it->second;
    }

    void add_term(const Word& w, const Scalar& c) {
        if (c.is_zero()) return;
        auto [it, inserted] = sup_.emplace(w, c);
        if (!inserted) {
            it->second += c;
            if (it->second.is_zero()) sup_.erase(it);
        }
    }

    friend bool operator==(const Vector&, const Vector&) = default;

    Vector operator-() const;
    friend Vector operator+(const Vector& x, const Vector& y);
    friend Vector operator-(const Vector& x, const Vector& y);
    friend Vector operator*(const Scalar& c, const Vector& x);

    Vector& operator+=(const Vector& y);
    Vector& operator-=(const Vector& y);

    std::string to_string() const;  // "<scalar> * <word> + ..."

private:
    Support sup_;
};

/// Exact linear combination; zero-coefficient entries are dropped.
Vector vec_combine(const std::vector<Scalar>& scalars, const std::vector<Vector>& vectors);

/// Bilinear extension of word multiplication.
Vector mul_vec(const Vector& x, const Vector& y, Exec exec = Exec::Parallel);

/// Free-product trace: the coefficient of the identity word.
Scalar trace(const Vector& x);

/// Inner product <x, y> = sum_w conj(c^y_w) c^x_w (linear in x).  The word
/// basis is orthonormal; the trace form tau(y* x) is kept as a test oracle.
Scalar inner(const Vector& x, const Vector& y);

/// Squared L^2 norm <x, x>.
Scalar norm_sq(const Vector& x);

/// a* x with a word acting by multiplication: adjoint of a Vector.
Vector adjoint_vec(const Vector& x);

/// q_l: restriction of the support to words of length exactly l.
Vector project_length(const Vector& x, long l);

/// Word-wise projection onto the named class inside W_l.  Handles the classes
/// that are spanned by basis words (Zero, One, Two, OneAlpha, OneBeta); the
/// refinements OneAlpha1/OneAlpha2 need basis data and live on BasisCatalog.
Vector project_class_coarse(const Vector& x, long l, GradedClass g);

/// True for basis words of W_l^{1,alpha}: shapes u_i^{+-1} v_j^{+-(l-1)} and
/// v_j^{+-(l-1)} u_i^{+-1} (l >= 2).
bool is_alpha_word(const Word& w, long l);
/// True for the pure v-powers v_i^{+-l}.
bool is_v_power(const Word& w);

/// Restriction of the support to words whose first syllable is a bare v-power
/// (u-exponent 0).  Such words have four left u-letter extensions instead of
/// three, which shifts the r = 1 boundary of the chi_1 recursions.
Vector bare_v_led_part(const Vector& x);
/// Mirror restriction: last syllable a bare v-power.
Vector bare_v_trailing_part(const Vector& x);
/// True when no support word is bare-v led or bare-v trailing; on such vectors
/// the displayed boundary coefficients of the recursion lemmas are exact.
bool is_u_boundary_vector(const Vector& x);

/// All completely reduced words of length l, canonically ordered (memoized).
const std::vector<Word>& words_of_length(long l);

/// Deterministic enumeration of the length-l words in a coarse class.
/// basis_of_W(l, Zero) has exactly 4 * 3^(l-1) entries for l >= 1.
const std::vector<Word>& basis_of_W(long l, WordGrade cls);

/// Floating companion of Vector used by the sampled-numeric checks and by the
/// independent float recomputations in the acceptance suite.
class NumericVector {
public:
    using Support = std::map<Word, std::complex<double>>;

    NumericVector() = default;

    static NumericVector from_exact(const Vector& x, double theta);

    const Support& support() const { return sup_; }

    void add_term(const Word& w, std::complex<double> c) {
        auto [it, inserted] = sup_.emplace(w, c);
        if (!inserted) it->second += c;
    }

    NumericVector& operator+=(const NumericVector& y);
    friend NumericVector operator*(std::complex<double> c, const NumericVector& x);

    double norm() const;

    friend NumericVector mul_numeric(const NumericVector& x, const NumericVector& y, double theta);
    friend std::complex<double> inner_numeric(const NumericVector& x, const NumericVector& y);

private:
    Support sup_;
};

NumericVector mul_numeric(const NumericVector& x, const NumericVector& y, double theta);
std::complex<double> inner_numeric(const NumericVector& x, const NumericVector& y);

/// Vector literal I/O: "<scalar> * <word> [+ ...]"; scalars with additive
/// structure are parenthesized on output.
Vector parse_vector_literal(const std::string& text);

}  // namespace freetorus
