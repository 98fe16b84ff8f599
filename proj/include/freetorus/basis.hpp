#pragma once

#include <map>
#include <mutex>
#include <string>
#include <vector>

#include "freetorus/linalg.hpp"
#include "freetorus/vec.hpp"

namespace freetorus {

/// The named vectors of the W_l^1 analysis.  gamma(i, l, ...) is defined for
/// l != 0 (Plain/Bar additionally need |l| >= 2); the v-power part of the
/// definitions is v_i^{l - sgn(l)}.
enum class GammaKind { OnePlus, OneMinus, Two, Three, Plain, Bar };

/// An ordered family of vectors inside one graded piece, together with its
/// exact Gram matrix.  Complement families are orthogonal (not normalized) and
/// linearly independent; spanning families (the truncated L) need not be.
struct BasisFamily {
    std::string label;
    long l = -1;                  // -1 when the family mixes lengths
    std::vector<Vector> members;
    Matrix gram;                  // gram.at(i, j) = <members[i], members[j]>
};

/// Index into the combined Riesz family: either the m-th vector of the
/// xi_n enumeration or an (i, l, k) triple of the xi^{i,l,k} system.
struct FamilyIndex {
    enum class Kind { XiN, Ilk } kind = Kind::XiN;
    long m = 0;                 // XiN
    int i = 0;
    long l = 0, k = 0;          // Ilk

    friend bool operator==(const FamilyIndex&, const FamilyIndex&) = default;
    friend auto operator<=>(const FamilyIndex&, const FamilyIndex&) = default;

    std::string to_string() const;
};

struct CoeffKey {
    FamilyIndex fam;
    long r = 0, s = 0;

    friend bool operator==(const CoeffKey&, const CoeffKey&) = default;
    friend auto operator<=>(const CoeffKey&, const CoeffKey&) = default;
};

/// Finitely supported coefficient table alpha/beta_{r,s}^{fam}.
using CoeffTable = std::map<CoeffKey, Scalar>;

struct W1Decomposition {
    BasisFamily alpha1;            // span{gamma^i_{+-l}, gammabar^i_{+-l}} (empty at l = 1)
    BasisFamily alpha2;            // span{(u_{3-i} - u_{3-i}^{-1}) v_i^{+-(l-1)}, both sides}
    BasisFamily beta;              // W_l^{1,beta} minus S_l^1 (exact kernel, orthogonalized)
    std::vector<Vector> vpowers;   // v_1^{+-l}, v_2^{+-l}
};

struct XiNEntry {
    long m = 0;          // stable global index (independent of the truncation used)
    long l = 0;
    GradedClass cls = GradedClass::Zero;
    Vector vec;
    Scalar norm_sq;
};

/// Constructs and memoizes every named vector family of the basis analysis.
/// All construction is exact; no numeric orthogonalization happens anywhere.
/// The memo store is internally synchronized; concurrent readers are fine.
class BasisCatalog {
public:
    explicit BasisCatalog(long truncation_cap = 7) : cap_(truncation_cap) {}

    long truncation_cap() const { return cap_; }

    /// chi_l = sum of all length-l words in u-letters only; chi_0 = identity.
    const Vector& chi(long l);
    /// chi_1 / sqrt(3).
    Vector chi1_tilde();

    /// The S_l spanning family {q_l(chi_1 w), q_l(w chi_1) : |w| <= l-1}.
    /// Only |w| = l - 1 contributes (chi_1 shifts lengths by exactly one), so
    /// the shorter words are skipped; exact duplicates are dropped.
    std::vector<Vector> s_l_generators(long l);
    std::vector<Vector> s_l_generators_class(long l, WordGrade cls);

    /// Exact basis of W_l^cls minus S_l^cls: kernel of the conjugate pairing
    /// against the S-generators, then Gram-Schmidt over K (orthogonal, not
    /// normalized; norms stay in the field only after squaring).
    const BasisFamily& complement_basis(long l, WordGrade cls);

    /// xi_{r,s} = q_{l+r+s}(chi_r xi chi_s); zero when r < 0 or s < 0.
    /// xi must be supported in a single length.
    Vector xi_rs(const Vector& xi, long r, long s);

    Vector gamma(int i, long l, GammaKind which);

    const W1Decomposition& w1_decomposition(long l);

    /// xi^{i,l,k}_{r,s}: 3^{1-(r+s)/2} sum over W_r^0 words ending with
    /// u_{3-i}^{+-1}, times v_i^l u_i^k, times W_s^0 words beginning with
    /// u_{3-i}^{+-1}; an r = 0 (s = 0) sum degenerates to the identity word.
    /// Zero for negative r or s; l = 0 is an error.
    Vector xi_ilk(int i, long l, long k, long r, long s);

    /// Squared norms 4 / 6 / 9 for (r,s >= 1) / (one index 0) / (both 0).
    static Scalar xi_ilk_norm_sq(long r, long s);

    /// The Lemma-style enumeration of complement vectors across lengths and
    /// classes (Zero, Two, OneAlpha2, OneBeta), indices stable in truncation.
    const std::vector<XiNEntry>& xi_n_family(long truncation);

    /// Spanning family of the truncated L = span{A W^{1,alpha,1} A, A v_i^{+-l} A}.
    BasisFamily subspace_L_basis(long truncation);

    /// Exact coefficients of x over the combined family
    /// {xi_rs(xi_n, r, s)} u {xi_ilk} within the truncation, via the exact
    /// Gram system.  x must live in lengths <= truncation and be orthogonal to
    /// the chi-span.  Throws (with the numeric residual norm at theta) when x
    /// is not in the truncated span.
    CoeffTable riesz_expand(const Vector& x, long truncation, double theta = 0.6180339887498949);

    /// Orthogonal expansion over the xi^{i,l,k} system alone (it is orthogonal,
    /// so coefficients are plain projections).  residual_out receives
    /// x - sum(coeffs); callers assert it is zero when the span claim applies.
    CoeffTable expand_over_ilk(const Vector& x, Vector* residual_out = nullptr);

    /// project_class including the refined classes; coarse classes are
    /// word-wise filters, OneAlpha1/OneAlpha2 are exact orthogonal projections
    /// onto the stored families.  l = 0 refined requests are errors.
    Vector project_class(const Vector& x, long l, GradedClass g);

    void check_truncation(long t) const;

private:
    const Vector& chi_unlocked(long l);
    const BasisFamily& complement_unlocked(long l, WordGrade cls);
    const W1Decomposition& w1_unlocked(long l);
    std::vector<Vector> s_l_gens_for(long l, int cls_filter);  // -1: all classes

    long cap_;
    std::recursive_mutex mu_;
    std::map<long, Vector> chi_;
    std::map<std::pair<long, WordGrade>, BasisFamily> complements_;
    std::map<long, W1Decomposition> w1_;
    std::vector<XiNEntry> xi_n_;
    long xi_n_built_to_ = 0;
};

/// Orthogonal projection of x onto span(family) via the exact Gram system;
/// also returns the coefficients when coeffs_out is given.
Vector project_onto_span(const Vector& x, const std::vector<Vector>& family,
                         std::vector<Scalar>* coeffs_out = nullptr);

/// Gram matrix gram.at(i,j) = <family[i], family[j]> (parallel kernel).
Matrix gram_matrix(const std::vector<Vector>& family, Exec exec = Exec::Parallel);
/// Rectangular pairing pairing.at(i,j) = <rows[i], cols[j]>.
Matrix pairing_matrix(const std::vector<Vector>& rows, const std::vector<Vector>& cols,
                      Exec exec = Exec::Parallel);

}  // namespace freetorus
