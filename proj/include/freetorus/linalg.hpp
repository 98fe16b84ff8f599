#pragma once

#include <optional>
#include <vector>

#include "freetorus/parallel.hpp"
#include "freetorus/scalar.hpp"

namespace freetorus {

/// Dense matrix over the coefficient field K.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols)
        : rows_(rows), cols_(cols), a_(rows * cols) {}

    static Matrix identity(std::size_t n);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }

    Scalar& at(std::size_t i, std::size_t j) { return a_[i * cols_ + j]; }
    const Scalar& at(std::size_t i, std::size_t j) const { return a_[i * cols_ + j]; }

    friend bool operator==(const Matrix&, const Matrix&) = default;

private:
    std::size_t rows_ = 0, cols_ = 0;
    std::vector<Scalar> a_;
};

enum class PivotStrategy {
    LeastTerms,    // fewest Laurent terms, ties by row index (the default)
    FirstNonzero,  // plain first nonzero row (kept for the strategy-equivalence test)
};

/// Reduced row echelon form over K.  Forward elimination is fraction-free
/// (Bareiss) on denominator-cleared rows to control coefficient blowup; the
/// back-substitution normalizes to the unique RREF, so results do not depend
/// on the pivot strategy.
struct Echelon {
    Matrix rref;
    std::vector<std::size_t> pivot_cols;
    std::size_t rank = 0;
};

Echelon echelon_form(const Matrix& m, PivotStrategy strategy = PivotStrategy::LeastTerms,
                     Exec exec = Exec::Parallel);

std::size_t rank(const Matrix& m, PivotStrategy strategy = PivotStrategy::LeastTerms,
                 Exec exec = Exec::Parallel);

/// Basis of the right kernel {v : m v = 0}, echelon-normalized (one vector per
/// free column, unit coordinate there), deterministic.
std::vector<std::vector<Scalar>> kernel_basis(const Matrix& m,
                                              PivotStrategy strategy = PivotStrategy::LeastTerms,
                                              Exec exec = Exec::Parallel);

/// Exact solve m x = rhs.  On success, solution is the particular solution
/// with free variables zero and residual is all-zero; on an inconsistent
/// system, solution is empty and residual = m x~ - rhs (for the best
/// consistent attempt x~) is certified nonzero.
struct SolveOutcome {
    std::optional<std::vector<Scalar>> solution;
    std::vector<Scalar> residual;
};

SolveOutcome solve(const Matrix& m, const std::vector<Scalar>& rhs,
                   PivotStrategy strategy = PivotStrategy::LeastTerms,
                   Exec exec = Exec::Parallel);

std::vector<Scalar> mat_vec(const Matrix& m, const std::vector<Scalar>& v);

}  // namespace freetorus
