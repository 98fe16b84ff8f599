#include "freetorus/linalg.hpp"

#include <algorithm>

namespace freetorus {

Matrix Matrix::identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m.at(i, i) = Scalar(1);
    return m;
}

namespace {

/// Fraction-free forward elimination state: polynomial matrix plus the row
/// permutation applied so far.
struct Forward {
    std::vector<std::vector<LaurentPoly>> p;  // rows x cols
    std::vector<std::size_t> pivot_cols;
    std::vector<std::size_t> pivot_rows;  // row index (post-swap) of each pivot
};

Forward bareiss_forward(const Matrix& m, PivotStrategy strategy, Exec exec) {
    const std::size_t rows = m.rows(), cols = m.cols();
    Forward fw;
    fw.p.assign(rows, std::vector<LaurentPoly>(cols));
    // Clear denominators row by row: multiply each row by the lcm of its
    // denominators (kernel/rank/solve results are invariant under row scaling).
    for (std::size_t i = 0; i < rows; ++i) {
        LaurentPoly l(1);
        for (std::size_t j = 0; j < cols; ++j) {
            const LaurentPoly& d = m.at(i, j).den();
            if (!d.is_one())
                l = LaurentPoly::div_exact(l * d, LaurentPoly::gcd(l, d));
        }
        for (std::size_t j = 0; j < cols; ++j) {
            const Scalar& s = m.at(i, j);
            if (!s.is_zero())
                fw.p[i][j] = s.num() * LaurentPoly::div_exact(l, s.den());
        }
    }

    LaurentPoly prev_pivot(1);
    std::size_t pr = 0;  // next pivot row slot
    for (std::size_t col = 0; col < cols && pr < rows; ++col) {
        // Pivot selection among rows pr..rows-1.
        std::size_t best = rows;
        for (std::size_t i = pr; i < rows; ++i) {
            if (fw.p[i][col].is_zero()) continue;
            if (strategy == PivotStrategy::FirstNonzero) {
                best = i;
                break;
            }
            if (best == rows ||
                fw.p[i][col].term_count() < fw.p[best][col].term_count())
                best = i;
        }
        if (best == rows) continue;  // free column
        std::swap(fw.p[pr], fw.p[best]);
        const LaurentPoly pivot = fw.p[pr][col];
        const std::size_t pr_local = pr;
#ifdef _OPENMP
        const bool par = exec == Exec::Parallel && (rows - pr) * cols >= kParallelGrain;
#pragma omp parallel for schedule(dynamic, 4) if (par)
#endif
        for (std::size_t i = pr_local + 1; i < rows; ++i) {
            // Rows with a zero entry in the pivot column still get the
            // p[i][j] * pivot / prev_pivot rescale; Bareiss divisibility
            // depends on it.
            const LaurentPoly mi = fw.p[i][col];
            for (std::size_t j = col; j < cols; ++j) {
                LaurentPoly t = fw.p[i][j] * pivot - mi * fw.p[pr_local][j];
                fw.p[i][j] = t.is_zero() ? t : LaurentPoly::div_exact(t, prev_pivot);
            }
        }
        prev_pivot = pivot;
        fw.pivot_cols.push_back(col);
        fw.pivot_rows.push_back(pr);
        ++pr;
    }
    return fw;
}

/// Full RREF from the forward phase: pivot rows normalized to leading 1 and
/// cleared above.  RREF is unique, so the pivot strategy cannot change it.
Echelon to_rref(Forward fw, std::size_t cols) {
    const std::size_t r = fw.pivot_cols.size();
    Echelon e;
    e.pivot_cols = fw.pivot_cols;
    e.rank = r;
    e.rref = Matrix(r, cols);
    // Scalar rows of the echelon (divide by pivot entries).
    for (std::size_t i = 0; i < r; ++i) {
        const LaurentPoly& piv = fw.p[i][fw.pivot_cols[i]];
        for (std::size_t j = fw.pivot_cols[i]; j < cols; ++j) {
            if (!fw.p[i][j].is_zero()) e.rref.at(i, j) = Scalar(fw.p[i][j], piv);
        }
    }
    // Eliminate above the pivots, last pivot first.
    for (std::size_t k = r; k-- > 0;) {
        const std::size_t pc = fw.pivot_cols[k];
        for (std::size_t i = 0; i < k; ++i) {
            const Scalar f = e.rref.at(i, pc);
            if (f.is_zero()) continue;
            for (std::size_t j = pc; j < cols; ++j) {
                if (!e.rref.at(k, j).is_zero())
                    e.rref.at(i, j) -= f * e.rref.at(k, j);
            }
        }
    }
    return e;
}

}  // namespace

Echelon echelon_form(const Matrix& m, PivotStrategy strategy, Exec exec) {
    return to_rref(bareiss_forward(m, strategy, exec), m.cols());
}

std::size_t rank(const Matrix& m, PivotStrategy strategy, Exec exec) {
    return bareiss_forward(m, strategy, exec).pivot_cols.size();
}

std::vector<std::vector<Scalar>> kernel_basis(const Matrix& m, PivotStrategy strategy, Exec exec) {
    const Echelon e = echelon_form(m, strategy, exec);
    std::vector<bool> is_pivot(m.cols(), false);
    for (std::size_t c : e.pivot_cols) is_pivot[c] = true;
    std::vector<std::vector<Scalar>> basis;
    for (std::size_t f = 0; f < m.cols(); ++f) {
        if (is_pivot[f]) continue;
        std::vector<Scalar> v(m.cols());
        v[f] = Scalar(1);
        for (std::size_t k = 0; k < e.rank; ++k)
            v[e.pivot_cols[k]] = -e.rref.at(k, f);
        basis.push_back(std::move(v));
    }
    return basis;
}

std::vector<Scalar> mat_vec(const Matrix& m, const std::vector<Scalar>& v) {
    if (v.size() != m.cols()) throw DomainError("mat_vec: dimension mismatch");
    std::vector<Scalar> out(m.rows());
    for (std::size_t i = 0; i < m.rows(); ++i) {
        Scalar acc;
        for (std::size_t j = 0; j < m.cols(); ++j) {
            if (!m.at(i, j).is_zero() && !v[j].is_zero()) acc += m.at(i, j) * v[j];
        }
        out[i] = acc;
    }
    return out;
}

SolveOutcome solve(const Matrix& m, const std::vector<Scalar>& rhs,
                   PivotStrategy strategy, Exec exec) {
    if (rhs.size() != m.rows()) throw DomainError("solve: dimension mismatch");
    Matrix aug(m.rows(), m.cols() + 1);
    for (std::size_t i = 0; i < m.rows(); ++i) {
        for (std::size_t j = 0; j < m.cols(); ++j) aug.at(i, j) = m.at(i, j);
        aug.at(i, m.cols()) = rhs[i];
    }
    const Echelon e = echelon_form(aug, strategy, exec);
    SolveOutcome out;
    const bool inconsistent =
        !e.pivot_cols.empty() && e.pivot_cols.back() == m.cols();
    std::vector<Scalar> x(m.cols());
    for (std::size_t k = 0; k < e.rank; ++k) {
        if (e.pivot_cols[k] == m.cols()) break;
        x[e.pivot_cols[k]] = e.rref.at(k, m.cols());
    }
    if (inconsistent) {
        std::vector<Scalar> mv = mat_vec(m, x);
        out.residual.resize(m.rows());
        for (std::size_t i = 0; i < m.rows(); ++i) out.residual[i] = mv[i] - rhs[i];
        return out;
    }
    out.solution = std::move(x);
    out.residual.assign(m.rows(), Scalar());
    return out;
}

}  // namespace freetorus
