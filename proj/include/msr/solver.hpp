#ifndef MSR_SOLVER_HPP
#define MSR_SOLVER_HPP

#include <cstddef>
#include <vector>

#include "msr/errors.hpp"
#include "msr/gf2m.hpp"

namespace msr {

/// Dense row-major matrix over GF(2^m).
struct GfMatrix {
    std::size_t rows = 0, cols = 0;
    std::vector<gf_elem> a;

    GfMatrix() = default;
    GfMatrix(std::size_t rows, std::size_t cols) : rows(rows), cols(cols), a(rows * cols, 0) {}

    gf_elem at(std::size_t i, std::size_t j) const { return a[i * cols + j]; }
    gf_elem& at(std::size_t i, std::size_t j) { return a[i * cols + j]; }

    static GfMatrix identity(std::size_t n) {
        GfMatrix m(n, n);
        for (std::size_t i = 0; i < n; ++i) m.at(i, i) = 1;
        return m;
    }
};

inline std::vector<gf_elem> mat_vec(const Field& f, const GfMatrix& m,
                                    const std::vector<gf_elem>& x) {
    std::vector<gf_elem> y(m.rows, 0);
    for (std::size_t i = 0; i < m.rows; ++i) {
        gf_elem acc = 0;
        for (std::size_t j = 0; j < m.cols; ++j) acc ^= f.mul(m.at(i, j), x[j]);
        y[i] = acc;
    }
    return y;
}

namespace detail {

// Forward elimination with first-nonzero pivoting. Returns the rank; when
// pivots is non-null, records the pivot column of each eliminated row.
inline std::size_t eliminate(const Field& f, GfMatrix& m, std::vector<gf_elem>* rhs,
                             std::vector<std::size_t>* pivots = nullptr) {
    std::size_t rank = 0;
    for (std::size_t col = 0; col < m.cols && rank < m.rows; ++col) {
        std::size_t piv = rank;
        while (piv < m.rows && m.at(piv, col) == 0) ++piv;
        if (piv == m.rows) continue;
        if (piv != rank) {
            for (std::size_t j = 0; j < m.cols; ++j) std::swap(m.at(piv, j), m.at(rank, j));
            if (rhs) std::swap((*rhs)[piv], (*rhs)[rank]);
        }
        const gf_elem inv_p = f.inv(m.at(rank, col));
        for (std::size_t j = col; j < m.cols; ++j) m.at(rank, j) = f.mul(inv_p, m.at(rank, j));
        if (rhs) (*rhs)[rank] = f.mul(inv_p, (*rhs)[rank]);
        for (std::size_t i = 0; i < m.rows; ++i) {
            if (i == rank) continue;
            const gf_elem factor = m.at(i, col);
            if (factor == 0) continue;
            for (std::size_t j = col; j < m.cols; ++j)
                m.at(i, j) ^= f.mul(factor, m.at(rank, j));
            if (rhs) (*rhs)[i] ^= f.mul(factor, (*rhs)[rank]);
        }
        if (pivots) pivots->push_back(col);
        ++rank;
    }
    return rank;
}

} // namespace detail

/// Solve A*x = b for square A. Throws singular_error naming the first column
/// with no usable pivot.
inline std::vector<gf_elem> solve(const Field& f, const GfMatrix& m,
                                  const std::vector<gf_elem>& b) {
    if (m.rows != m.cols) throw param_error("solve requires a square matrix");
    if (b.size() != m.rows) throw param_error("rhs length mismatch");
    GfMatrix work = m;
    std::vector<gf_elem> rhs = b;
    std::vector<std::size_t> pivots;
    const std::size_t rank = detail::eliminate(f, work, &rhs, &pivots);
    if (rank != m.cols) {
        std::size_t expect = 0;
        for (std::size_t c = 0; c < m.cols; ++c) {
            if (expect < pivots.size() && pivots[expect] == c) { ++expect; continue; }
            throw singular_error("singular system: no pivot in column " + std::to_string(c), c);
        }
        throw singular_error("singular system", m.cols);
    }
    return rhs;
}

/// Solve a consistent system with rows >= cols and full column rank
/// (each unknown pinned by some equation). Throws singular_error if the
/// columns are dependent, internal_error if the equations disagree.
inline std::vector<gf_elem> solve_full_rank(const Field& f, const GfMatrix& m,
                                            const std::vector<gf_elem>& b) {
    if (m.rows < m.cols) throw param_error("underdetermined system");
    if (b.size() != m.rows) throw param_error("rhs length mismatch");
    GfMatrix work = m;
    std::vector<gf_elem> rhs = b;
    std::vector<std::size_t> pivots;
    const std::size_t rank = detail::eliminate(f, work, &rhs, &pivots);
    if (rank != m.cols) {
        std::size_t expect = 0;
        for (std::size_t c = 0; c < m.cols; ++c) {
            if (expect < pivots.size() && pivots[expect] == c) { ++expect; continue; }
            throw singular_error("rank-deficient system: no pivot in column " + std::to_string(c), c);
        }
    }
    for (std::size_t i = rank; i < m.rows; ++i)
        if (rhs[i] != 0) throw internal_error("inconsistent linear system");
    // after full reduction row i solves unknown pivots[i] = i for i < cols
    rhs.resize(m.cols);
    return rhs;
}

/// Determinant by elimination; char 2, so plain pivot product.
inline gf_elem determinant(const Field& f, const GfMatrix& m) {
    if (m.rows != m.cols) throw param_error("determinant requires a square matrix");
    GfMatrix work = m;
    gf_elem det = 1;
    for (std::size_t col = 0; col < work.cols; ++col) {
        std::size_t piv = col;
        while (piv < work.rows && work.at(piv, col) == 0) ++piv;
        if (piv == work.rows) return 0;
        if (piv != col)
            for (std::size_t j = 0; j < work.cols; ++j) std::swap(work.at(piv, j), work.at(col, j));
        det = f.mul(det, work.at(col, col));
        const gf_elem inv_p = f.inv(work.at(col, col));
        for (std::size_t i = col + 1; i < work.rows; ++i) {
            const gf_elem factor = f.mul(work.at(i, col), inv_p);
            if (factor == 0) continue;
            for (std::size_t j = col; j < work.cols; ++j)
                work.at(i, j) ^= f.mul(factor, work.at(col, j));
        }
    }
    return det;
}

inline std::size_t rank(const Field& f, const GfMatrix& m) {
    GfMatrix work = m;
    return detail::eliminate(f, work, nullptr);
}

/// Inverse of a square matrix; throws singular_error if none exists.
inline GfMatrix invert(const Field& f, const GfMatrix& m) {
    if (m.rows != m.cols) throw param_error("invert requires a square matrix");
    const std::size_t n = m.rows;
    GfMatrix work(n, 2 * n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) work.at(i, j) = m.at(i, j);
        work.at(i, n + i) = 1;
    }
    std::vector<std::size_t> pivots;
    const std::size_t rank = detail::eliminate(f, work, nullptr, &pivots);
    if (rank != n || pivots.back() >= n) {
        for (std::size_t c = 0; c < n; ++c)
            if (c >= pivots.size() || pivots[c] != c)
                throw singular_error("matrix is singular at column " + std::to_string(c), c);
    }
    GfMatrix out(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) out.at(i, j) = work.at(i, n + j);
    return out;
}

} // namespace msr

#endif
