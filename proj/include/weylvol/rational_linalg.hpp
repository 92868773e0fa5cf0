// Dense exact linear algebra over the rationals. Matrices here are tiny
// (rank x rank), so cubic algorithms with full pivoting-free elimination
// are fine; we only ever factor symmetric positive definite inputs.
#pragma once

#include <stdexcept>
#include <utility>
#include <vector>

#include "rational.hpp"

namespace weylvol {

class RatMatrix {
public:
    RatMatrix() = default;
    RatMatrix(int rows, int cols) : rows_(rows), cols_(cols), a_(std::size_t(rows) * cols, Rational(0)) {}

    static RatMatrix identity(int n) {
        RatMatrix m(n, n);
        for (int i = 0; i < n; ++i) m(i, i) = 1;
        return m;
    }

    int rows() const { return rows_; }
    int cols() const { return cols_; }

    Rational& operator()(int i, int j) { return a_[std::size_t(i) * cols_ + j]; }
    const Rational& operator()(int i, int j) const { return a_[std::size_t(i) * cols_ + j]; }

    RatMatrix transposed() const {
        RatMatrix t(cols_, rows_);
        for (int i = 0; i < rows_; ++i)
            for (int j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
        return t;
    }

    friend RatMatrix operator*(const RatMatrix& x, const RatMatrix& y) {
        if (x.cols_ != y.rows_) throw std::invalid_argument("RatMatrix: dimension mismatch");
        RatMatrix z(x.rows_, y.cols_);
        for (int i = 0; i < x.rows_; ++i)
            for (int k = 0; k < x.cols_; ++k) {
                if (x(i, k) == 0) continue;
                for (int j = 0; j < y.cols_; ++j) z(i, j) += x(i, k) * y(k, j);
            }
        return z;
    }

    bool is_symmetric() const {
        if (rows_ != cols_) return false;
        for (int i = 0; i < rows_; ++i)
            for (int j = i + 1; j < cols_; ++j)
                if ((*this)(i, j) != (*this)(j, i)) return false;
        return true;
    }

private:
    int rows_ = 0, cols_ = 0;
    std::vector<Rational> a_;
};

/// Fraction-free is unnecessary at these sizes; plain Gaussian elimination.
inline Rational rat_det(RatMatrix m) {
    if (m.rows() != m.cols()) throw std::invalid_argument("rat_det: square matrix required");
    const int n = m.rows();
    Rational det = 1;
    for (int c = 0; c < n; ++c) {
        int p = -1;
        for (int i = c; i < n; ++i)
            if (m(i, c) != 0) { p = i; break; }
        if (p < 0) return Rational(0);
        if (p != c) {
            for (int j = c; j < n; ++j) std::swap(m(p, j), m(c, j));
            det = -det;
        }
        det *= m(c, c);
        for (int i = c + 1; i < n; ++i) {
            if (m(i, c) == 0) continue;
            Rational f = m(i, c) / m(c, c);
            for (int j = c; j < n; ++j) m(i, j) -= f * m(c, j);
        }
    }
    return det;
}

inline RatMatrix rat_inverse(RatMatrix m) {
    if (m.rows() != m.cols()) throw std::invalid_argument("rat_inverse: square matrix required");
    const int n = m.rows();
    RatMatrix inv = RatMatrix::identity(n);
    for (int c = 0; c < n; ++c) {
        int p = -1;
        for (int i = c; i < n; ++i)
            if (m(i, c) != 0) { p = i; break; }
        if (p < 0) throw std::domain_error("rat_inverse: singular matrix");
        if (p != c)
            for (int j = 0; j < n; ++j) {
                std::swap(m(p, j), m(c, j));
                std::swap(inv(p, j), inv(c, j));
            }
        Rational piv = m(c, c);
        for (int j = 0; j < n; ++j) {
            m(c, j) /= piv;
            inv(c, j) /= piv;
        }
        for (int i = 0; i < n; ++i) {
            if (i == c || m(i, c) == 0) continue;
            Rational f = m(i, c);
            for (int j = 0; j < n; ++j) {
                m(i, j) -= f * m(c, j);
                inv(i, j) -= f * inv(c, j);
            }
        }
    }
    return inv;
}

struct RatLDL {
    RatMatrix L;              // unit lower triangular
    std::vector<Rational> d;  // pivots, all > 0 for positive definite input
};

/// G = L diag(d) L^T. Throws unless G is symmetric positive definite.
inline RatLDL rat_ldlt(const RatMatrix& g) {
    if (!g.is_symmetric()) throw std::invalid_argument("rat_ldlt: symmetric matrix required");
    const int n = g.rows();
    RatLDL f{RatMatrix::identity(n), std::vector<Rational>(n)};
    for (int j = 0; j < n; ++j) {
        Rational dj = g(j, j);
        for (int k = 0; k < j; ++k) dj -= f.d[k] * f.L(j, k) * f.L(j, k);
        if (dj <= 0) throw std::domain_error("rat_ldlt: matrix is not positive definite");
        f.d[j] = dj;
        for (int i = j + 1; i < n; ++i) {
            Rational v = g(i, j);
            for (int k = 0; k < j; ++k) v -= f.d[k] * f.L(i, k) * f.L(j, k);
            f.L(i, j) = v / dj;
        }
    }
    return f;
}

/// G = U diag(d) U^T with U unit upper triangular: the LDL^T of the
/// index-reversed matrix, un-reversed. Lattice walkers want this order
/// because coordinate k then only couples to coordinates chosen before it.
inline RatLDL rat_udut(const RatMatrix& g) {
    const int n = g.rows();
    RatMatrix rev(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) rev(i, j) = g(n - 1 - i, n - 1 - j);
    RatLDL f = rat_ldlt(rev);
    RatLDL out{RatMatrix::identity(n), std::vector<Rational>(n)};
    for (int i = 0; i < n; ++i) {
        out.d[i] = f.d[n - 1 - i];
        for (int j = 0; j < n; ++j) out.L(i, j) = f.L(n - 1 - i, n - 1 - j);
    }
    return out;
}

inline std::vector<Rational> leading_principal_minors(const RatMatrix& m) {
    std::vector<Rational> out;
    out.reserve(m.rows());
    for (int k = 1; k <= m.rows(); ++k) {
        RatMatrix sub(k, k);
        for (int i = 0; i < k; ++i)
            for (int j = 0; j < k; ++j) sub(i, j) = m(i, j);
        out.push_back(rat_det(sub));
    }
    return out;
}

}  // namespace weylvol
