// Small dense linear algebra for N x N channel matrices (N <= ~10).
//
// Everything here is value-based and allocation-light: matrices are flat
// row-major vectors, determinants go through partial-pivot LU, and the
// symmetric eigensolver is a cyclic Jacobi sweep, which at these sizes is
// both simple and accurate to machine precision.
#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <vector>

#include "coxspec/errors.hpp"

namespace coxspec {

using cplx = std::complex<double>;

template <class T>
class SquareMat {
public:
    SquareMat() = default;
    explicit SquareMat(int n, T value = T{}) : n_(n), a_(static_cast<size_t>(n) * n, value) {}

    int dim() const { return n_; }
    T& operator()(int i, int j) { return a_[static_cast<size_t>(i) * n_ + j]; }
    const T& operator()(int i, int j) const { return a_[static_cast<size_t>(i) * n_ + j]; }

    static SquareMat identity(int n) {
        SquareMat m(n);
        for (int i = 0; i < n; ++i) m(i, i) = T{1};
        return m;
    }

    SquareMat operator*(const SquareMat& rhs) const {
        SquareMat out(n_);
        for (int i = 0; i < n_; ++i)
            for (int k = 0; k < n_; ++k) {
                const T aik = (*this)(i, k);
                for (int j = 0; j < n_; ++j) out(i, j) += aik * rhs(k, j);
            }
        return out;
    }

    SquareMat operator+(const SquareMat& rhs) const {
        SquareMat out = *this;
        for (size_t i = 0; i < a_.size(); ++i) out.a_[i] += rhs.a_[i];
        return out;
    }

    SquareMat operator-(const SquareMat& rhs) const {
        SquareMat out = *this;
        for (size_t i = 0; i < a_.size(); ++i) out.a_[i] -= rhs.a_[i];
        return out;
    }

    double max_abs() const {
        double m = 0.0;
        for (const T& v : a_) m = std::max(m, std::abs(v));
        return m;
    }

    double max_asymmetry() const {
        double m = 0.0;
        for (int i = 0; i < n_; ++i)
            for (int j = i + 1; j < n_; ++j) m = std::max(m, std::abs((*this)(i, j) - (*this)(j, i)));
        return m;
    }

private:
    int n_ = 0;
    std::vector<T> a_;
};

using CMat = SquareMat<cplx>;
using RMat = SquareMat<double>;

inline CMat to_complex(const RMat& m) {
    CMat out(m.dim());
    for (int i = 0; i < m.dim(); ++i)
        for (int j = 0; j < m.dim(); ++j) out(i, j) = m(i, j);
    return out;
}

// Determinant by partial-pivot LU; T is double or cplx.
template <class T>
T lu_det(SquareMat<T> m) {
    const int n = m.dim();
    T det{1};
    for (int col = 0; col < n; ++col) {
        int piv = col;
        double best = std::abs(m(col, col));
        for (int r = col + 1; r < n; ++r)
            if (std::abs(m(r, col)) > best) { best = std::abs(m(r, col)); piv = r; }
        if (best == 0.0) return T{0};
        if (piv != col) {
            for (int j = 0; j < n; ++j) std::swap(m(piv, j), m(col, j));
            det = -det;
        }
        det *= m(col, col);
        for (int r = col + 1; r < n; ++r) {
            const T f = m(r, col) / m(col, col);
            for (int j = col + 1; j < n; ++j) m(r, j) -= f * m(col, j);
        }
    }
    return det;
}

// Determinant of the principal minor on the rows/cols NOT in `drop_mask`
// (bit j set drops row/col j).
template <class T>
T principal_minor_det(const SquareMat<T>& m, unsigned drop_mask) {
    std::vector<int> keep;
    for (int j = 0; j < m.dim(); ++j)
        if (!(drop_mask & (1u << j))) keep.push_back(j);
    SquareMat<T> sub(static_cast<int>(keep.size()));
    for (size_t i = 0; i < keep.size(); ++i)
        for (size_t j = 0; j < keep.size(); ++j) sub(static_cast<int>(i), static_cast<int>(j)) = m(keep[i], keep[j]);
    return lu_det(sub);
}

// Solve m x = b in place via partial-pivot LU. Throws on (numerically)
// singular systems.
template <class T>
std::vector<T> lu_solve(SquareMat<T> m, std::vector<T> b) {
    const int n = m.dim();
    std::vector<int> perm(n);
    for (int i = 0; i < n; ++i) perm[i] = i;
    for (int col = 0; col < n; ++col) {
        int piv = col;
        double best = std::abs(m(col, col));
        for (int r = col + 1; r < n; ++r)
            if (std::abs(m(r, col)) > best) { best = std::abs(m(r, col)); piv = r; }
        if (best == 0.0) throw NumericError("singular-matrix", "lu_solve: singular matrix");
        if (piv != col) {
            for (int j = 0; j < n; ++j) std::swap(m(piv, j), m(col, j));
            std::swap(b[piv], b[col]);
        }
        for (int r = col + 1; r < n; ++r) {
            const T f = m(r, col) / m(col, col);
            for (int j = col + 1; j < n; ++j) m(r, j) -= f * m(col, j);
            b[r] -= f * b[col];
        }
    }
    for (int r = n - 1; r >= 0; --r) {
        T s = b[r];
        for (int j = r + 1; j < n; ++j) s -= m(r, j) * b[j];
        b[r] = s / m(r, r);
    }
    return b;
}

template <class T>
SquareMat<T> lu_inverse(const SquareMat<T>& m) {
    const int n = m.dim();
    SquareMat<T> inv(n);
    for (int col = 0; col < n; ++col) {
        std::vector<T> e(n, T{});
        e[col] = T{1};
        std::vector<T> x = lu_solve(m, std::move(e));
        for (int r = 0; r < n; ++r) inv(r, col) = x[r];
    }
    return inv;
}

// Eigenvalues (ascending) of a real symmetric matrix by cyclic Jacobi
// rotations. Optionally accumulates eigenvectors as columns of `vecs`.
// Iterates until the off-diagonal norm drops below 1e-14 * ||m||.
inline std::vector<double> jacobi_eigenvalues(RMat m, RMat* vecs = nullptr) {
    const int n = m.dim();
    if (vecs) *vecs = RMat::identity(n);
    const double scale = std::max(m.max_abs(), 1e-300);
    for (int sweep = 0; sweep < 100; ++sweep) {
        double off = 0.0;
        for (int p = 0; p < n; ++p)
            for (int q = p + 1; q < n; ++q) off = std::max(off, std::abs(m(p, q)));
        if (off <= 1e-14 * scale) break;
        for (int p = 0; p < n; ++p)
            for (int q = p + 1; q < n; ++q) {
                const double apq = m(p, q);
                if (std::abs(apq) <= 1e-300) continue;
                const double theta = (m(q, q) - m(p, p)) / (2.0 * apq);
                const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                for (int j = 0; j < n; ++j) {
                    const double mpj = m(p, j), mqj = m(q, j);
                    m(p, j) = c * mpj - s * mqj;
                    m(q, j) = s * mpj + c * mqj;
                }
                for (int i = 0; i < n; ++i) {
                    const double mip = m(i, p), miq = m(i, q);
                    m(i, p) = c * mip - s * miq;
                    m(i, q) = s * mip + c * miq;
                }
                if (vecs)
                    for (int i = 0; i < n; ++i) {
                        const double vip = (*vecs)(i, p), viq = (*vecs)(i, q);
                        (*vecs)(i, p) = c * vip - s * viq;
                        (*vecs)(i, q) = s * vip + c * viq;
                    }
            }
    }
    std::vector<double> ev(n);
    for (int i = 0; i < n; ++i) ev[i] = m(i, i);
    // sort ascending, permuting eigenvector columns alongside
    std::vector<int> order(n);
    for (int i = 0; i < n; ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](int a, int b) { return ev[a] < ev[b]; });
    std::vector<double> sorted(n);
    for (int i = 0; i < n; ++i) sorted[i] = ev[order[i]];
    if (vecs) {
        RMat v = *vecs;
        for (int i = 0; i < n; ++i)
            for (int r = 0; r < n; ++r) (*vecs)(r, i) = v(r, order[i]);
    }
    return sorted;
}

} // namespace coxspec
