#pragma once

#include <algorithm>
#include <cmath>
#include <utility>
#include <vector>

#include "substoch/matrix.hpp"

namespace substoch {

/// Pivot magnitudes below this fraction of the largest initial entry make
/// float elimination report SingularMatrix.
inline constexpr double kSingularPivotFloor = 1e-13;

namespace detail {

// Fraction-free (Bareiss) elimination. Every intermediate division is exact
// in an integral domain, so over Q no precision is ever lost; over Z the
// entries stay integral.
inline Rational bareiss_determinant(Matrix<Rational> a)
{
    const Index n = a.rows();
    if (n == 0) {
        return Rational(1);
    }
    int sign = 1;
    Rational prev(1);
    for (Index k = 0; k + 1 < n; ++k) {
        if (sgn(a.raw(k, k)) == 0) {
            Index swap_row = k + 1;
            while (swap_row < n && sgn(a.raw(swap_row, k)) == 0) {
                ++swap_row;
            }
            if (swap_row == n) {
                return Rational(0);
            }
            for (Index j = 0; j < n; ++j) {
                std::swap(a.raw(k, j), a.raw(swap_row, j));
            }
            sign = -sign;
        }
        const Rational pivot = a.raw(k, k);
        for (Index i = k + 1; i < n; ++i) {
            const Rational lead = a.raw(i, k);
            for (Index j = k + 1; j < n; ++j) {
                a.raw(i, j) = (a.raw(i, j) * pivot - lead * a.raw(k, j)) / prev;
            }
            a.raw(i, k) = 0;
        }
        prev = pivot;
    }
    Rational det = a.raw(n - 1, n - 1);
    if (sign < 0) {
        det = -det;
    }
    return det;
}

inline double lu_determinant(Matrix<double> a)
{
    const Index n = a.rows();
    double det = 1.0;
    for (Index k = 0; k < n; ++k) {
        Index p = k;
        for (Index i = k + 1; i < n; ++i) {
            if (std::fabs(a.raw(i, k)) > std::fabs(a.raw(p, k))) {
                p = i;
            }
        }
        if (a.raw(p, k) == 0.0) {
            return 0.0;
        }
        if (p != k) {
            for (Index j = 0; j < n; ++j) {
                std::swap(a.raw(k, j), a.raw(p, j));
            }
            det = -det;
        }
        const double pivot = a.raw(k, k);
        det *= pivot;
        for (Index i = k + 1; i < n; ++i) {
            const double factor = a.raw(i, k) / pivot;
            for (Index j = k + 1; j < n; ++j) {
                a.raw(i, j) -= factor * a.raw(k, j);
            }
        }
    }
    return det;
}

inline double max_abs_entry(const Matrix<double>& a)
{
    double m = 0.0;
    for (double x : a.entries()) {
        m = std::max(m, std::fabs(x));
    }
    return m;
}

} // namespace detail

/// det(B). Exact backend: Bareiss elimination. Float backend: LU with
/// partial pivoting.
template <Scalar T>
T determinant(const Matrix<T>& b)
{
    b.require_square("determinant");
    if constexpr (ScalarTraits<T>::is_exact) {
        return detail::bareiss_determinant(b);
    } else {
        return detail::lu_determinant(b);
    }
}

/// M_ij = det(B(i|j)).
template <Scalar T>
T minor(const Matrix<T>& b, Index i, Index j)
{
    return determinant(delete_row_col(b, i, j));
}

/// The n leading principal minors det(B[1..k, 1..k]), k = 1..n.
///
/// Bareiss elimination without pivoting leaves the k-th leading minor on the
/// k-th diagonal position, so all n minors come out of a single O(n^3) pass
/// until a zero pivot stops it; remaining minors are then computed directly.
template <Scalar T>
std::vector<T> leading_principal_minors(const Matrix<T>& b)
{
    b.require_square("leading_principal_minors");
    const Index n = b.rows();
    std::vector<T> minors;
    minors.reserve(n);
    Matrix<T> a = b;
    T prev = ScalarTraits<T>::one();
    Index k = 0;
    for (; k < n; ++k) {
        const T pivot = a.raw(k, k);
        if (ScalarTraits<T>::is_zero(pivot)) {
            break;
        }
        minors.push_back(pivot);
        for (Index i = k + 1; i < n; ++i) {
            const T lead = a.raw(i, k);
            for (Index j = k + 1; j < n; ++j) {
                a.raw(i, j) = (a.raw(i, j) * pivot - lead * a.raw(k, j)) / prev;
            }
        }
        prev = pivot;
    }
    for (; k < n; ++k) {
        Matrix<T> lead(k + 1, k + 1);
        for (Index i = 0; i <= k; ++i) {
            for (Index j = 0; j <= k; ++j) {
                lead.raw(i, j) = b.raw(i, j);
            }
        }
        minors.push_back(determinant(lead));
    }
    return minors;
}

/// adj(B), the transposed cofactor matrix: adj(B)_ij = (-1)^(i+j) M_ji.
/// The adjugate of a 1x1 matrix is [[1]].
template <Scalar T>
Matrix<T> adjugate(const Matrix<T>& b)
{
    b.require_square("adjugate");
    const Index n = b.rows();
    if (n == 1) {
        return Matrix<T>::identity(1);
    }
    Matrix<T> adj(n, n);
    for (Index i = 1; i <= n; ++i) {
        for (Index j = 1; j <= n; ++j) {
            T cofactor = minor(b, j, i);
            adj(i, j) = ((i + j) % 2 == 0) ? cofactor : T(-cofactor);
        }
    }
    return adj;
}

/// B^{-1} by Gauss-Jordan elimination. The exact backend pivots on any
/// nonzero entry; the float backend uses partial pivoting and treats pivots
/// below kSingularPivotFloor * max|b_ij| as singular.
template <Scalar T>
Matrix<T> inverse(const Matrix<T>& b)
{
    b.require_square("inverse");
    const Index n = b.rows();
    Matrix<T> a = b;
    Matrix<T> inv = Matrix<T>::identity(n);

    double floor = 0.0;
    if constexpr (!ScalarTraits<T>::is_exact) {
        floor = kSingularPivotFloor * detail::max_abs_entry(b);
    }

    for (Index k = 0; k < n; ++k) {
        Index p = k;
        if constexpr (ScalarTraits<T>::is_exact) {
            while (p < n && sgn(a.raw(p, k)) == 0) {
                ++p;
            }
            if (p == n) {
                throw Error(Errc::SingularMatrix, "matrix is singular (no nonzero pivot in column "
                                                      + std::to_string(k + 1) + ")");
            }
        } else {
            for (Index i = k + 1; i < n; ++i) {
                if (std::fabs(a.raw(i, k)) > std::fabs(a.raw(p, k))) {
                    p = i;
                }
            }
            if (!(std::fabs(a.raw(p, k)) >= floor) || a.raw(p, k) == 0.0) {
                throw Error(Errc::SingularMatrix, "pivot below singularity floor in column " + std::to_string(k + 1));
            }
        }
        if (p != k) {
            for (Index j = 0; j < n; ++j) {
                std::swap(a.raw(k, j), a.raw(p, j));
                std::swap(inv.raw(k, j), inv.raw(p, j));
            }
        }
        const T pivot = a.raw(k, k);
        for (Index j = 0; j < n; ++j) {
            a.raw(k, j) /= pivot;
            inv.raw(k, j) /= pivot;
        }
        for (Index i = 0; i < n; ++i) {
            if (i == k || ScalarTraits<T>::is_zero(a.raw(i, k))) {
                continue;
            }
            const T factor = a.raw(i, k);
            for (Index j = 0; j < n; ++j) {
                a.raw(i, j) -= factor * a.raw(k, j);
                inv.raw(i, j) -= factor * inv.raw(k, j);
            }
        }
    }
    return inv;
}

} // namespace substoch
