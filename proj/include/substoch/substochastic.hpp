#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "substoch/linalg.hpp"
#include "substoch/random.hpp"

namespace substoch {

/// Entries computed in floating point are treated as positive only above
/// this floor (leading minors, determinant signs).
inline constexpr double kFloatPositiveFloor = 1e-12;

enum class Certification { RowSumStrict, MMatrixCertified };

inline const char* certification_name(Certification c)
{
    return c == Certification::RowSumStrict ? "RowSumStrict" : "MMatrixCertified";
}

namespace detail {

template <Scalar T>
bool exceeds_one(const T& x)
{
    if constexpr (ScalarTraits<T>::is_exact) {
        return x > 1;
    } else {
        return x > 1.0 + kFloatPositiveFloor;
    }
}

template <Scalar T>
bool is_positive(const T& x)
{
    if constexpr (ScalarTraits<T>::is_exact) {
        return sgn(x) > 0;
    } else {
        return x > kFloatPositiveFloor;
    }
}

template <Scalar T>
T row_sum(const Matrix<T>& p, Index i0)
{
    T s = ScalarTraits<T>::zero();
    for (Index j = 0; j < p.cols(); ++j) {
        s += p.raw(i0, j);
    }
    return s;
}

template <Scalar T>
T col_sum(const Matrix<T>& p, Index j0)
{
    T s = ScalarTraits<T>::zero();
    for (Index i = 0; i < p.rows(); ++i) {
        s += p.raw(i, j0);
    }
    return s;
}

// Throws `code` at the first negative entry or row sum above one.
template <Scalar T>
void check_row_substochastic(const Matrix<T>& p, bool precondition_only)
{
    for (Index i = 0; i < p.rows(); ++i) {
        for (Index j = 0; j < p.cols(); ++j) {
            if (ScalarTraits<T>::sign(p.raw(i, j)) < 0) {
                throw Error(precondition_only ? Errc::PreconditionViolated : Errc::NegativeEntry,
                            "negative entry at (" + std::to_string(i + 1) + "," + std::to_string(j + 1) + ")", i + 1,
                            j + 1);
            }
        }
    }
    for (Index i = 0; i < p.rows(); ++i) {
        const T s = row_sum(p, i);
        if (exceeds_one(s)) {
            throw Error(precondition_only ? Errc::PreconditionViolated : Errc::RowSumExceedsOne,
                        "row " + std::to_string(i + 1) + " sums to " + ScalarTraits<T>::to_string(s), i + 1);
        }
    }
}

} // namespace detail

/// Decides rho(P) < 1 for a nonnegative P with row sums <= 1.
///
/// I - P is a Z-matrix, and a Z-matrix is a nonsingular M-matrix exactly when
/// all of its leading principal minors are positive, which for P >= 0 is
/// equivalent to rho(P) < 1. On the exact backend the decision is exact.
template <Scalar T>
bool spectral_radius_lt_one(const Matrix<T>& p)
{
    p.require_square("spectral_radius_lt_one");
    detail::check_row_substochastic(p, true);
    const Matrix<T> z = Matrix<T>::identity(p.rows()) - p;
    for (const T& m : leading_principal_minors(z)) {
        if (!detail::is_positive(m)) {
            return false;
        }
    }
    return true;
}

/// Power-iteration estimate of rho(P) for nonnegative P.
///
/// Iterates on P + I (whose Perron root rho(P) + 1 strictly dominates every
/// other eigenvalue in modulus, so periodic P still converge) from a seeded
/// positive start vector and reports the max-norm growth ratio minus one.
template <Scalar T>
double spectral_radius_estimate(const Matrix<T>& p, int iterations, std::uint64_t seed)
{
    p.require_square("spectral_radius_estimate");
    const Index n = p.rows();
    Matrix<double> a = convert<double>(p);
    for (double x : a.entries()) {
        if (x < 0.0) {
            throw Error(Errc::PreconditionViolated, "spectral_radius_estimate needs a nonnegative matrix");
        }
    }
    SplitMix64 rng(seed);
    std::vector<double> x(n);
    for (double& v : x) {
        v = 0.5 + rng.uniform01();
    }
    std::vector<double> y(n);
    double ratio = 1.0;
    for (int it = 0; it < std::max(iterations, 1); ++it) {
        double xnorm = 0.0;
        double ynorm = 0.0;
        for (Index i = 0; i < n; ++i) {
            double s = x[i];
            for (Index j = 0; j < n; ++j) {
                s += a.raw(i, j) * x[j];
            }
            y[i] = s;
            xnorm = std::max(xnorm, x[i]);
            ynorm = std::max(ynorm, s);
        }
        ratio = ynorm / xnorm;
        for (Index i = 0; i < n; ++i) {
            x[i] = y[i] / ynorm;
        }
    }
    return std::max(ratio - 1.0, 0.0);
}

/// A row substochastic matrix with certified spectral radius below one.
/// Only obtainable through validate_substochastic.
template <Scalar T>
class SubstochasticMatrix {
public:
    const Matrix<T>& matrix() const noexcept { return p_; }
    Certification certification() const noexcept { return cert_; }
    Index dim() const noexcept { return p_.rows(); }

    /// B = I - P, the matrix the general identities specialize at.
    Matrix<T> i_minus_p() const { return Matrix<T>::identity(dim()) - p_; }

    template <Scalar U>
    friend SubstochasticMatrix<U> validate_substochastic(const Matrix<U>& m);

private:
    SubstochasticMatrix(Matrix<T> p, Certification cert)
        : p_(std::move(p))
        , cert_(cert)
    {
    }

    Matrix<T> p_;
    Certification cert_;
};

/// Certify M as a substochastic matrix of spectral radius below one.
/// Strictly substochastic rows take the fast path; otherwise the leading
/// principal minors of I - M decide.
template <Scalar U>
SubstochasticMatrix<U> validate_substochastic(const Matrix<U>& m)
{
    m.require_square("validate_substochastic");
    detail::check_row_substochastic(m, false);
    bool strict = true;
    for (Index i = 0; i < m.rows() && strict; ++i) {
        strict = detail::row_sum(m, i) < ScalarTraits<U>::one();
    }
    if (strict) {
        return SubstochasticMatrix<U>(m, Certification::RowSumStrict);
    }
    if (!spectral_radius_lt_one(m)) {
        throw Error(Errc::SpectralRadiusNotLessThanOne, "a leading principal minor of I - P is not positive");
    }
    return SubstochasticMatrix<U>(m, Certification::MMatrixCertified);
}

/// det(I - P^T), asserted positive.
template <Scalar T>
T det_I_minus_Pt_positive(const SubstochasticMatrix<T>& p)
{
    const Matrix<T> a = Matrix<T>::identity(p.dim()) - transpose(p.matrix());
    const T det = determinant(a);
    if (!detail::is_positive(det)) {
        throw Error(Errc::ContractViolation, "det(I - P^T) = " + ScalarTraits<T>::to_string(det) + " is not positive");
    }
    return det;
}

/// (I - P^T)^{-1} when `transposed`, else (I - P)^{-1}; asserted entrywise
/// nonnegative.
template <Scalar T>
Matrix<T> fundamental_matrix(const SubstochasticMatrix<T>& p, bool transposed)
{
    const Matrix<T> pm = transposed ? transpose(p.matrix()) : p.matrix();
    Matrix<T> c;
    try {
        c = inverse(Matrix<T>::identity(p.dim()) - pm);
    } catch (const Error& e) {
        throw Error(Errc::ContractViolation, std::string("certified I - P turned out singular: ") + e.what());
    }
    double slack = 0.0;
    if constexpr (!ScalarTraits<T>::is_exact) {
        slack = kFloatPositiveFloor * std::max(1.0, detail::max_abs_entry(c));
    }
    for (Index i = 0; i < c.rows(); ++i) {
        for (Index j = 0; j < c.cols(); ++j) {
            if (ScalarTraits<T>::to_double(c.raw(i, j)) < -slack
                || (ScalarTraits<T>::is_exact && ScalarTraits<T>::sign(c.raw(i, j)) < 0)) {
                throw Error(Errc::ContractViolation,
                            "fundamental matrix entry (" + std::to_string(i + 1) + "," + std::to_string(j + 1)
                                + ") is negative",
                            i + 1, j + 1);
            }
        }
    }
    return c;
}

template <Scalar T>
struct MaximalityWitness {
    Index row;
    Index col;
    T diagonal;
    T offending;
};

template <Scalar T>
struct MaximalityReport {
    bool holds = true;
    std::optional<MaximalityWitness<T>> witness;
    Matrix<T> c;
};

/// Checks that every diagonal entry of C = (I - P^T)^{-1} is a maximal
/// (not necessarily strict) element of its row. Scans row-major and stops at
/// the first violation. On the float backend a violation must exceed the
/// tolerance.
template <Scalar T>
MaximalityReport<T> check_diagonal_maximality(const SubstochasticMatrix<T>& p, const Tolerance& tol = {})
{
    MaximalityReport<T> report;
    report.c = fundamental_matrix(p, true);
    const Matrix<T>& c = report.c;
    for (Index m = 1; m <= c.rows(); ++m) {
        for (Index l = 1; l <= c.cols(); ++l) {
            const bool violates = c(m, l) > c(m, m) && !ScalarTraits<T>::equal(c(m, l), c(m, m), tol);
            if (violates) {
                report.holds = false;
                report.witness = MaximalityWitness<T>{m, l, c(m, m), c(m, l)};
                return report;
            }
        }
    }
    return report;
}

/// Rows m and m+1 of the column substochastic Q summed into one row, then
/// column m deleted. The result is again column substochastic, so
/// det(I - result) >= 0; this is the reduction behind the diagonal bound.
template <Scalar T>
Matrix<T> merge_rows_reduction(const Matrix<T>& q, Index m)
{
    q.require_square("merge_rows_reduction");
    const Index n = q.rows();
    if (n < 2) {
        throw Error(Errc::MatrixTooSmall, "merge_rows_reduction needs n >= 2");
    }
    if (m < 1 || m > n - 1) {
        throw Error(Errc::IndexOutOfRange, "merge index m=" + std::to_string(m) + " outside 1.." + std::to_string(n - 1),
                    m);
    }
    auto check = [](const Matrix<T>& x, const char* what) {
        for (Index i = 0; i < x.rows(); ++i) {
            for (Index j = 0; j < x.cols(); ++j) {
                if (ScalarTraits<T>::sign(x.raw(i, j)) < 0) {
                    throw Error(Errc::NotColumnSubstochastic, std::string(what) + " has a negative entry", i + 1, j + 1);
                }
            }
        }
        for (Index j = 0; j < x.cols(); ++j) {
            if (detail::exceeds_one(detail::col_sum(x, j))) {
                throw Error(Errc::NotColumnSubstochastic,
                            std::string(what) + " column " + std::to_string(j + 1) + " sums above one", std::nullopt,
                            j + 1);
            }
        }
    };
    check(q, "input");

    Matrix<T> out(n - 1, n - 1);
    const Index merged = m - 1;
    for (Index r = 0; r < n - 1; ++r) {
        Index c = 0;
        for (Index col = 0; col < n; ++col) {
            if (col == merged) {
                continue;
            }
            if (r < merged) {
                out.raw(r, c) = q.raw(r, col);
            } else if (r == merged) {
                out.raw(r, c) = q.raw(merged, col) + q.raw(merged + 1, col);
            } else {
                out.raw(r, c) = q.raw(r + 1, col);
            }
            ++c;
        }
    }
    try {
        check(out, "reduction");
    } catch (const Error& e) {
        throw Error(Errc::ContractViolation, e.what());
    }
    return out;
}

/// M_mm - (-1)^(m+l) M_lm with M the minors of I - P^T, asserted >= 0.
template <Scalar T>
T minor_sum_nonneg(const SubstochasticMatrix<T>& p, Index m, Index l)
{
    const Index n = p.dim();
    if (m < 1 || m > n || l < 1 || l > n) {
        throw Error(Errc::IndexOutOfRange,
                    "(" + std::to_string(m) + "," + std::to_string(l) + ") outside n=" + std::to_string(n), m, l);
    }
    if (m == l) {
        return ScalarTraits<T>::zero();
    }
    const Matrix<T> a = Matrix<T>::identity(n) - transpose(p.matrix());
    const T diag = minor(a, m, m);
    const T off = minor(a, l, m);
    const T value = ((m + l) % 2 == 0) ? T(diag - off) : T(diag + off);
    bool negative = ScalarTraits<T>::sign(value) < 0;
    if constexpr (!ScalarTraits<T>::is_exact) {
        negative = value < -kFloatPositiveFloor * std::max(1.0, std::fabs(diag));
    }
    if (negative) {
        throw Error(Errc::ContractViolation,
                    "M_mm - (-1)^(m+l) M_lm = " + ScalarTraits<T>::to_string(value) + " < 0", m, l);
    }
    return value;
}

} // namespace substoch
