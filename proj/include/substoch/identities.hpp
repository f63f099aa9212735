#pragma once

#include <cmath>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "substoch/linalg.hpp"
#include "substoch/substochastic.hpp"

namespace substoch {

// ---------------------------------------------------------------------------
// Certified general matrices
// ---------------------------------------------------------------------------

enum class MinorScope {
    /// det(B) and the n single-deletion minors det(B(l|l)).
    DeterminantAndDeletions,
    /// Every principal minor det(B[S,S]) over nonempty S.
    AllPrincipal,
};

/// A square matrix whose determinant and every single-deletion principal
/// minor det(B(l|l)) are nonzero, which is exactly what the Schur quotients
/// b_ll - b_l. B(l|l)^{-1} b_.l need. Obtainable only via certify_general.
template <Scalar T>
class GeneralMatrix {
public:
    const Matrix<T>& matrix() const noexcept { return b_; }
    Index dim() const noexcept { return b_.rows(); }
    MinorScope scope() const noexcept { return scope_; }

    template <Scalar U>
    friend GeneralMatrix<U> certify_general(const Matrix<U>& b, bool all_principal_minors);

private:
    GeneralMatrix(Matrix<T> b, MinorScope scope)
        : b_(std::move(b))
        , scope_(scope)
    {
    }

    Matrix<T> b_;
    MinorScope scope_;
};

template <Scalar U>
GeneralMatrix<U> certify_general(const Matrix<U>& b, bool all_principal_minors = false)
{
    b.require_square("certify_general");
    const Index n = b.rows();
    if (n == 0) {
        throw Error(Errc::CertificationError, "empty matrix");
    }
    if (ScalarTraits<U>::is_zero(determinant(b))) {
        throw Error(Errc::CertificationError, "det(B) = 0");
    }
    if (n >= 2) {
        for (Index l = 1; l <= n; ++l) {
            if (ScalarTraits<U>::is_zero(minor(b, l, l))) {
                throw Error(Errc::CertificationError, "det(B(" + std::to_string(l) + "|" + std::to_string(l) + ")) = 0",
                            l, l);
            }
        }
    }
    if (all_principal_minors) {
        if (n > 20) {
            throw Error(Errc::CertificationError, "all-principal-minor certification limited to n <= 20");
        }
        for (unsigned long mask = 1; mask < (1UL << n); ++mask) {
            std::vector<Index> idx;
            for (Index i = 0; i < n; ++i) {
                if (mask & (1UL << i)) {
                    idx.push_back(i);
                }
            }
            Matrix<U> sub(idx.size(), idx.size());
            for (Index i = 0; i < idx.size(); ++i) {
                for (Index j = 0; j < idx.size(); ++j) {
                    sub.raw(i, j) = b.raw(idx[i], idx[j]);
                }
            }
            if (ScalarTraits<U>::is_zero(determinant(sub))) {
                throw Error(Errc::CertificationError, "a principal minor vanishes (index mask " + std::to_string(mask) + ")");
            }
        }
    }
    return GeneralMatrix<U>(b, all_principal_minors ? MinorScope::AllPrincipal : MinorScope::DeterminantAndDeletions);
}

// ---------------------------------------------------------------------------
// Reports
// ---------------------------------------------------------------------------

enum class IdentityId { Lemma1, Lemma2, Eq13, Eq17, Eq20, Eq21, Thm2First, Thm2Second };

inline const char* identity_name(IdentityId id)
{
    switch (id) {
    case IdentityId::Lemma1: return "lemma1";
    case IdentityId::Lemma2: return "lemma2";
    case IdentityId::Eq13: return "eq13";
    case IdentityId::Eq17: return "eq17";
    case IdentityId::Eq20: return "eq20";
    case IdentityId::Eq21: return "eq21";
    case IdentityId::Thm2First: return "thm2_first";
    case IdentityId::Thm2Second: return "thm2_second";
    }
    return "unknown";
}

template <Scalar T>
struct IdentityReport {
    IdentityId id{};
    std::optional<Index> m;
    std::optional<Index> l;
    T lhs{};
    T rhs{};
    T residual{};
    bool passed = false;
    /// Summands of the right-hand side in summation order, where it is a sum.
    std::vector<T> rhs_terms;
    /// Set when evaluation failed or a side assertion did not hold.
    std::optional<std::string> error;
};

/// Exact: passed iff the residual is zero. Float: passed iff
/// |lhs - rhs| <= tol.rel * (1 + max(|lhs|, |rhs|)).
template <Scalar T>
bool residual_passes(const T& lhs, const T& rhs, const T& residual, const Tolerance& tol)
{
    if constexpr (ScalarTraits<T>::is_exact) {
        return sgn(residual) == 0;
    } else {
        return std::fabs(residual) <= tol.rel * (1.0 + std::max(std::fabs(lhs), std::fabs(rhs)));
    }
}

namespace detail {

template <Scalar T>
IdentityReport<T> make_report(IdentityId id, std::optional<Index> m, std::optional<Index> l, T lhs, T rhs,
                              const Tolerance& tol, std::vector<T> terms = {})
{
    IdentityReport<T> r;
    r.id = id;
    r.m = m;
    r.l = l;
    r.residual = lhs - rhs;
    r.passed = residual_passes(lhs, rhs, r.residual, tol);
    r.lhs = std::move(lhs);
    r.rhs = std::move(rhs);
    r.rhs_terms = std::move(terms);
    return r;
}

template <Scalar T>
Matrix<T> inverse_of_submatrix(const Matrix<T>& sub, Index l)
{
    try {
        return inverse(sub);
    } catch (const Error& e) {
        if (e.code() != Errc::SingularMatrix) {
            throw;
        }
        throw Error(Errc::SingularSubmatrix, "deleted submatrix (" + std::to_string(l) + "|" + std::to_string(l)
                                                 + ") is singular",
                    l, l);
    }
}

template <Scalar T>
T nonzero_denominator(T den, Index l)
{
    if (ScalarTraits<T>::is_zero(den)) {
        throw Error(Errc::SingularSubmatrix, "Schur denominator at l=" + std::to_string(l) + " vanishes", l);
    }
    return den;
}

template <Scalar T>
T signed_by_parity(Index parity, const T& x)
{
    return parity % 2 == 0 ? x : T(-x);
}

template <Scalar T>
bool same_value(const T& a, const T& b, const Tolerance& tol)
{
    if constexpr (ScalarTraits<T>::is_exact) {
        return a == b;
    } else {
        return std::fabs(a - b) <= tol.rel * (1.0 + std::max(std::fabs(a), std::fabs(b)));
    }
}

template <Scalar T>
void require_pair(Index m, Index l, Index n)
{
    if (n < 2) {
        throw Error(Errc::MatrixTooSmall, "identity needs n >= 2");
    }
    if (m < 1 || m > n || l < 1 || l > n) {
        throw Error(Errc::IndexOutOfRange,
                    "(m,l) = (" + std::to_string(m) + "," + std::to_string(l) + ") outside n=" + std::to_string(n), m, l);
    }
    if (m == l) {
        throw Error(Errc::SelectorUndefined, "identity needs m != l", m, l);
    }
}

inline void require_index(Index l, Index n)
{
    if (n < 2) {
        throw Error(Errc::MatrixTooSmall, "identity needs n >= 2");
    }
    if (l < 1 || l > n) {
        throw Error(Errc::IndexOutOfRange, "index " + std::to_string(l) + " outside n=" + std::to_string(n), l);
    }
}

// b_l. B(l|l)^{-1} b_.l
template <Scalar T>
T inverse_quadratic(const Matrix<T>& b, Index l)
{
    const Matrix<T> inv = inverse_of_submatrix(delete_row_col(b, l, l), l);
    return bilinear(row_without(b, l), inv, col_without(b, l));
}

// f_sel,l B(l|l)^{-1} b_.l
template <Scalar T>
T inverse_selected(const Matrix<T>& b, Index sel, Index l)
{
    const Matrix<T> inv = inverse_of_submatrix(delete_row_col(b, l, l), l);
    return bilinear(selector<T>(sel, l, b.rows()), inv, col_without(b, l));
}

// f_sel,l adj(B(l|l)) b_.l
template <Scalar T>
T adjugate_selected(const Matrix<T>& b, Index sel, Index l)
{
    return bilinear(selector<T>(sel, l, b.rows()), adjugate(delete_row_col(b, l, l)), col_without(b, l));
}

// b_ll det(B(l|l)) - b_l. adj(B(l|l)) b_.l
template <Scalar T>
T adjugate_denominator(const Matrix<T>& b, Index l)
{
    const Matrix<T> sub = delete_row_col(b, l, l);
    const T quad = bilinear(row_without(b, l), adjugate(sub), col_without(b, l));
    return b(l, l) * determinant(sub) - quad;
}

} // namespace detail

// ---------------------------------------------------------------------------
// General-matrix identities
// ---------------------------------------------------------------------------

/// b_ll - b_l. B(l|l)^{-1} b_.l, which equals det(B) / det(B(l|l)). The
/// exact backend asserts the multiplicative form of that equality.
template <Scalar T>
T schur_denominator(const GeneralMatrix<T>& g, Index l)
{
    const Matrix<T>& b = g.matrix();
    detail::require_index(l, b.rows());
    const T den = b(l, l) - detail::inverse_quadratic(b, l);
    if constexpr (ScalarTraits<T>::is_exact) {
        if (den * minor(b, l, l) != determinant(b)) {
            throw Error(Errc::ContractViolation,
                        "Schur denominator times det(B(l|l)) differs from det(B) at l=" + std::to_string(l), l);
        }
    }
    return den;
}

/// f_ml adj(B(l|l)) b_.l  vs  (-1)^(m+l+1) det(B(l|m)).
template <Scalar T>
IdentityReport<T> lemma1_sides(const GeneralMatrix<T>& g, Index m, Index l, const Tolerance& tol = {})
{
    const Matrix<T>& b = g.matrix();
    detail::require_pair<T>(m, l, b.rows());
    T lhs = detail::adjugate_selected(b, m, l);
    T rhs = detail::signed_by_parity(m + l + 1, minor(b, l, m));
    return detail::make_report(IdentityId::Lemma1, std::optional<Index>(m), std::optional<Index>(l), std::move(lhs),
                               std::move(rhs), tol);
}

/// b_ll det(B(l|l)) - b_l. adj(B(l|l)) b_.l  vs  det(B).
template <Scalar T>
IdentityReport<T> lemma2_sides(const GeneralMatrix<T>& g, Index l, const Tolerance& tol = {})
{
    const Matrix<T>& b = g.matrix();
    detail::require_index(l, b.rows());
    T lhs = detail::adjugate_denominator(b, l);
    T rhs = determinant(b);
    return detail::make_report(IdentityId::Lemma2, std::optional<Index>(), std::optional<Index>(l), std::move(lhs),
                               std::move(rhs), tol);
}

/// Quotient form with inverses:
///   q_m / (b_mm - q_m)  vs  sum_{l != m} b_lm f_ml B(l|l)^{-1} b_.l / (b_ll - q_l)
/// where q_l = b_l. B(l|l)^{-1} b_.l.
template <Scalar T>
IdentityReport<T> eq13_sides(const GeneralMatrix<T>& g, Index m, const Tolerance& tol = {})
{
    const Matrix<T>& b = g.matrix();
    const Index n = b.rows();
    detail::require_index(m, n);

    const T q_m = detail::inverse_quadratic(b, m);
    T lhs = q_m / detail::nonzero_denominator(T(b(m, m) - q_m), m);

    std::vector<T> terms;
    T rhs = ScalarTraits<T>::zero();
    for (Index l = 1; l <= n; ++l) {
        if (l == m) {
            continue;
        }
        const T den = detail::nonzero_denominator(T(b(l, l) - detail::inverse_quadratic(b, l)), l);
        T term = b(l, m) * detail::inverse_selected(b, m, l) / den;
        rhs += term;
        terms.push_back(std::move(term));
    }
    return detail::make_report(IdentityId::Eq13, std::optional<Index>(m), std::optional<Index>(), std::move(lhs),
                               std::move(rhs), tol, std::move(terms));
}

/// Adjugate-cleared form of eq13: the same quotient identity with
///   B(l|l)^{-1} replaced by adj(B(l|l)) and b_ll by b_ll det(B(l|l)).
/// Every denominator must also equal det(B); a mismatch fails the report.
template <Scalar T>
IdentityReport<T> eq17_residual(const GeneralMatrix<T>& g, Index m, const Tolerance& tol = {})
{
    const Matrix<T>& b = g.matrix();
    const Index n = b.rows();
    detail::require_index(m, n);
    const T det = determinant(b);
    std::optional<std::string> mismatch;

    auto cleared_denominator = [&](Index l) {
        T den = detail::adjugate_denominator(b, l);
        if (!mismatch && !detail::same_value(den, det, tol)) {
            mismatch = "denominator at l=" + std::to_string(l) + " is " + ScalarTraits<T>::to_string(den)
                       + ", expected det(B) = " + ScalarTraits<T>::to_string(det);
        }
        return detail::nonzero_denominator(std::move(den), l);
    };

    const Matrix<T> sub_m = delete_row_col(b, m, m);
    const T num_m = bilinear(row_without(b, m), adjugate(sub_m), col_without(b, m));
    T lhs = num_m / cleared_denominator(m);

    std::vector<T> terms;
    T rhs = ScalarTraits<T>::zero();
    for (Index l = 1; l <= n; ++l) {
        if (l == m) {
            continue;
        }
        T term = b(l, m) * detail::adjugate_selected(b, m, l) / cleared_denominator(l);
        rhs += term;
        terms.push_back(std::move(term));
    }
    auto report = detail::make_report(IdentityId::Eq17, std::optional<Index>(m), std::optional<Index>(), std::move(lhs),
                                      std::move(rhs), tol, std::move(terms));
    if (mismatch) {
        report.passed = false;
        report.error = mismatch;
    }
    return report;
}

/// -b_mm f_lm B(m|m)^{-1} b_.m / (b_mm - q_m)
///   vs  -b_lm / (b_ll - q_l) + sum_{k != l, m} b_km f_lk B(k|k)^{-1} b_.k / (b_kk - q_k).
template <Scalar T>
IdentityReport<T> eq20_sides(const GeneralMatrix<T>& g, Index l, Index m, const Tolerance& tol = {})
{
    const Matrix<T>& b = g.matrix();
    const Index n = b.rows();
    detail::require_pair<T>(m, l, n);

    const T den_m = detail::nonzero_denominator(T(b(m, m) - detail::inverse_quadratic(b, m)), m);
    T lhs = -b(m, m) * detail::inverse_selected(b, l, m) / den_m;

    std::vector<T> terms;
    const T den_l = detail::nonzero_denominator(T(b(l, l) - detail::inverse_quadratic(b, l)), l);
    terms.push_back(T(-b(l, m) / den_l));
    for (Index k = 1; k <= n; ++k) {
        if (k == l || k == m) {
            continue;
        }
        const T den_k = detail::nonzero_denominator(T(b(k, k) - detail::inverse_quadratic(b, k)), k);
        terms.push_back(T(b(k, m) * detail::inverse_selected(b, l, k) / den_k));
    }
    T rhs = ScalarTraits<T>::zero();
    for (const T& t : terms) {
        rhs += t;
    }
    return detail::make_report(IdentityId::Eq20, std::optional<Index>(m), std::optional<Index>(l), std::move(lhs),
                               std::move(rhs), tol, std::move(terms));
}

/// Division-free form of eq20:
///   -b_mm f_lm adj(B(m|m)) b_.m  vs  -b_lm det(B(l|l)) + sum_{k != l, m} b_km f_lk adj(B(k|k)) b_.k.
template <Scalar T>
IdentityReport<T> eq21_residual(const GeneralMatrix<T>& g, Index l, Index m, const Tolerance& tol = {})
{
    const Matrix<T>& b = g.matrix();
    const Index n = b.rows();
    detail::require_pair<T>(m, l, n);

    T lhs = -b(m, m) * detail::adjugate_selected(b, l, m);

    std::vector<T> terms;
    terms.push_back(T(-b(l, m) * minor(b, l, l)));
    for (Index k = 1; k <= n; ++k) {
        if (k == l || k == m) {
            continue;
        }
        terms.push_back(T(b(k, m) * detail::adjugate_selected(b, l, k)));
    }
    T rhs = ScalarTraits<T>::zero();
    for (const T& t : terms) {
        rhs += t;
    }
    return detail::make_report(IdentityId::Eq21, std::optional<Index>(m), std::optional<Index>(l), std::move(lhs),
                               std::move(rhs), tol, std::move(terms));
}

// ---------------------------------------------------------------------------
// Substochastic specializations, evaluated in p-notation
// ---------------------------------------------------------------------------

namespace detail {

// (I - P)(k|k)^{-1}, built as I - P(k|k).
template <Scalar T>
Matrix<T> deleted_fundamental(const Matrix<T>& p, Index k)
{
    const Matrix<T> sub = Matrix<T>::identity(p.rows() - 1) - delete_row_col(p, k, k);
    return inverse_of_submatrix(sub, k);
}

// 1 - p_kk - p_k. ((I-P)(k|k))^{-1} p_.k
template <Scalar T>
T p_denominator(const Matrix<T>& p, Index k)
{
    const T quad = bilinear(row_without(p, k), deleted_fundamental(p, k), col_without(p, k));
    return nonzero_denominator(T(ScalarTraits<T>::one() - p(k, k) - quad), k);
}

// f_sel,k ((I-P)(k|k))^{-1} p_.k
template <Scalar T>
T p_selected(const Matrix<T>& p, Index sel, Index k)
{
    return bilinear(selector<T>(sel, k, p.rows()), deleted_fundamental(p, k), col_without(p, k));
}

template <Scalar T>
void check_specialization(IdentityReport<T>& own, const IdentityReport<T>& general, const Tolerance& tol)
{
    std::string problem;
    if (!same_value(own.lhs, general.lhs, tol)) {
        problem = "lhs differs from " + std::string(identity_name(general.id)) + " on I - P";
    } else if (own.rhs_terms.size() != general.rhs_terms.size()) {
        problem = "term count differs from " + std::string(identity_name(general.id));
    } else {
        for (std::size_t t = 0; t < own.rhs_terms.size(); ++t) {
            if (!same_value(own.rhs_terms[t], general.rhs_terms[t], tol)) {
                problem = "rhs term " + std::to_string(t + 1) + " differs from " + identity_name(general.id)
                          + " on I - P";
                break;
            }
        }
    }
    if (!problem.empty()) {
        own.passed = false;
        own.error = problem;
    }
}

} // namespace detail

/// First substochastic identity:
///   q_m / (1 - p_mm - q_m)  vs  sum_{k != m} p_km f_mk ((I-P)(k|k))^{-1} p_.k / (1 - p_kk - q_k)
/// with q_k = p_k. ((I-P)(k|k))^{-1} p_.k. The summand deletion index is the
/// summation index k. The report also fails unless lhs and every summand
/// agree with eq13 at B = I - P.
template <Scalar T>
IdentityReport<T> thm2_first(const SubstochasticMatrix<T>& sp, Index m, const Tolerance& tol = {})
{
    const Matrix<T>& p = sp.matrix();
    const Index n = p.rows();
    detail::require_index(m, n);

    const T q_m = bilinear(row_without(p, m), detail::deleted_fundamental(p, m), col_without(p, m));
    T lhs = q_m / detail::p_denominator(p, m);

    std::vector<T> terms;
    T rhs = ScalarTraits<T>::zero();
    for (Index k = 1; k <= n; ++k) {
        if (k == m) {
            continue;
        }
        T term = p(k, m) * detail::p_selected(p, m, k) / detail::p_denominator(p, k);
        rhs += term;
        terms.push_back(std::move(term));
    }
    auto report = detail::make_report(IdentityId::Thm2First, std::optional<Index>(m), std::optional<Index>(),
                                      std::move(lhs), std::move(rhs), tol, std::move(terms));
    detail::check_specialization(report, eq13_sides(certify_general(sp.i_minus_p()), m, tol), tol);
    return report;
}

/// Second substochastic identity:
///   (1 - p_mm) f_lm ((I-P)(m|m))^{-1} p_.m / (1 - p_mm - q_m)
///     vs  p_lm / (1 - p_ll - q_l) + sum_{k != l, m} p_km f_lk ((I-P)(k|k))^{-1} p_.k / (1 - p_kk - q_k).
/// Cross-checked term by term against eq20 at B = I - P.
template <Scalar T>
IdentityReport<T> thm2_second(const SubstochasticMatrix<T>& sp, Index l, Index m, const Tolerance& tol = {})
{
    const Matrix<T>& p = sp.matrix();
    const Index n = p.rows();
    detail::require_pair<T>(m, l, n);

    const T one_minus_pmm = ScalarTraits<T>::one() - p(m, m);
    T lhs = one_minus_pmm * detail::p_selected(p, l, m) / detail::p_denominator(p, m);

    std::vector<T> terms;
    terms.push_back(T(p(l, m) / detail::p_denominator(p, l)));
    for (Index k = 1; k <= n; ++k) {
        if (k == l || k == m) {
            continue;
        }
        terms.push_back(T(p(k, m) * detail::p_selected(p, l, k) / detail::p_denominator(p, k)));
    }
    T rhs = ScalarTraits<T>::zero();
    for (const T& t : terms) {
        rhs += t;
    }
    auto report = detail::make_report(IdentityId::Thm2Second, std::optional<Index>(m), std::optional<Index>(l),
                                      std::move(lhs), std::move(rhs), tol, std::move(terms));
    detail::check_specialization(report, eq20_sides(certify_general(sp.i_minus_p()), l, m, tol), tol);
    return report;
}

// ---------------------------------------------------------------------------
// Sweeps
// ---------------------------------------------------------------------------

namespace detail {

template <Scalar T>
void record(std::vector<IdentityReport<T>>& out, IdentityId id, std::optional<Index> m, std::optional<Index> l,
            const std::function<IdentityReport<T>()>& eval)
{
    try {
        out.push_back(eval());
    } catch (const Error& e) {
        IdentityReport<T> r;
        r.id = id;
        r.m = m;
        r.l = l;
        r.passed = false;
        r.error = e.what();
        out.push_back(std::move(r));
    }
}

template <Scalar T>
void sweep_general(std::vector<IdentityReport<T>>& out, const GeneralMatrix<T>& g, const Tolerance& tol)
{
    const Index n = g.dim();
    if (n < 2) {
        return;
    }
    for (Index m = 1; m <= n; ++m) {
        for (Index l = 1; l <= n; ++l) {
            if (l != m) {
                record<T>(out, IdentityId::Lemma1, m, l, [&] { return lemma1_sides(g, m, l, tol); });
            }
        }
    }
    for (Index l = 1; l <= n; ++l) {
        record<T>(out, IdentityId::Lemma2, std::nullopt, l, [&] { return lemma2_sides(g, l, tol); });
    }
    for (Index m = 1; m <= n; ++m) {
        record<T>(out, IdentityId::Eq13, m, std::nullopt, [&] { return eq13_sides(g, m, tol); });
    }
    for (Index m = 1; m <= n; ++m) {
        record<T>(out, IdentityId::Eq17, m, std::nullopt, [&] { return eq17_residual(g, m, tol); });
    }
    for (Index m = 1; m <= n; ++m) {
        for (Index l = 1; l <= n; ++l) {
            if (l != m) {
                record<T>(out, IdentityId::Eq20, m, l, [&] { return eq20_sides(g, l, m, tol); });
            }
        }
    }
    for (Index m = 1; m <= n; ++m) {
        for (Index l = 1; l <= n; ++l) {
            if (l != m) {
                record<T>(out, IdentityId::Eq21, m, l, [&] { return eq21_residual(g, l, m, tol); });
            }
        }
    }
}

} // namespace detail

/// Every general identity over all valid indices, ordered by identity, then
/// m, then l. Evaluation errors become failed reports; the sweep continues.
template <Scalar T>
std::vector<IdentityReport<T>> verify_all(const GeneralMatrix<T>& g, const Tolerance& tol = {})
{
    std::vector<IdentityReport<T>> out;
    detail::sweep_general(out, g, tol);
    return out;
}

/// The general identities at B = I - P followed by both substochastic
/// identities.
template <Scalar T>
std::vector<IdentityReport<T>> verify_all(const SubstochasticMatrix<T>& sp, const Tolerance& tol = {})
{
    std::vector<IdentityReport<T>> out;
    const Index n = sp.dim();
    if (n < 2) {
        return out;
    }
    try {
        detail::sweep_general(out, certify_general(sp.i_minus_p()), tol);
    } catch (const Error& e) {
        IdentityReport<T> r;
        r.id = IdentityId::Lemma1;
        r.error = std::string("I - P failed certification: ") + e.what();
        out.push_back(std::move(r));
    }
    for (Index m = 1; m <= n; ++m) {
        detail::record<T>(out, IdentityId::Thm2First, m, std::nullopt, [&] { return thm2_first(sp, m, tol); });
    }
    for (Index m = 1; m <= n; ++m) {
        for (Index l = 1; l <= n; ++l) {
            if (l != m) {
                detail::record<T>(out, IdentityId::Thm2Second, m, l, [&] { return thm2_second(sp, l, m, tol); });
            }
        }
    }
    return out;
}

} // namespace substoch
