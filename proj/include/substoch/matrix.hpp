#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "substoch/error.hpp"
#include "substoch/scalar.hpp"

namespace substoch {

/// Public indices are 1-based, matching the l, m in {1..n} convention used
/// throughout the identities. Storage is 0-based and row-major.
using Index = std::size_t;

template <Scalar T>
class Matrix {
public:
    using value_type = T;

    Matrix() = default;

    Matrix(Index rows, Index cols)
        : rows_(rows)
        , cols_(cols)
        , data_(rows * cols, ScalarTraits<T>::zero())
    {
    }

    Matrix(Index rows, Index cols, std::vector<T> entries)
        : rows_(rows)
        , cols_(cols)
        , data_(std::move(entries))
    {
        if (data_.size() != rows_ * cols_) {
            throw Error(Errc::DimensionMismatch,
                        "entry count " + std::to_string(data_.size()) + " does not match "
                            + std::to_string(rows_) + "x" + std::to_string(cols_));
        }
    }

    Matrix(std::initializer_list<std::initializer_list<T>> rows)
        : rows_(rows.size())
        , cols_(rows.size() == 0 ? 0 : rows.begin()->size())
    {
        data_.reserve(rows_ * cols_);
        for (const auto& row : rows) {
            if (row.size() != cols_) {
                throw Error(Errc::DimensionMismatch, "ragged initializer list");
            }
            data_.insert(data_.end(), row.begin(), row.end());
        }
    }

    static Matrix identity(Index n)
    {
        Matrix m(n, n);
        for (Index i = 0; i < n; ++i) {
            m.data_[i * n + i] = ScalarTraits<T>::one();
        }
        return m;
    }

    static Matrix zero(Index n) { return Matrix(n, n); }

    Index rows() const noexcept { return rows_; }
    Index cols() const noexcept { return cols_; }
    bool is_square() const noexcept { return rows_ == cols_; }

    /// Dimension of a square matrix; throws NotSquare otherwise.
    Index dim() const
    {
        require_square("dim");
        return rows_;
    }

    T& operator()(Index i, Index j) { return data_[offset(i, j)]; }
    const T& operator()(Index i, Index j) const { return data_[offset(i, j)]; }

    std::span<const T> entries() const noexcept { return data_; }

    /// Unchecked 0-based access for inner loops.
    T& raw(Index i0, Index j0) noexcept { return data_[i0 * cols_ + j0]; }
    const T& raw(Index i0, Index j0) const noexcept { return data_[i0 * cols_ + j0]; }

    void require_square(const char* op) const
    {
        if (!is_square()) {
            throw Error(Errc::NotSquare, std::string(op) + " needs a square matrix, got "
                                             + std::to_string(rows_) + "x" + std::to_string(cols_));
        }
    }

    friend bool operator==(const Matrix& a, const Matrix& b)
    {
        return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.data_ == b.data_;
    }

private:
    Index offset(Index i, Index j) const
    {
        if (i < 1 || i > rows_ || j < 1 || j > cols_) {
            throw Error(Errc::IndexOutOfRange,
                        "(" + std::to_string(i) + "," + std::to_string(j) + ") outside "
                            + std::to_string(rows_) + "x" + std::to_string(cols_),
                        i, j);
        }
        return (i - 1) * cols_ + (j - 1);
    }

    Index rows_ = 0;
    Index cols_ = 0;
    std::vector<T> data_;
};

template <Scalar T>
Matrix<T> transpose(const Matrix<T>& a)
{
    Matrix<T> t(a.cols(), a.rows());
    for (Index i = 0; i < a.rows(); ++i) {
        for (Index j = 0; j < a.cols(); ++j) {
            t.raw(j, i) = a.raw(i, j);
        }
    }
    return t;
}

template <Scalar T>
Matrix<T> operator+(const Matrix<T>& a, const Matrix<T>& b)
{
    if (a.rows() != b.rows() || a.cols() != b.cols()) {
        throw Error(Errc::DimensionMismatch, "matrix sum of mismatched shapes");
    }
    Matrix<T> c(a.rows(), a.cols());
    for (Index i = 0; i < a.rows(); ++i) {
        for (Index j = 0; j < a.cols(); ++j) {
            c.raw(i, j) = a.raw(i, j) + b.raw(i, j);
        }
    }
    return c;
}

template <Scalar T>
Matrix<T> operator-(const Matrix<T>& a, const Matrix<T>& b)
{
    if (a.rows() != b.rows() || a.cols() != b.cols()) {
        throw Error(Errc::DimensionMismatch, "matrix difference of mismatched shapes");
    }
    Matrix<T> c(a.rows(), a.cols());
    for (Index i = 0; i < a.rows(); ++i) {
        for (Index j = 0; j < a.cols(); ++j) {
            c.raw(i, j) = a.raw(i, j) - b.raw(i, j);
        }
    }
    return c;
}

template <Scalar T>
Matrix<T> operator*(const Matrix<T>& a, const Matrix<T>& b)
{
    if (a.cols() != b.rows()) {
        throw Error(Errc::DimensionMismatch, "matrix product of mismatched shapes");
    }
    Matrix<T> c(a.rows(), b.cols());
    for (Index i = 0; i < a.rows(); ++i) {
        for (Index k = 0; k < a.cols(); ++k) {
            if (ScalarTraits<T>::is_zero(a.raw(i, k))) {
                continue;
            }
            for (Index j = 0; j < b.cols(); ++j) {
                c.raw(i, j) += a.raw(i, k) * b.raw(k, j);
            }
        }
    }
    return c;
}

template <Scalar T>
Matrix<T> operator*(const T& s, const Matrix<T>& a)
{
    Matrix<T> c(a.rows(), a.cols());
    for (Index i = 0; i < a.rows(); ++i) {
        for (Index j = 0; j < a.cols(); ++j) {
            c.raw(i, j) = s * a.raw(i, j);
        }
    }
    return c;
}

/// Entrywise conversion between backends (exact -> float rendering).
template <Scalar U, Scalar T>
Matrix<U> convert(const Matrix<T>& a)
{
    Matrix<U> c(a.rows(), a.cols());
    for (Index i = 0; i < a.rows(); ++i) {
        for (Index j = 0; j < a.cols(); ++j) {
            if constexpr (std::same_as<U, T>) {
                c.raw(i, j) = a.raw(i, j);
            } else {
                c.raw(i, j) = ScalarTraits<T>::to_double(a.raw(i, j));
            }
        }
    }
    return c;
}

enum class Orientation { Row, Column };

/// A row or column of an n x n matrix with its diagonal entry removed
/// (length n-1), or a selector row over the same reduced index space.
template <Scalar T>
struct DeletedVector {
    std::vector<T> entries;
    Index source_index = 0;
    Orientation orientation = Orientation::Row;

    Index size() const noexcept { return entries.size(); }

    const T& operator()(Index k) const
    {
        if (k < 1 || k > entries.size()) {
            throw Error(Errc::IndexOutOfRange,
                        "vector index " + std::to_string(k) + " outside length " + std::to_string(entries.size()), k);
        }
        return entries[k - 1];
    }

    friend bool operator==(const DeletedVector& a, const DeletedVector& b) { return a.entries == b.entries; }
};

namespace detail {

template <Scalar T>
void require_deletable(const Matrix<T>& b, Index i, Index j, const char* op)
{
    b.require_square(op);
    if (b.rows() < 2) {
        throw Error(Errc::MatrixTooSmall, std::string(op) + " needs n >= 2");
    }
    if (i < 1 || i > b.rows() || j < 1 || j > b.cols()) {
        throw Error(Errc::IndexOutOfRange,
                    std::string(op) + ": index (" + std::to_string(i) + "," + std::to_string(j) + ") outside n="
                        + std::to_string(b.rows()),
                    i, j);
    }
}

} // namespace detail

/// B(i|j): B with row i and column j removed.
template <Scalar T>
Matrix<T> delete_row_col(const Matrix<T>& b, Index i, Index j)
{
    detail::require_deletable(b, i, j, "delete_row_col");
    const Index n = b.rows();
    Matrix<T> out(n - 1, n - 1);
    Index r = 0;
    for (Index row = 0; row < n; ++row) {
        if (row == i - 1) {
            continue;
        }
        Index c = 0;
        for (Index col = 0; col < n; ++col) {
            if (col == j - 1) {
                continue;
            }
            out.raw(r, c++) = b.raw(row, col);
        }
        ++r;
    }
    return out;
}

/// Row l of B without its l-th entry.
template <Scalar T>
DeletedVector<T> row_without(const Matrix<T>& b, Index l)
{
    detail::require_deletable(b, l, l, "row_without");
    DeletedVector<T> v{{}, l, Orientation::Row};
    v.entries.reserve(b.cols() - 1);
    for (Index k = 0; k < b.cols(); ++k) {
        if (k != l - 1) {
            v.entries.push_back(b.raw(l - 1, k));
        }
    }
    return v;
}

/// Column l of B without its l-th entry.
template <Scalar T>
DeletedVector<T> col_without(const Matrix<T>& b, Index l)
{
    detail::require_deletable(b, l, l, "col_without");
    DeletedVector<T> v{{}, l, Orientation::Column};
    v.entries.reserve(b.rows() - 1);
    for (Index k = 0; k < b.rows(); ++k) {
        if (k != l - 1) {
            v.entries.push_back(b.raw(k, l - 1));
        }
    }
    return v;
}

/// Unit row vector of length n-1 marking the slot that original index m
/// occupies once index l has been deleted: e_m if m < l, e_{m-1} if m > l.
template <Scalar T>
DeletedVector<T> selector(Index m, Index l, Index n)
{
    if (n < 2) {
        throw Error(Errc::MatrixTooSmall, "selector needs n >= 2");
    }
    if (m < 1 || m > n || l < 1 || l > n) {
        throw Error(Errc::IndexOutOfRange,
                    "selector(" + std::to_string(m) + "," + std::to_string(l) + ") outside n=" + std::to_string(n), m, l);
    }
    if (m == l) {
        throw Error(Errc::SelectorUndefined, "selector needs m != l, got m = l = " + std::to_string(m), m, l);
    }
    DeletedVector<T> v{std::vector<T>(n - 1, ScalarTraits<T>::zero()), l, Orientation::Row};
    const Index slot = m < l ? m : m - 1;
    v.entries[slot - 1] = ScalarTraits<T>::one();
    return v;
}

/// Slot of original index m in the reduced (index-l-deleted) space.
inline Index reduced_slot(Index m, Index l) { return m < l ? m : m - 1; }

template <Scalar T>
T dot(const DeletedVector<T>& a, const DeletedVector<T>& b)
{
    if (a.size() != b.size()) {
        throw Error(Errc::DimensionMismatch, "dot product of mismatched lengths");
    }
    T s = ScalarTraits<T>::zero();
    for (Index k = 0; k < a.size(); ++k) {
        s += a.entries[k] * b.entries[k];
    }
    return s;
}

/// u^T M v for vectors of length M.rows() / M.cols().
template <Scalar T>
T bilinear(const DeletedVector<T>& u, const Matrix<T>& m, const DeletedVector<T>& v)
{
    if (u.size() != m.rows() || v.size() != m.cols()) {
        throw Error(Errc::DimensionMismatch, "bilinear form of mismatched shapes");
    }
    T s = ScalarTraits<T>::zero();
    for (Index i = 0; i < m.rows(); ++i) {
        if (ScalarTraits<T>::is_zero(u.entries[i])) {
            continue;
        }
        T row = ScalarTraits<T>::zero();
        for (Index j = 0; j < m.cols(); ++j) {
            row += m.raw(i, j) * v.entries[j];
        }
        s += u.entries[i] * row;
    }
    return s;
}

} // namespace substoch
