#ifndef CAUCHY2MM_MATRIX_HPP
#define CAUCHY2MM_MATRIX_HPP

/*
 * Dense matrices over the library scalars and the few kernels built on them:
 * determinants (fraction-free in exact mode), leading minors from one sweep,
 * Pfaffians, and linear solves.
 */

#include "scalar.hpp"

#include <initializer_list>
#include <utility>
#include <vector>

namespace cauchy2mm {

template <class T>
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, const T& fill = T(0)) : m_rows(rows), m_cols(cols), m_data(rows * cols, fill) {}
    Matrix(std::initializer_list<std::initializer_list<T>> rows)
    {
        m_rows = rows.size();
        m_cols = m_rows ? rows.begin()->size() : 0;
        m_data.reserve(m_rows * m_cols);
        for (const auto& r : rows) {
            if (r.size() != m_cols)
                throw InputError("ragged matrix literal");
            m_data.insert(m_data.end(), r.begin(), r.end());
        }
    }

    static Matrix identity(std::size_t n)
    {
        Matrix m(n, n);
        for (std::size_t i = 0; i < n; ++i)
            m(i, i) = T(1);
        return m;
    }

    std::size_t rows() const { return m_rows; }
    std::size_t cols() const { return m_cols; }
    bool square() const { return m_rows == m_cols; }

    T& operator()(std::size_t i, std::size_t j) { return m_data[i * m_cols + j]; }
    const T& operator()(std::size_t i, std::size_t j) const { return m_data[i * m_cols + j]; }

    Matrix transpose() const
    {
        Matrix t(m_cols, m_rows);
        for (std::size_t i = 0; i < m_rows; ++i)
            for (std::size_t j = 0; j < m_cols; ++j)
                t(j, i) = (*this)(i, j);
        return t;
    }

    Matrix block(std::size_t r0, std::size_t c0, std::size_t nr, std::size_t nc) const
    {
        Matrix b(nr, nc);
        for (std::size_t i = 0; i < nr; ++i)
            for (std::size_t j = 0; j < nc; ++j)
                b(i, j) = (*this)(r0 + i, c0 + j);
        return b;
    }

    // rows and columns picked by index lists
    Matrix select(const std::vector<std::size_t>& ri, const std::vector<std::size_t>& ci) const
    {
        Matrix b(ri.size(), ci.size());
        for (std::size_t i = 0; i < ri.size(); ++i)
            for (std::size_t j = 0; j < ci.size(); ++j)
                b(i, j) = (*this)(ri[i], ci[j]);
        return b;
    }

    void swap_rows(std::size_t a, std::size_t b)
    {
        if (a == b)
            return;
        for (std::size_t j = 0; j < m_cols; ++j)
            std::swap((*this)(a, j), (*this)(b, j));
    }

    void swap_cols(std::size_t a, std::size_t b)
    {
        if (a == b)
            return;
        for (std::size_t i = 0; i < m_rows; ++i)
            std::swap((*this)(i, a), (*this)(i, b));
    }

    friend Matrix operator*(const Matrix& a, const Matrix& b)
    {
        if (a.m_cols != b.m_rows)
            throw InputError("matrix product: shape mismatch");
        Matrix c(a.m_rows, b.m_cols);
        for (std::size_t i = 0; i < a.m_rows; ++i)
            for (std::size_t k = 0; k < a.m_cols; ++k) {
                if (a(i, k) == T(0))
                    continue;
                for (std::size_t j = 0; j < b.m_cols; ++j)
                    c(i, j) += a(i, k) * b(k, j);
            }
        return c;
    }

    friend Matrix operator+(Matrix a, const Matrix& b)
    {
        for (std::size_t i = 0; i < a.m_data.size(); ++i)
            a.m_data[i] += b.m_data[i];
        return a;
    }

    friend Matrix operator-(Matrix a, const Matrix& b)
    {
        for (std::size_t i = 0; i < a.m_data.size(); ++i)
            a.m_data[i] -= b.m_data[i];
        return a;
    }

    friend Matrix operator*(const T& s, Matrix a)
    {
        for (auto& v : a.m_data)
            v *= s;
        return a;
    }

    const std::vector<T>& data() const { return m_data; }

private:
    std::size_t m_rows = 0, m_cols = 0;
    std::vector<T> m_data;
};

template <class T>
Real max_abs(const Matrix<T>& m)
{
    Real r = 0;
    for (const auto& v : m.data()) {
        Real a = magnitude(v);
        if (a > r)
            r = a;
    }
    return r;
}

namespace detail {

template <class T>
bool is_zero(const T& v)
{
    return v == T(0);
}

// Pivot choice: first nonzero entry in exact arithmetic, largest magnitude otherwise.
template <class T>
std::size_t pick_pivot(const Matrix<T>& a, std::size_t col, std::size_t from)
{
    std::size_t best = from;
    if constexpr (is_exact_v<T>) {
        for (std::size_t i = from; i < a.rows(); ++i)
            if (!is_zero(a(i, col)))
                return i;
        return from;
    } else {
        auto bm = magnitude(a(from, col));
        for (std::size_t i = from + 1; i < a.rows(); ++i) {
            auto m = magnitude(a(i, col));
            if (m > bm) {
                bm = m;
                best = i;
            }
        }
        return best;
    }
}

}  // namespace detail

// Bareiss elimination; every intermediate is an exact minor of the input.
template <class T>
T bareiss_determinant(Matrix<T> a)
{
    const std::size_t n = a.rows();
    if (!a.square())
        throw InputError("determinant of a non-square matrix");
    if (n == 0)
        return T(1);
    T sign(1), prev(1);
    for (std::size_t k = 0; k + 1 < n; ++k) {
        std::size_t p = detail::pick_pivot(a, k, k);
        if (detail::is_zero(a(p, k)))
            return T(0);
        if (p != k) {
            a.swap_rows(p, k);
            sign = -sign;
        }
        for (std::size_t i = k + 1; i < n; ++i) {
            for (std::size_t j = k + 1; j < n; ++j)
                a(i, j) = (a(i, j) * a(k, k) - a(i, k) * a(k, j)) / prev;
            a(i, k) = T(0);
        }
        prev = a(k, k);
    }
    return sign * a(n - 1, n - 1);
}

template <class T>
T lu_determinant(Matrix<T> a)
{
    const std::size_t n = a.rows();
    if (!a.square())
        throw InputError("determinant of a non-square matrix");
    T det(1);
    for (std::size_t k = 0; k < n; ++k) {
        std::size_t p = detail::pick_pivot(a, k, k);
        if (detail::is_zero(a(p, k)))
            return T(0);
        if (p != k) {
            a.swap_rows(p, k);
            det = -det;
        }
        det *= a(k, k);
        for (std::size_t i = k + 1; i < n; ++i) {
            T f = a(i, k) / a(k, k);
            if (detail::is_zero(f))
                continue;
            for (std::size_t j = k + 1; j < n; ++j)
                a(i, j) -= f * a(k, j);
        }
    }
    return det;
}

template <class T>
T determinant(const Matrix<T>& a)
{
    if constexpr (is_exact_v<T>)
        return bareiss_determinant(a);
    else
        return lu_determinant(a);
}

// D_1..D_n of the leading principal blocks from a single unpivoted sweep.
// A vanishing leading minor stops the sweep; the remaining ones are filled by
// separate determinants.
template <class T>
std::vector<T> leading_minors(Matrix<T> a)
{
    const std::size_t n = a.rows();
    if (!a.square())
        throw InputError("leading minors of a non-square matrix");
    std::vector<T> minors;
    minors.reserve(n);
    const Matrix<T> orig = a;
    T prev(1), acc(1);
    for (std::size_t k = 0; k < n; ++k) {
        if (detail::is_zero(a(k, k))) {
            for (std::size_t m = k + 1; m <= n; ++m)
                minors.push_back(determinant(orig.block(0, 0, m, m)));
            return minors;
        }
        if constexpr (is_exact_v<T>) {
            minors.push_back(a(k, k));
            for (std::size_t i = k + 1; i < n; ++i)
                for (std::size_t j = k + 1; j < n; ++j)
                    a(i, j) = (a(i, j) * a(k, k) - a(i, k) * a(k, j)) / prev;
            prev = a(k, k);
        } else {
            acc *= a(k, k);
            minors.push_back(acc);
            for (std::size_t i = k + 1; i < n; ++i) {
                T f = a(i, k) / a(k, k);
                for (std::size_t j = k + 1; j < n; ++j)
                    a(i, j) -= f * a(k, j);
            }
        }
    }
    return minors;
}

template <class T>
void require_skew(const Matrix<T>& m, const Real& tol)
{
    if (!m.square())
        throw InputError("Pfaffian of a non-square matrix");
    if (m.rows() % 2)
        throw InputError("Pfaffian of an odd-dimensional matrix");
    Real scale = max_abs(m);
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = i; j < m.cols(); ++j) {
            T s = m(i, j) + m(j, i);
            bool bad;
            if constexpr (is_exact_v<T>)
                bad = !detail::is_zero(s);
            else
                bad = magnitude(s) > tol * (scale + 1);
            if (bad)
                throw InputError("matrix is not skew-symmetric");
        }
}

// Skew elimination (Parlett-Reid) with pivot search down the current column.
template <class T>
T pfaffian(Matrix<T> a, const Real& tol = Real(0))
{
    require_skew(a, tol);
    const std::size_t n = a.rows();
    T pf(1);
    for (std::size_t k = 0; k + 1 < n; k += 2) {
        std::size_t p = detail::pick_pivot(a, k, k + 1);
        if (p != k + 1) {
            a.swap_rows(p, k + 1);
            a.swap_cols(p, k + 1);
            pf = -pf;
        }
        if (detail::is_zero(a(k + 1, k)))
            return T(0);
        pf *= a(k, k + 1);
        if (k + 2 < n) {
            std::vector<T> tau(n);
            for (std::size_t j = k + 2; j < n; ++j)
                tau[j] = a(k, j) / a(k, k + 1);
            for (std::size_t i = k + 2; i < n; ++i)
                for (std::size_t j = k + 2; j < n; ++j)
                    a(i, j) += tau[i] * a(j, k + 1) - a(i, k + 1) * tau[j];
        }
    }
    return pf;
}

// Gaussian elimination with partial pivoting; throws on (numerical) singularity.
template <class T>
Matrix<T> solve(Matrix<T> a, Matrix<T> b, const Real& tol = Real(0))
{
    const std::size_t n = a.rows();
    if (!a.square() || b.rows() != n)
        throw InputError("solve: shape mismatch");
    const Real scale = max_abs(a);
    for (std::size_t k = 0; k < n; ++k) {
        std::size_t p = detail::pick_pivot(a, k, k);
        bool singular;
        if constexpr (is_exact_v<T>)
            singular = detail::is_zero(a(p, k));
        else
            singular = !(magnitude(a(p, k)) > tol * scale);
        if (singular)
            throw NumericalError("singular matrix");
        a.swap_rows(p, k);
        b.swap_rows(p, k);
        for (std::size_t i = k + 1; i < n; ++i) {
            T f = a(i, k) / a(k, k);
            if (detail::is_zero(f))
                continue;
            for (std::size_t j = k; j < n; ++j)
                a(i, j) -= f * a(k, j);
            for (std::size_t j = 0; j < b.cols(); ++j)
                b(i, j) -= f * b(k, j);
        }
    }
    Matrix<T> x(n, b.cols());
    for (std::size_t c = 0; c < b.cols(); ++c)
        for (std::size_t ii = n; ii-- > 0;) {
            T s = b(ii, c);
            for (std::size_t j = ii + 1; j < n; ++j)
                s -= a(ii, j) * x(j, c);
            x(ii, c) = s / a(ii, ii);
        }
    return x;
}

template <class T>
Matrix<T> column(const std::vector<T>& v)
{
    Matrix<T> m(v.size(), 1);
    for (std::size_t i = 0; i < v.size(); ++i)
        m(i, 0) = v[i];
    return m;
}

// 3x3 inverse by adjugate over determinant
template <class T>
Matrix<T> inverse3(const Matrix<T>& m)
{
    Matrix<T> adj(3, 3);
    auto c = [&](std::size_t r0, std::size_t r1, std::size_t c0, std::size_t c1) {
        return m(r0, c0) * m(r1, c1) - m(r0, c1) * m(r1, c0);
    };
    adj(0, 0) = c(1, 2, 1, 2);
    adj(0, 1) = -c(0, 2, 1, 2);
    adj(0, 2) = c(0, 1, 1, 2);
    adj(1, 0) = -c(1, 2, 0, 2);
    adj(1, 1) = c(0, 2, 0, 2);
    adj(1, 2) = -c(0, 1, 0, 2);
    adj(2, 0) = c(1, 2, 0, 1);
    adj(2, 1) = -c(0, 2, 0, 1);
    adj(2, 2) = c(0, 1, 0, 1);
    T det = m(0, 0) * adj(0, 0) + m(0, 1) * adj(1, 0) + m(0, 2) * adj(2, 0);
    if (detail::is_zero(det))
        throw NumericalError("singular 3x3 matrix");
    T inv = T(1) / det;
    return inv * adj;
}

template <class T>
T det3(const Matrix<T>& m)
{
    return m(0, 0) * (m(1, 1) * m(2, 2) - m(1, 2) * m(2, 1)) - m(0, 1) * (m(1, 0) * m(2, 2) - m(1, 2) * m(2, 0)) +
           m(0, 2) * (m(1, 0) * m(2, 1) - m(1, 1) * m(2, 0));
}

// classical adjoint via cofactors (small sizes only)
template <class T>
Matrix<T> adjugate(const Matrix<T>& m)
{
    const std::size_t n = m.rows();
    Matrix<T> adj(n, n);
    if (n == 1) {
        adj(0, 0) = T(1);
        return adj;
    }
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            std::vector<std::size_t> ri, ci;
            for (std::size_t r = 0; r < n; ++r)
                if (r != j)
                    ri.push_back(r);
            for (std::size_t c = 0; c < n; ++c)
                if (c != i)
                    ci.push_back(c);
            T d = determinant(m.select(ri, ci));
            adj(i, j) = ((i + j) % 2) ? T(-d) : d;
        }
    return adj;
}

}  // namespace cauchy2mm

#endif
