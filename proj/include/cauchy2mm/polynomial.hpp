#ifndef CAUCHY2MM_POLYNOMIAL_HPP
#define CAUCHY2MM_POLYNOMIAL_HPP

#include "scalar.hpp"

#include <vector>

namespace cauchy2mm {

// Converts library scalars upward: Rational -> Real -> Complex.
template <class U, class T>
U lift(const T& v)
{
    if constexpr (std::is_same_v<U, T>)
        return v;
    else if constexpr (std::is_same_v<U, Complex>)
        return Complex(Real(v), Real(0));
    else if constexpr (std::is_same_v<U, double>)
        return to_double(v);
    else
        return U(v);
}

// Dense polynomial, coefficients in ascending powers.
template <class T>
class Polynomial {
public:
    Polynomial() = default;
    explicit Polynomial(std::vector<T> coeffs) : m_c(std::move(coeffs)) { trim(); }

    static Polynomial constant(const T& v) { return Polynomial(std::vector<T>{v}); }
    static Polynomial monomial(std::size_t k, const T& v = T(1))
    {
        std::vector<T> c(k + 1, T(0));
        c[k] = v;
        return Polynomial(std::move(c));
    }

    int degree() const { return static_cast<int>(m_c.size()) - 1; }
    bool zero() const { return m_c.empty(); }
    std::size_t size() const { return m_c.size(); }
    T operator[](std::size_t i) const { return i < m_c.size() ? m_c[i] : T(0); }
    const std::vector<T>& coeffs() const { return m_c; }
    T leading() const { return m_c.empty() ? T(0) : m_c.back(); }

    template <class U>
    U operator()(const U& x) const
    {
        U acc(0);
        for (std::size_t i = m_c.size(); i-- > 0;)
            acc = acc * x + lift<U>(m_c[i]);
        return acc;
    }

    template <class U>
    Polynomial<U> cast() const
    {
        std::vector<U> c;
        c.reserve(m_c.size());
        for (const auto& v : m_c)
            c.push_back(lift<U>(v));
        return Polynomial<U>(std::move(c));
    }

    // p(-x)
    Polynomial reflected() const
    {
        auto c = m_c;
        for (std::size_t i = 1; i < c.size(); i += 2)
            c[i] = -c[i];
        return Polynomial(std::move(c));
    }

    Polynomial times_x() const
    {
        if (m_c.empty())
            return *this;
        std::vector<T> c(m_c.size() + 1, T(0));
        for (std::size_t i = 0; i < m_c.size(); ++i)
            c[i + 1] = m_c[i];
        return Polynomial(std::move(c));
    }

    Polynomial derivative() const
    {
        if (m_c.size() <= 1)
            return {};
        std::vector<T> c(m_c.size() - 1);
        for (std::size_t i = 1; i < m_c.size(); ++i)
            c[i - 1] = m_c[i] * T(static_cast<long>(i));
        return Polynomial(std::move(c));
    }

    friend Polynomial operator+(const Polynomial& a, const Polynomial& b)
    {
        std::vector<T> c(std::max(a.size(), b.size()), T(0));
        for (std::size_t i = 0; i < c.size(); ++i)
            c[i] = a[i] + b[i];
        return Polynomial(std::move(c));
    }

    friend Polynomial operator-(const Polynomial& a, const Polynomial& b)
    {
        std::vector<T> c(std::max(a.size(), b.size()), T(0));
        for (std::size_t i = 0; i < c.size(); ++i)
            c[i] = a[i] - b[i];
        return Polynomial(std::move(c));
    }

    friend Polynomial operator*(const T& s, const Polynomial& p)
    {
        auto c = p.m_c;
        for (auto& v : c)
            v *= s;
        return Polynomial(std::move(c));
    }

    friend Polynomial operator*(const Polynomial& a, const Polynomial& b)
    {
        if (a.zero() || b.zero())
            return {};
        std::vector<T> c(a.size() + b.size() - 1, T(0));
        for (std::size_t i = 0; i < a.size(); ++i)
            for (std::size_t j = 0; j < b.size(); ++j)
                c[i + j] += a.m_c[i] * b.m_c[j];
        return Polynomial(std::move(c));
    }

    friend bool operator==(const Polynomial& a, const Polynomial& b) { return a.m_c == b.m_c; }

private:
    void trim()
    {
        while (!m_c.empty() && m_c.back() == T(0))
            m_c.pop_back();
    }

    std::vector<T> m_c;
};

}  // namespace cauchy2mm

#endif
