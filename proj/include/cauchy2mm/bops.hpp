#ifndef CAUCHY2MM_BOPS_HPP
#define CAUCHY2MM_BOPS_HPP

/*
 * Cauchy biorthogonal polynomials from a bimoment table.
 *
 * Scalars of type T (Rational or Real) hold the monic families p~_n, q~_n,
 * the squared norms c_n^2 = D_{n+1}/D_n and everything rational in them;
 * orthonormal data (which needs c_n itself) is derived in Real.
 */

#include "bimoments.hpp"
#include "polynomial.hpp"

#include <array>

namespace cauchy2mm {

template <class T>
T pairing(const Polynomial<T>& f, const Polynomial<T>& g, const Matrix<T>& table)
{
    if (f.degree() >= static_cast<int>(table.rows()) || g.degree() >= static_cast<int>(table.cols()))
        throw InputError("pairing: polynomial degree exceeds the bimoment table");
    T s(0);
    for (std::size_t i = 0; i < f.size(); ++i) {
        if (f[i] == T(0))
            continue;
        T row(0);
        for (std::size_t j = 0; j < g.size(); ++j)
            row += g[j] * table(i, j);
        s += f[i] * row;
    }
    return s;
}

template <class T>
T pairing(const Polynomial<T>& f, const Polynomial<T>& g, const BimomentTable<T>& t)
{
    return pairing(f, g, t.entries);
}

// \int f(x) dmu from a moment sequence
template <class T>
T integrate_moments(const Polynomial<T>& f, const std::vector<T>& moments)
{
    T s(0);
    for (std::size_t i = 0; i < f.size(); ++i)
        s += f[i] * moments.at(i);
    return s;
}

template <class T>
struct BopFamily {
    int n_max = 0;
    BimomentTable<T> table;

    // exact-capable data
    std::vector<Polynomial<T>> monic_p, monic_q;
    std::vector<T> c2;                 // c_n^2
    std::vector<T> pi_monic, eta_monic;    // \int p~_n alpha, \int q~_n beta
    std::vector<Polynomial<T>> hat_p;  // p^_n, degree n
    std::vector<Polynomial<T>> hat_q;  // q^_n, degree n+1, n < n_max
    std::vector<T> diag_x;             // pairing(x p_n, q_n), n < n_max
    // x (pi~_{n-1} p~_n - pi~_n p~_{n-1}) = sum_{i=-1..2} A~_n^(i) p~_{n-i}; index i+1
    std::vector<std::array<T, 4>> rec_a_monic, rec_b_monic;

    // orthonormal data
    std::vector<Real> c, pi, eta;
    std::vector<Polynomial<Real>> p, q, hat_p_real, hat_q_real;
    std::vector<std::array<Real, 4>> rec_a, rec_b;

    Real kappa(int m) const { return c.at(m) / c.at(m - 1); }
    Real x_diag(int m) const { return cauchy2mm::to_real(diag_x.at(m)); }
};

namespace detail {

// Monic degree-n polynomial f with pairing(f, y^k) = 0 (rows) or pairing(x^k, f) = 0 (cols), k < n.
template <class T>
Polynomial<T> monic_biorthogonal(const Matrix<T>& table, int n, bool as_left)
{
    if (n == 0)
        return Polynomial<T>::constant(T(1));
    Matrix<T> a(n, n), b(n, 1);
    for (int k = 0; k < n; ++k) {
        for (int i = 0; i < n; ++i)
            a(k, i) = as_left ? table(i, k) : table(k, i);
        b(k, 0) = as_left ? T(-table(n, k)) : T(-table(k, n));
    }
    Matrix<T> x = solve(a, b);
    std::vector<T> coeffs(n + 1);
    for (int i = 0; i < n; ++i)
        coeffs[i] = x(i, 0);
    coeffs[n] = T(1);
    return Polynomial<T>(std::move(coeffs));
}

template <class T>
std::array<T, 4> expand_window(const Polynomial<T>& lhs, const std::vector<Polynomial<T>>& basis_dual, const std::vector<T>& c2,
                               int n, const Matrix<T>& table, bool lhs_left)
{
    std::array<T, 4> out{T(0), T(0), T(0), T(0)};
    for (int i = -1; i <= 2; ++i) {
        int m = n - i;
        if (m < 0)
            continue;
        T v = lhs_left ? pairing(lhs, basis_dual[m], table) : pairing(basis_dual[m], lhs, table);
        out[i + 1] = v / c2[m];
    }
    return out;
}

}  // namespace detail

template <class T>
BopFamily<T> build_family(const BimomentTable<T>& t, int n_max)
{
    if (n_max < 0 || n_max > t.n_max())
        throw InputError("build_family: n_max must be within the bimoment table");
    BopFamily<T> f;
    f.n_max = n_max;
    f.table = t;
    for (int n = 0; n <= n_max + 1; ++n) {
        T d = t.D(n);
        bool positive;
        if constexpr (is_exact_v<T>)
            positive = d > 0;
        else
            positive = d > 0;
        if (!positive)
            throw NumericalError("nonpositive leading minor D_" + std::to_string(n) + ": total positivity violated");
    }
    for (int n = 0; n <= n_max; ++n) {
        f.monic_p.push_back(detail::monic_biorthogonal(t.entries, n, true));
        f.monic_q.push_back(detail::monic_biorthogonal(t.entries, n, false));
        f.c2.push_back(t.D(n + 1) / t.D(n));
        f.pi_monic.push_back(integrate_moments(f.monic_p[n], t.alpha_moments));
        f.eta_monic.push_back(integrate_moments(f.monic_q[n], t.beta_moments));
    }
    // p^_n = -beta^T I_{n+1}^{-1} (1, x, .., x^n)^T, the bordered-determinant form
    for (int n = 0; n <= n_max; ++n) {
        Matrix<T> a = t.entries.block(0, 0, n + 1, n + 1).transpose();
        Matrix<T> b(n + 1, 1);
        for (int k = 0; k <= n; ++k)
            b(k, 0) = t.beta_moments.at(k);
        Matrix<T> v = solve(a, b);
        std::vector<T> coeffs(n + 1);
        for (int i = 0; i <= n; ++i)
            coeffs[i] = -v(i, 0);
        f.hat_p.push_back(Polynomial<T>(std::move(coeffs)));
    }
    for (int n = 0; n + 1 <= n_max; ++n)
        f.hat_q.push_back((T(1) / f.eta_monic[n + 1]) * f.monic_q[n + 1] - (T(1) / f.eta_monic[n]) * f.monic_q[n]);
    for (int n = 0; n + 1 <= n_max; ++n)
        f.diag_x.push_back(pairing(f.monic_p[n].times_x(), f.monic_q[n], t.entries) / f.c2[n]);
    for (int n = 1; n + 1 <= n_max; ++n) {
        auto lp = (f.pi_monic[n - 1] * f.monic_p[n] - f.pi_monic[n] * f.monic_p[n - 1]).times_x();
        auto lq = (f.eta_monic[n - 1] * f.monic_q[n] - f.eta_monic[n] * f.monic_q[n - 1]).times_x();
        f.rec_a_monic.push_back(detail::expand_window(lp, f.monic_q, f.c2, n, t.entries, true));
        f.rec_b_monic.push_back(detail::expand_window(lq, f.monic_p, f.c2, n, t.entries, false));
    }

    for (int n = 0; n <= n_max; ++n) {
        Real cn = sqrt(to_real(f.c2[n]));
        f.c.push_back(cn);
        f.pi.push_back(to_real(f.pi_monic[n]) / cn);
        f.eta.push_back(to_real(f.eta_monic[n]) / cn);
        f.p.push_back((1 / cn) * f.monic_p[n].template cast<Real>());
        f.q.push_back((1 / cn) * f.monic_q[n].template cast<Real>());
        f.hat_p_real.push_back(f.hat_p[n].template cast<Real>());
    }
    for (const auto& h : f.hat_q)
        f.hat_q_real.push_back(h.template cast<Real>());
    for (std::size_t r = 0; r < f.rec_a_monic.size(); ++r) {
        int n = static_cast<int>(r) + 1;
        std::array<Real, 4> a{}, b{};
        for (int i = -1; i <= 2; ++i) {
            int m = n - i;
            if (m < 0)
                continue;
            Real scale = f.c[m] / (f.c[n - 1] * f.c[n]);
            a[i + 1] = to_real(f.rec_a_monic[r][i + 1]) * scale;
            b[i + 1] = to_real(f.rec_b_monic[r][i + 1]) * scale;
        }
        f.rec_a.push_back(a);
        f.rec_b.push_back(b);
    }
    return f;
}

// Swapped family (roles of alpha and beta exchanged): p <-> q, pi <-> eta.
template <class T>
BopFamily<T> mirror_family(const BopFamily<T>& f)
{
    return build_family(f.table.transposed(), f.n_max);
}

// Structural identities of a built family.
template <class T>
Report verify_family(const BopFamily<T>& f, const Real& tol)
{
    Report rep;
    const auto& I = f.table.entries;
    auto residual = [&](const T& v) -> Real { return magnitude(v); };
    auto tolerance = [&]() { return is_exact_v<T> ? 0.0 : to_double(tol); };

    Real worst = 0;
    for (int j = 0; j <= f.n_max; ++j)
        for (int k = 0; k <= f.n_max; ++k) {
            T v = pairing(f.monic_p[j], f.monic_q[k], I) - (j == k ? f.c2[j] : T(0));
            Real r = residual(v) / (is_exact_v<T> ? Real(1) : to_real(f.c2[std::min(j, k)]));
            if (r > worst)
                worst = r;
        }
    rep.add("biorthonormality", "j,k <= " + std::to_string(f.n_max), worst, tolerance());

    for (int n = 0; n <= f.n_max; ++n) {
        bool ok = f.c2[n] > 0 && f.pi_monic[n] > 0 && f.eta_monic[n] > 0;
        rep.flag("positivity_c_pi_eta", "n=" + std::to_string(n), ok);
    }

    // telescoping: (1/eta_n)(p^_{n-1} - p^_n) = p_n, and the anchor p^_0 = -eta_0 p_0
    Real tel = 0;
    for (int n = 0; n <= f.n_max; ++n) {
        Polynomial<T> lhs = n == 0 ? Polynomial<T>() - f.hat_p[0] : f.hat_p[n - 1] - f.hat_p[n];
        // in monic units: p^_{n-1} - p^_n = eta~_n p~_n / c~_n^2
        Polynomial<T> rhs = (f.eta_monic[n] / f.c2[n]) * f.monic_p[n];
        Polynomial<T> d = lhs - rhs;
        for (const auto& c : d.coeffs())
            tel = std::max(tel, residual(c));
    }
    rep.add("hat_p_telescoping", "n <= " + std::to_string(f.n_max), tel, tolerance());

    Real hq = 0;
    for (const auto& h : f.hat_q)
        hq = std::max(hq, residual(integrate_moments(h, f.table.beta_moments)));
    rep.add("hat_q_zero_mean", "n < " + std::to_string(f.n_max), hq, tolerance());

    Real lead = 0;
    for (int n = 0; n <= f.n_max; ++n)
        lead = std::max(lead, abs(f.p[n].leading() - f.q[n].leading()));
    rep.add("equal_leading_coefficients", "n <= " + std::to_string(f.n_max), lead, std::max(tolerance(), to_double(tol)));
    return rep;
}

// Pairing residuals of the four-term recurrences against every admissible q_m (p_m).
template <class T>
Report verify_recurrence(const BopFamily<T>& f, const Real& tol, int n_limit = -1)
{
    Report rep;
    const auto& I = f.table.entries;
    const int last = n_limit < 0 ? f.n_max - 1 : std::min(n_limit, f.n_max - 1);
    for (int n = 1; n <= last; ++n) {
        const auto& a = f.rec_a_monic[n - 1];
        const auto& b = f.rec_b_monic[n - 1];
        auto rp = (f.pi_monic[n - 1] * f.monic_p[n] - f.pi_monic[n] * f.monic_p[n - 1]).times_x();
        auto rq = (f.eta_monic[n - 1] * f.monic_q[n] - f.eta_monic[n] * f.monic_q[n - 1]).times_x();
        for (int i = -1; i <= 2; ++i)
            if (n - i >= 0) {
                rp = rp - a[i + 1] * f.monic_p[n - i];
                rq = rq - b[i + 1] * f.monic_q[n - i];
            }
        Real worst = 0;
        for (int m = 0; m <= f.n_max; ++m) {
            T vp = pairing(rp, f.monic_q[m], I), vq = pairing(f.monic_p[m], rq, I);
            Real r = std::max(magnitude(vp), magnitude(vq));
            if constexpr (!is_exact_v<T>)
                r /= to_real(f.c[n - 1] * f.c[n] * f.c[m]);
            worst = std::max(worst, r);
        }
        rep.add("four_term_recurrence", "n=" + std::to_string(n), worst, is_exact_v<T> ? 0.0 : to_double(tol));
    }
    return rep;
}

// Real zeros of f inside [lo, hi] from sign changes on a geometric grid plus bisection.
inline std::vector<Real> bracketed_zeros(const Polynomial<Real>& f, const Real& lo, const Real& hi, int expected, const Real& tol)
{
    std::vector<Real> zeros;
    if (f.degree() <= 0)
        return zeros;
    for (int pts = 2048; pts <= 1 << 17; pts *= 4) {
        zeros.clear();
        // geometric spacing from a small offset above lo, denser near lo
        Real span = hi - lo, start = span * Real("1e-12");
        Real ratio = pow(span / start, Real(1) / (pts - 1));
        Real prev_x = lo, prev_v = f(lo);
        Real x = lo + start;
        for (int k = 0; k < pts; ++k, x = lo + (x - lo) * ratio) {
            Real v = f(x);
            if (v == 0) {
                zeros.push_back(x);
            } else if (prev_v != 0 && ((v > 0) != (prev_v > 0))) {
                Real a = prev_x, b = x, fa = prev_v;
                for (int it = 0; it < 2000 && b - a > tol * (abs(a) + abs(b) + 1); ++it) {
                    Real m = (a + b) / 2, fm = f(m);
                    if (fm == 0) {
                        a = b = m;
                        break;
                    }
                    if ((fm > 0) == (fa > 0)) {
                        a = m;
                        fa = fm;
                    } else {
                        b = m;
                    }
                }
                zeros.push_back((a + b) / 2);
            }
            prev_x = x;
            prev_v = v;
        }
        if (static_cast<int>(zeros.size()) >= expected)
            break;
    }
    return zeros;
}

struct ZeroSet {
    int degree;
    char family;    // 'p' or 'q'
    std::vector<Real> zeros;
};

// Simplicity, location inside the support hull, and interlacing of consecutive degrees.
template <class T>
Report zeros_and_interlacing(const BopFamily<T>& f, const Real& tol, std::vector<ZeroSet>* out = nullptr)
{
    Report rep;
    const Weight* w[2] = {&f.table.alpha, &f.table.beta};
    const std::vector<Polynomial<Real>>* fam[2] = {&f.p, &f.q};
    const char name[2] = {'p', 'q'};
    for (int s = 0; s < 2; ++s) {
        const Weight& wt = *w[s];
        Real lo = to_real(wt.support().front().lo);
        Real hull_hi = wt.support().back().hi ? to_real(*wt.support().back().hi) : Real(-1);
        Real search_hi = wt.support().back().hi ? hull_hi : wt.tail_cut(2 * f.n_max + 2, Real("1e-40")) * 4;
        std::vector<std::vector<Real>> all;
        for (int n = 0; n <= f.n_max; ++n) {
            auto z = bracketed_zeros((*fam[s])[n], lo, search_hi, n, tol);
            const std::string pt = std::string(1, name[s]) + "_" + std::to_string(n);
            rep.flag("zero_count", pt, static_cast<int>(z.size()) == n,
                     std::to_string(z.size()) + " real zeros found for degree " + std::to_string(n));
            bool simple = true;
            auto d = (*fam[s])[n].derivative();
            for (std::size_t i = 0; i < z.size(); ++i) {
                if (i && !(z[i] > z[i - 1]))
                    simple = false;
                Real scale = 0;
                for (const auto& c : (*fam[s])[n].coeffs())
                    scale += abs(c) * pow(std::max(Real(1), Real(abs(z[i]))), (*fam[s])[n].degree());
                if (abs(d(z[i])) * std::max(Real(1), Real(abs(z[i]))) <= tol * scale)
                    simple = false;
            }
            rep.flag("zeros_simple", pt, simple);
            bool inside = true;
            for (const auto& x : z)
                if (!(x > lo) || (hull_hi > 0 && !(x < hull_hi)))
                    inside = false;
            rep.flag("zeros_in_support_hull", pt, inside);
            if (out)
                out->push_back({n, name[s], z});
            all.push_back(std::move(z));
        }
        for (int n = 1; n < f.n_max; ++n) {
            const auto& a = all[n];
            const auto& b = all[n + 1];
            bool ok = static_cast<int>(a.size()) == n && static_cast<int>(b.size()) == n + 1;
            for (int i = 0; ok && i < n; ++i)
                ok = b[i] < a[i] && a[i] < b[i + 1];
            rep.flag("interlacing", std::string(1, name[s]) + "_" + std::to_string(n) + " vs " + std::string(1, name[s]) + "_" +
                                        std::to_string(n + 1),
                     ok);
        }
    }
    return rep;
}

}  // namespace cauchy2mm

#endif
