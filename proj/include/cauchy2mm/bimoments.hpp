#ifndef CAUCHY2MM_BIMOMENTS_HPP
#define CAUCHY2MM_BIMOMENTS_HPP

/*
 * Bimoment tables  I_jk = \int\int x^j y^k (x+y)^{-1-h} alpha(x) beta(y) dx dy.
 *
 * Exact channel: alpha = x^a e^{-cx}, beta = y^b e^{-cy}, h = 0, where
 *   I_jk = (j+a)! (k+b)! / ((J+1) c^{J+1}),  J = j+a+k+b.
 * Quadrature channel: polar split x = s t, y = s (1-t), which turns the
 * kernel into s^{-1-h} and leaves a smooth integrand on each cell.
 */

#include "matrix.hpp"
#include "measures.hpp"
#include "report.hpp"

#include <numeric>
#include <sstream>

namespace cauchy2mm {

template <class T>
struct BimomentTable {
    Matrix<T> entries;
    Real h = 0;
    std::vector<T> minors;           // D_1 .. D_{n_max+1}
    std::vector<T> alpha_moments;    // \int x^j alpha, j = 0 .. 2 n_max + 2
    std::vector<T> beta_moments;
    Weight alpha, beta;

    int n_max() const { return static_cast<int>(entries.rows()) - 1; }
    const T& operator()(std::size_t j, std::size_t k) const { return entries(j, k); }
    T D(int n) const { return n == 0 ? T(1) : minors.at(n - 1); }

    // the table of the pair (beta, alpha)
    BimomentTable transposed() const
    {
        BimomentTable t{entries.transpose(), h, {}, beta_moments, alpha_moments, beta, alpha};
        t.minors = leading_minors(t.entries);
        return t;
    }

    BimomentTable<Real> to_real() const
    {
        BimomentTable<Real> r;
        r.entries = Matrix<Real>(entries.rows(), entries.cols());
        for (std::size_t i = 0; i < entries.rows(); ++i)
            for (std::size_t j = 0; j < entries.cols(); ++j)
                r.entries(i, j) = cauchy2mm::to_real(entries(i, j));
        r.h = h;
        for (const auto& v : minors)
            r.minors.push_back(cauchy2mm::to_real(v));
        for (const auto& v : alpha_moments)
            r.alpha_moments.push_back(cauchy2mm::to_real(v));
        for (const auto& v : beta_moments)
            r.beta_moments.push_back(cauchy2mm::to_real(v));
        r.alpha = alpha;
        r.beta = beta;
        return r;
    }
};

inline bool exact_channel_available(const Weight& alpha, const Weight& beta, const Real& h = Real(0))
{
    auto ea = alpha.exponential_form(), eb = beta.exponential_form();
    return h == 0 && ea && eb && ea->rate == eb->rate;
}

inline void check_kernel_exponent(const Real& h)
{
    Real s = 1 + h;
    if (s <= 0 && s == floor(s))
        throw InputError("kernel exponent: 1+h is a nonpositive integer, the kernel degenerates");
}

inline BimomentTable<Rational> exact_bimoments(const Weight& alpha, const Weight& beta, int n_max)
{
    if (n_max < 0)
        throw InputError("n_max must be >= 0");
    auto ea = alpha.exponential_form(), eb = beta.exponential_form();
    if (!ea || !eb || ea->rate != eb->rate)
        throw InputError("exact bimoments need x^a e^{-cx}, y^b e^{-cy} on (0,inf) with integer a, b >= 0 and a common rate");
    const long a = ea->power, b = eb->power;
    const Rational& c = ea->rate;
    const int n = n_max + 1;
    std::vector<Rational> fact(2 * n + a + b + 4, Rational(1));
    for (std::size_t i = 1; i < fact.size(); ++i)
        fact[i] = fact[i - 1] * static_cast<long>(i);
    std::vector<Rational> cpow(2 * n + a + b + 4, Rational(1));
    for (std::size_t i = 1; i < cpow.size(); ++i)
        cpow[i] = cpow[i - 1] * c;
    BimomentTable<Rational> t;
    t.entries = Matrix<Rational>(n, n);
    for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k) {
            long J = j + a + k + b;
            t.entries(j, k) = ea->scale * eb->scale * fact[j + a] * fact[k + b] / (Rational(J + 1) * cpow[J + 1]);
        }
    t.minors = leading_minors(t.entries);
    t.alpha_moments = *alpha.exact_moments(2 * n_max + 2);
    t.beta_moments = *beta.exact_moments(2 * n_max + 2);
    t.alpha = alpha;
    t.beta = beta;
    return t;
}

namespace detail {

// Slope of the exponent on [x0, x1] clipped to the support hull.
inline Real slope_bound(const Weight& w, Real x0, Real x1)
{
    const Real lo = to_real(w.support().front().lo);
    x0 = std::max(x0, lo);
    x1 = std::max(x1, lo);
    if (w.bounded()) {
        const Real hi = to_real(*w.support().back().hi);
        x0 = std::min(x0, hi);
        x1 = std::min(x1, hi);
    }
    Real m = std::max(abs(w.exponent_slope(x0)), abs(w.exponent_slope(x1)));
    return std::max(m, abs(w.exponent_slope((x0 + x1) / 2)));
}

// Power-of-two cap keeping slope * cap within the node budget.
inline Real cap_for(const Real& slope, const Real& budget, const Real& ceiling)
{
    Real cap = ceiling;
    while (cap > ceiling / (1 << 20) && slope * cap > budget)
        cap /= 2;
    return cap;
}

}  // namespace detail

// Polar cells (x = s t, y = s(1-t)) absorb the kernel singularity at the origin.
// When both weights are smooth there, only a corner square uses them and the
// rest, where x + y stays away from 0, is a separable tensor product.
inline Matrix<Real> polar_bimoments(const Weight& alpha, const Weight& beta, int rows, int cols, const Real& h,
                                    const QuadratureSettings& q)
{
    check_kernel_exponent(h);
    const int degree = rows + cols;
    const Real ha = alpha.tail_cut(degree, q.tol), hb = beta.tail_cut(degree, q.tol);
    if (alpha.touches_zero() && beta.touches_zero()) {
        Real e = to_real(alpha.power()) + to_real(beta.power()) + 1 - h;
        if (e <= 0)
            throw InputError("divergent bimoment integral at the origin (h too large)");
    }
    const Real budget = Real(q.order) / 3;
    const GaussRule& g = gauss_legendre(q.order);
    Matrix<Real> out(rows, cols);
    std::vector<Real> xp(rows), yp(cols);

    // polar cells over [a1, b1] x [a2, b2]
    auto polar_rect = [&](const Real& a1, const Real& b1, const Real& a2, const Real& b2, bool b1_edge, bool b2_edge) {
        std::vector<Real> br{a1 + a2, a1 + b2, b1 + a2, b1 + b2};
        std::sort(br.begin(), br.end());
        br.erase(std::unique(br.begin(), br.end()), br.end());

        const bool s_singular = a1 == 0 && a2 == 0 &&
                                !(h == floor(h) && alpha.integer_power() && beta.integer_power());
        const bool t0_singular = a1 == 0 && !alpha.integer_power();
        const bool t1_singular = a2 == 0 && !beta.integer_power();
        Real s_floor = 0, t0_floor = 0, t1_floor = 0;
        if (s_singular) {
            Real e = to_real(alpha.power()) + to_real(beta.power()) + 1 - h;
            s_floor = pow2_floor(pow(q.tol, 1 / e) / 4);
        }
        if (t0_singular)
            t0_floor = pow2_floor(pow(q.tol, 1 / (to_real(alpha.power()) + 1)) / 4);
        if (t1_singular)
            t1_floor = pow2_floor(pow(q.tol, 1 / (to_real(beta.power()) + 1)) / 4);

        auto s_cap = [&](const Real& s) {
            Real m = std::max(detail::slope_bound(alpha, Real(0), s + 16), detail::slope_bound(beta, Real(0), s + 16));
            return detail::cap_for(m, budget, Real(16));
        };

        for (std::size_t seg = 0; seg + 1 < br.size(); ++seg) {
            const Real s0 = br[seg], s1 = br[seg + 1];
            Real first = pow2_floor(std::min({Real(1), s1 - s0, s_cap(s0)}));
            PanelList sp = graded(s0, s1, s0, first, s_cap);
            if (s_singular && s0 == 0)
                sp = refine_toward(sp, Complex(0), s_floor);
            // where a t-limit starts or stops touching a singular edge the inner integral has a power kink
            // (tail cuts are not real edges and need no refinement)
            for (const Real& e : {s0, s1}) {
                if (e == br.front() || e == br.back())
                    continue;
                if (t0_singular && b2_edge && e == a1 + b2)
                    sp = refine_toward(sp, Complex(e), t0_floor);
                if (t1_singular && b1_edge && e == b1 + a2)
                    sp = refine_toward(sp, Complex(e), t1_floor);
            }
            for (const auto& ps : sp) {
                const Real shalf = ps.length() / 2, smid = (ps.a + ps.b) / 2;
                for (int is = 0; is < q.order; ++is) {
                    const Real s = smid + shalf * g.nodes[is];
                    const Real ws = h == 0 ? Real(shalf * g.weights[is]) : Real(shalf * g.weights[is] * pow(s, -h));
                    Real tl = std::max(a1 / s, 1 - b2 / s), th = std::min(b1 / s, 1 - a2 / s);
                    if (tl < 0)
                        tl = 0;
                    if (th > 1)
                        th = 1;
                    if (!(th > tl))
                        continue;
                    // t-direction variation of the exponent
                    auto tslope = [&](const Real& t) {
                        return abs(alpha.exponent_slope(s * t) - beta.exponent_slope(s * (1 - t)));
                    };
                    Real m = std::max({tslope(tl), tslope(th), tslope((tl + th) / 2)});
                    Real tcap = detail::cap_for(m * s, budget, Real(1));
                    PanelList tp = graded(tl, th, tl, pow2_floor(std::min(tcap, th - tl)), tcap);
                    if (t0_singular)
                        tp = refine_toward(tp, Complex(0), t0_floor);
                    if (t1_singular)
                        tp = refine_toward(tp, Complex(1), t1_floor);
                    for (const auto& pt : tp) {
                        const Real thalf = pt.length() / 2, tmid = (pt.a + pt.b) / 2;
                        for (int it = 0; it < q.order; ++it) {
                            const Real t = tmid + thalf * g.nodes[it];
                            const Real x = s * t, y = s - x;
                            Real w = ws * thalf * g.weights[it] * alpha.density(x) * beta.density(y);
                            if (w == 0)
                                continue;
                            xp[0] = w;
                            for (int j = 1; j < rows; ++j)
                                xp[j] = xp[j - 1] * x;
                            yp[0] = 1;
                            for (int k = 1; k < cols; ++k)
                                yp[k] = yp[k - 1] * y;
                            for (int j = 0; j < rows; ++j)
                                for (int k = 0; k < cols; ++k)
                                    out(j, k) += xp[j] * yp[k];
                        }
                    }
                }
            }
        }
    };

    // nodes and weighted densities on [lo, hi]; `other` is the lower end of the partner interval
    auto line_nodes = [&](const Weight& w, const Real& lo, const Real& hi, const Real& other, std::vector<Real>& nodes,
                          std::vector<Real>& weights) {
        auto cap = [&](const Real& u) {
            Real m = detail::slope_bound(w, u, u + 16) + (1 + abs(h)) / (u + other);
            return detail::cap_for(m, budget, Real(16));
        };
        PanelList panels = graded(lo, hi, lo, pow2_floor(std::min({Real(1), hi - lo, cap(lo)})), cap);
        if (lo == 0 && !w.integer_power())
            panels = refine_toward(panels, Complex(0), pow2_floor(pow(q.tol, 1 / (to_real(w.power()) + 1)) / 4));
        for (const auto& p : panels) {
            const Real half = p.length() / 2, mid = (p.a + p.b) / 2;
            for (int i = 0; i < q.order; ++i) {
                const Real u = mid + half * g.nodes[i];
                Real d = half * g.weights[i] * w.density(u);
                if (d == 0)
                    continue;
                nodes.push_back(u);
                weights.push_back(std::move(d));
            }
        }
    };

    // out += X^T K Y with X_ij = wx_i x_i^j, K_il = (x_i + y_l)^{-1-h}, Y_lk = wy_l y_l^k
    auto tensor_rect = [&](const Real& a1, const Real& b1, const Real& a2, const Real& b2) {
        std::vector<Real> xs, wx, ys, wy;
        line_nodes(alpha, a1, b1, a2, xs, wx);
        line_nodes(beta, a2, b2, a1, ys, wy);
        std::vector<std::vector<Real>> ypow(ys.size(), std::vector<Real>(cols));
        for (std::size_t l = 0; l < ys.size(); ++l) {
            ypow[l][0] = wy[l];
            for (int k = 1; k < cols; ++k)
                ypow[l][k] = ypow[l][k - 1] * ys[l];
        }
        std::vector<Real> row(cols);
        Real kern;
        for (std::size_t i = 0; i < xs.size(); ++i) {
            for (auto& r : row)
                r = 0;
            for (std::size_t l = 0; l < ys.size(); ++l) {
                kern = xs[i] + ys[l];
                kern = h == 0 ? Real(1 / kern) : Real(pow(kern, -1 - h));
                for (int k = 0; k < cols; ++k)
                    row[k] += kern * ypow[l][k];
            }
            xp[0] = wx[i];
            for (int j = 1; j < rows; ++j)
                xp[j] = xp[j - 1] * xs[i];
            for (int j = 0; j < rows; ++j)
                for (int k = 0; k < cols; ++k)
                    out(j, k) += xp[j] * row[k];
        }
    };

    for (const auto& ia : alpha.support())
        for (const auto& ib : beta.support()) {
            const Real a1 = to_real(ia.lo), b1 = ia.hi ? to_real(*ia.hi) : ha;
            const Real a2 = to_real(ib.lo), b2 = ib.hi ? to_real(*ib.hi) : hb;
            // fractional edge powers would add kinks along the square's sides
            if (a1 != 0 || a2 != 0 || !alpha.integer_power() || !beta.integer_power()) {
                polar_rect(a1, b1, a2, b2, ia.hi.has_value(), ib.hi.has_value());
                continue;
            }
            const Real c = pow2_floor(std::min({Real(1), b1, b2}));
            polar_rect(a1, c, a2, c, true, true);
            if (b1 > c)
                tensor_rect(c, b1, a2, b2);
            if (b2 > c)
                tensor_rect(a1, c, c, b2);
        }
    return out;
}

inline BimomentTable<Real> quadrature_bimoments(const Weight& alpha, const Weight& beta, int n_max, const Real& h,
                                                const QuadratureSettings& q)
{
    if (n_max < 0)
        throw InputError("n_max must be >= 0");
    BimomentTable<Real> t;
    t.entries = polar_bimoments(alpha, beta, n_max + 1, n_max + 1, h, q);
    t.h = h;
    t.minors = leading_minors(t.entries);
    t.alpha_moments = Measure::of(alpha, q).moments(2 * n_max + 2);
    t.beta_moments = Measure::of(beta, q).moments(2 * n_max + 2);
    t.alpha = alpha;
    t.beta = beta;
    return t;
}

// Real-valued table through whichever channel applies.
inline BimomentTable<Real> real_bimoments(const Weight& alpha, const Weight& beta, int n_max, const Real& h,
                                          const QuadratureSettings& q)
{
    if (exact_channel_available(alpha, beta, h))
        return exact_bimoments(alpha, beta, n_max).to_real();
    return quadrature_bimoments(alpha, beta, n_max, h, q);
}

namespace detail {

inline std::string index_list(const std::vector<std::size_t>& v)
{
    std::ostringstream os;
    os << '{';
    for (std::size_t i = 0; i < v.size(); ++i)
        os << (i ? "," : "") << v[i];
    os << '}';
    return os.str();
}

// Next k-subset of {0..n-1} in lexicographic order.
inline bool next_subset(std::vector<std::size_t>& s, std::size_t n)
{
    std::size_t k = s.size();
    for (std::size_t i = k; i-- > 0;)
        if (s[i] < n - k + i) {
            ++s[i];
            for (std::size_t j = i + 1; j < k; ++j)
                s[j] = s[j - 1] + 1;
            return true;
        }
    return false;
}

}  // namespace detail

// Every square minor up to `size` is > 0 (exact) or > tolerance (float).
template <class T>
Report check_total_positivity(const BimomentTable<T>& t, int size, const Real& tol = Real(0))
{
    Report rep;
    const std::size_t n = t.entries.rows();
    if (size < 1 || static_cast<std::size_t>(size) > n)
        throw InputError("total positivity: size must be in 1..n_max+1");
    // Positive row scalings keep every minor's sign; in exact mode they make the
    // matrix integral so the minors are fraction-free integer determinants.
    Matrix<Integer> zi;
    if constexpr (is_exact_v<T>) {
        zi = Matrix<Integer>(n, n);
        for (std::size_t i = 0; i < n; ++i) {
            Integer l = 1;
            for (std::size_t j = 0; j < n; ++j)
                l = lcm(l, denominator(t.entries(i, j)));
            for (std::size_t j = 0; j < n; ++j)
                zi(i, j) = numerator(t.entries(i, j) * Rational(l));
        }
    }
    std::size_t count = 0;
    bool found = false;
    Real worst = 0;
    for (int k = 1; k <= size && !found; ++k) {
        std::vector<std::size_t> rows(k);
        std::iota(rows.begin(), rows.end(), 0);
        do {
            std::vector<std::size_t> cols(k);
            std::iota(cols.begin(), cols.end(), 0);
            do {
                ++count;
                bool bad;
                Real val;
                if constexpr (is_exact_v<T>) {
                    Integer d = determinant(zi.select(rows, cols));
                    bad = d <= 0;
                    val = Real(d.sign());
                } else {
                    Real d = determinant(t.entries.select(rows, cols));
                    bad = !(d > tol);
                    val = d;
                }
                if (bad) {
                    rep.add("total_positivity", "rows " + detail::index_list(rows) + " cols " + detail::index_list(cols), 1.0, 0.0,
                            "minor of size " + std::to_string(k) + " is not positive (" + to_string(val, 10) + ")");
                    found = true;
                    break;
                }
            } while (detail::next_subset(cols, n));
            if (found)
                break;
        } while (detail::next_subset(rows, n));
    }
    if (!found)
        rep.add("total_positivity", "all minors up to size " + std::to_string(size), 0.0, 0.0,
                std::to_string(count) + " minors positive");
    (void)worst;
    return rep;
}

// Sign of det[(x_i + y_j)^{-1-h}] for 1 + h = s < 0 at matrix size N:
// (-1)^{sum_{j<N} min(j, m)}, m = -floor(s).
inline int sign_regular_pattern(const Real& h, int size)
{
    Real s = 1 + h;
    long m = -floor(s).convert_to<long>();
    long e = 0;
    for (long j = 0; j < size; ++j)
        e += std::min(j, m);
    return e % 2 ? -1 : 1;
}

inline Report check_sign_regularity(const std::vector<Real>& xs, const std::vector<Real>& ys, const Real& h, int n)
{
    check_kernel_exponent(h);
    if (n < 1 || static_cast<std::size_t>(n) > xs.size() || static_cast<std::size_t>(n) > ys.size())
        throw InputError("sign regularity: n must not exceed the grid lengths");
    for (const auto* g : {&xs, &ys})
        for (std::size_t i = 0; i < g->size(); ++i)
            if ((*g)[i] <= 0 || (i && (*g)[i] <= (*g)[i - 1]))
                throw InputError("sign regularity: grids must be positive and strictly increasing");
    Report rep;
    const bool positive_kernel = 1 + h > 0;
    for (int m = 1; m <= n; ++m) {
        Matrix<Real> k(m, m);
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < m; ++j)
                k(i, j) = pow(xs[i] + ys[j], -1 - h);
        Real d = determinant(k);
        int expected = positive_kernel ? 1 : sign_regular_pattern(h, m);
        int got = d > 0 ? 1 : (d < 0 ? -1 : 0);
        rep.flag(positive_kernel ? "kernel_total_positivity" : "kernel_sign_regularity", "size " + std::to_string(m),
                 got == expected, "det = " + to_string(d, 12) + ", expected sign " + std::to_string(expected));
    }
    return rep;
}

}  // namespace cauchy2mm

#endif
