#ifndef CAUCHY2MM_MEASURES_HPP
#define CAUCHY2MM_MEASURES_HPP

/*
 * Quadrature-backed measures and their Cauchy (Weyl) transforms.
 *
 * A Measure is either a Weight or a "Stieltjes product"  outer(x) * G(x),
 * G(x) = \int inner(y)/(x+y) dy, which is the density behind the double
 * transforms. Copies share one cache of density values.
 */

#include "polynomial.hpp"
#include "quadrature.hpp"
#include "weight.hpp"

#include <algorithm>
#include <memory>
#include <mutex>

namespace cauchy2mm {

struct QuadratureSettings {
    Real tol;
    int order;

    static QuadratureSettings from(const ScalarContext& ctx)
    {
        Real t = ctx.quadrature_tolerance();
        return {t, gauss_order_for(t)};
    }
    static QuadratureSettings with_tolerance(const Real& t) { return {t, gauss_order_for(t)}; }
};

struct BoundaryValues {
    std::vector<Complex> plus, minus;
};

class Measure {
public:
    static Measure of(const Weight& w, const QuadratureSettings& q)
    {
        auto s = std::make_shared<State>(w, q);
        s->singular_zero = w.singular_at_zero();
        if (s->singular_zero) {
            // x^a on [0, s] carries about s^(a+1) of mass
            double a1 = to_double(w.power()) + 1;
            s->zero_floor = pow2_floor(pow(q.tol, Real(1.0 / a1)) / 4);
        }
        Weight wc = w;
        s->sampler = std::make_shared<DensitySampler>([wc](const Real& x) { return wc.density(x); });
        return Measure(std::move(s));
    }

    // density outer(x) * \int inner(y) dy / (x + y) on the support of outer
    static Measure stieltjes_product(const Measure& outer, const Measure& inner)
    {
        if (outer.m_s->inner)
            throw InputError("nested Stieltjes products are not supported");
        auto s = std::make_shared<State>(outer.m_s->weight, outer.m_s->q);
        s->inner = inner.m_s;
        s->singular_zero = outer.weight().touches_zero() && (inner.weight().touches_zero() || outer.m_s->singular_zero);
        if (s->singular_zero) {
            Real f = outer.m_s->singular_zero ? outer.m_s->zero_floor : Real(1);
            Real g = pow2_floor(q_floor_log(outer.m_s->q.tol));
            s->zero_floor = f < g ? f : g;
        }
        Weight wc = outer.m_s->weight;
        Measure in(inner.m_s);
        s->sampler = std::make_shared<DensitySampler>([wc, in](const Real& x) {
            Real d = wc.density(x);
            if (d == 0)
                return d;
            return d * in.stieltjes(x);
        });
        return Measure(std::move(s));
    }

    const Weight& weight() const { return m_s->weight; }
    bool composite() const { return static_cast<bool>(m_s->inner); }
    const QuadratureSettings& settings() const { return m_s->q; }

    Real density(const Real& x) const { return m_s->sampler->density(x); }

    bool on_support(const Complex& z) const { return z.imag() == 0 && weight().in_support(z.real()); }

    PanelList base_panels(int degree) const
    {
        {
            std::lock_guard lock(m_s->mutex);
            auto it = m_s->panels.find(degree);
            if (it != m_s->panels.end())
                return it->second;
        }
        PanelList out;
        auto cap = [this](const Real& x) { return panel_cap(x); };
        const auto& sup = weight().support();
        for (const auto& iv : sup) {
            Real lo = to_real(iv.lo);
            Real hi = iv.hi ? to_real(*iv.hi) : weight().tail_cut(degree, m_s->q.tol);
            Real s0 = std::min({Real(1), cap(lo), hi - lo});
            s0 = pow2_floor(s0);
            PanelList p = graded(lo, hi, lo, s0, cap);
            if (lo == 0 && m_s->singular_zero)
                p = refine_toward(p, Complex(0), m_s->zero_floor);
            out.insert(out.end(), p.begin(), p.end());
        }
        std::lock_guard lock(m_s->mutex);
        m_s->panels.emplace(degree, out);
        return out;
    }

    bool resolves(const Complex& z, int degree) const { return cauchy2mm::resolves(base_panels(degree), z); }

    Real integrate(const std::function<Real(const Real&)>& g, int degree) const
    {
        Real s = 0;
        for (const auto& p : base_panels(degree))
            for (const auto& n : m_s->sampler->nodes(p, m_s->q.order))
                s += n.w * g(n.x);
        return s;
    }

    std::vector<Real> quadrature_moments(int kmax) const
    {
        std::vector<Real> m(kmax + 1, Real(0));
        for (const auto& p : base_panels(kmax))
            for (const auto& n : m_s->sampler->nodes(p, m_s->q.order)) {
                Real xp = n.w;
                for (int k = 0; k <= kmax; ++k) {
                    m[k] += xp;
                    xp *= n.x;
                }
            }
        return m;
    }

    // closed form when the weight has one, quadrature otherwise
    std::vector<Real> moments(int kmax) const
    {
        if (!composite())
            if (auto ex = weight().exact_moments(kmax)) {
                std::vector<Real> m;
                for (const auto& q : *ex)
                    m.push_back(to_real(q));
                return m;
            }
        {
            std::lock_guard lock(m_s->mutex);
            if (static_cast<int>(m_s->moments.size()) > kmax)
                return {m_s->moments.begin(), m_s->moments.begin() + kmax + 1};
        }
        auto m = quadrature_moments(std::max(kmax, 8));
        std::lock_guard lock(m_s->mutex);
        if (m.size() > m_s->moments.size())
            m_s->moments = m;
        return {m.begin(), m.begin() + kmax + 1};
    }

    // \int f(t) rho(t) / (z - t) dt for each f, z off the support
    std::vector<Complex> cauchy(const std::vector<Polynomial<Real>>& fs, const Complex& z) const
    {
        if (on_support(z))
            throw InputError("Cauchy transform requested on the support; use boundary values");
        if (z.imag() == 0) {
            auto r = cauchy_real(fs, z.real());
            return {r.begin(), r.end()};
        }
        const int deg = max_degree(fs);
        PanelList panels = base_panels(deg);
        if (!cauchy2mm::resolves(panels, z))
            panels = refine_toward(panels, z, refine_floor());
        std::vector<Complex> acc(fs.size(), Complex(0));
        std::vector<Real> re(fs.size(), Real(0)), im(fs.size(), Real(0));
        for (const auto& p : panels)
            for (const auto& n : m_s->sampler->nodes(p, m_s->q.order)) {
                Real dr = z.real() - n.x, di = z.imag();
                Real d2 = dr * dr + di * di;
                Real kr = n.w * dr / d2, ki = -n.w * di / d2;
                for (std::size_t i = 0; i < fs.size(); ++i) {
                    Real f = fs[i](n.x);
                    re[i] += f * kr;
                    im[i] += f * ki;
                }
            }
        for (std::size_t i = 0; i < fs.size(); ++i)
            acc[i] = Complex(re[i], im[i]);
        return acc;
    }

    std::vector<Real> cauchy_real(const std::vector<Polynomial<Real>>& fs, const Real& x) const
    {
        if (weight().in_support(x))
            throw InputError("Cauchy transform requested on the support; use boundary values");
        const int deg = max_degree(fs);
        PanelList panels = base_panels(deg);
        const Complex z(x, Real(0));
        if (!cauchy2mm::resolves(panels, z))
            panels = refine_toward(panels, z, refine_floor());
        std::vector<Real> acc(fs.size(), Real(0));
        for (const auto& p : panels)
            for (const auto& n : m_s->sampler->nodes(p, m_s->q.order)) {
                Real k = n.w / (x - n.x);
                for (std::size_t i = 0; i < fs.size(); ++i)
                    acc[i] += fs[i](n.x) * k;
            }
        return acc;
    }

    Complex weyl(const Complex& z) const { return cauchy({Polynomial<Real>::constant(Real(1))}, z)[0]; }

    // \int rho(y) / (x + y) dy for x > -inf(support)
    Real stieltjes(const Real& x) const { return -cauchy_real({Polynomial<Real>::constant(Real(1))}, -x)[0]; }

    // One-sided limits of the Cauchy transform at x0 inside the support:
    // principal value by subtracting f(x0) rho(x0) near x0, then -/+ i pi f(x0) rho(x0).
    BoundaryValues boundary(const std::vector<Polynomial<Real>>& fs, const Real& x0) const
    {
        if (!weight().strictly_inside(x0))
            throw InputError("boundary value requested outside the open support");
        Real lo, hi;
        bool bounded_right = false;
        for (const auto& iv : weight().support())
            if (x0 > to_real(iv.lo) && (!iv.hi || x0 < to_real(*iv.hi))) {
                lo = to_real(iv.lo);
                bounded_right = static_cast<bool>(iv.hi);
                hi = iv.hi ? to_real(*iv.hi) : x0 + 2;
            }
        Real r = std::min({x0 - lo, hi - x0, Real(2)}) / 2;
        if (!bounded_right)
            r = std::min(x0 - lo, Real(2)) / 2;
        const int deg = max_degree(fs);
        const int order = m_s->q.order;
        const Real rho0 = density(x0);
        std::vector<Real> f0(fs.size());
        for (std::size_t i = 0; i < fs.size(); ++i)
            f0[i] = fs[i](x0);

        std::vector<Real> pv(fs.size(), Real(0));
        // singularity-subtracted inner part
        const GaussRule& g = gauss_legendre(order);
        for (const Panel& p : {Panel{x0 - r, x0}, Panel{x0, x0 + r}}) {
            Real half = p.length() / 2, mid = (p.a + p.b) / 2;
            for (int k = 0; k < order; ++k) {
                Real t = mid + half * g.nodes[k];
                Real rho = density(t);
                Real w = half * g.weights[k] / (x0 - t);
                for (std::size_t i = 0; i < fs.size(); ++i)
                    pv[i] += w * (fs[i](t) * rho - f0[i] * rho0);
            }
        }
        // everything else, graded away from the excised window
        PanelList outer;
        for (const auto& p : base_panels(deg)) {
            Real a = p.a, b = p.b;
            if (b <= x0 - r || a >= x0 + r) {
                outer.push_back(p);
                continue;
            }
            if (a < x0 - r)
                outer.push_back({a, x0 - r});
            if (b > x0 + r)
                outer.push_back({x0 + r, b});
        }
        outer = refine_toward(outer, Complex(x0), refine_floor());
        for (const auto& p : outer)
            for (const auto& n : m_s->sampler->nodes(p, order)) {
                Real k = n.w / (x0 - n.x);
                for (std::size_t i = 0; i < fs.size(); ++i)
                    pv[i] += fs[i](n.x) * k;
            }
        BoundaryValues bv;
        const Real pi = pi_real();
        for (std::size_t i = 0; i < fs.size(); ++i) {
            Real jump = pi * f0[i] * rho0;
            bv.plus.emplace_back(pv[i], -jump);
            bv.minus.emplace_back(pv[i], jump);
        }
        return bv;
    }

private:
    struct State {
        State(Weight w, QuadratureSettings qs) : weight(std::move(w)), q(std::move(qs)) {}
        Weight weight;
        QuadratureSettings q;
        std::shared_ptr<const State> inner;
        std::shared_ptr<DensitySampler> sampler;
        bool singular_zero = false;
        Real zero_floor = 0;
        std::mutex mutex;
        std::map<int, PanelList> panels;
        std::vector<Real> moments;
    };

    explicit Measure(std::shared_ptr<State> s) : m_s(std::move(s)) {}
    explicit Measure(std::shared_ptr<const State> s) : m_s(std::const_pointer_cast<State>(std::move(s))) {}

    // log singularity: [0, s] contributes about s*|log s|
    static Real q_floor_log(const Real& tol) { return tol / 128; }

    Real refine_floor() const { return ldexp(Real(1), 8 - static_cast<int>(working_bits())); }

    // panel length that keeps the exponential factor well resolved
    Real panel_cap(const Real& x) const
    {
        Real cap = 16;
        const Real budget = Real(m_s->q.order) / 3;
        const Weight& w = weight();
        while (cap > Real(1) / 4096) {
            Real s = std::max(abs(w.exponent_slope(x)), abs(w.exponent_slope(x + cap)));
            if (s * cap <= budget)
                break;
            cap /= 2;
        }
        return cap;
    }

    static int max_degree(const std::vector<Polynomial<Real>>& fs)
    {
        int d = 0;
        for (const auto& f : fs)
            d = std::max(d, f.degree());
        return d;
    }

    std::shared_ptr<State> m_s;
};

// Coefficients of the polynomial part of the Cauchy transform of f:
// C[f](z) = f(z) W(z) - P(z),  P(z) = sum_k f_k sum_{i<k} z^i m_{k-1-i}.
inline Polynomial<Real> polynomial_part(const Polynomial<Real>& f, const std::vector<Real>& moments)
{
    const int n = f.degree();
    if (n <= 0)
        return {};
    std::vector<Real> c(n, Real(0));
    for (int k = 1; k <= n; ++k)
        for (int i = 0; i < k; ++i)
            c[i] += f[k] * moments.at(k - 1 - i);
    return Polynomial<Real>(std::move(c));
}

enum class WeylTag { alpha, beta, alpha_star, beta_star, alpha_star_beta, beta_alpha_star, beta_star_alpha };

/*
 * The pair (alpha, beta) with the two Stieltjes products
 *   ab(x) = alpha(x) G_beta(x),   ba(y) = beta(y) G_alpha(y),
 * whose Cauchy transforms are the double Weyl functions. They are linked by
 *   W_ab(u) + W_ba(-u) = -W_alpha(u) W_beta(-u),
 * which lets every evaluation near one support be moved to the far side.
 */
class WeylSystem {
public:
    WeylSystem(const Weight& alpha, const Weight& beta, const QuadratureSettings& q)
        : m_alpha(Measure::of(alpha, q)), m_beta(Measure::of(beta, q)), m_lazy(std::make_shared<Lazy>())
    {
    }

    const Measure& alpha() const { return m_alpha; }
    const Measure& beta() const { return m_beta; }

    const Measure& ab() const
    {
        std::call_once(m_lazy->ab_once, [this] { m_lazy->ab = Measure::stieltjes_product(m_alpha, m_beta); });
        return *m_lazy->ab;
    }
    const Measure& ba() const
    {
        std::call_once(m_lazy->ba_once, [this] { m_lazy->ba = Measure::stieltjes_product(m_beta, m_alpha); });
        return *m_lazy->ba;
    }

    WeylSystem swapped() const
    {
        WeylSystem s(*this);
        std::swap(s.m_alpha, s.m_beta);
        s.m_lazy = std::make_shared<Lazy>();
        if (m_lazy->ab)
            s.m_lazy->ba = m_lazy->ab;
        if (m_lazy->ba)
            s.m_lazy->ab = m_lazy->ba;
        if (s.m_lazy->ab)
            std::call_once(s.m_lazy->ab_once, [] {});
        if (s.m_lazy->ba)
            std::call_once(s.m_lazy->ba_once, [] {});
        return s;
    }

    static Polynomial<Real> one() { return Polynomial<Real>::constant(Real(1)); }

    Complex W_alpha(const Complex& z) const { return m_alpha.weyl(z); }
    Complex W_beta(const Complex& z) const { return m_beta.weyl(z); }
    Complex W_ab(const Complex& u) const { return C_ab({one()}, u)[0]; }
    Complex W_ba(const Complex& u) const { return C_ba({one()}, u)[0]; }

    Complex weyl(WeylTag tag, const Complex& z) const
    {
        switch (tag) {
        case WeylTag::alpha: return W_alpha(z);
        case WeylTag::beta: return W_beta(z);
        case WeylTag::alpha_star: return -W_alpha(-z);
        case WeylTag::beta_star: return -W_beta(-z);
        case WeylTag::alpha_star_beta: return W_ab(-z);
        case WeylTag::beta_alpha_star: return W_ba(z);
        case WeylTag::beta_star_alpha: return W_ba(-z);
        }
        return {};
    }

    std::vector<Complex> C_alpha(const std::vector<Polynomial<Real>>& fs, const Complex& z) const { return m_alpha.cauchy(fs, z); }
    std::vector<Complex> C_beta(const std::vector<Polynomial<Real>>& fs, const Complex& z) const { return m_beta.cauchy(fs, z); }

    std::vector<Complex> C_ab(const std::vector<Polynomial<Real>>& fs, const Complex& u) const { return composite(fs, u, true); }
    std::vector<Complex> C_ba(const std::vector<Polynomial<Real>>& fs, const Complex& u) const { return composite(fs, u, false); }

    BoundaryValues B_alpha(const std::vector<Polynomial<Real>>& fs, const Real& x) const { return m_alpha.boundary(fs, x); }
    BoundaryValues B_beta(const std::vector<Polynomial<Real>>& fs, const Real& y) const { return m_beta.boundary(fs, y); }
    BoundaryValues B_ab(const std::vector<Polynomial<Real>>& fs, const Real& x) const { return composite_boundary(fs, x, true); }
    BoundaryValues B_ba(const std::vector<Polynomial<Real>>& fs, const Real& y) const { return composite_boundary(fs, y, false); }

    std::vector<Real> ab_moments(int k) const { return ab().moments(k); }
    std::vector<Real> ba_moments(int k) const { return ba().moments(k); }

private:
    struct Lazy {
        std::once_flag ab_once, ba_once;
        std::optional<Measure> ab, ba;
    };

    static int max_degree(const std::vector<Polynomial<Real>>& fs)
    {
        int d = 0;
        for (const auto& f : fs)
            d = std::max(d, f.degree());
        return d;
    }

    // W of the product at u, taken across to the other support when u is close to its own
    Complex product_weyl(const Complex& u, bool alpha_side) const
    {
        const Measure& self = alpha_side ? ab() : ba();
        const Measure& other = alpha_side ? ba() : ab();
        if (self.resolves(u, 0))
            return self.weyl(u);
        if (other.resolves(-u, 0)) {
            const Measure& s1 = alpha_side ? m_alpha : m_beta;
            const Measure& s2 = alpha_side ? m_beta : m_alpha;
            return -s1.weyl(u) * s2.weyl(-u) - other.weyl(-u);
        }
        return self.weyl(u);
    }

    std::vector<Complex> composite(const std::vector<Polynomial<Real>>& fs, const Complex& u, bool alpha_side) const
    {
        const Measure& self = alpha_side ? ab() : ba();
        const int deg = max_degree(fs);
        if (self.resolves(u, deg) || self.on_support(u))
            return self.cauchy(fs, u);
        Complex w = product_weyl(u, alpha_side);
        auto mom = self.moments(deg);
        std::vector<Complex> out;
        for (const auto& f : fs)
            out.push_back(f(u) * w - polynomial_part(f, mom)(u));
        return out;
    }

    BoundaryValues composite_boundary(const std::vector<Polynomial<Real>>& fs, const Real& x, bool alpha_side) const
    {
        const Measure& self = alpha_side ? ab() : ba();
        const Measure& other = alpha_side ? ba() : ab();
        const Measure& s1 = alpha_side ? m_alpha : m_beta;
        const Measure& s2 = alpha_side ? m_beta : m_alpha;
        auto b1 = s1.boundary({one()}, x);
        Complex w2 = s2.weyl(Complex(-x));
        Complex wo = other.weyl(Complex(-x));
        Complex wp = -b1.plus[0] * w2 - wo, wm = -b1.minus[0] * w2 - wo;
        auto mom = self.moments(max_degree(fs));
        BoundaryValues bv;
        for (const auto& f : fs) {
            Real fx = f(x), px = polynomial_part(f, mom)(x);
            bv.plus.push_back(fx * wp - px);
            bv.minus.push_back(fx * wm - px);
        }
        return bv;
    }

    Measure m_alpha, m_beta;
    std::shared_ptr<Lazy> m_lazy;
};

}  // namespace cauchy2mm

#endif
