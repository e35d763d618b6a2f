#ifndef CAUCHY2MM_QUADRATURE_HPP
#define CAUCHY2MM_QUADRATURE_HPP

/*
 * Composite Gauss-Legendre machinery.
 *
 * Panels are graded geometrically (ratio 2) toward points where the
 * integrand is singular or nearly so; each panel then sees its nearest
 * singularity at least one panel length away, which keeps the per-panel
 * convergence rate fixed. Density values at panel nodes are cached per
 * (panel, order, precision) so repeated transforms reuse them.
 */

#include "scalar.hpp"

#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <shared_mutex>
#include <tuple>
#include <vector>

namespace cauchy2mm {

struct GaussRule {
    std::vector<Real> nodes;    // ascending in (-1, 1)
    std::vector<Real> weights;
};

namespace detail {

inline GaussRule compute_gauss_legendre(int m)
{
    GaussRule r;
    r.nodes.resize(m);
    r.weights.resize(m);
    const Real eps = ldexp(Real(1), 6 - static_cast<int>(working_bits()));
    const double pi = 3.14159265358979323846;
    for (int i = 0; i < (m + 1) / 2; ++i) {
        Real x = std::cos(pi * (i + 0.75) / (m + 0.5));
        Real dp;
        for (int it = 0; it < 200; ++it) {
            Real p0 = 1, p1 = x;
            for (int k = 2; k <= m; ++k) {
                Real p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            Real p = m == 1 ? x : p1;
            Real pm1 = m == 1 ? Real(1) : p0;
            dp = m * (x * p - pm1) / (x * x - 1);
            Real dx = p / dp;
            x -= dx;
            if (abs(dx) < eps)
                break;
        }
        {
            Real p0 = 1, p1 = x;
            for (int k = 2; k <= m; ++k) {
                Real p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            Real pm1 = m == 1 ? Real(1) : p0;
            Real p = m == 1 ? x : p1;
            dp = m * (x * p - pm1) / (x * x - 1);
        }
        Real w = 2 / ((1 - x * x) * dp * dp);
        r.nodes[m - 1 - i] = x;
        r.weights[m - 1 - i] = w;
        r.nodes[i] = -x;
        r.weights[i] = w;
    }
    if (m % 2)
        r.nodes[m / 2] = 0;
    return r;
}

}  // namespace detail

// Cached rule for the current working precision.
inline const GaussRule& gauss_legendre(int m)
{
    static std::shared_mutex mutex;
    static std::map<std::pair<int, unsigned>, std::unique_ptr<GaussRule>> cache;
    const auto key = std::make_pair(m, working_bits());
    {
        std::shared_lock lock(mutex);
        auto it = cache.find(key);
        if (it != cache.end())
            return *it->second;
    }
    auto rule = std::make_unique<GaussRule>(detail::compute_gauss_legendre(m));
    std::unique_lock lock(mutex);
    auto [it, inserted] = cache.emplace(key, std::move(rule));
    return *it->second;
}

// Nodes per panel needed for a target tolerance when the nearest singularity
// sits one panel length away (convergence factor about 4.24 per node).
inline int gauss_order_for(const Real& tol)
{
    double digits = -to_double(log10(tol));
    int m = static_cast<int>(std::ceil(digits / 1.25)) + 3;
    return std::clamp(m, 8, 80);
}

struct Panel {
    Real a, b;
    Real length() const { return b - a; }
};

using PanelList = std::vector<Panel>;

// Largest power of two not exceeding x (x > 0).
inline Real pow2_floor(const Real& x)
{
    int e = 0;
    frexp(x, &e);
    return ldexp(Real(1), e - 1);
}

inline Real distance(const Complex& c, const Panel& p)
{
    Real re = c.real();
    Real dx = re < p.a ? p.a - re : (re > p.b ? re - p.b : Real(0));
    return sqrt(dx * dx + c.imag() * c.imag());
}

// Pieces of [a, b] graded toward focus in [a, b]: sizes s, s, 2s, 4s, ... on
// each side, never longer than cap(x) at their start.
inline PanelList graded(const Real& a, const Real& b, const Real& focus, const Real& smallest,
                        const std::function<Real(const Real&)>& cap)
{
    PanelList out;
    // right side, walking up from focus
    {
        Real pos = focus, size = smallest;
        bool first = true;
        while (pos < b) {
            Real c = cap(pos);
            Real len = size < c ? size : c;
            Real end = pos + len;
            if (end > b || b - end < len / 4)
                end = b;
            out.push_back({pos, end});
            pos = end;
            if (!first)
                size *= 2;
            first = false;
        }
    }
    // left side, walking down from focus
    PanelList left;
    {
        Real pos = focus, size = smallest;
        bool first = true;
        while (pos > a) {
            Real c = cap(pos);
            Real len = size < c ? size : c;
            Real start = pos - len;
            if (start < a || start - a < len / 4)
                start = a;
            left.push_back({start, pos});
            pos = start;
            if (!first)
                size *= 2;
            first = false;
        }
    }
    PanelList all(left.rbegin(), left.rend());
    all.insert(all.end(), out.begin(), out.end());
    return all;
}

inline PanelList graded(const Real& a, const Real& b, const Real& focus, const Real& smallest, const Real& cap)
{
    return graded(a, b, focus, smallest, [cap](const Real&) { return cap; });
}

// Splits every panel that lies closer to c than its own length.
inline PanelList refine_toward(const PanelList& panels, const Complex& c, const Real& floor)
{
    PanelList out;
    out.reserve(panels.size());
    for (const auto& p : panels) {
        Real d = distance(c, p);
        Real len = p.length();
        if (d >= len) {
            out.push_back(p);
            continue;
        }
        Real s = d > floor ? pow2_floor(d) : floor;
        if (s >= len) {
            out.push_back(p);
            continue;
        }
        Real focus = c.real() < p.a ? p.a : (c.real() > p.b ? p.b : c.real());
        auto pieces = graded(p.a, p.b, focus, s, len);
        out.insert(out.end(), pieces.begin(), pieces.end());
    }
    return out;
}

inline bool resolves(const PanelList& panels, const Complex& c)
{
    for (const auto& p : panels)
        if (distance(c, p) < p.length())
            return false;
    return true;
}

struct Node {
    Real x;
    Real w;    // quadrature weight times density
};

// Density values on Gauss nodes of panels, memoised per panel.
class DensitySampler {
public:
    explicit DensitySampler(std::function<Real(const Real&)> density) : m_density(std::move(density)) {}

    const std::vector<Node>& nodes(const Panel& p, int order) const
    {
        const auto key = std::make_tuple(p.a, p.b, order, working_bits());
        {
            std::shared_lock lock(m_mutex);
            auto it = m_cache.find(key);
            if (it != m_cache.end())
                return it->second;
        }
        const GaussRule& g = gauss_legendre(order);
        Real half = (p.b - p.a) / 2, mid = (p.a + p.b) / 2;
        std::vector<Node> out;
        out.reserve(order);
        for (int i = 0; i < order; ++i) {
            Real x = mid + half * g.nodes[i];
            Real f = m_density(x);
            out.push_back({x, half * g.weights[i] * f});
        }
        std::unique_lock lock(m_mutex);
        auto [it, inserted] = m_cache.emplace(key, std::move(out));
        return it->second;
    }

    Real density(const Real& x) const { return m_density(x); }

private:
    std::function<Real(const Real&)> m_density;
    mutable std::shared_mutex m_mutex;
    mutable std::map<std::tuple<Real, Real, int, unsigned>, std::vector<Node>> m_cache;
};

// Plain composite rule on [a,b] for a smooth integrand, used by one-off integrals.
template <class F>
Real integrate_panels(const PanelList& panels, int order, F&& f)
{
    const GaussRule& g = gauss_legendre(order);
    Real s = 0;
    for (const auto& p : panels) {
        Real half = (p.b - p.a) / 2, mid = (p.a + p.b) / 2;
        for (int i = 0; i < order; ++i)
            s += half * g.weights[i] * f(mid + half * g.nodes[i]);
    }
    return s;
}

}  // namespace cauchy2mm

#endif
