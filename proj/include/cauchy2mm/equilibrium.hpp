#ifndef CAUCHY2MM_EQUILIBRIUM_HPP
#define CAUCHY2MM_EQUILIBRIUM_HPP

/*
 * Discrete two-species log gas and the cubic spectral curve.
 *
 * Species 1 sits at x_i > 0 in V1, species 2 at y_j < 0 in V2 (the second
 * spectrum reflected). With n particles each,
 *   S = (sum V1(x_i) + sum V2(y_j)) / (T n) - (1/n^2) sum_{i!=j} (log|x_i - x_j| + log|y_i - y_j|)
 *       + (1/n^2) sum_{i,j} log|x_i - y_j|.
 *
 * From the empirical resolvents W1, W2 and a = V1'(z), b = V2'(z):
 *   Y1 = -W1 + (2a + b)/(3T),  Y2 = W2 - (a + 2b)/(3T),  Y0 = -Y1 - Y2,
 * which solve y^3 - R(z) y - D(z) = 0 in the continuum limit.
 */

#include "report.hpp"

#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <complex>
#include <random>
#include <vector>

namespace cauchy2mm {

using cdouble = std::complex<double>;

// poly(t) - kappa log|t|, on t > 0 (species 1) or t < 0 (species 2)
struct Potential {
    std::vector<double> poly;
    double log_coef = 0;

    double value(double t) const
    {
        double v = 0;
        for (std::size_t k = poly.size(); k-- > 0;)
            v = v * t + poly[k];
        return v - log_coef * std::log(std::abs(t));
    }
    template <class S>
    S derivative(const S& t) const
    {
        S v(0);
        for (std::size_t k = poly.size(); k-- > 1;)
            v = v * t + S(static_cast<double>(k) * poly[k]);
        return v - S(log_coef) / t;
    }
};

struct PotentialPair {
    Potential v1, v2;
    double T = 1;

    static PotentialPair symmetric_linear()
    {
        PotentialPair p;
        p.v1.poly = {0, 1};
        p.v2.poly = {0, -1};
        return p;
    }

    nlohmann::ordered_json to_json() const
    {
        nlohmann::ordered_json j;
        j["T"] = T;
        j["V1"] = {{"poly", v1.poly}, {"log", v1.log_coef}};
        j["V2"] = {{"poly", v2.poly}, {"log", v2.log_coef}};
        return j;
    }

    static PotentialPair from_json(const nlohmann::json& j, const std::string& where = "")
    {
        PotentialPair p;
        if (!j.is_object())
            throw InputError(where + ": potentials must be an object");
        for (auto it = j.begin(); it != j.end(); ++it)
            if (it.key() != "T" && it.key() != "V1" && it.key() != "V2")
                throw InputError(where + "/" + it.key() + ": unknown field");
        if (j.contains("T")) {
            if (!j["T"].is_number() || !(j["T"].get<double>() > 0))
                throw InputError(where + "/T: temperature must be a positive number");
            p.T = j["T"].get<double>();
        }
        auto read = [&](const char* key, Potential& v, int side) {
            if (!j.contains(key) || !j[key].is_object())
                throw InputError(where + "/" + key + ": missing potential object");
            const auto& o = j[key];
            for (auto it = o.begin(); it != o.end(); ++it)
                if (it.key() != "poly" && it.key() != "log")
                    throw InputError(where + "/" + key + "/" + it.key() + ": unknown field");
            if (!o.contains("poly") || !o["poly"].is_array() || o["poly"].empty())
                throw InputError(where + "/" + key + "/poly: need a nonempty coefficient array");
            for (std::size_t k = 0; k < o["poly"].size(); ++k) {
                if (!o["poly"][k].is_number())
                    throw InputError(where + "/" + key + "/poly/" + std::to_string(k) + ": not a number");
                v.poly.push_back(o["poly"][k].get<double>());
            }
            if (o.contains("log")) {
                if (!o["log"].is_number())
                    throw InputError(where + "/" + key + "/log: not a number");
                v.log_coef = o["log"].get<double>();
            }
            while (v.poly.size() > 1 && v.poly.back() == 0)
                v.poly.pop_back();
            // growth faster than log towards the far end of the half-line
            const std::size_t deg = v.poly.size() - 1;
            const double lead = v.poly.back() * ((side < 0 && deg % 2 == 1) ? -1.0 : 1.0);
            if (deg < 1 || !(lead > 0))
                throw InputError(where + "/" + key + "/poly: potential must grow faster than log at infinity");
        };
        read("V1", p.v1, 1);
        read("V2", p.v2, -1);
        return p;
    }
};

struct ActionValue {
    double value = 0;
    std::vector<double> gradient;    // d/dx_i then d/dy_j
};

inline ActionValue action(const std::vector<double>& x, const std::vector<double>& y, const PotentialPair& pot)
{
    const std::size_t n = x.size();
    if (y.size() != n || n == 0)
        throw InputError("action: species need the same positive size");
    const double nn = static_cast<double>(n), inv_tn = 1 / (pot.T * nn), inv_n2 = 1 / (nn * nn);
    ActionValue a;
    a.gradient.assign(2 * n, 0.0);
    double pot_sum = 0, self = 0, cross = 0;
    for (std::size_t i = 0; i < n; ++i) {
        pot_sum += pot.v1.value(x[i]) + pot.v2.value(y[i]);
        a.gradient[i] += pot.v1.derivative(x[i]) * inv_tn;
        a.gradient[n + i] += pot.v2.derivative(y[i]) * inv_tn;
    }
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
            const double dx = x[i] - x[j], dy = y[i] - y[j];
            if (dx == 0 || dy == 0)
                throw InputError("action: coincident particles of one species");
            self += std::log(std::abs(dx)) + std::log(std::abs(dy));
            a.gradient[i] -= 2 * inv_n2 / dx;
            a.gradient[j] += 2 * inv_n2 / dx;
            a.gradient[n + i] -= 2 * inv_n2 / dy;
            a.gradient[n + j] += 2 * inv_n2 / dy;
        }
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            const double d = x[i] - y[j];
            cross += std::log(std::abs(d));
            a.gradient[i] += inv_n2 / d;
            a.gradient[n + j] -= inv_n2 / d;
        }
    a.value = pot_sum * inv_tn - 2 * self * inv_n2 + cross * inv_n2;
    return a;
}

struct MinimizeOptions {
    double gtol = 1e-7;         // on n * |x dS/dx|, the per-particle force in log coordinates
    long max_iters = 400000;
    double delta = 1e-8;        // x >= delta, y <= -delta
    std::uint64_t seed = 7;
    double time_budget = 0;     // seconds of wall clock, 0 for none
};

struct GasConfiguration {
    std::vector<double> x, y;    // ascending
    double energy = 0;
    double force = 0;            // n * sup-norm of the projected log-coordinate gradient
    long iterations = 0;
};

// Projected gradient descent with Barzilai-Borwein steps and Armijo backtracking, run in
// log coordinates u = ln x, w = ln(-y) so that particles crowding the wall keep their relative
// scale. The wall is the floor u, w >= ln(delta).
inline GasConfiguration minimize(const PotentialPair& pot, std::size_t n, const MinimizeOptions& opt = {})
{
    if (n < 1)
        throw InputError("minimize: n must be >= 1");
    const double floor_ = std::log(opt.delta);
    std::mt19937_64 gen(opt.seed);
    std::uniform_real_distribution<double> jitter(-1e-3, 1e-3);
    // u[0..n) are ln x ascending, u[n..2n) are ln(-y) for y ascending (so descending)
    std::vector<double> u(2 * n);
    for (std::size_t i = 0; i < n; ++i) {
        const double t = static_cast<double>(i) + 0.5 + jitter(gen);
        u[i] = std::log(0.5 + 2.5 * t / static_cast<double>(n));
        u[2 * n - 1 - i] = std::log(0.5 + 2.5 * (static_cast<double>(i) + 0.5 + jitter(gen)) / static_cast<double>(n));
    }
    auto positions = [n](const std::vector<double>& w) {
        std::vector<double> xs(n), ys(n);
        for (std::size_t k = 0; k < n; ++k) {
            xs[k] = std::exp(w[k]);
            ys[k] = -std::exp(w[n + k]);
        }
        return std::pair{xs, ys};
    };
    struct Eval {
        double value;
        std::vector<double> gx;    // gradient in x, y
        std::vector<double> gu;    // gradient in u, w
    };
    auto eval = [&](const std::vector<double>& w) {
        auto [xs, ys] = positions(w);
        auto a = action(xs, ys, pot);
        Eval e{a.value, a.gradient, a.gradient};
        for (std::size_t k = 0; k < n; ++k) {
            e.gu[k] *= xs[k];
            e.gu[n + k] *= ys[k];
        }
        return e;
    };
    auto at_wall = [&](const std::vector<double>& w, std::size_t k) { return w[k] <= floor_; };
    // drop components that push a wall particle further into the wall
    auto project_grad = [&](const std::vector<double>& w, const std::vector<double>& g) {
        auto pg = g;
        for (std::size_t k = 0; k < 2 * n; ++k)
            if (at_wall(w, k) && pg[k] > 0)
                pg[k] = 0;
        return pg;
    };
    auto force_of = [&](const std::vector<double>& w, const Eval& e) {
        double m = 0;
        for (std::size_t k = 0; k < 2 * n; ++k)
            if (!(at_wall(w, k) && e.gu[k] > 0))
                m = std::max(m, std::abs(e.gu[k]));
        return m * static_cast<double>(n);
    };
    auto valid = [&](const std::vector<double>& w) {
        for (std::size_t k = 1; k < n; ++k)
            if (!(w[k] > w[k - 1]) || !(w[n + k] < w[n + k - 1]))
                return false;
        return true;
    };
    Eval cur = eval(u);
    double step = 1e-2;
    std::vector<double> prev_u, prev_g;
    long it = 0;
    double force = force_of(u, cur);
    std::vector<double> recent{cur.value};    // nonmonotone reference, last 10 values
    const auto start = std::chrono::steady_clock::now();
    for (; it < opt.max_iters && force >= opt.gtol; ++it) {
        if (opt.time_budget > 0 && it % 64 == 0 &&
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count() > opt.time_budget)
            throw NumericalError("minimize: time budget of " + real_label(opt.time_budget) + " s exhausted after " + std::to_string(it) +
                                 " iterations (force " + real_label(force) + ")");
        const auto pg = project_grad(u, cur.gu);
        if (!prev_u.empty()) {
            double ss = 0, sy = 0;
            for (std::size_t k = 0; k < 2 * n; ++k) {
                const double s = u[k] - prev_u[k], yk = pg[k] - prev_g[k];
                ss += s * s;
                sy += s * yk;
            }
            // nonpositive curvature along the last step: restart from a unit step
            step = sy > 0 ? std::clamp(ss / sy, 1e-12, 1e6) : 1.0;
        }
        std::vector<double> trial;
        Eval next;
        bool accepted = false;
        for (int bt = 0; bt < 60; ++bt, step *= 0.5) {
            trial = u;
            for (std::size_t k = 0; k < 2 * n; ++k)
                trial[k] = std::max(trial[k] - step * pg[k], floor_);
            if (!valid(trial))
                continue;
            next = eval(trial);
            double decrease = 0;
            for (std::size_t k = 0; k < 2 * n; ++k)
                decrease += pg[k] * (u[k] - trial[k]);
            const double ref = *std::max_element(recent.begin(), recent.end());
            if (std::isfinite(next.value) && next.value <= ref - 1e-4 * decrease) {
                accepted = true;
                break;
            }
        }
        if (!accepted)
            break;
        prev_u = std::move(u);
        prev_g = pg;
        u = std::move(trial);
        cur = std::move(next);
        recent.push_back(cur.value);
        if (recent.size() > 10)
            recent.erase(recent.begin());
        force = force_of(u, cur);
    }
    GasConfiguration out;
    auto [xs, ys] = positions(u);
    out.x = xs;
    out.y = ys;
    out.energy = cur.value;
    out.force = force;
    out.iterations = it;
    if (out.force >= opt.gtol)
        throw NumericalError("minimize: no convergence after " + std::to_string(it) + " iterations (force " + real_label(out.force) +
                             ")");
    return out;
}

// Analytic gradient against central differences at random configurations
inline Report verify_action_gradient(const PotentialPair& pot, std::size_t n, std::uint64_t seed, double h = 1e-6, double tol = 1e-6)
{
    Report rep;
    std::mt19937_64 gen(seed);
    std::uniform_real_distribution<double> u(0.2, 4.0);
    for (int trial = 0; trial < 3; ++trial) {
        std::vector<double> x(n), y(n);
        for (std::size_t i = 0; i < n; ++i) {
            x[i] = u(gen);
            y[i] = -u(gen);
        }
        const auto a = action(x, y, pot);
        double gap = 0, scale = 0;
        for (std::size_t k = 0; k < 2 * n; ++k) {
            auto xp = x, yp = y, xm = x, ym = y;
            (k < n ? xp[k] : yp[k - n]) += h;
            (k < n ? xm[k] : ym[k - n]) -= h;
            const double fd = (action(xp, yp, pot).value - action(xm, ym, pot).value) / (2 * h);
            gap = std::max(gap, std::abs(fd - a.gradient[k]));
            scale = std::max(scale, std::abs(a.gradient[k]));
        }
        rep.add("action_gradient_fd", "n=" + std::to_string(n) + " config=" + std::to_string(trial), gap / scale, tol,
                "central differences, h = " + real_label(h));
    }
    return rep;
}

struct CurveValues {
    cdouble y0, y1, y2;
    cdouble r_potential, r_resolvent, d_potential, d_resolvent;
};

class SpectralCurve {
public:
    SpectralCurve(GasConfiguration gas, PotentialPair pot) : m_gas(std::move(gas)), m_pot(std::move(pot)) {}

    double exclusion() const { return 3.0 / static_cast<double>(m_gas.x.size()); }

    double distance_to_particles(const cdouble& z) const
    {
        double d = std::numeric_limits<double>::infinity();
        for (double t : m_gas.x)
            d = std::min(d, std::abs(z - t));
        for (double t : m_gas.y)
            d = std::min(d, std::abs(z - t));
        return d;
    }

    CurveValues at(const cdouble& z) const
    {
        if (distance_to_particles(z) < exclusion())
            throw InputError("curve: z within 3/n of a particle");
        const auto& x = m_gas.x;
        const auto& y = m_gas.y;
        const double n = static_cast<double>(x.size()), T = m_pot.T;
        const cdouble a = m_pot.v1.derivative(z), b = m_pot.v2.derivative(z);
        cdouble w1 = 0, w2 = 0, r1 = 0, r2 = 0, n12 = 0, n21 = 0;
        std::vector<cdouble> f1(x.size()), f2(y.size());
        for (std::size_t i = 0; i < x.size(); ++i) {
            w1 += 1.0 / (z - x[i]);
            f1[i] = (a - m_pot.v1.derivative(cdouble(x[i]))) / (z - x[i]);
            r1 += f1[i];
        }
        for (std::size_t j = 0; j < y.size(); ++j) {
            w2 += 1.0 / (z - y[j]);
            f2[j] = (b - m_pot.v2.derivative(cdouble(y[j]))) / (z - y[j]);
            r2 += f2[j];
        }
        for (std::size_t i = 0; i < x.size(); ++i)
            for (std::size_t j = 0; j < y.size(); ++j) {
                n12 += f1[i] / (x[i] - y[j]);
                n21 += f2[j] / (y[j] - x[i]);
            }
        w1 /= n;
        w2 /= n;
        r1 /= n * T;
        r2 /= n * T;
        n12 /= n * n;
        n21 /= n * n;
        const cdouble u1 = (2.0 * a + b) / (3 * T), u2 = -(a + 2.0 * b) / (3 * T), u0 = (b - a) / (3 * T);
        CurveValues c;
        c.y1 = -w1 + u1;
        c.y2 = w2 + u2;
        c.y0 = -c.y1 - c.y2;
        c.r_potential = (a * a + b * b + a * b) / (3 * T * T) - r1 - r2;
        c.r_resolvent = c.y1 * c.y1 + c.y2 * c.y2 + c.y1 * c.y2;
        c.d_potential = u0 * u1 * u2 + u2 * r1 + u1 * r2 + n12 / T - n21 / T;
        c.d_resolvent = c.y0 * c.y1 * c.y2;
        return c;
    }

    // sup over the three sheets of |Y^3 - R Y - D| with R, D from the potential formulas
    double cubic_residual(const cdouble& z) const
    {
        const auto c = at(z);
        double r = 0;
        for (const auto& yv : {c.y0, c.y1, c.y2})
            r = std::max(r, std::abs(yv * yv * yv - c.r_potential * yv - c.d_potential));
        return r;
    }

    const GasConfiguration& gas() const { return m_gas; }
    const PotentialPair& potentials() const { return m_pot; }

private:
    GasConfiguration m_gas;
    PotentialPair m_pot;
};

// Re in {-4, -2, 0, 2, 4}, Im in {+-1, +-2}
inline std::vector<cdouble> curve_grid()
{
    std::vector<cdouble> g;
    for (double re : {-4.0, -2.0, 0.0, 2.0, 4.0})
        for (double im : {1.0, -1.0, 2.0, -2.0})
            g.emplace_back(re, im);
    return g;
}

struct CurveSummary {
    std::size_t n = 0;
    double cubic = 0, r_gap = 0, d_gap = 0;
};

inline CurveSummary summarize_curve(const SpectralCurve& c, const std::vector<cdouble>& grid)
{
    CurveSummary s;
    s.n = c.gas().x.size();
    for (const auto& z : grid) {
        const auto v = c.at(z);
        s.cubic = std::max(s.cubic, c.cubic_residual(z));
        s.r_gap = std::max(s.r_gap, std::abs(v.r_potential - v.r_resolvent));
        s.d_gap = std::max(s.d_gap, std::abs(v.d_potential - v.d_resolvent));
    }
    return s;
}

// Particle bands: a gap wider than `factor` times the median spacing starts a new band.
inline std::vector<std::pair<double, double>> support_bands(std::vector<double> pts, double factor = 10)
{
    std::vector<std::pair<double, double>> bands;
    if (pts.empty())
        return bands;
    std::sort(pts.begin(), pts.end());
    std::vector<double> gaps;
    for (std::size_t i = 1; i < pts.size(); ++i)
        gaps.push_back(pts[i] - pts[i - 1]);
    double median = 0;
    if (!gaps.empty()) {
        auto g = gaps;
        std::nth_element(g.begin(), g.begin() + static_cast<long>(g.size() / 2), g.end());
        median = g[g.size() / 2];
    }
    double lo = pts.front();
    for (std::size_t i = 1; i < pts.size(); ++i)
        if (gaps[i - 1] > factor * median) {
            bands.emplace_back(lo, pts[i - 1]);
            lo = pts[i];
        }
    bands.emplace_back(lo, pts.back());
    return bands;
}

// Diagnostics at the midpoint of the widest species-1 band: Plemelj balance and the jump of R.
inline Report curve_diagnostics(const SpectralCurve& c)
{
    Report rep;
    const auto& gas = c.gas();
    const std::size_t n = gas.x.size();
    const std::string pt = "n=" + std::to_string(n);
    rep.note("energy", pt, gas.energy);
    rep.note("force", pt, gas.force, "n * projected log-coordinate gradient at exit");
    auto b1 = support_bands(gas.x), b2 = support_bands(gas.y);
    rep.note("support_bands_x", pt, static_cast<double>(b1.size()),
             "[" + real_label(b1.front().first) + ", " + real_label(b1.back().second) + "]");
    rep.note("support_bands_y", pt, static_cast<double>(b2.size()),
             "[" + real_label(b2.front().first) + ", " + real_label(b2.back().second) + "]");
    // wall contact: a band starting at the constraint means the supports touch the origin
    rep.note("wall_contact", pt, std::min(gas.x.front(), -gas.y.back()), "smallest |particle|");

    auto widest = *std::max_element(b1.begin(), b1.end(), [](auto a, auto b) { return a.second - a.first < b.second - b.first; });
    const double mid = 0.5 * (widest.first + widest.second);
    const double eps = 3.0 / static_cast<double>(n);
    const double T = c.potentials().T;
    try {
        const auto up = c.at({mid, eps}), dn = c.at({mid, -eps});
        // W1,+ + W1,- - W2 = V1'/T on the support
        const cdouble w1p = -(up.y1 - (2.0 * c.potentials().v1.derivative(cdouble(mid, eps)) +
                                       c.potentials().v2.derivative(cdouble(mid, eps))) /
                                          (3 * T));
        const cdouble w1m = -(dn.y1 - (2.0 * c.potentials().v1.derivative(cdouble(mid, -eps)) +
                                       c.potentials().v2.derivative(cdouble(mid, -eps))) /
                                          (3 * T));
        double w2 = 0;
        for (double t : gas.y)
            w2 += 1 / (mid - t);
        w2 /= static_cast<double>(n);
        const double balance = std::abs((w1p + w1m).real() - w2 - c.potentials().v1.derivative(mid) / T);
        rep.note("plemelj_balance", pt + " x=" + real_label(mid), balance, "offset 3/n above and below the band");
        rep.note("r_jump", pt + " x=" + real_label(mid), std::abs(up.r_resolvent - dn.r_resolvent));
    } catch (const InputError&) {
        rep.note("plemelj_balance", pt, std::nan(""), "midpoint too close to the particles");
    }
    return rep;
}

}  // namespace cauchy2mm

#endif
