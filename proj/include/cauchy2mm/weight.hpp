#ifndef CAUCHY2MM_WEIGHT_HPP
#define CAUCHY2MM_WEIGHT_HPP

/*
 * Weights  scale * x^a * exp(-p(x))  on a finite union of intervals in
 * [0, inf). Parameters are stored exactly so closed forms stay rational.
 *
 * JSON form:
 *   { "form": "x^a*exp(-p(x))", "a": 0, "poly": [0, 1],
 *     "support": [[0, "inf"]], "scale": 1 }
 * Numbers may be JSON numbers or strings "p/q"; an unbounded right end is
 * "inf" or null.
 */

#include "scalar.hpp"

#include <json.hpp>

#include <limits>
#include <optional>
#include <string>
#include <vector>

namespace cauchy2mm {

struct SupportInterval {
    Rational lo;
    std::optional<Rational> hi;    // empty: +infinity
};

// x^a e^{-rate x} * scale on (0, inf) with integer a >= 0
struct ExponentialForm {
    long power;
    Rational rate;
    Rational scale;
};

class Weight {
public:
    Weight() : Weight(Rational(0), {Rational(0), Rational(1)}, {{Rational(0), std::nullopt}}) {}

    Weight(Rational a, std::vector<Rational> poly, std::vector<SupportInterval> support, Rational scale = Rational(1))
        : m_a(std::move(a)), m_poly(std::move(poly)), m_support(std::move(support)), m_scale(std::move(scale))
    {
        while (!m_poly.empty() && m_poly.back() == 0)
            m_poly.pop_back();
        validate();
    }

    static Weight laguerre(long a = 0, Rational rate = Rational(1), Rational scale = Rational(1))
    {
        return Weight(Rational(a), {Rational(0), std::move(rate)}, {{Rational(0), std::nullopt}}, std::move(scale));
    }

    // Weight with density x * (this density): the partner used by the O(1) bridge.
    Weight times_x() const { return Weight(m_a + 1, m_poly, m_support, m_scale); }

    Weight scaled(const Rational& s) const { return Weight(m_a, m_poly, m_support, m_scale * s); }

    const Rational& power() const { return m_a; }
    const std::vector<Rational>& poly() const { return m_poly; }
    const std::vector<SupportInterval>& support() const { return m_support; }
    const Rational& scale() const { return m_scale; }

    bool touches_zero() const { return m_support.front().lo == 0; }
    bool bounded() const { return m_support.back().hi.has_value(); }
    bool integer_power() const { return denominator(m_a) == 1 && m_a >= 0; }
    bool singular_at_zero() const { return touches_zero() && !integer_power(); }

    bool in_support(const Real& x) const
    {
        for (const auto& iv : m_support)
            if (x >= to_real(iv.lo) && (!iv.hi || x <= to_real(*iv.hi)))
                return true;
        return false;
    }

    bool strictly_inside(const Real& x) const
    {
        for (const auto& iv : m_support)
            if (x > to_real(iv.lo) && (!iv.hi || x < to_real(*iv.hi)))
                return true;
        return false;
    }

    Real exponent(const Real& x) const
    {
        Real acc = 0;
        for (std::size_t i = m_poly.size(); i-- > 0;)
            acc = acc * x + to_real(m_poly[i]);
        return acc;
    }

    Real exponent_slope(const Real& x) const
    {
        Real acc = 0;
        for (std::size_t i = m_poly.size(); i-- > 1;)
            acc = acc * x + to_real(m_poly[i]) * static_cast<long>(i);
        return acc;
    }

    Real density(const Real& x) const
    {
        if (!in_support(x))
            return Real(0);
        Real base = exp(-exponent(x)) * to_real(m_scale);
        if (m_a == 0)
            return base;
        if (denominator(m_a) == 1)
            return base * pow(x, numerator(m_a).convert_to<long>());
        return base * pow(x, to_real(m_a));
    }

    double log_density(double x) const
    {
        if (!in_support(Real(x)))
            return -std::numeric_limits<double>::infinity();
        double p = 0;
        for (std::size_t i = m_poly.size(); i-- > 0;)
            p = p * x + to_double(m_poly[i]);
        return std::log(to_double(m_scale)) + to_double(m_a) * std::log(x) - p;
    }

    std::optional<ExponentialForm> exponential_form() const
    {
        if (m_support.size() != 1 || m_support[0].lo != 0 || m_support[0].hi)
            return std::nullopt;
        if (m_poly.size() != 2 || m_poly[0] != 0 || !integer_power())
            return std::nullopt;
        return ExponentialForm{numerator(m_a).convert_to<long>(), m_poly[1], m_scale};
    }

    // Closed-form moments where they are rational.
    std::optional<std::vector<Rational>> exact_moments(int kmax) const
    {
        std::vector<Rational> m;
        if (auto e = exponential_form()) {
            for (int j = 0; j <= kmax; ++j) {
                Rational f = e->scale;
                for (long t = 2; t <= j + e->power; ++t)
                    f *= t;
                for (long t = 0; t <= j + e->power; ++t)
                    f /= e->rate;
                m.push_back(f);
            }
            return m;
        }
        if (m_poly.empty() && integer_power() && bounded()) {
            long a = numerator(m_a).convert_to<long>();
            for (int j = 0; j <= kmax; ++j) {
                Rational s = 0;
                for (const auto& iv : m_support) {
                    long e = j + a + 1;
                    s += (ipow(*iv.hi, e) - ipow(iv.lo, e)) / e;
                }
                m.push_back(s * m_scale);
            }
            return m;
        }
        return std::nullopt;
    }

    // Point beyond which x^degree * density is negligible relative to its peak.
    Real tail_cut(int degree, const Real& tol) const
    {
        const auto& last = m_support.back();
        if (last.hi)
            return to_real(*last.hi);
        const double lo = to_double(last.lo);
        const double a = to_double(m_a) + degree;
        auto g = [&](double x) {
            double p = 0;
            for (std::size_t i = m_poly.size(); i-- > 0;)
                p = p * x + to_double(m_poly[i]);
            return a * std::log(x) - p;
        };
        double start = std::max(lo, 1e-3), peak = g(start), where = start;
        for (double t = start; t < 1e7; t = t * 1.05 + 0.01)
            if (g(t) > peak) {
                peak = g(t);
                where = t;
            }
        const double target = peak + std::log(to_double(tol)) - 4.0;
        // walk outwards from the peak, never from below it
        double x = std::max({lo + 1.0, 1.0, where});
        while (g(x) + std::log(x) > target)
            x *= 1.25;
        return Real(std::ceil(x));
    }

    nlohmann::ordered_json to_json() const
    {
        nlohmann::ordered_json j;
        j["form"] = "x^a*exp(-p(x))";
        j["a"] = to_string(m_a);
        auto& p = j["poly"] = nlohmann::ordered_json::array();
        for (const auto& c : m_poly)
            p.push_back(to_string(c));
        auto& s = j["support"] = nlohmann::ordered_json::array();
        for (const auto& iv : m_support)
            s.push_back({to_string(iv.lo), iv.hi ? nlohmann::ordered_json(to_string(*iv.hi)) : nlohmann::ordered_json("inf")});
        j["scale"] = to_string(m_scale);
        return j;
    }

    static Weight from_json(const nlohmann::json& j, const std::string& where = "")
    {
        auto fail = [&](const std::string& ptr, const std::string& msg) -> InputError {
            return InputError(where + ptr + ": " + msg);
        };
        if (!j.is_object())
            throw fail("", "weight must be a JSON object");
        if (j.contains("form") && j["form"] != "x^a*exp(-p(x))")
            throw fail("/form", "unsupported form (expected \"x^a*exp(-p(x))\")");
        for (auto it = j.begin(); it != j.end(); ++it)
            if (it.key() != "form" && it.key() != "a" && it.key() != "poly" && it.key() != "support" && it.key() != "scale")
                throw fail("/" + it.key(), "unknown field");
        auto number = [&](const nlohmann::json& v, const std::string& ptr) -> Rational {
            if (v.is_number_integer())
                return Rational(v.get<long long>());
            if (v.is_number())
                return rational_from_double(v.get<double>());
            if (v.is_string()) {
                try {
                    return parse_rational(v.get<std::string>());
                } catch (const InputError&) {
                    throw fail(ptr, "not a number or \"p/q\" string");
                }
            }
            throw fail(ptr, "expected a number");
        };
        Rational a = j.contains("a") ? number(j["a"], "/a") : Rational(0);
        std::vector<Rational> poly;
        if (j.contains("poly")) {
            if (!j["poly"].is_array())
                throw fail("/poly", "expected an array of coefficients");
            for (std::size_t i = 0; i < j["poly"].size(); ++i)
                poly.push_back(number(j["poly"][i], "/poly/" + std::to_string(i)));
        }
        if (!j.contains("support") || !j["support"].is_array() || j["support"].empty())
            throw fail("/support", "expected a non-empty array of [lo, hi] pairs");
        std::vector<SupportInterval> support;
        for (std::size_t i = 0; i < j["support"].size(); ++i) {
            const auto& iv = j["support"][i];
            const std::string ptr = "/support/" + std::to_string(i);
            if (!iv.is_array() || iv.size() != 2)
                throw fail(ptr, "expected [lo, hi]");
            SupportInterval s{number(iv[0], ptr + "/0"), std::nullopt};
            if (!(iv[1].is_null() || (iv[1].is_string() && (iv[1] == "inf" || iv[1] == "+inf"))))
                s.hi = number(iv[1], ptr + "/1");
            support.push_back(s);
        }
        Rational scale = j.contains("scale") ? number(j["scale"], "/scale") : Rational(1);
        try {
            return Weight(a, poly, support, scale);
        } catch (const InputError& e) {
            throw InputError(where + e.what());
        }
    }

private:
    static Rational ipow(const Rational& b, long e)
    {
        Rational r = 1;
        for (long i = 0; i < e; ++i)
            r *= b;
        return r;
    }

    void validate() const
    {
        if (m_support.empty())
            throw InputError("/support: empty support");
        if (m_scale <= 0)
            throw InputError("/scale: must be positive");
        for (std::size_t i = 0; i < m_support.size(); ++i) {
            const auto& iv = m_support[i];
            const std::string ptr = "/support/" + std::to_string(i);
            if (iv.lo < 0)
                throw InputError(ptr + "/0: support must lie in [0, inf)");
            if (iv.hi && *iv.hi <= iv.lo)
                throw InputError(ptr + ": empty interval");
            if (!iv.hi && i + 1 != m_support.size())
                throw InputError(ptr + "/1: only the last interval may be unbounded");
            if (i > 0 && (!m_support[i - 1].hi || iv.lo <= *m_support[i - 1].hi))
                throw InputError(ptr + ": intervals must be ordered and disjoint");
        }
        if (!bounded()) {
            if (m_poly.size() < 2 || m_poly.back() <= 0)
                throw InputError("/poly: unbounded support needs a polynomial exponent with positive leading coefficient");
        }
        if (touches_zero() && m_a <= -1)
            throw InputError("/a: divergent moment, x^a is not integrable at 0 (need a > -1)");
    }

    Rational m_a;
    std::vector<Rational> m_poly;
    std::vector<SupportInterval> m_support;
    Rational m_scale;
};

}  // namespace cauchy2mm

#endif
