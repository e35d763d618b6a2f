#ifndef CAUCHY2MM_REPORT_HPP
#define CAUCHY2MM_REPORT_HPP

#include "scalar.hpp"

#include <json.hpp>

#include <cstdio>
#include <string>
#include <vector>

namespace cauchy2mm {

// short, stable rendering of a sample coordinate for report points
inline std::string real_label(double x)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", x);
    return buf;
}
inline std::string real_label(const Real& x) { return real_label(to_double(x)); }

// One verified relation at one sample point.
struct Check {
    std::string check;
    std::string point;
    double residual = 0;
    double tolerance = 0;
    bool pass = false;
    bool asserted = true;    // informational entries never fail a run
    std::string detail;
};

class Report {
public:
    // pass iff residual <= tolerance
    Check& add(std::string check, std::string point, double residual, double tolerance, std::string detail = {})
    {
        bool pass = residual <= tolerance;
        m_checks.push_back({std::move(check), std::move(point), residual, tolerance, pass, true, std::move(detail)});
        return m_checks.back();
    }

    Check& add(std::string check, std::string point, const Real& residual, double tolerance, std::string detail = {})
    {
        return add(std::move(check), std::move(point), to_double(residual), tolerance, std::move(detail));
    }

    Check& flag(std::string check, std::string point, bool pass, std::string detail = {})
    {
        m_checks.push_back({std::move(check), std::move(point), pass ? 0.0 : 1.0, 0.0, pass, true, std::move(detail)});
        return m_checks.back();
    }

    Check& note(std::string check, std::string point, double value, std::string detail = {})
    {
        m_checks.push_back({std::move(check), std::move(point), value, 0.0, true, false, std::move(detail)});
        return m_checks.back();
    }

    // re-judge every asserted check against one tolerance
    void override_tolerance(double tol)
    {
        for (auto& c : m_checks)
            if (c.asserted) {
                c.tolerance = tol;
                c.pass = c.residual <= tol;
            }
    }

    void merge(const Report& other) { m_checks.insert(m_checks.end(), other.m_checks.begin(), other.m_checks.end()); }

    bool ok() const
    {
        for (const auto& c : m_checks)
            if (c.asserted && !c.pass)
                return false;
        return true;
    }

    const std::vector<Check>& checks() const { return m_checks; }

    const Check* first_failure() const
    {
        for (const auto& c : m_checks)
            if (c.asserted && !c.pass)
                return &c;
        return nullptr;
    }

    double worst_residual(const std::string& name) const
    {
        double w = 0;
        for (const auto& c : m_checks)
            if (c.check == name && c.residual > w)
                w = c.residual;
        return w;
    }

    nlohmann::ordered_json to_json() const
    {
        auto arr = nlohmann::ordered_json::array();
        for (const auto& c : m_checks) {
            nlohmann::ordered_json j;
            j["check"] = c.check;
            j["point"] = c.point;
            j["residual"] = c.residual;
            j["tolerance"] = c.tolerance;
            j["pass"] = c.pass;
            if (!c.asserted)
                j["asserted"] = false;
            if (!c.detail.empty())
                j["detail"] = c.detail;
            arr.push_back(std::move(j));
        }
        return arr;
    }

private:
    std::vector<Check> m_checks;
};

}  // namespace cauchy2mm

#endif
