// cauchy2mm: command-line front end. Every run writes report.json, manifest.json
// and plot-ready CSV files into --out; exit 0 ok, 1 check failed, 2 bad input,
// 3 runtime failure.

#include <cauchy2mm.hpp>

#include <CLI11.hpp>
#include <boost/version.hpp>
#include <gmp.h>
#include <mpfr.h>

#include <chrono>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

namespace fs = std::filesystem;
using namespace cauchy2mm;
using ojson = nlohmann::ordered_json;

namespace {

struct Common {
    std::string out = "out";
    unsigned precision = 0;    // 0: CAUCHY_PRECISION_BITS or 256
    std::uint64_t seed = 7;
    double tolerance = std::numeric_limits<double>::quiet_NaN();
};

nlohmann::json read_json(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw InputError(path + ": cannot open");
    try {
        return nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw InputError(path + ": JSON parse error at byte " + std::to_string(e.byte));
    }
}

struct WeightPair {
    Weight alpha, beta;
    ojson echo;
};

// either one weight object (alpha = beta) or {"alpha": {...}, "beta": {...}}
WeightPair load_weights(const std::string& path)
{
    const auto j = read_json(path);
    WeightPair w;
    if (j.is_object() && j.contains("alpha")) {
        for (auto it = j.begin(); it != j.end(); ++it)
            if (it.key() != "alpha" && it.key() != "beta")
                throw InputError(path + "#/" + it.key() + ": unknown field");
        w.alpha = Weight::from_json(j["alpha"], path + "#/alpha");
        w.beta = j.contains("beta") ? Weight::from_json(j["beta"], path + "#/beta") : w.alpha;
    } else {
        w.alpha = Weight::from_json(j, path + "#");
        w.beta = w.alpha;
    }
    w.echo = {{"alpha", w.alpha.to_json()}, {"beta", w.beta.to_json()}};
    return w;
}

std::string utc_timestamp()
{
    const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

bool is_laguerre(const Weight& w)
{
    auto f = w.exponential_form();
    return f && f->power == 0 && f->rate == 1 && f->scale == 1;
}

// Collects checks and artifacts of one command.
class Run {
public:
    Run(std::string command, const Common& c) : m_command(std::move(command)), m_common(c)
    {
        m_bits = c.precision ? c.precision : ScalarContext::bits_from_env(256);
        if (m_bits < 64)
            throw InputError("--precision must be >= 64");
        m_ctx.bits = m_bits;
        m_dir = c.out;
        fs::create_directories(m_dir);
        m_config["command"] = m_command;
        m_config["precision_bits"] = m_bits;
        m_config["seed"] = c.seed;
    }

    unsigned bits() const { return m_bits; }
    const ScalarContext& ctx() const { return m_ctx; }
    QuadratureSettings quadrature() const { return QuadratureSettings::from(m_ctx); }
    std::uint64_t seed() const { return m_common.seed; }
    Report& report() { return m_report; }
    ojson& config() { return m_config; }

    void csv(const std::string& name, const std::vector<std::string>& header, const std::vector<std::vector<std::string>>& rows)
    {
        std::ofstream f(m_dir / name);
        auto line = [&](const std::vector<std::string>& cells) {
            for (std::size_t i = 0; i < cells.size(); ++i)
                f << (i ? "," : "") << cells[i];
            f << "\n";
        };
        line(header);
        for (const auto& r : rows)
            line(r);
        m_files.push_back(name);
    }

    void json(const std::string& name, const ojson& j)
    {
        std::ofstream(m_dir / name) << j.dump(2) << "\n";
        m_files.push_back(name);
    }

    int finish()
    {
        if (!std::isnan(m_common.tolerance))
            m_report.override_tolerance(m_common.tolerance);
        ojson rep;
        rep["tool"] = "cauchy2mm";
        rep["command"] = m_command;
        rep["timestamp"] = utc_timestamp();
        rep["ok"] = m_report.ok();
        rep["checks"] = m_report.to_json();
        std::ofstream(m_dir / "report.json") << rep.dump(2) << "\n";

        ojson man;
        man["tool"] = "cauchy2mm";
        man["version"] = CAUCHY2MM_VERSION;
        man["config"] = m_config;
        man["seed"] = m_common.seed;
        man["precision_bits"] = m_bits;
        man["versions"] = {{"boost", BOOST_LIB_VERSION},
                           {"gmp", gmp_version},
                           {"mpfr", mpfr_get_version()},
                           {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
                                         std::to_string(EIGEN_MINOR_VERSION)},
                           {"compiler", __VERSION__}};
        auto files = m_files;
        files.insert(files.begin(), "report.json");
        man["outputs"] = files;
        std::ofstream(m_dir / "manifest.json") << man.dump(2) << "\n";

        std::size_t asserted = 0, failed = 0;
        for (const auto& c : m_report.checks())
            if (c.asserted) {
                ++asserted;
                failed += !c.pass;
            }
        std::cout << m_command << ": " << asserted - failed << "/" << asserted << " checks passed, report in "
                  << (m_dir / "report.json").string() << "\n";
        if (const Check* f = m_report.first_failure()) {
            std::cerr << "FAILED " << f->check << " at " << f->point << ": residual " << real_label(f->residual) << " > tolerance "
                      << real_label(f->tolerance) << "\n";
            return 1;
        }
        return 0;
    }

private:
    std::string m_command;
    Common m_common;
    unsigned m_bits = 256;
    ScalarContext m_ctx;
    fs::path m_dir;
    Report m_report;
    ojson m_config;
    std::vector<std::string> m_files;
};

// Calls f with the exact family when the closed-form channel applies, else with a quadrature family.
template <class F>
void with_family(const Weight& alpha, const Weight& beta, int n_max, const QuadratureSettings& q, F&& f)
{
    if (exact_channel_available(alpha, beta))
        f(build_family(exact_bimoments(alpha, beta, n_max), n_max));
    else
        f(build_family(quadrature_bimoments(alpha, beta, n_max, Real(0), q), n_max));
}

template <class T>
Real family_tolerance(const Run& run)
{
    if constexpr (is_exact_v<T>)
        return Real(0);
    else
        return run.ctx().quadrature_tolerance();
}

template <class T>
std::string scalar_text(const T& v)
{
    if constexpr (is_exact_v<T>)
        return to_string(v);
    else
        return to_string(v, 30);
}

// ---------------------------------------------------------------- bops

struct BopsOptions {
    std::string weights;
    int n_max = 8;
    bool exact = false;
    int tp_size = 8;
};

template <class T>
void bops_family_section(Run& run, const BimomentTable<T>& table, int n_max, bool dump)
{
    const Real tol = family_tolerance<T>(run);
    auto& rep = run.report();
    const int tp = std::min(n_max + 1, 8);
    rep.merge(check_total_positivity(table, tp, tol));
    auto fam = build_family(table, n_max);
    rep.merge(verify_family(fam, tol));
    rep.merge(verify_recurrence(fam, tol));
    std::vector<ZeroSet> zs;
    rep.merge(zeros_and_interlacing(fam, std::max(tol, run.ctx().quadrature_tolerance()), &zs));
    if (!dump)
        return;
    ojson recs = ojson::array();
    for (int n = 0; n <= n_max; ++n) {
        ojson r;
        r["n"] = n;
        auto& mp = r["monic_p"] = ojson::array();
        for (const auto& c : fam.monic_p[n].coeffs())
            mp.push_back(scalar_text(c));
        auto& mq = r["monic_q"] = ojson::array();
        for (const auto& c : fam.monic_q[n].coeffs())
            mq.push_back(scalar_text(c));
        r["c_n"] = to_string(fam.c[n], 30);
        r["pi_n"] = to_string(fam.pi[n], 30);
        r["eta_n"] = to_string(fam.eta[n], 30);
        for (const auto& z : zs)
            if (z.degree == n) {
                auto& arr = r[z.family == 'p' ? "zeros_p" : "zeros_q"] = ojson::array();
                for (const auto& x : z.zeros)
                    arr.push_back(to_string(x, 20));
            }
        recs.push_back(std::move(r));
    }
    run.json("bops.json", recs);
    std::vector<std::vector<std::string>> rows;
    for (int j = 0; j <= n_max; ++j)
        for (int k = 0; k <= n_max; ++k)
            rows.push_back({std::to_string(j), std::to_string(k), scalar_text(table(j, k))});
    run.csv("bimoments.csv", {"j", "k", "value"}, rows);
}

void bops_section(Run& run, const WeightPair& w, const BopsOptions& o, bool dump)
{
    if (o.n_max < 1 || o.n_max > 30)
        throw InputError("--n-max must be in 1..30");
    const bool exact_ok = exact_channel_available(w.alpha, w.beta);
    if (o.exact && !exact_ok)
        throw InputError("--exact needs x^a e^{-cx} weights with integer a >= 0 and a common rate");
    auto& rep = run.report();
    if (exact_ok) {
        auto ex = exact_bimoments(w.alpha, w.beta, o.n_max);
        auto qt = quadrature_bimoments(w.alpha, w.beta, o.n_max, Real(0), QuadratureSettings::with_tolerance(Real("1e-20")));
        Real gap = 0;
        for (int j = 0; j <= o.n_max; ++j)
            for (int k = 0; k <= o.n_max; ++k)
                gap = std::max(gap, Real(abs(qt(j, k) / to_real(ex(j, k)) - 1)));
        rep.add("bimoment_channels", "n_max=" + std::to_string(o.n_max), gap, 1e-12, "closed form vs quadrature, relative");
        if (o.exact)
            bops_family_section(run, ex, o.n_max, dump);
        else
            bops_family_section(run, ex.to_real(), o.n_max, dump);
    } else {
        bops_family_section(run, quadrature_bimoments(w.alpha, w.beta, o.n_max, Real(0), run.quadrature()), o.n_max, dump);
    }
}

// ---------------------------------------------------------------- verify-cd / verify-rhp

struct CdOptions {
    std::string weights;
    std::vector<int> windows{2, 3, 4};
    int samples = 20;
    double tol = 1e-8;
    bool mirror = true;
};

void cd_section(Run& run, const WeightPair& w, const CdOptions& o, bool dump)
{
    if (o.windows.empty() || o.samples < 1)
        throw InputError("verify-cd: need at least one window and one sample");
    for (int n : o.windows)
        if (n < 2 || n > 12)
            throw InputError("verify-cd: window n must be in 2..12");
    const int n_max = *std::max_element(o.windows.begin(), o.windows.end()) + 1;
    const auto q = run.quadrature();
    WeylSystem ws(w.alpha, w.beta, q);
    const auto samples = random_sample_pairs(o.samples, run.seed());
    with_family(w.alpha, w.beta, n_max, q, [&](const auto& fam) {
        for (int n : o.windows) {
            run.report().merge(verify_cd_duality(CDSystem(fam, ws, n), samples, o.tol));
            if (o.mirror)
                run.report().merge(verify_cd_duality(CDSystem(mirror_family(fam), ws.swapped(), n), samples, o.tol, "_mirror"));
        }
    });
    if (dump) {
        std::vector<std::vector<std::string>> rows;
        for (std::size_t i = 0; i < samples.size(); ++i)
            rows.push_back({std::to_string(i), real_label(samples[i].z.real()), real_label(samples[i].z.imag()),
                            real_label(samples[i].w.real()), real_label(samples[i].w.imag())});
        run.csv("cd_samples.csv", {"sample", "z_re", "z_im", "w_re", "w_im"}, rows);
    }
}

struct RhpOptions {
    std::string weights;
    std::vector<int> windows{2, 3};
    RhpSettings settings;
};

void rhp_section(Run& run, const WeightPair& w, const RhpOptions& o)
{
    for (int n : o.windows)
        if (n < 2 || n > 12)
            throw InputError("verify-rhp: window n must be in 2..12");
    if (o.windows.empty())
        throw InputError("verify-rhp: need at least one window");
    const int n_max = *std::max_element(o.windows.begin(), o.windows.end()) + 1;
    const auto q = run.quadrature();
    WeylSystem ws(w.alpha, w.beta, q);
    with_family(w.alpha, w.beta, n_max, q, [&](const auto& fam) {
        for (int n : o.windows)
            run.report().merge(verify_rhp(CDSystem(fam, ws, n), o.settings));
    });
}

// ---------------------------------------------------------------- correlate

struct CorrelateOptions {
    std::string weights, points;
    int N = 2;
    double tol = 1e-8;
};

struct PointSet {
    std::vector<Real> x, y;
};

std::vector<PointSet> load_points(const std::string& path)
{
    const auto j = read_json(path);
    if (!j.is_array())
        throw InputError(path + "#: expected an array of {\"x\": [...], \"y\": [...]} objects");
    std::vector<PointSet> out;
    for (std::size_t i = 0; i < j.size(); ++i) {
        const std::string ptr = path + "#/" + std::to_string(i);
        if (!j[i].is_object())
            throw InputError(ptr + ": expected an object");
        PointSet s;
        for (const char* key : {"x", "y"}) {
            if (!j[i].contains(key))
                continue;
            if (!j[i][key].is_array())
                throw InputError(ptr + "/" + key + ": expected an array of numbers");
            for (std::size_t k = 0; k < j[i][key].size(); ++k) {
                if (!j[i][key][k].is_number())
                    throw InputError(ptr + "/" + key + "/" + std::to_string(k) + ": expected a number");
                (key[0] == 'x' ? s.x : s.y).push_back(to_real(rational_from_double(j[i][key][k].get<double>())));
            }
        }
        out.push_back(std::move(s));
    }
    return out;
}

std::string join_reals(const std::vector<Real>& v)
{
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i)
        s += (i ? ";" : "") + real_label(v[i]);
    return s;
}

void correlate_checks(Run& run, const WeightPair& w, int N, double tol, const std::vector<PointSet>* sets)
{
    if (N < 1 || N > 8)
        throw InputError("correlate: N must be in 1..8");
    const auto q = run.quadrature();
    WeylSystem ws(w.alpha, w.beta, q);
    const int n_max = std::max(N + 1, 3);
    const auto xs = cut_points(w.alpha, N), ys = cut_points(w.beta, N);
    std::vector<std::pair<Real, Real>> pairs;
    for (int i = 0; i < std::min(N, 2); ++i)
        pairs.emplace_back(xs[i], ys[(i + 1) % ys.size()]);
    auto& rep = run.report();
    with_family(w.alpha, w.beta, n_max, q, [&](const auto& fam) {
        CorrelationEngine eng(fam, ws, N);
        const std::string pt = "N=" + std::to_string(N);
        rep.add("one_point_mass_x", pt, Real(abs(eng.one_point_mass(true) - N)), tol, "integral of R^(1,0) minus N");
        rep.add("one_point_mass_y", pt, Real(abs(eng.one_point_mass(false) - N)), tol, "integral of R^(0,1) minus N");
        rep.merge(verify_reproducing(fam, N, pairs, tol));
        rep.merge(verify_annihilation(eng, pairs, tol));
        rep.merge(verify_block_identity(eng, xs, ys, 1e-10));
        if (N >= 2)
            rep.merge(verify_kernel_routes(eng, GammaKernels(CDSystem(fam, ws, N)), random_kernel_samples(5, run.seed()), 1e-6));
        if (sets) {
            std::vector<std::vector<std::string>> rows;
            for (std::size_t i = 0; i < sets->size(); ++i) {
                const auto& s = (*sets)[i];
                const Real v = eng.correlation(s.x, s.y);
                rows.push_back({std::to_string(i), std::to_string(s.x.size()), std::to_string(s.y.size()), join_reals(s.x),
                                join_reals(s.y), to_string(v, 20)});
            }
            run.csv("correlations.csv", {"set", "r", "s", "x", "y", "R"}, rows);
        }
    });
}

// ---------------------------------------------------------------- sample

struct SampleOptions {
    std::string weights;
    int N = 2;
    double steps = 1e5;
    int thin = 5;
};

void sample_section(Run& run, const WeightPair& w, const SampleOptions& o, bool dump)
{
    if (o.N < 1 || o.N > 6)
        throw InputError("sample: N must be in 1..6");
    if (!(o.steps >= 100) || o.steps > 1e8)
        throw InputError("sample: --steps must be in 100..1e8");
    if (o.thin < 1)
        throw InputError("sample: --thin must be >= 1");
    ChainSettings cs;
    cs.N = o.N;
    cs.samples = static_cast<long>(o.steps);
    cs.thin = o.thin;
    cs.seed = run.seed();
    const auto chain = GasChain(w.alpha, w.beta, cs).run();
    auto& rep = run.report();
    const std::string pt = "N=" + std::to_string(o.N);
    for (std::size_t k = 0; k < chain.acceptance.size(); ++k)
        rep.note("acceptance_rate", pt + " coord=" + std::to_string(k), chain.acceptance[k]);

    const auto q = run.quadrature();
    if (o.N == 1 && is_laguerre(w.alpha) && is_laguerre(w.beta)) {
        std::vector<double> xv;
        for (const auto& s : chain.states)
            xv.push_back(s.x[0]);
        rep.add("one_point_ks", pt, ks_distance(xv, laguerre_one_point_cdf), 0.02, "Kolmogorov-Smirnov distance to the E1 marginal");
    }
    with_family(w.alpha, w.beta, std::max(o.N, 2), q, [&](const auto& fam) {
        const double exact = to_double(partition_function(fam.table, o.N));
        rep.merge(verify_partition_estimate(chain, exact, hankel_normaliser(w.alpha, o.N, q), hankel_normaliser(w.beta, o.N, q)));
        if (o.N == 2) {
            WeylSystem ws(w.alpha, w.beta, q);
            CorrelationEngine eng(fam, ws, 2);
            PrecisionScope low(64);
            rep.merge(verify_two_point(chain, eng, {0, 0.5, 1, 2, 4}));
        }
    });
    rep.merge(verify_symmetrization(chain, [](const GasState& s) {
        double t = 0;
        for (double x : s.x)
            t += x;
        for (double y : s.y)
            t += y;
        return std::exp(-t / 4);
    }));
    if (dump) {
        std::vector<std::string> header;
        for (int i = 1; i <= o.N; ++i)
            header.push_back("x_" + std::to_string(i));
        for (int i = 1; i <= o.N; ++i)
            header.push_back("y_" + std::to_string(i));
        header.push_back("log_density");
        std::vector<std::vector<std::string>> rows;
        char buf[40];
        for (std::size_t i = 0; i < chain.states.size(); ++i) {
            std::vector<std::string> r;
            for (double x : chain.states[i].x) {
                std::snprintf(buf, sizeof buf, "%.17g", x);
                r.push_back(buf);
            }
            for (double y : chain.states[i].y) {
                std::snprintf(buf, sizeof buf, "%.17g", y);
                r.push_back(buf);
            }
            std::snprintf(buf, sizeof buf, "%.17g", chain.log_density[i]);
            r.push_back(buf);
            rows.push_back(std::move(r));
        }
        run.csv("chain.csv", header, rows);
    }
}

// ---------------------------------------------------------------- harnad-orlov

struct HarnadOrlovOptions {
    std::vector<int> sizes{1, 2, 3};
    std::vector<double> x{1, 2, 4}, y{1, 3, 5};
    double samples = 1e5;
};

void harnad_orlov_section(Run& run, const HarnadOrlovOptions& o)
{
    auto& rep = run.report();
    for (int N : o.sizes) {
        if (N < 1 || N > static_cast<int>(o.x.size()) || N > static_cast<int>(o.y.size()))
            throw InputError("harnad-orlov: N = " + std::to_string(N) + " needs N entries in --x and --y");
        for (double v : o.x)
            if (!(v > 0))
                throw InputError("harnad-orlov: --x entries must be positive");
        for (double v : o.y)
            if (!(v > 0))
                throw InputError("harnad-orlov: --y entries must be positive");
        std::vector<double> xs(o.x.begin(), o.x.begin() + N), ys(o.y.begin(), o.y.begin() + N);
        if (N >= 2)
            rep.merge(verify_haar(N, 10000, run.seed()));
        rep.merge(harnad_orlov_check(xs, ys, static_cast<long>(o.samples), run.seed()));
    }
}

// ---------------------------------------------------------------- equilibrium

struct EquilibriumOptions {
    std::string potentials;
    std::vector<int> n{200};
    double residual_tol = 1e-2;
    MinimizeOptions minimize;
};

bool mirror_symmetric(const PotentialPair& p)
{
    if (p.v1.poly.size() != p.v2.poly.size() || p.v1.log_coef != p.v2.log_coef)
        return false;
    for (std::size_t k = 0; k < p.v1.poly.size(); ++k)
        if (p.v2.poly[k] != (k % 2 ? -p.v1.poly[k] : p.v1.poly[k]))
            return false;
    return true;
}

void equilibrium_section(Run& run, const PotentialPair& pot, const EquilibriumOptions& o, bool dump)
{
    if (o.n.empty())
        throw InputError("equilibrium: need at least one n");
    for (int n : o.n)
        if (n < 1 || n > 4000)
            throw InputError("equilibrium: n must be in 1..4000");
    auto ns = o.n;
    std::sort(ns.begin(), ns.end());
    auto& rep = run.report();
    rep.merge(verify_action_gradient(pot, 20, run.seed()));
    const bool symmetric = mirror_symmetric(pot);
    const auto grid = curve_grid();
    ojson gas_json = ojson::array();
    std::vector<std::vector<std::string>> rows;
    std::vector<CurveSummary> sums;
    std::vector<double> energies;
    for (int n : ns) {
        auto opt = o.minimize;
        opt.seed = run.seed();
        const auto gas = minimize(pot, n, opt);
        const std::string pt = "n=" + std::to_string(n);
        if (symmetric) {
            double gap = 0;
            for (int i = 0; i < n; ++i)
                gap = std::max(gap, std::abs(gas.y[i] + gas.x[n - 1 - i]));
            rep.add("mirror_symmetry", pt, gap, 1e-6, "max |y_j + x_{n+1-j}|");
        }
        energies.push_back(gas.energy);
        if (n == 1)
            continue;
        SpectralCurve curve(gas, pot);
        rep.merge(curve_diagnostics(curve));
        const auto s = summarize_curve(curve, grid);
        sums.push_back(s);
        rep.note("cubic_residual", pt, s.cubic, "sup over the 20-point grid");
        rep.note("r_route_gap", pt, s.r_gap);
        rep.note("d_route_gap", pt, s.d_gap);
        for (const auto& z : grid) {
            const auto v = curve.at(z);
            rows.push_back({std::to_string(n), real_label(z.real()), real_label(z.imag()), real_label(v.r_potential.real()),
                            real_label(v.r_potential.imag()), real_label(v.r_resolvent.real()), real_label(v.r_resolvent.imag()),
                            real_label(v.d_potential.real()), real_label(v.d_potential.imag()), real_label(v.d_resolvent.real()),
                            real_label(v.d_resolvent.imag()), real_label(curve.cubic_residual(z))});
        }
        if (dump) {
            ojson g;
            g["n"] = n;
            g["energy"] = gas.energy;
            g["iterations"] = gas.iterations;
            g["force"] = gas.force;
            g["x"] = gas.x;
            g["y"] = gas.y;
            auto bands = [](const std::vector<double>& v) {
                ojson a = ojson::array();
                for (const auto& [lo, hi] : support_bands(v))
                    a.push_back({lo, hi});
                return a;
            };
            g["bands_x"] = bands(gas.x);
            g["bands_y"] = bands(gas.y);
            gas_json.push_back(std::move(g));
        }
    }
    for (std::size_t i = 1; i < ns.size(); ++i)
        if (ns[i] == 2 * ns[i - 1])
            rep.note("energy_doubling_change", "n=" + std::to_string(ns[i - 1]) + "->" + std::to_string(ns[i]),
                     std::abs(energies[i] - energies[i - 1]));
    if (!sums.empty()) {
        const auto& last = sums.back();
        const std::string pt = "n=" + std::to_string(last.n);
        rep.add("curve_cubic_residual", pt, last.cubic, o.residual_tol, "sup |Y^3 - R Y - D| over the grid and sheets");
        rep.add("curve_r_routes", pt, last.r_gap, o.residual_tol, "Y1^2 + Y2^2 + Y1 Y2 vs the potential formula");
        rep.add("curve_d_routes", pt, last.d_gap, o.residual_tol, "Y0 Y1 Y2 vs the U / nabla formula");
        if (sums.size() >= 2) {
            // least-squares slope of log residual against log n
            double sx = 0, sy = 0, sxx = 0, sxy = 0;
            for (const auto& s : sums) {
                const double lx = std::log(static_cast<double>(s.n)), ly = std::log(s.cubic);
                sx += lx;
                sy += ly;
                sxx += lx * lx;
                sxy += lx * ly;
            }
            const double m = static_cast<double>(sums.size());
            const double slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
            rep.add("curve_residual_trend", "n=" + std::to_string(sums.front().n) + ".." + std::to_string(last.n),
                    std::max(slope, last.cubic / sums.front().cubic - 1), 0.0,
                    "log-log slope " + real_label(slope) + ", must be negative with a net decrease");
        }
    }
    run.csv("curve.csv",
            {"n", "z_re", "z_im", "R_potential_re", "R_potential_im", "R_resolvent_re", "R_resolvent_im", "D_potential_re",
             "D_potential_im", "D_resolvent_re", "D_resolvent_im", "cubic_residual"},
            rows);
    if (dump)
        run.json("gas.json", gas_json);
}

// ---------------------------------------------------------------- o1check

struct O1Options {
    std::string alpha;
    int k = 2;
    int N = 0;
    bool exact = false;
    bool allow_odd = false;
    double samples = 2e5;
};

void o1_section(Run& run, const Weight& alpha, const O1Options& o)
{
    const int N = o.N ? o.N : 2 * o.k;
    if (N < 1 || N > 12)
        throw InputError("o1check: N = 2k must be in 1..12");
    if (N % 2 && !o.allow_odd)
        throw InputError("o1check: odd N = " + std::to_string(N) + " is only available with --allow-odd-conjecture");
    const bool exact_ok = alpha.exponential_form().has_value();
    if (o.exact && !exact_ok)
        throw InputError("o1check: --exact needs alpha = x^a e^{-cx} with integer a >= 0");
    auto& rep = run.report();
    const Weight beta = alpha.times_x();
    double pf_value = 0;
    if (exact_ok && o.exact) {
        auto skew = exact_skew_table(alpha, N);
        auto model = exact_bimoments(alpha, beta, N);
        for (int m = (N % 2 ? 1 : 2); m <= N; m += 2)
            rep.merge(verify_pfaffian_identity(model, skew, m, Real(0), o.allow_odd));
        if (N % 2 == 0)
            pf_value = to_double(o1_partition_from_pfaffian(skew, N / 2));
    } else {
        const auto q = run.quadrature();
        auto skew = real_skew_table(alpha, N, q);
        auto model = real_bimoments(alpha, beta, N, Real(0), q);
        for (int m = (N % 2 ? 1 : 2); m <= N; m += 2)
            rep.merge(verify_pfaffian_identity(model, skew, m, run.ctx().quadrature_tolerance() * 1024, o.allow_odd));
        if (N % 2 == 0)
            pf_value = to_double(o1_partition_from_pfaffian(skew, N / 2));
    }
    if (N % 2 == 0) {
        const int k = N / 2;
        if (k <= 2 && exact_ok)
            rep.merge(verify_o1_direct(alpha, k, pf_value, static_cast<long>(o.samples), run.seed()));
        else if (k == 1)
            rep.add("o1_direct_quadrature", "k=1", std::abs(o1_partition_quadrature(alpha) - pf_value) / std::abs(pf_value), 1e-8);
    }
}

// ---------------------------------------------------------------- full-suite

void full_suite(Run& run, const WeightPair& w)
{
    BopsOptions b;
    b.n_max = 8;
    bops_section(run, w, b, true);
    CdOptions cd;
    cd_section(run, w, cd, true);
    RhpOptions rh;
    rhp_section(run, w, rh);
    for (int N = 1; N <= 4; ++N)
        correlate_checks(run, w, N, 1e-8, nullptr);
    HarnadOrlovOptions ho;
    harnad_orlov_section(run, ho);
    SampleOptions s1;
    s1.N = 1;
    SampleOptions s2;
    s2.N = 2;
    if (is_laguerre(w.alpha) && is_laguerre(w.beta))
        sample_section(run, w, s1, false);
    sample_section(run, w, s2, false);
    if (w.alpha.exponential_form()) {
        O1Options o;
        o.k = 3;
        o.exact = true;
        o1_section(run, w.alpha, o);
        o.k = 2;
        o.exact = false;
        o1_section(run, w.alpha, o);
    }
}

ojson file_echo(const std::string& path)
{
    return {{"path", path}, {"content", read_json(path)}};
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Numerical laboratory for the Cauchy two-matrix model"};
    app.require_subcommand(1);
    Common common;
    auto add_common = [&](CLI::App* sc) {
        sc->add_option("--out", common.out, "output directory")->capture_default_str();
        sc->add_option("--precision", common.precision, "working precision in bits (default: CAUCHY_PRECISION_BITS or 256)");
        sc->add_option("--seed", common.seed, "random seed")->capture_default_str();
        sc->add_option("--tolerance", common.tolerance, "override the tolerance of every asserted check");
    };

    BopsOptions bo;
    auto* bops = app.add_subcommand("bops", "bimoments, biorthogonal family, recurrences and zeros");
    bops->add_option("--weights", bo.weights, "weight JSON")->required();
    bops->add_option("--n-max", bo.n_max, "largest degree")->capture_default_str();
    bops->add_flag("--exact", bo.exact, "exact rational arithmetic");
    add_common(bops);

    CdOptions co;
    auto* vcd = app.add_subcommand("verify-cd", "Christoffel-Darboux identities and perfect duality");
    vcd->add_option("--weights", co.weights, "weight JSON")->required();
    vcd->add_option("--n", co.windows, "window sizes")->delimiter(',')->capture_default_str();
    vcd->add_option("--samples", co.samples, "random complex sample pairs")->capture_default_str();
    vcd->add_option("--check-tol", co.tol, "residual tolerance")->capture_default_str();
    add_common(vcd);

    RhpOptions ro;
    double rhp_radius = 1e6, minor_radius = 1e4;
    auto* vrhp = app.add_subcommand("verify-rhp", "Riemann-Hilbert jumps, normalisation and minor ratio");
    vrhp->add_option("--weights", ro.weights, "weight JSON")->required();
    vrhp->add_option("--n", ro.windows, "window sizes")->delimiter(',')->capture_default_str();
    vrhp->add_option("--cut-samples", ro.settings.cut_samples, "points per contour")->capture_default_str();
    vrhp->add_option("--radius", rhp_radius, "|w| for the asymptotic test")->capture_default_str();
    vrhp->add_option("--minor-radius", minor_radius, "|w| for the minor ratio")->capture_default_str();
    add_common(vrhp);

    CorrelateOptions cro;
    auto* corr = app.add_subcommand("correlate", "correlation functions and kernel identities");
    corr->add_option("--weights", cro.weights, "weight JSON")->required();
    corr->add_option("--N", cro.N, "matrix size")->capture_default_str();
    corr->add_option("--points", cro.points, "points JSON: [{\"x\": [...], \"y\": [...]}, ...]");
    add_common(corr);

    SampleOptions so;
    auto* samp = app.add_subcommand("sample", "Metropolis sampler of the eigenvalue density");
    samp->add_option("--weights", so.weights, "weight JSON")->required();
    samp->add_option("--N", so.N, "matrix size")->capture_default_str();
    samp->add_option("--steps", so.steps, "recorded states after burn-in")->capture_default_str();
    samp->add_option("--thin", so.thin, "sweeps between recorded states")->capture_default_str();
    add_common(samp);

    HarnadOrlovOptions hoo;
    int ho_N = 0;
    auto* ho = app.add_subcommand("harnad-orlov", "Haar average of det(X + U Y U*)^-N");
    ho->add_option("--N", ho_N, "one matrix size (default 1, 2, 3)");
    ho->add_option("--x", hoo.x, "eigenvalues of X")->delimiter(',')->capture_default_str();
    ho->add_option("--y", hoo.y, "eigenvalues of Y")->delimiter(',')->capture_default_str();
    ho->add_option("--samples", hoo.samples, "Haar samples")->capture_default_str();
    add_common(ho);

    EquilibriumOptions eo;
    auto* eq = app.add_subcommand("equilibrium", "discrete log-gas minimiser and cubic spectral curve");
    eq->add_option("--potentials", eo.potentials, "potentials JSON")->required();
    eq->add_option("--n", eo.n, "particles per species")->delimiter(',')->capture_default_str();
    eq->add_option("--gtol", eo.minimize.gtol, "force tolerance")->capture_default_str();
    eq->add_option("--max-iters", eo.minimize.max_iters, "iteration limit")->capture_default_str();
    eq->add_option("--time-budget", eo.minimize.time_budget, "wall-clock seconds per minimisation, 0 for none")->capture_default_str();
    eq->add_option("--residual-tol", eo.residual_tol, "curve residual tolerance")->capture_default_str();
    add_common(eq);

    O1Options oo;
    auto* o1 = app.add_subcommand("o1check", "skew table, Pfaffian identity and O(1) integrals");
    o1->add_option("--alpha", oo.alpha, "weight JSON for alpha (beta = x alpha)")->required();
    auto* k_opt = o1->add_option("--k", oo.k, "N = 2k")->capture_default_str();
    o1->add_option("--N", oo.N, "matrix size; odd values need --allow-odd-conjecture")->excludes(k_opt);
    o1->add_flag("--exact", oo.exact, "exact rational arithmetic");
    o1->add_flag("--allow-odd-conjecture", oo.allow_odd, "report odd N without asserting");
    o1->add_option("--samples", oo.samples, "Monte Carlo draws")->capture_default_str();
    add_common(o1);

    std::string suite_weights;
    auto* full = app.add_subcommand("full-suite", "every weight-based check in one report");
    full->add_option("--weights", suite_weights, "weight JSON")->required();
    add_common(full);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        CLI::App* sc = app.get_subcommands().front();
        Run run(sc->get_name(), common);
        PrecisionScope scope(run.bits());
        auto& cfg = run.config();
        if (sc == bops) {
            auto w = load_weights(bo.weights);
            cfg["weights"] = file_echo(bo.weights);
            cfg["n_max"] = bo.n_max;
            cfg["exact"] = bo.exact;
            bops_section(run, w, bo, true);
        } else if (sc == vcd) {
            auto w = load_weights(co.weights);
            cfg["weights"] = file_echo(co.weights);
            cfg["windows"] = co.windows;
            cfg["samples"] = co.samples;
            cfg["check_tol"] = co.tol;
            cd_section(run, w, co, true);
        } else if (sc == vrhp) {
            auto w = load_weights(ro.weights);
            ro.settings.asymptotic_radius = Real(rhp_radius);
            ro.settings.minor_radius = Real(minor_radius);
            cfg["weights"] = file_echo(ro.weights);
            cfg["windows"] = ro.windows;
            cfg["cut_samples"] = ro.settings.cut_samples;
            cfg["radius"] = rhp_radius;
            cfg["minor_radius"] = minor_radius;
            rhp_section(run, w, ro);
        } else if (sc == corr) {
            auto w = load_weights(cro.weights);
            cfg["weights"] = file_echo(cro.weights);
            cfg["N"] = cro.N;
            std::vector<PointSet> sets;
            if (!cro.points.empty()) {
                sets = load_points(cro.points);
                cfg["points"] = file_echo(cro.points);
            }
            correlate_checks(run, w, cro.N, cro.tol, cro.points.empty() ? nullptr : &sets);
        } else if (sc == samp) {
            auto w = load_weights(so.weights);
            cfg["weights"] = file_echo(so.weights);
            cfg["N"] = so.N;
            cfg["steps"] = so.steps;
            cfg["thin"] = so.thin;
            sample_section(run, w, so, true);
        } else if (sc == ho) {
            if (ho_N)
                hoo.sizes = {ho_N};
            cfg["sizes"] = hoo.sizes;
            cfg["x"] = hoo.x;
            cfg["y"] = hoo.y;
            cfg["samples"] = hoo.samples;
            harnad_orlov_section(run, hoo);
        } else if (sc == eq) {
            const auto pot = PotentialPair::from_json(read_json(eo.potentials), eo.potentials + "#");
            cfg["potentials"] = file_echo(eo.potentials);
            cfg["n"] = eo.n;
            cfg["gtol"] = eo.minimize.gtol;
            cfg["max_iters"] = eo.minimize.max_iters;
            cfg["time_budget"] = eo.minimize.time_budget;
            cfg["residual_tol"] = eo.residual_tol;
            equilibrium_section(run, pot, eo, true);
        } else if (sc == o1) {
            const auto alpha = Weight::from_json(read_json(oo.alpha), oo.alpha + "#");
            cfg["alpha"] = file_echo(oo.alpha);
            cfg["k"] = oo.k;
            cfg["N"] = oo.N ? oo.N : 2 * oo.k;
            cfg["exact"] = oo.exact;
            cfg["allow_odd_conjecture"] = oo.allow_odd;
            cfg["samples"] = oo.samples;
            o1_section(run, alpha, oo);
        } else if (sc == full) {
            auto w = load_weights(suite_weights);
            cfg["weights"] = file_echo(suite_weights);
            full_suite(run, w);
        }
        return run.finish();
    } catch (const InputError& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "runtime failure: " << e.what() << "\n";
        return 3;
    }
}
