// Acceptance driver: one PASS/FAIL line per criterion, selected by number on the command line.

#include <cauchy2mm/bops.hpp>
#include <cauchy2mm/cdrhp.hpp>
#include <cauchy2mm/correlations.hpp>
#include <cauchy2mm/equilibrium.hpp>
#include <cauchy2mm/montecarlo.hpp>
#include <cauchy2mm/o1bridge.hpp>

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <map>
#include <string>

using namespace cauchy2mm;

namespace {

struct Outcome {
    bool pass = true;
    std::string detail;
};

// Folds a report into an outcome: first failing check, else the worst residual/tolerance ratio.
Outcome judge(const Report& rep, const std::string& what)
{
    Outcome o;
    if (const Check* f = rep.first_failure()) {
        o.pass = false;
        o.detail = f->check + " at " + f->point + ": " + real_label(f->residual) + " > " + real_label(f->tolerance);
        if (!f->detail.empty())
            o.detail += " (" + f->detail + ")";
        o.detail += "; " + what;
        return o;
    }
    std::size_t n = 0;
    double worst = 0;
    for (const auto& c : rep.checks())
        if (c.asserted) {
            ++n;
            worst = std::max(worst, c.residual);
        }
    o.detail = what + ", " + std::to_string(n) + " checks, worst residual " + real_label(worst);
    return o;
}

QuadratureSettings settings_at(unsigned bits)
{
    ScalarContext c;
    c.bits = bits;
    return QuadratureSettings::from(c);
}

Weight half_gaussian() { return Weight(Rational(0), {Rational(0), Rational(0), Rational(1)}, {{Rational(0), Rational(4)}}); }

Rational factorial(int n)
{
    Rational f = 1;
    for (int k = 2; k <= n; ++k)
        f *= k;
    return f;
}

Outcome bimoments()
{
    Report rep;
    auto ex = exact_bimoments(Weight::laguerre(), Weight::laguerre(), 10);
    int wrong = 0;
    for (int j = 0; j <= 10; ++j)
        for (int k = 0; k <= 10; ++k)
            wrong += ex(j, k) != factorial(j) * factorial(k) / (j + k + 1);
    rep.add("closed_form_mismatches", "j,k<=10", wrong, 0.0);
    PrecisionScope p(256);
    auto q = quadrature_bimoments(Weight::laguerre(), Weight::laguerre(), 10, Real(0), QuadratureSettings::with_tolerance(Real("1e-14")));
    Real gap = 0;
    for (int j = 0; j <= 10; ++j)
        for (int k = 0; k <= 10; ++k)
            gap = std::max(gap, Real(abs(q(j, k) / to_real(ex(j, k)) - 1)));
    rep.add("quadrature_vs_closed_form", "256 bits", gap, 1e-12);
    return judge(rep, "exact table and 256-bit quadrature");
}

Outcome total_positivity() { return judge(check_total_positivity(exact_bimoments(Weight::laguerre(), Weight::laguerre(), 7), 8), "8x8 minors, exact"); }

Outcome biorthonormality()
{
    auto f = build_family(exact_bimoments(Weight::laguerre(), Weight::laguerre(), 8), 8);
    Report rep = verify_family(f, Real(0));
    int wrong = 0;
    for (int j = 0; j <= 8; ++j)
        for (int k = 0; k <= 8; ++k)
            wrong += pairing(f.monic_p[j], f.monic_q[k], f.table) != (j == k ? f.c2[j] : Rational(0));
    rep.add("pairing_mismatches", "j,k<=8", wrong, 0.0);
    return judge(rep, "exact pairing");
}

Outcome zeros()
{
    PrecisionScope p(256);
    Report rep = zeros_and_interlacing(build_family(exact_bimoments(Weight::laguerre(), Weight::laguerre(), 10), 10), Real("1e-40"));
    auto t = quadrature_bimoments(half_gaussian(), Weight::laguerre(), 10, Real(0), QuadratureSettings::with_tolerance(Real("1e-30")));
    rep.merge(zeros_and_interlacing(build_family(t, 10), Real("1e-25")));
    return judge(rep, "Laguerre and half-Gaussian, n<=10");
}

Outcome recurrence()
{
    Report rep = verify_recurrence(build_family(exact_bimoments(Weight::laguerre(), Weight::laguerre(), 6), 6), Real(0));
    PrecisionScope p(256);
    rep.merge(verify_recurrence(build_family(exact_bimoments(Weight::laguerre(), Weight::laguerre(), 12).to_real(), 12), Real("1e-30")));
    return judge(rep, "rational n<=6, 256 bits n<=12");
}

Outcome christoffel_darboux()
{
    PrecisionScope p(256);
    const Weight a = Weight::laguerre(), b = Weight::laguerre();
    WeylSystem ws(a, b, settings_at(256));
    const auto fam = build_family(exact_bimoments(a, b, 5), 5);
    const auto samples = random_sample_pairs(20, 7);
    Report rep;
    for (int n : {2, 3, 4}) {
        rep.merge(verify_cd_duality(CDSystem(fam, ws, n), samples, 1e-8));
        rep.merge(verify_cd_duality(CDSystem(mirror_family(fam), ws.swapped(), n), samples, 1e-8, "_mirror"));
    }
    return judge(rep, "20 samples, n in {2,3,4}");
}

Outcome riemann_hilbert()
{
    PrecisionScope p(256);
    const Weight a = Weight::laguerre(), b = Weight::laguerre();
    WeylSystem ws(a, b, settings_at(256));
    const auto fam = build_family(exact_bimoments(a, b, 4), 4);
    Report rep;
    for (int n : {2, 3})
        rep.merge(verify_rhp(CDSystem(fam, ws, n)));
    return judge(rep, "jumps, |w|=1e6 normalisation, |w|=1e4 minor ratio");
}

Outcome correlations()
{
    PrecisionScope p(256);
    const Weight a = Weight::laguerre(), b = Weight::laguerre();
    WeylSystem ws(a, b, settings_at(256));
    Report rep;
    for (int N = 1; N <= 4; ++N) {
        const auto fam = build_family(exact_bimoments(a, b, N + 1), N + 1);
        CorrelationEngine eng(fam, ws, N);
        const std::string pt = "N=" + std::to_string(N);
        rep.add("one_point_mass_x", pt, Real(abs(eng.one_point_mass(true) - N)), 1e-8);
        rep.add("one_point_mass_y", pt, Real(abs(eng.one_point_mass(false) - N)), 1e-8);
        const auto xs = cut_points(a, N), ys = cut_points(b, N);
        std::vector<std::pair<Real, Real>> pairs;
        for (int i = 0; i < std::min(N, 2); ++i)
            pairs.emplace_back(xs[i], ys[(i + 1) % ys.size()]);
        rep.merge(verify_reproducing(fam, N, pairs, 1e-8));
        if (N == 2 || N == 3)
            rep.merge(verify_block_identity(eng, xs, ys, 1e-10));
        if (N >= 2)
            rep.merge(verify_kernel_routes(eng, GammaKernels(CDSystem(fam, ws, N)), random_kernel_samples(5, 7), 1e-6));
    }
    return judge(rep, "masses, reproducing kernel, block identity, kernel routes");
}

Outcome harnad_orlov()
{
    const std::vector<double> x{1, 2, 4}, y{1, 3, 5};
    Report rep;
    for (int N = 1; N <= 3; ++N)
        rep.merge(harnad_orlov_check({x.begin(), x.begin() + N}, {y.begin(), y.begin() + N}, 100000, 7));
    return judge(rep, "N=1 exact, N=2,3 with 1e5 Haar samples (residuals in SE)");
}

Outcome sampler()
{
    const Weight a = Weight::laguerre(), b = Weight::laguerre();
    ChainSettings cs;
    cs.N = 1;
    cs.samples = 100000;
    const auto chain = GasChain(a, b, cs).run();
    std::vector<double> xv;
    for (const auto& s : chain.states)
        xv.push_back(s.x[0]);
    Report rep;
    rep.add("one_point_ks", "N=1", ks_distance(xv, laguerre_one_point_cdf), 0.02);
    const auto q = settings_at(64);
    const double z = to_double(partition_function(exact_bimoments(a, b, 1), 1));
    rep.merge(verify_partition_estimate(chain, z, hankel_normaliser(a, 1, q), hankel_normaliser(b, 1, q)));
    return judge(rep, "KS and partition function, 1e5 samples");
}

Outcome o1_bridge()
{
    const Weight a = Weight::laguerre();
    auto skew = exact_skew_table(a, 6);
    auto model = exact_bimoments(a, a.times_x(), 6);
    Report rep;
    for (int N : {2, 4, 6})
        rep.merge(verify_pfaffian_identity(model, skew, N, Real(0)));
    const double pf = to_double(o1_partition_from_pfaffian(skew, 1));
    rep.add("o1_direct_quadrature", "k=1", std::abs(o1_partition_quadrature(a) - pf) / pf, 1e-8);
    return judge(rep, "det I = Pf(M)^2 for k<=3, k=1 quadrature");
}

// The run stops once the five-minute budget is spent: the criterion has failed by then.
Outcome spectral_curve()
{
    const auto pot = PotentialPair::symmetric_linear();
    Report rep = verify_action_gradient(pot, 20, 7);
    const auto start = std::chrono::steady_clock::now();
    std::vector<CurveSummary> sums;
    std::string trail;
    for (int n : {50, 100, 200, 400}) {
        MinimizeOptions opt;
        opt.time_budget = 300 - std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        try {
            sums.push_back(summarize_curve(SpectralCurve(minimize(pot, n, opt), pot), curve_grid()));
        } catch (const NumericalError& e) {
            rep.flag("minimize", "n=" + std::to_string(n), false, e.what());
            break;
        }
        trail += (trail.empty() ? "" : ", ") + std::to_string(n) + ": cubic " + real_label(sums.back().cubic) + " R " +
                 real_label(sums.back().r_gap) + " D " + real_label(sums.back().d_gap);
    }
    for (std::size_t i = 1; i < sums.size(); ++i)
        rep.flag("residual_decreasing", "n=" + std::to_string(sums[i].n), sums[i].cubic < sums[i - 1].cubic);
    if (!sums.empty() && sums.back().n == 400) {
        rep.add("cubic_residual", "n=400", sums.back().cubic, 1e-2);
        rep.add("r_routes", "n=400", sums.back().r_gap, 1e-2);
        rep.add("d_routes", "n=400", sums.back().d_gap, 1e-2);
    }
    return judge(rep, "linear potentials, " + trail);
}

struct Criterion {
    std::function<Outcome()> run;
    double limit;    // seconds, 0 for none
};

}  // namespace

int main(int argc, char** argv)
{
    const std::map<int, Criterion> criteria{
        {1, {bimoments, 1}},        {2, {total_positivity, 5}}, {3, {biorthonormality, 0}}, {4, {zeros, 10}},
        {5, {recurrence, 0}},       {6, {christoffel_darboux, 30}}, {7, {riemann_hilbert, 0}}, {8, {correlations, 0}},
        {9, {harnad_orlov, 120}},   {10, {sampler, 120}},        {11, {o1_bridge, 10}},      {12, {spectral_curve, 300}},
    };
    std::vector<int> selected;
    for (int i = 1; i < argc; ++i) {
        char* end = nullptr;
        const long c = std::strtol(argv[i], &end, 10);
        if (*end || !criteria.count(static_cast<int>(c))) {
            std::fprintf(stderr, "unknown criterion '%s' (expected 1..12)\n", argv[i]);
            return 2;
        }
        selected.push_back(static_cast<int>(c));
    }
    if (selected.empty())
        for (const auto& [k, c] : criteria)
            selected.push_back(k);

    bool all = true;
    for (int k : selected) {
        const auto& c = criteria.at(k);
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        char timing[64];
        std::snprintf(timing, sizeof timing, "%.2f s", secs);
        std::string t = timing;
        if (c.limit > 0) {
            std::snprintf(timing, sizeof timing, "%.0f s", c.limit);
            t += std::string(" of ") + timing;
            if (secs > c.limit) {
                o.pass = false;
                t += ", over the limit";
            }
        }
        all = all && o.pass;
        std::printf("criterion %d: %s %s [%s]\n", k, o.pass ? "PASS" : "FAIL", o.detail.c_str(), t.c_str());
        std::fflush(stdout);
    }
    return all ? 0 : 1;
}
