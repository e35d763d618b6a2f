#ifndef CAUCHY2MM_O1BRIDGE_HPP
#define CAUCHY2MM_O1BRIDGE_HPP

/*
 * The O(1) bridge. With beta(y) = y alpha(y) the Cauchy bimoments split as
 * I = M + (1/2) m m^T, where m are the moments of alpha and
 *   M_ij = (1/2) \int\int x^i y^j (y - x)/(x + y) alpha(x) alpha(y)
 * is skew. For even N = 2k, det I_N = Pf(M_N)^2, and the O(1) integral
 *   (1/(2^k k! N!)) \int Delta(Z)^2 prod_{i<j} (z_i + z_j)^{-1} prod alpha(z_i) dZ
 * equals Pf(M_N)/k! by the Schur Pfaffian.
 */

#include "bimoments.hpp"
#include "correlations.hpp"
#include "montecarlo.hpp"
#include "report.hpp"

#include <random>

namespace cauchy2mm {

template <class T>
struct SkewTable {
    Matrix<T> entries;          // M_ij, 0 <= i, j <= n_max
    std::vector<T> moments;     // \int x^j alpha
    Weight alpha;

    int n_max() const { return static_cast<int>(entries.rows()) - 1; }
    const T& operator()(std::size_t i, std::size_t j) const { return entries(i, j); }
};

// From the (alpha, alpha) table up to n_max + 1.
template <class T>
SkewTable<T> skew_from_table(const BimomentTable<T>& aa, int n_max)
{
    if (aa.n_max() < n_max + 1)
        throw InputError("skew table: bimoment table too small");
    SkewTable<T> s;
    s.entries = Matrix<T>(n_max + 1, n_max + 1);
    for (int i = 0; i <= n_max; ++i)
        for (int j = 0; j <= n_max; ++j)
            s.entries(i, j) = (aa(i, j + 1) - aa(i + 1, j)) / T(2);
    s.moments.assign(aa.alpha_moments.begin(), aa.alpha_moments.begin() + n_max + 1);
    s.alpha = aa.alpha;
    return s;
}

inline SkewTable<Rational> exact_skew_table(const Weight& alpha, int n_max)
{
    return skew_from_table(exact_bimoments(alpha, alpha, n_max + 1), n_max);
}

inline SkewTable<Real> real_skew_table(const Weight& alpha, int n_max, const QuadratureSettings& q)
{
    return skew_from_table(real_bimoments(alpha, alpha, n_max + 1, Real(0), q), n_max);
}

template <class T>
Matrix<T> leading_block(const Matrix<T>& m, int N)
{
    std::vector<std::size_t> idx(N);
    for (int i = 0; i < N; ++i)
        idx[i] = static_cast<std::size_t>(i);
    return m.select(idx, idx);
}

// Beta must be x alpha; anything else is rejected.
inline void require_model_pair(const Weight& alpha, const Weight& beta)
{
    const Weight expected = alpha.times_x();
    if (beta.power() != expected.power() || beta.poly() != expected.poly() || beta.scale() != expected.scale() ||
        beta.support().size() != expected.support().size())
        throw InputError("o1 bridge: only the pair beta(y) = y alpha(y) is supported");
    for (std::size_t i = 0; i < beta.support().size(); ++i)
        if (beta.support()[i].lo != expected.support()[i].lo || beta.support()[i].hi != expected.support()[i].hi)
            throw InputError("o1 bridge: only the pair beta(y) = y alpha(y) is supported");
}

/*
 * det(I_N) = Pf(M_N)^2, I = M + m m^T / 2 entrywise, m^T adj(M_N) m = 0 and
 * Z_N = N! Pf(M_N)^2. Odd N is an experiment: both det(I_N) and the bordered
 * Pfaffian square Pf([[M, m], [-m^T, 0]])^2 / 2 are reported, nothing asserted.
 */
template <class T>
Report verify_pfaffian_identity(const BimomentTable<T>& model, const SkewTable<T>& skew, int N, const Real& tol,
                                bool allow_odd = false)
{
    require_model_pair(model.alpha, model.beta);
    if (N < 1 || N > model.n_max() + 1 || N > skew.n_max() + 1)
        throw InputError("o1 bridge: N exceeds the tables");
    if (N % 2 && !allow_odd)
        throw InputError("o1 bridge: odd N = " + std::to_string(N) + " is not covered; pass the odd-size experiment flag to report it");
    Report rep;
    const std::string pt = "N=" + std::to_string(N);
    const Matrix<T> M = leading_block(skew.entries, N);
    const Matrix<T> I = leading_block(model.entries, N);

    Real skew_gap = 0, split_gap = 0;
    for (int i = 0; i < N; ++i)
        for (int j = 0; j < N; ++j) {
            skew_gap = std::max(skew_gap, magnitude(T(M(i, j) + M(j, i))));
            split_gap = std::max(split_gap, magnitude(T(I(i, j) - M(i, j) - skew.moments[i] * skew.moments[j] / T(2))));
        }
    rep.add("skew_antisymmetry", pt, skew_gap, to_double(tol));
    rep.add("skew_split", pt, split_gap, to_double(tol), "I = M + m m^T / 2");

    const T detI = determinant(I);
    if (N % 2) {
        Matrix<T> B(N + 1, N + 1);
        for (int i = 0; i < N; ++i) {
            for (int j = 0; j < N; ++j)
                B(i, j) = M(i, j);
            B(i, N) = skew.moments[i];
            B(N, i) = -skew.moments[i];
        }
        const T pf = pfaffian(B, tol);
        rep.note("odd_det_I", pt, to_double(detI));
        rep.note("odd_bordered_pfaffian_square_half", pt, to_double(T(pf * pf / T(2))),
                 "experiment, not asserted; gap " + real_label(to_double(magnitude(T(detI - pf * pf / T(2))))));
        return rep;
    }
    const T pf = pfaffian(M, tol);
    const Real scale = std::max(Real(1e-300), magnitude(detI));
    rep.add("pfaffian_square", pt, Real(magnitude(T(detI - pf * pf)) / scale), to_double(tol),
            "det I_N = " + real_label(to_double(detI)) + ", Pf M_N = " + real_label(to_double(pf)));
    std::vector<T> m(skew.moments.begin(), skew.moments.begin() + N);
    const Matrix<T> adj = adjugate(M);
    T form(0);
    for (int i = 0; i < N; ++i)
        for (int j = 0; j < N; ++j)
            form += m[i] * adj(i, j) * m[j];
    rep.add("adjugate_form", pt, Real(magnitude(form) / scale), to_double(tol), "m^T adj(M_N) m, relative to det I_N");
    const T z = partition_function(model, N);
    const T rhs = factorial_of<T>(N) * pf * pf;
    rep.add("partition_squaring", pt, Real(magnitude(T(z - rhs)) / magnitude(z)), to_double(tol), "Z_N = N! Pf(M_N)^2");
    return rep;
}

// Pf(M_N)/k!, the value of the normalised O(1) integral
template <class T>
T o1_partition_from_pfaffian(const SkewTable<T>& skew, int k)
{
    return pfaffian(leading_block(skew.entries, 2 * k)) / factorial_of<T>(k);
}

inline double o1_integrand(const std::vector<double>& z)
{
    double v = 1;
    for (std::size_t i = 0; i < z.size(); ++i)
        for (std::size_t j = i + 1; j < z.size(); ++j)
            v *= (z[i] - z[j]) * (z[i] - z[j]) / (z[i] + z[j]);
    return v;
}

inline double o1_prefactor(int k)
{
    const int N = 2 * k;
    return 1.0 / (std::ldexp(1.0, k) * std::tgamma(k + 1.0) * std::tgamma(N + 1.0));
}

// k = 1 by a tensor Gauss rule on the weight's panels, graded toward 0.
inline double o1_partition_quadrature(const Weight& alpha)
{
    PrecisionScope scope(64);
    const auto q = QuadratureSettings::with_tolerance(Real(1e-14));
    const Measure mu = Measure::of(alpha, q);
    auto panels = mu.base_panels(4);
    if (alpha.touches_zero())
        panels = refine_toward(panels, Complex(0), Real(std::ldexp(1.0, -60)));
    const GaussRule& g = gauss_legendre(q.order);
    std::vector<double> xs, ws;
    for (const auto& p : panels) {
        const Real half = p.length() / 2, mid = (p.a + p.b) / 2;
        for (std::size_t i = 0; i < g.nodes.size(); ++i) {
            const Real x = mid + half * g.nodes[i];
            xs.push_back(to_double(x));
            ws.push_back(to_double(half * g.weights[i] * alpha.density(x)));
        }
    }
    long double s = 0;
    for (std::size_t i = 0; i < xs.size(); ++i)
        for (std::size_t j = 0; j < xs.size(); ++j)
            s += static_cast<long double>(ws[i] * ws[j] * o1_integrand({xs[i], xs[j]}));
    return static_cast<double>(s) * o1_prefactor(1);
}

// Independent draws from the normalised weight; needs x^a e^{-cx} on (0, inf).
inline MeanEstimate o1_partition_mc(const Weight& alpha, int k, long samples, std::uint64_t seed)
{
    if (k < 1 || k > 2)
        throw InputError("o1 Monte Carlo covers k = 1, 2");
    const auto form = alpha.exponential_form();
    if (!form)
        throw InputError("o1 Monte Carlo needs a weight x^a e^{-cx} on (0, inf)");
    const double a = static_cast<double>(form->power), c = to_double(form->rate);
    const double mass = to_double(form->scale) * std::tgamma(a + 1) / std::pow(c, a + 1);
    const int N = 2 * k;
    auto gen = make_stream(seed, 0);
    std::gamma_distribution<double> gamma(a + 1, 1 / c);
    std::vector<double> vals(samples), z(N);
    for (long s = 0; s < samples; ++s) {
        for (auto& v : z)
            v = gamma(gen);
        vals[s] = o1_integrand(z);
    }
    auto est = batch_mean(vals, 50);
    const double f = std::pow(mass, N) * o1_prefactor(k);
    return {est.mean * f, est.stderr_ * f};
}

inline Report verify_o1_direct(const Weight& alpha, int k, double pf_value, long samples, std::uint64_t seed, double quad_tol = 1e-8)
{
    Report rep;
    const std::string pt = "k=" + std::to_string(k);
    if (k == 1) {
        const double qv = o1_partition_quadrature(alpha);
        rep.add("o1_direct_quadrature", pt, std::abs(qv - pf_value) / std::abs(pf_value), quad_tol,
                "direct " + real_label(qv) + " vs Pf(M_2) " + real_label(pf_value));
        const std::vector<double> z{0.7, 2.3}, zs{2.3, 0.7};
        rep.flag("o1_integrand_symmetry", pt, o1_integrand(z) == o1_integrand(zs));
    }
    const auto mc = o1_partition_mc(alpha, k, samples, seed);
    rep.add("o1_direct_mc", pt, std::abs(mc.mean - pf_value) / mc.stderr_, 3.0,
            "mc " + real_label(mc.mean) + " +- " + real_label(mc.stderr_) + " vs Pf(M_N)/k! " + real_label(pf_value) + ", in SE units");
    return rep;
}

}  // namespace cauchy2mm

#endif
