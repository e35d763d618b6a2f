#ifndef CAUCHY2MM_MONTECARLO_HPP
#define CAUCHY2MM_MONTECARLO_HPP

/*
 * Metropolis sampling of the two-species Cauchy gas
 *   f(X, Y) = Delta(X)^2 Delta(Y)^2 / prod_{i,j} (x_i + y_j) * alpha(X) beta(Y),
 * Haar unitaries, and statistical checks of the reduction formulas.
 * Everything here runs in double precision.
 */

#include "correlations.hpp"

#include <Eigen/Dense>
#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/special_functions/expint.hpp>

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>

namespace cauchy2mm {

// Independent reproducible stream per (seed, stream index)
inline std::mt19937_64 make_stream(std::uint64_t seed, std::uint64_t stream)
{
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32), static_cast<std::uint32_t>(stream),
                      static_cast<std::uint32_t>(stream >> 32)};
    return std::mt19937_64(seq);
}

struct GasState {
    std::vector<double> x, y;
};

inline double gas_log_density(const GasState& s, const Weight& alpha, const Weight& beta)
{
    double v = 0;
    const std::size_t n = s.x.size();
    for (std::size_t i = 0; i < n; ++i) {
        v += alpha.log_density(s.x[i]) + beta.log_density(s.y[i]);
        for (std::size_t j = i + 1; j < n; ++j)
            v += 2 * std::log(std::abs(s.x[i] - s.x[j])) + 2 * std::log(std::abs(s.y[i] - s.y[j]));
        for (std::size_t j = 0; j < n; ++j)
            v -= std::log(s.x[i] + s.y[j]);
    }
    return v;
}

struct ChainSettings {
    int N = 1;
    long samples = 100000;    // recorded states after burn-in
    int thin = 5;             // sweeps between recorded states
    std::uint64_t seed = 7;
    std::uint64_t stream = 0;
    double target_acceptance = 0.3;
};

struct ChainResult {
    std::vector<GasState> states;
    std::vector<double> log_density;
    std::vector<double> step_scale;    // frozen proposal widths, x then y
    std::vector<double> acceptance;    // post-burn-in acceptance rate per coordinate
    long sweeps = 0, burn_in = 0;
};

// Single-coordinate random walk in log space: u = log x, x' = x e^{s xi}, Jacobian x'/x.
// Burn-in is a tenth of all sweeps; widths adapt towards the target rate during burn-in only.
class GasChain {
public:
    GasChain(Weight alpha, Weight beta, ChainSettings cfg) : m_alpha(std::move(alpha)), m_beta(std::move(beta)), m_cfg(cfg)
    {
        if (cfg.N < 1)
            throw InputError("sample: N must be >= 1");
        if (cfg.samples < 1 || cfg.thin < 1)
            throw InputError("sample: samples and thin must be >= 1");
        for (const Weight* w : {&m_alpha, &m_beta})
            if (w->support().front().lo < 0)
                throw InputError("sample: weights must live on the positive half-line");
    }

    ChainResult run() const
    {
        const int N = m_cfg.N;
        auto gen = make_stream(m_cfg.seed, m_cfg.stream);
        std::normal_distribution<double> normal;
        std::uniform_real_distribution<double> unif;
        GasState s = initial_state();
        double ld = gas_log_density(s, m_alpha, m_beta);
        if (!std::isfinite(ld))
            throw NumericalError("sample: initial state has zero density");
        std::vector<double> scale(2 * N, 0.5);
        std::vector<long> acc(2 * N, 0), tried(2 * N, 0);

        ChainResult res;
        res.sweeps = m_cfg.samples * m_cfg.thin * 10 / 9 + 1;
        res.burn_in = res.sweeps / 10;
        const long adapt_every = 50;
        for (long sweep = 0; sweep < res.sweeps; ++sweep) {
            const bool burning = sweep < res.burn_in;
            for (int c = 0; c < 2 * N; ++c) {
                double& coord = c < N ? s.x[c] : s.y[c - N];
                const double old = coord;
                const double step = scale[c] * normal(gen);
                coord = old * std::exp(step);
                const double nld = gas_log_density(s, m_alpha, m_beta);
                const double log_ratio = nld - ld + step;
                ++tried[c];
                if (std::isfinite(nld) && std::log(unif(gen)) < log_ratio) {
                    ld = nld;
                    ++acc[c];
                } else {
                    coord = old;
                }
            }
            if (burning && (sweep + 1) % adapt_every == 0) {
                for (int c = 0; c < 2 * N; ++c) {
                    const double rate = static_cast<double>(acc[c]) / static_cast<double>(tried[c]);
                    scale[c] *= std::exp(rate - m_cfg.target_acceptance);
                    acc[c] = tried[c] = 0;
                }
            }
            if (sweep + 1 == res.burn_in)
                std::fill(acc.begin(), acc.end(), 0), std::fill(tried.begin(), tried.end(), 0);
            if (!burning && (sweep - res.burn_in) % m_cfg.thin == m_cfg.thin - 1 &&
                static_cast<long>(res.states.size()) < m_cfg.samples) {
                res.states.push_back(s);
                res.log_density.push_back(ld);
            }
        }
        for (int c = 0; c < 2 * N; ++c) {
            const double rate = tried[c] ? static_cast<double>(acc[c]) / static_cast<double>(tried[c]) : 0.0;
            if (rate == 0)
                throw NumericalError("sample: zero acceptance after adaptation for coordinate " + std::to_string(c));
            res.acceptance.push_back(rate);
        }
        res.step_scale = scale;
        return res;
    }

    const Weight& alpha() const { return m_alpha; }
    const Weight& beta() const { return m_beta; }

private:
    GasState initial_state() const
    {
        GasState s;
        for (int i = 0; i < m_cfg.N; ++i) {
            s.x.push_back(start_point(m_alpha, i));
            s.y.push_back(start_point(m_beta, i));
        }
        return s;
    }
    double start_point(const Weight& w, int i) const
    {
        const auto& iv = w.support().front();
        const double lo = to_double(to_real(iv.lo));
        const double hi = iv.hi ? to_double(to_real(*iv.hi)) : lo + 2.0 * (m_cfg.N + 1);
        return lo + (hi - lo) * (i + 1) / (m_cfg.N + 1);
    }

    Weight m_alpha, m_beta;
    ChainSettings m_cfg;
};

// Batch-means estimate of a chain average and its standard error
struct MeanEstimate {
    double mean = 0, stderr_ = 0;
};

inline MeanEstimate batch_mean(const std::vector<double>& v, int batches = 50)
{
    MeanEstimate e;
    const std::size_t n = v.size();
    if (n == 0)
        return e;
    for (double x : v)
        e.mean += x;
    e.mean /= static_cast<double>(n);
    const std::size_t b = std::max<std::size_t>(1, n / static_cast<std::size_t>(batches));
    const std::size_t k = n / b;
    if (k < 2)
        return e;
    double ss = 0;
    for (std::size_t i = 0; i < k; ++i) {
        double m = 0;
        for (std::size_t j = 0; j < b; ++j)
            m += v[i * b + j];
        m /= static_cast<double>(b);
        ss += (m - e.mean) * (m - e.mean);
    }
    e.stderr_ = std::sqrt(ss / static_cast<double>(k - 1) / static_cast<double>(k));
    return e;
}

using ComplexMatrixD = Eigen::MatrixXcd;

// QR of a complex Ginibre matrix, phases of diag(R) moved into Q
inline ComplexMatrixD haar_unitary(int N, std::mt19937_64& gen)
{
    std::normal_distribution<double> normal(0.0, std::sqrt(0.5));
    ComplexMatrixD z(N, N);
    for (int i = 0; i < N; ++i)
        for (int j = 0; j < N; ++j)
            z(i, j) = {normal(gen), normal(gen)};
    Eigen::HouseholderQR<ComplexMatrixD> qr(z);
    ComplexMatrixD q = qr.householderQ();
    const ComplexMatrixD r = qr.matrixQR().triangularView<Eigen::Upper>();
    for (int j = 0; j < N; ++j) {
        const auto d = r(j, j);
        q.col(j) *= d / std::abs(d);
    }
    return q;
}

inline ComplexMatrixD haar_unitary(int N, std::uint64_t seed)
{
    auto gen = make_stream(seed, 0);
    return haar_unitary(N, gen);
}

// Unitarity, the column-norm mean 1/N, and uniform eigenvalue phases (chi^2, N = 2)
inline Report verify_haar(int N, int draws, std::uint64_t seed)
{
    Report rep;
    auto gen = make_stream(seed, 1);
    double worst = 0;
    std::vector<double> u11;
    const int bins = 16;
    std::vector<long> counts(bins, 0);
    for (int d = 0; d < draws; ++d) {
        auto u = haar_unitary(N, gen);
        worst = std::max(worst, (u.adjoint() * u - ComplexMatrixD::Identity(N, N)).cwiseAbs().maxCoeff());
        u11.push_back(std::norm(u(0, 0)));
        Eigen::ComplexEigenSolver<ComplexMatrixD> es(u, false);
        for (int k = 0; k < N; ++k) {
            double t = std::arg(es.eigenvalues()(k)) + M_PI;
            counts[std::min(bins - 1, static_cast<int>(t / (2 * M_PI) * bins))]++;
        }
    }
    const std::string pt = "N=" + std::to_string(N) + " draws=" + std::to_string(draws);
    rep.add("haar_unitarity", pt, worst, 1e-12);
    auto m = batch_mean(u11);
    const double sd = std::sqrt((1.0 / N) * (1 - 1.0 / N) / (N + 1.0) / draws);
    rep.add("haar_column_norm", pt, std::abs(m.mean - 1.0 / N) / sd, 3.0,
            "mean |U_11|^2 = " + real_label(m.mean) + ", in units of the exact standard error");
    double chi2 = 0;
    const double expect = static_cast<double>(draws) * N / bins;
    for (long c : counts)
        chi2 += (c - expect) * (c - expect) / expect;
    boost::math::chi_squared dist(bins - 1);
    const double p = 1 - boost::math::cdf(dist, chi2);
    rep.add("haar_phase_uniformity", pt, 0.01 / std::max(p, 1e-300), 1.0, "chi2 p-value " + real_label(p));
    return rep;
}

// Closed form of \int dU det(X + U Y U^*)^{-N}: det[1/(x_i + y_j)] / (Delta(X) Delta(Y))
inline double harnad_orlov_rhs(const std::vector<double>& xs, const std::vector<double>& ys)
{
    const std::size_t N = xs.size();
    Eigen::MatrixXd k(N, N);
    for (std::size_t i = 0; i < N; ++i)
        for (std::size_t j = 0; j < N; ++j)
            k(i, j) = 1 / (xs[i] + ys[j]);
    double vx = 1, vy = 1;
    for (std::size_t i = 0; i < N; ++i)
        for (std::size_t j = i + 1; j < N; ++j) {
            vx *= xs[j] - xs[i];
            vy *= ys[j] - ys[i];
        }
    return k.determinant() / (vx * vy);
}

inline Report harnad_orlov_check(const std::vector<double>& xs, const std::vector<double>& ys, long samples, std::uint64_t seed)
{
    const std::size_t N = xs.size();
    if (N == 0 || ys.size() != N)
        throw InputError("harnad-orlov: X and Y must have the same positive length");
    for (std::size_t i = 0; i < N; ++i) {
        if (!(xs[i] > 0) || !(ys[i] > 0))
            throw InputError("harnad-orlov: entries must be positive");
        for (std::size_t j = i + 1; j < N; ++j)
            if (xs[i] == xs[j] || ys[i] == ys[j])
                throw InputError("harnad-orlov: coincident entries");
    }
    Report rep;
    std::string pt = "N=" + std::to_string(N) + " X=(";
    for (std::size_t i = 0; i < N; ++i)
        pt += (i ? "," : "") + real_label(xs[i]);
    pt += ") Y=(";
    for (std::size_t i = 0; i < N; ++i)
        pt += (i ? "," : "") + real_label(ys[i]);
    pt += ")";
    const double rhs = harnad_orlov_rhs(xs, ys);
    if (N == 1) {
        // the unitary group of size one acts trivially
        rep.add("harnad_orlov_exact", pt, std::abs(1 / (xs[0] + ys[0]) - rhs) / rhs, 1e-15);
        return rep;
    }
    auto gen = make_stream(seed, 2);
    ComplexMatrixD X = ComplexMatrixD::Zero(N, N), Y = ComplexMatrixD::Zero(N, N);
    for (std::size_t i = 0; i < N; ++i) {
        X(i, i) = xs[i];
        Y(i, i) = ys[i];
    }
    std::vector<double> vals;
    vals.reserve(samples);
    for (long s = 0; s < samples; ++s) {
        auto u = haar_unitary(static_cast<int>(N), gen);
        const double d = (X + u * Y * u.adjoint()).determinant().real();
        vals.push_back(std::pow(d, -static_cast<double>(N)));
    }
    auto m = batch_mean(vals, 100);
    rep.add("harnad_orlov_mc", pt, std::abs(m.mean - rhs) / m.stderr_, 3.0,
            "mc " + real_label(m.mean) + " +- " + real_label(m.stderr_) + ", closed form " + real_label(rhs) +
                "; residual in standard errors");
    return rep;
}

// Kolmogorov-Smirnov distance of a sample against a continuous CDF
inline double ks_distance(std::vector<double> v, const std::function<double(double)>& cdf)
{
    std::sort(v.begin(), v.end());
    const double n = static_cast<double>(v.size());
    double d = 0;
    for (std::size_t i = 0; i < v.size(); ++i) {
        const double f = cdf(v[i]);
        d = std::max({d, std::abs(f - i / n), std::abs((i + 1) / n - f)});
    }
    return d;
}

// one-point marginal of the N = 1 Laguerre gas: density E_1(x), CDF 1 - e^{-x} + x E_1(x)
inline double laguerre_one_point_cdf(double x)
{
    if (x <= 0)
        return 0;
    return 1 - std::exp(-x) + x * boost::math::expint(1, x);
}

// Z_N by the harmonic-mean identity E_f[g/f] = 1/\int f with the normalised reference
// g = Delta(X)^2 alpha(X) Delta(Y)^2 beta(Y) / (Z_alpha Z_beta), Z_w = N! det[m_{i+j}]:
// g/f = prod (x_i + y_j) / (Z_alpha Z_beta) and \int f = N! Z_N.
struct ZEstimate {
    double value = 0, stderr_ = 0;
};

inline double hankel_normaliser(const Weight& w, int N, const QuadratureSettings& q)
{
    auto m = Measure::of(w, q).moments(2 * N);
    Matrix<Real> h(N, N);
    for (int i = 0; i < N; ++i)
        for (int j = 0; j < N; ++j)
            h(i, j) = m[i + j];
    return to_double(factorial_of<Real>(N) * determinant(h));
}

inline ZEstimate estimate_partition_function(const ChainResult& chain, double z_alpha, double z_beta)
{
    std::vector<double> ratio;
    ratio.reserve(chain.states.size());
    for (const auto& s : chain.states) {
        double p = 1;
        for (double x : s.x)
            for (double y : s.y)
                p *= x + y;
        ratio.push_back(p / (z_alpha * z_beta));
    }
    auto m = batch_mean(ratio);
    const double nf = to_double(factorial_of<Real>(static_cast<int>(chain.states.front().x.size())));
    ZEstimate z;
    z.value = 1 / (nf * m.mean);
    z.stderr_ = m.stderr_ / (nf * m.mean * m.mean);
    return z;
}

inline Report verify_partition_estimate(const ChainResult& chain, double exact, double z_alpha, double z_beta)
{
    Report rep;
    auto z = estimate_partition_function(chain, z_alpha, z_beta);
    rep.add("partition_function_mc", "N=" + std::to_string(chain.states.front().x.size()) + " samples=" + std::to_string(chain.states.size()),
            std::abs(z.value - exact) / z.stderr_, 3.0,
            "mc " + real_label(z.value) + " +- " + real_label(z.stderr_) + ", exact N! D_N = " + real_label(exact) +
                "; residual in standard errors");
    return rep;
}

// det[1/(x_i + y_j)]-average against N! prod 1/(x_j + y_j)-average for a symmetric test function
inline Report verify_symmetrization(const ChainResult& chain, const std::function<double(const GasState&)>& test)
{
    Report rep;
    std::vector<double> diff;
    const std::size_t N = chain.states.front().x.size();
    const double nf = to_double(factorial_of<Real>(static_cast<int>(N)));
    for (const auto& s : chain.states) {
        Eigen::MatrixXd k(N, N);
        double diag = 1;
        for (std::size_t i = 0; i < N; ++i) {
            for (std::size_t j = 0; j < N; ++j)
                k(i, j) = 1 / (s.x[i] + s.y[j]);
            diag *= k(i, i);
        }
        const double f = test(s);
        diff.push_back(f - nf * f * diag / k.determinant());
    }
    auto m = batch_mean(diff);
    rep.add("symmetrization", "N=" + std::to_string(N) + " samples=" + std::to_string(chain.states.size()),
            std::abs(m.mean) / m.stderr_, 3.0, "mean gap " + real_label(m.mean) + " +- " + real_label(m.stderr_));
    return rep;
}

// Chi^2 of one (x, y) pair per recorded state against R^(1,1)/N^2 on a grid of cells plus the remainder.
inline Report verify_two_point(const ChainResult& chain, const CorrelationEngine& eng, const std::vector<double>& edges, int order = 8)
{
    Report rep;
    const int N = eng.N();
    const std::size_t cells = edges.size() - 1;
    std::vector<double> observed(cells * cells + 1, 0.0);
    for (const auto& s : chain.states) {
        auto locate = [&](double v) -> long {
            if (v < edges.front() || v >= edges.back())
                return -1;
            return std::upper_bound(edges.begin(), edges.end(), v) - edges.begin() - 1;
        };
        long i = locate(s.x[0]), j = locate(s.y[0]);
        if (i < 0 || j < 0)
            observed.back() += 1;
        else
            observed[i * cells + j] += 1;
    }
    // cells touching 0 are split geometrically: the density has a logarithmic corner there
    auto pieces = [](double a, double b) {
        std::vector<std::pair<double, double>> out;
        if (a > 0) {
            out.emplace_back(a, b);
            return out;
        }
        double hi = b;
        for (int k = 0; k < 5; ++k, hi /= 6)
            out.emplace_back(hi / 6, hi);
        out.emplace_back(0.0, hi);
        return out;
    };
    const GaussRule& g = gauss_legendre(order);
    const double total = static_cast<double>(chain.states.size());
    std::vector<double> expected(cells * cells + 1, 0.0);
    double inside = 0;
    for (std::size_t i = 0; i < cells; ++i)
        for (std::size_t j = 0; j < cells; ++j) {
            double v = 0;
            for (const auto& [ax, bx] : pieces(edges[i], edges[i + 1]))
                for (const auto& [ay, by] : pieces(edges[j], edges[j + 1]))
                    for (int a = 0; a < order; ++a)
                        for (int b = 0; b < order; ++b) {
                            const double x = 0.5 * (ax + bx) + 0.5 * (bx - ax) * to_double(g.nodes[a]);
                            const double y = 0.5 * (ay + by) + 0.5 * (by - ay) * to_double(g.nodes[b]);
                            const double w = 0.25 * (bx - ax) * (by - ay) * to_double(g.weights[a] * g.weights[b]);
                            v += w * to_double(eng.correlation({Real(x)}, {Real(y)}));
                        }
            v /= static_cast<double>(N) * N;
            expected[i * cells + j] = v * total;
            inside += v;
        }
    expected.back() = (1 - inside) * total;
    double chi2 = 0;
    for (std::size_t c = 0; c < expected.size(); ++c)
        chi2 += (observed[c] - expected[c]) * (observed[c] - expected[c]) / expected[c];
    boost::math::chi_squared dist(static_cast<double>(expected.size() - 1));
    const double p = 1 - boost::math::cdf(dist, chi2);
    rep.add("two_point_chi2", "N=" + std::to_string(N) + " cells=" + std::to_string(expected.size()), 0.01 / std::max(p, 1e-300),
            1.0, "chi2 " + real_label(chi2) + ", p-value " + real_label(p) + "; residual is 0.01/p");
    return rep;
}

}  // namespace cauchy2mm

#endif
