#ifndef CAUCHY2MM_CORRELATIONS_HPP
#define CAUCHY2MM_CORRELATIONS_HPP

/*
 * Partition function, the four Eynard-Mehta kernels and the mixed
 * correlation functions of the two spectra.
 *
 *   H00(x, y)  = sum_{j<N} p_j(x) q_j(y)
 *   H01(x, x') = -sum p_j(x) q_j^(1)(-x')          = \int H00(x, y) beta(y) / (x' + y) dy
 *   H10(y, y') = -sum q_j(y') p_j^(1)(-y)          = \int H00(x, y') alpha(x) / (x + y) dx
 *   H11(y, x)  =  sum p_j^(1)(-y) q_j^(1)(-x) - 1/(x + y)
 *
 *   R^(r,s)(X, Y) = alpha(X) beta(Y) det [[H01(x_i, x_j), H00(x_i, y_j)],
 *                                         [H11(y_i, x_j), H10(y_i, y_j)]]
 */

#include "cdrhp.hpp"

namespace cauchy2mm {

template <class T>
T factorial_of(int n)
{
    T f(1);
    for (int k = 2; k <= n; ++k)
        f *= T(k);
    return f;
}

// Z_N = N! D_N
template <class T>
T partition_function(const BimomentTable<T>& t, int N)
{
    if (N < 0 || N > t.n_max() + 1)
        throw InputError("partition function: N exceeds the bimoment table");
    return factorial_of<T>(N) * t.D(N);
}

class CorrelationEngine {
public:
    template <class T>
    CorrelationEngine(const BopFamily<T>& fam, WeylSystem weyl, int N) : m_weyl(std::move(weyl)), m_N(N)
    {
        if (N < 1 || N > fam.n_max + 1)
            throw InputError("correlations: N must satisfy 1 <= N <= n_max + 1");
        for (int j = 0; j < N; ++j) {
            m_p.push_back(fam.p[j]);
            m_q.push_back(fam.q[j]);
        }
        for (const auto& v : fam.table.alpha_moments)
            m_alpha_moments.push_back(to_real(v));
        for (const auto& v : fam.table.beta_moments)
            m_beta_moments.push_back(to_real(v));
    }

    int N() const { return m_N; }
    const WeylSystem& weyl() const { return m_weyl; }
    const std::vector<Polynomial<Real>>& p() const { return m_p; }
    const std::vector<Polynomial<Real>>& q() const { return m_q; }
    const std::vector<Real>& alpha_moments() const { return m_alpha_moments; }
    const std::vector<Real>& beta_moments() const { return m_beta_moments; }
    const Weight& alpha() const { return m_weyl.alpha().weight(); }
    const Weight& beta() const { return m_weyl.beta().weight(); }

    // per-point data: x -> (p_j(x), q_j^(1)(-x)),  y -> (q_j(y), p_j^(1)(-y))
    struct XData {
        std::vector<Complex> p0, q1;
    };
    struct YData {
        std::vector<Complex> q0, p1;
    };

    XData x_data(const Complex& x) const
    {
        XData d;
        for (const auto& p : m_p)
            d.p0.push_back(p(x));
        d.q1 = m_weyl.C_beta(m_q, -x);
        return d;
    }
    YData y_data(const Complex& y) const
    {
        YData d;
        for (const auto& q : m_q)
            d.q0.push_back(q(y));
        d.p1 = m_weyl.C_alpha(m_p, -y);
        return d;
    }

    static Complex dot(const std::vector<Complex>& a, const std::vector<Complex>& b)
    {
        Complex s(0);
        for (std::size_t j = 0; j < a.size(); ++j)
            s += a[j] * b[j];
        return s;
    }

    Complex H00(const Complex& x, const Complex& y) const { return dot(x_data(x).p0, y_data(y).q0); }
    Complex H01(const Complex& x, const Complex& xp) const { return -dot(x_data(x).p0, x_data(xp).q1); }
    Complex H10(const Complex& y, const Complex& yp) const { return -dot(y_data(yp).q0, y_data(y).p1); }
    Complex H11(const Complex& y, const Complex& x) const { return dot(y_data(y).p1, x_data(x).q1) - cinv(x + y); }

    // the (r+s) x (r+s) Eynard-Mehta block matrix
    CMatrix block_matrix(const std::vector<Real>& xs, const std::vector<Real>& ys) const
    {
        const std::size_t r = xs.size(), s = ys.size();
        std::vector<XData> xd;
        std::vector<YData> yd;
        for (const auto& x : xs)
            xd.push_back(x_data(Complex(x)));
        for (const auto& y : ys)
            yd.push_back(y_data(Complex(y)));
        CMatrix b(r + s, r + s);
        for (std::size_t i = 0; i < r; ++i) {
            for (std::size_t k = 0; k < r; ++k)
                b(i, k) = -dot(xd[i].p0, xd[k].q1);
            for (std::size_t k = 0; k < s; ++k)
                b(i, r + k) = dot(xd[i].p0, yd[k].q0);
        }
        for (std::size_t i = 0; i < s; ++i) {
            for (std::size_t k = 0; k < r; ++k)
                b(r + i, k) = dot(yd[i].p1, xd[k].q1) - Complex(1 / (xs[k] + ys[i]));
            for (std::size_t k = 0; k < s; ++k)
                b(r + i, r + k) = -dot(yd[k].q0, yd[i].p1);
        }
        return b;
    }

    Real correlation(const std::vector<Real>& xs, const std::vector<Real>& ys) const
    {
        if (xs.empty() && ys.empty())
            throw InputError("correlation: need at least one point");
        if (static_cast<int>(xs.size()) > m_N || static_cast<int>(ys.size()) > m_N)
            throw InputError("correlation: at most N points of each species");
        for (const auto& x : xs)
            if (!alpha().in_support(x))
                throw InputError("correlation: x point outside supp(alpha)");
        for (const auto& y : ys)
            if (!beta().in_support(y))
                throw InputError("correlation: y point outside supp(beta)");
        Real w = 1;
        for (const auto& x : xs)
            w *= alpha().density(x);
        for (const auto& y : ys)
            w *= beta().density(y);
        return w * determinant(block_matrix(xs, ys)).real();
    }

    // \int R^(1,0) dx and \int R^(0,1) dy through the Stieltjes-product moments
    Real one_point_mass(bool x_species) const
    {
        const Measure& prod = x_species ? m_weyl.ab() : m_weyl.ba();
        const auto& own = x_species ? m_p : m_q;
        const auto& other = x_species ? m_q : m_p;
        const auto& other_moments = x_species ? m_beta_moments : m_alpha_moments;
        const auto& own_moments = x_species ? m_alpha_moments : m_beta_moments;
        // R^(1,0)(x) = alpha(x) sum p_j(x) [q_j(-x) G_beta(x) + P_j(-x)],  P_j the polynomial part of C_beta[q_j]
        Polynomial<Real> singular, regular;
        for (int j = 0; j < m_N; ++j) {
            singular = singular + own[j] * other[j].reflected();
            regular = regular + own[j] * polynomial_part(other[j], other_moments).reflected();
        }
        auto pm = prod.moments(std::max(0, singular.degree()));
        return integrate_moments(singular, pm) + integrate_moments(regular, own_moments);
    }

private:
    WeylSystem m_weyl;
    int m_N;
    std::vector<Polynomial<Real>> m_p, m_q;
    std::vector<Real> m_alpha_moments, m_beta_moments;
};

// The same four kernels from ratios of Gamma^ at window N.
class GammaKernels {
public:
    explicit GammaKernels(CDSystem sys) : m_sys(std::move(sys)) {}

    Complex H00(const Complex& x, const Complex& y) const { return cdiv(entry(-y, x, 0, 0), x + y); }
    Complex H01(const Complex& x, const Complex& xp) const { return -cdiv(entry(xp, x, 1, 0), x - xp); }
    Complex H10(const Complex& y, const Complex& yp) const { return -cdiv(entry(-yp, -y, 0, 1), yp - y); }
    Complex H11(const Complex& y, const Complex& x) const { return -cdiv(entry(x, -y, 1, 1), x + y); }

private:
    Complex entry(const Complex& a, const Complex& b, int i, int j) const
    {
        return (antidiagonal_J() * inverse3(m_sys.Gamma_hat(a)) * m_sys.Gamma_hat(b))(i, j);
    }
    CDSystem m_sys;
};

struct KernelSample {
    Complex x, xp, y, yp;
};

inline std::vector<KernelSample> random_kernel_samples(int count, std::uint64_t seed)
{
    auto pairs = random_sample_pairs(2 * count, seed);
    std::vector<KernelSample> out;
    for (int i = 0; i < count; ++i)
        out.push_back({pairs[2 * i].z, pairs[2 * i].w, pairs[2 * i + 1].z, pairs[2 * i + 1].w});
    return out;
}

// Sum route against the Gamma^ route at complex sample points.
inline Report verify_kernel_routes(const CorrelationEngine& eng, const GammaKernels& gk, const std::vector<KernelSample>& samples,
                                   double tol)
{
    Report rep;
    const std::string win = "N=" + std::to_string(eng.N()) + " ";
    auto rel = [](const Complex& a, const Complex& b) { return cabs(a - b) / std::max(Real(1), cabs(a)); };
    for (const auto& s : samples) {
        const std::string pt = win + "x=" + complex_label(s.x) + " x'=" + complex_label(s.xp) + " y=" + complex_label(s.y) +
                               " y'=" + complex_label(s.yp);
        Real gap = std::max({rel(eng.H00(s.x, s.y), gk.H00(s.x, s.y)), rel(eng.H01(s.x, s.xp), gk.H01(s.x, s.xp)),
                             rel(eng.H10(s.y, s.yp), gk.H10(s.y, s.yp)), rel(eng.H11(s.y, s.x), gk.H11(s.y, s.x))});
        rep.add("kernel_routes", pt, gap, tol, "max over H00, H01, H10, H11");
    }
    return rep;
}

// det(block matrix) = det[H00(x_i, y_j)] det[1/(x_i + y_j)], plus the three-factor decomposition entrywise.
inline Report verify_block_identity(const CorrelationEngine& eng, const std::vector<Real>& xs, const std::vector<Real>& ys,
                                    double tol)
{
    const std::size_t N = xs.size();
    if (ys.size() != N || static_cast<int>(N) != eng.N())
        throw InputError("block identity: need N points of each species");
    for (std::size_t i = 0; i < N; ++i)
        for (std::size_t k = i + 1; k < N; ++k)
            if (xs[i] == xs[k] || ys[i] == ys[k])
                throw InputError("block identity: coincident points");
    Report rep;
    std::string pt = "N=" + std::to_string(N) + " x=(";
    for (std::size_t i = 0; i < N; ++i)
        pt += (i ? "," : "") + real_label(xs[i]);
    pt += ") y=(";
    for (std::size_t i = 0; i < N; ++i)
        pt += (i ? "," : "") + real_label(ys[i]);
    pt += ")";

    const CMatrix block = eng.block_matrix(xs, ys);
    CMatrix h00(N, N), cauchy(N, N);
    for (std::size_t i = 0; i < N; ++i)
        for (std::size_t k = 0; k < N; ++k) {
            h00(i, k) = block(i, N + k);
            cauchy(i, k) = Complex(1 / (xs[i] + ys[k]));
        }
    const Complex lhs = determinant(block), rhs = determinant(h00) * determinant(cauchy);
    rep.add("block_identity", pt, cabs(lhs - rhs) / std::max(cabs(lhs), cabs(rhs)), tol);

    // [[P0^T, 0], [-P1(-y)^T, I]] . [[0, I], [I, 0]] . [[-K, 0], [-Q1(-x), Q0(y)]],  K_ik = 1/(y_i + x_k)
    CMatrix m1(2 * N, 2 * N), sw(2 * N, 2 * N), m3(2 * N, 2 * N);
    for (std::size_t i = 0; i < N; ++i) {
        auto xd = eng.x_data(Complex(xs[i]));
        auto yd = eng.y_data(Complex(ys[i]));
        for (std::size_t j = 0; j < N; ++j) {
            m1(i, j) = xd.p0[j];
            m1(N + i, j) = -yd.p1[j];
            m3(N + j, i) = -xd.q1[j];
            m3(N + j, N + i) = yd.q0[j];
        }
        m1(N + i, N + i) = Complex(1);
        sw(i, N + i) = sw(N + i, i) = Complex(1);
        for (std::size_t k = 0; k < N; ++k)
            m3(i, k) = Complex(-1 / (ys[i] + xs[k]));
    }
    const CMatrix prod = m1 * sw * m3;
    rep.add("bruhat_factorisation", pt, max_abs_entry(prod - block) / max_abs_entry(block), tol);
    return rep;
}

// \int\int H00(x, z) H00(w, y) alpha(w) beta(z) / (z + w) = H00(x, y) via the pairing table
template <class T>
Report verify_reproducing(const BopFamily<T>& fam, int N, const std::vector<std::pair<Real, Real>>& points, double tol)
{
    Report rep;
    Matrix<Real> g(N, N);
    const auto table = fam.table.to_real().entries;
    for (int j = 0; j < N; ++j)
        for (int k = 0; k < N; ++k)
            g(j, k) = pairing(fam.p[k], fam.q[j], table);
    for (const auto& [x, y] : points) {
        Real direct = 0, twice = 0;
        for (int j = 0; j < N; ++j) {
            direct += fam.p[j](x) * fam.q[j](y);
            for (int k = 0; k < N; ++k)
                twice += fam.p[j](x) * g(j, k) * fam.q[k](y);
        }
        rep.add("reproducing_kernel", "N=" + std::to_string(N) + " x=" + real_label(x) + " y=" + real_label(y),
                abs(twice - direct) / std::max(Real(1), abs(direct)), tol);
    }
    return rep;
}

// \int H00(x, y) H11(y, x') beta(y) dy = 0, contracted through the ba-product moments
inline Report verify_annihilation(const CorrelationEngine& eng, const std::vector<std::pair<Real, Real>>& points, double tol)
{
    Report rep;
    const int N = eng.N();
    const auto& p = eng.p();
    const auto& q = eng.q();
    // M_jk = \int beta(y) q_j(y) p_k^(1)(-y) dy; biorthogonality makes it -delta_jk
    const auto bam = eng.weyl().ba().moments(2 * N);
    Matrix<Real> m(N, N);
    for (int j = 0; j < N; ++j)
        for (int k = 0; k < N; ++k)
            m(j, k) = -integrate_moments(q[j] * p[k].reflected(), bam) -
                      integrate_moments(q[j] * polynomial_part(p[k], eng.alpha_moments()).reflected(), eng.beta_moments());
    for (const auto& [x, xp] : points) {
        auto xd = eng.x_data(Complex(x));
        auto xpd = eng.x_data(Complex(xp));
        Complex total(0), scale(0);
        for (int j = 0; j < N; ++j) {
            Complex inner = xpd.q1[j];
            for (int k = 0; k < N; ++k)
                inner += Complex(m(j, k)) * xpd.q1[k];
            total += xd.p0[j] * inner;
            scale += xd.p0[j] * xpd.q1[j];
        }
        rep.add("kernel_annihilation", "N=" + std::to_string(N) + " x=" + real_label(x) + " x'=" + real_label(xp),
                cabs(total) / std::max(Real(1), cabs(scale)), tol);
    }
    return rep;
}

}  // namespace cauchy2mm

#endif
