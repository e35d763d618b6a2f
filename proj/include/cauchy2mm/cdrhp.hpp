#ifndef CAUCHY2MM_CDRHP_HPP
#define CAUCHY2MM_CDRHP_HPP

/*
 * Transform vectors, Christoffel-Darboux matrices and the two 3x3
 * Riemann-Hilbert matrices built from a window n-2, n-1, n of a family.
 *
 *   q^(1)(w) = C_beta[q](w)
 *   q^(2)(w) = \int alpha(x) q^(1)(-x) / (w + x) dx
 *   p^(1)(z) = C_alpha[p](z),          p^(2) likewise with alpha, beta exchanged
 *   p^^(1)(z) = C_alpha[p^](z) - 1,    p^^(2)(z) = \int beta(y) p^^(1)(-y) / (z + y) dy
 *
 * The second transforms are evaluated through the Stieltjes products, e.g.
 *   q^(2)(w) = C_{alpha G_beta}[q(-.)](-w) + C_alpha[P(-.)](-w),
 * with P the polynomial part of C_beta[q].
 */

#include "bops.hpp"
#include "measures.hpp"

#include <cstdio>
#include <random>

namespace cauchy2mm {

using Triple = std::array<Complex, 3>;
using CMatrix = Matrix<Complex>;

inline std::string complex_label(const Complex& z)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6g%+.6gi", to_double(z.real()), to_double(z.imag()));
    return buf;
}

inline Real max_abs_entry(const CMatrix& m)
{
    Real r = 0;
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < m.cols(); ++j)
            r = std::max(r, cabs(m(i, j)));
    return r;
}

inline CMatrix complex_matrix(std::initializer_list<std::initializer_list<Complex>> rows)
{
    CMatrix m(rows.size(), rows.begin()->size());
    std::size_t i = 0;
    for (const auto& r : rows) {
        std::size_t j = 0;
        for (const auto& v : r)
            m(i, j++) = v;
        ++i;
    }
    return m;
}

inline CMatrix antidiagonal_J()
{
    CMatrix j(3, 3);
    j(0, 2) = j(1, 1) = j(2, 0) = Complex(1);
    return j;
}

inline CMatrix diag3(const Complex& a, const Complex& b, const Complex& c)
{
    CMatrix d(3, 3);
    d(0, 0) = a;
    d(1, 1) = b;
    d(2, 2) = c;
    return d;
}

class CDSystem {
public:
    template <class T>
    CDSystem(const BopFamily<T>& fam, WeylSystem weyl, int n) : m_weyl(std::move(weyl)), m_n(n)
    {
        if (n < 2 || n > fam.n_max - 1)
            throw InputError("window n must satisfy 2 <= n <= n_max - 1");
        std::vector<Real> ma, mb;
        for (const auto& v : fam.table.alpha_moments)
            ma.push_back(to_real(v));
        for (const auto& v : fam.table.beta_moments)
            mb.push_back(to_real(v));
        for (int k = 0; k <= n; ++k) {
            m_p.push_back(fam.p[k]);
            m_q.push_back(fam.q[k]);
            m_hat.push_back(fam.hat_p_real[k]);
            m_q_refl.push_back(fam.q[k].reflected());
            m_q_part.push_back(polynomial_part(fam.q[k], mb).reflected());
            m_p_refl.push_back(fam.p[k].reflected());
            m_p_part.push_back(polynomial_part(fam.p[k], ma).reflected());
            m_hat_refl.push_back(fam.hat_p_real[k].reflected());
            m_hat_part.push_back(polynomial_part(fam.hat_p_real[k], ma).reflected() + WeylSystem::one());
        }
        m_c = std::vector<Real>(fam.c.begin(), fam.c.begin() + n + 1);
        m_eta = std::vector<Real>(fam.eta.begin(), fam.eta.begin() + n + 1);
        m_x = fam.x_diag(n - 1);
    }

    int n() const { return m_n; }
    const WeylSystem& weyl() const { return m_weyl; }
    const Weight& alpha() const { return m_weyl.alpha().weight(); }
    const Weight& beta() const { return m_weyl.beta().weight(); }
    Real c(int k) const { return m_c.at(k); }

    // (q_k, q_k^(1), q_k^(2)) for k = 0..n
    std::vector<Triple> q_transforms(const Complex& w) const
    {
        auto t1 = m_weyl.C_beta(m_q, w);
        auto ta = m_weyl.C_ab(m_q_refl, -w);
        auto tb = m_weyl.C_alpha(m_q_part, -w);
        return assemble(m_q, w, t1, ta, tb, Complex(0));
    }
    std::vector<Triple> p_transforms(const Complex& z) const
    {
        auto t1 = m_weyl.C_alpha(m_p, z);
        auto ta = m_weyl.C_ba(m_p_refl, -z);
        auto tb = m_weyl.C_beta(m_p_part, -z);
        return assemble(m_p, z, t1, ta, tb, Complex(0));
    }
    std::vector<Triple> hat_transforms(const Complex& z) const
    {
        auto t1 = m_weyl.C_alpha(m_hat, z);
        auto ta = m_weyl.C_ba(m_hat_refl, -z);
        auto tb = m_weyl.C_beta(m_hat_part, -z);
        return assemble(m_hat, z, t1, ta, tb, Complex(-1));
    }

    // one-sided values at a real point on a cut: w0 > 0 on supp(beta), w0 < 0 on supp(alpha*)
    std::vector<Triple> q_boundary(const Real& w0, bool plus) const
    {
        return boundary_side(w0, plus, m_q, m_q_refl, m_q_part, Complex(0), true);
    }
    std::vector<Triple> hat_boundary(const Real& z0, bool plus) const
    {
        return boundary_side(z0, plus, m_hat, m_hat_refl, m_hat_part, Complex(-1), false);
    }

    CMatrix Y(const Complex& w) const { return window(q_transforms(w)); }
    CMatrix Y_hat(const Complex& z) const { return window(hat_transforms(z)); }

    // CD matrix; rows q_{n-2..n}, columns p^_{n-2..n}
    CMatrix A(const Complex& x) const
    {
        const int n = m_n;
        const Real k1 = m_c[n - 1] / m_c[n - 2], k2 = m_c[n] / m_c[n - 1];
        CMatrix a(3, 3);
        a(0, 1) = Complex(-k1 / m_eta[n - 1]);
        a(1, 1) = (x - Complex(m_x)) / Complex(m_eta[n - 1]) + Complex(k2 / m_eta[n]);
        a(1, 2) = Complex(-k2 / m_eta[n]);
        a(2, 0) = Complex(k2 / m_eta[n - 1]);
        return a;
    }

    CMatrix F(const Complex& w, const Complex& z) const
    {
        const Complex wb_w = m_weyl.weyl(WeylTag::beta, w), wbs_z = m_weyl.weyl(WeylTag::beta_star, z);
        const Complex wa_z = m_weyl.weyl(WeylTag::alpha, z), was_w = m_weyl.weyl(WeylTag::alpha_star, w);
        const Complex wasb_w = m_weyl.weyl(WeylTag::alpha_star_beta, w), wbsa_z = m_weyl.weyl(WeylTag::beta_star_alpha, z);
        return complex_matrix({{Complex(0), Complex(0), Complex(1)},
                               {Complex(0), Complex(1), wbs_z + wb_w},
                               {Complex(1), wa_z + was_w, was_w * wbs_z + wasb_w + wbsa_z}});
    }

    CMatrix gamma_prefactor() const
    {
        const int n = m_n;
        const Real sgn = (n % 2 == 0) ? Real(1) : Real(-1);
        auto l = complex_matrix({{Complex(1), Complex(-m_c[n] * m_eta[n]), Complex(0)},
                                 {Complex(0), Complex(1), Complex(0)},
                                 {Complex(0), Complex(sgn * m_eta[n - 2] / m_c[n - 2]), Complex(1)}});
        auto m0 = complex_matrix({{Complex(0), Complex(0), Complex(m_c[n])},
                                  {Complex(0), Complex(1 / m_eta[n - 1]), Complex(0)},
                                  {Complex(-sgn / m_c[n - 2]), Complex(0), Complex(0)}});
        return l * m0;
    }

    CMatrix gamma_hat_prefactor() const
    {
        const int n = m_n;
        const Real sgn = (n % 2 == 0) ? Real(1) : Real(-1);
        auto m0 = complex_matrix({{Complex(0), Complex(0), Complex(-m_c[n] / m_eta[n])},
                                  {Complex(0), Complex(-1), Complex(0)},
                                  {Complex(sgn / (m_c[n - 1] * m_eta[n - 1])), Complex(0), Complex(0)}});
        auto m1 = complex_matrix({{Complex(1), Complex(-1), Complex(0)},
                                  {Complex(0), Complex(1), Complex(0)},
                                  {Complex(0), Complex(-1), Complex(1)}});
        return m0 * m1;
    }

    CMatrix Gamma(const Complex& w) const { return gamma_prefactor() * Y(w); }
    CMatrix Gamma_hat(const Complex& z) const { return gamma_hat_prefactor() * Y_hat(z); }
    CMatrix Gamma_boundary(const Real& w0, bool plus) const { return gamma_prefactor() * window(q_boundary(w0, plus)); }
    CMatrix Gamma_hat_boundary(const Real& z0, bool plus) const
    {
        return gamma_hat_prefactor() * window(hat_boundary(z0, plus));
    }

    // H_n(z, w) = J Gamma^(-w)^{-1} Gamma^(z) / (z + w)
    CMatrix matrix_kernel(const Complex& z, const Complex& w) const
    {
        if (cabs(z + w) == 0)
            throw InputError("matrix kernel: z = -w");
        return cdiv(Complex(1), z + w) * (antidiagonal_J() * inverse3(Gamma_hat(-w)) * Gamma_hat(z));
    }

    // sum_{j<n} q_j^(mu)(w) p_j^(nu)(z), all nine (mu, nu)
    CMatrix cd_sums(const std::vector<Triple>& qs, const std::vector<Triple>& ps) const
    {
        CMatrix s(3, 3);
        for (int j = 0; j < m_n; ++j)
            for (int mu = 0; mu < 3; ++mu)
                for (int nu = 0; nu < 3; ++nu)
                    s(mu, nu) += qs[j][mu] * ps[j][nu];
        return s;
    }

    CMatrix window(const std::vector<Triple>& t) const
    {
        CMatrix y(3, 3);
        for (int r = 0; r < 3; ++r)
            for (int mu = 0; mu < 3; ++mu)
                y(r, mu) = t[m_n - 2 + r][mu];
        return y;
    }

private:
    static std::vector<Triple> assemble(const std::vector<Polynomial<Real>>& fs, const Complex& u, const std::vector<Complex>& t1,
                                        const std::vector<Complex>& ta, const std::vector<Complex>& tb, const Complex& shift)
    {
        std::vector<Triple> out;
        for (std::size_t k = 0; k < fs.size(); ++k)
            out.push_back({fs[k](u), t1[k] + shift, ta[k] + tb[k]});
        return out;
    }

    // q family: first transform on beta, second through (ab, alpha); hat family: (alpha), (ba, beta)
    std::vector<Triple> boundary_side(const Real& u0, bool plus, const std::vector<Polynomial<Real>>& fs,
                                      const std::vector<Polynomial<Real>>& refl, const std::vector<Polynomial<Real>>& part,
                                      const Complex& shift, bool q_family) const
    {
        std::vector<Complex> t1, ta, tb;
        if (u0 > 0) {
            auto b = q_family ? m_weyl.B_beta(fs, u0) : m_weyl.B_alpha(fs, u0);
            t1 = plus ? b.plus : b.minus;
            const Complex m(-u0);
            ta = q_family ? m_weyl.C_ab(refl, m) : m_weyl.C_ba(refl, m);
            tb = q_family ? m_weyl.C_alpha(part, m) : m_weyl.C_beta(part, m);
        } else {
            t1 = q_family ? m_weyl.C_beta(fs, Complex(u0)) : m_weyl.C_alpha(fs, Complex(u0));
            // u0 + i0 maps to -u0 - i0 on the reflected cut
            const Real x0 = -u0;
            auto ba = q_family ? m_weyl.B_ab(refl, x0) : m_weyl.B_ba(refl, x0);
            auto bb = q_family ? m_weyl.B_alpha(part, x0) : m_weyl.B_beta(part, x0);
            ta = plus ? ba.minus : ba.plus;
            tb = plus ? bb.minus : bb.plus;
        }
        return assemble(fs, Complex(u0), t1, ta, tb, shift);
    }

    WeylSystem m_weyl;
    int m_n;
    std::vector<Polynomial<Real>> m_p, m_q, m_hat;
    std::vector<Polynomial<Real>> m_q_refl, m_q_part, m_p_refl, m_p_part, m_hat_refl, m_hat_part;
    std::vector<Real> m_c, m_eta;
    Real m_x;
};

struct SamplePair {
    Complex z, w;
};

// Off-axis complex pairs, Re in [-3, 3], |Im| in [0.3, 3], z + w bounded away from 0
inline std::vector<SamplePair> random_sample_pairs(int count, std::uint64_t seed)
{
    std::mt19937_64 gen(seed);
    std::uniform_real_distribution<double> re(-3, 3), im(0.3, 3);
    std::bernoulli_distribution flip(0.5);
    auto draw = [&] {
        // doubles rounded to 1/1024 so every point prints and reparses exactly
        double r = std::round(re(gen) * 1024) / 1024, i = std::round(im(gen) * 1024) / 1024;
        return Complex(Real(r), Real(flip(gen) ? -i : i));
    };
    std::vector<SamplePair> out;
    while (static_cast<int>(out.size()) < count) {
        SamplePair s{draw(), draw()};
        if (cabs(s.z + s.w) > Real("0.25"))
            out.push_back(s);
    }
    return out;
}

// Christoffel-Darboux identities for all (mu, nu), duality, and the matrix kernel against the CD sums.
inline Report verify_cd_duality(const CDSystem& sys, const std::vector<SamplePair>& samples, double tol,
                                const std::string& tag = "")
{
    Report rep;
    const CMatrix J = antidiagonal_J();
    const std::string win = "n=" + std::to_string(sys.n()) + " ";
    for (const auto& s : samples) {
        const std::string pt = win + "z=" + complex_label(s.z) + " w=" + complex_label(s.w);
        auto qs = sys.q_transforms(s.w);
        auto ps = sys.p_transforms(s.z);
        const CMatrix yw = sys.window(qs), yhz = sys.window(sys.hat_transforms(s.z));
        const CMatrix yhmw = sys.window(sys.hat_transforms(-s.w));
        const CMatrix a = sys.A(-s.w);
        const CMatrix sums = sys.cd_sums(qs, ps);
        const CMatrix f = sys.F(s.w, s.z);
        const CMatrix rhs = yw.transpose() * a * yhz - f;
        Real cd = 0;
        for (int mu = 0; mu < 3; ++mu)
            for (int nu = 0; nu < 3; ++nu) {
                Complex lhs = (s.z + s.w) * sums(mu, nu);
                Real scale = std::max({Real(1), cabs(lhs), cabs(f(mu, nu))});
                cd = std::max(cd, Real(cabs(lhs - rhs(mu, nu)) / scale));
            }
        rep.add("cd_identity" + tag, pt, cd, tol, "max over (mu,nu) in {0,1,2}^2");

        const CMatrix dual = yw.transpose() * a * yhmw - J;
        rep.add("perfect_duality" + tag, win + "w=" + complex_label(s.w), max_abs_entry(dual), tol);

        // H_n(z, w) via Gamma^ inversion against sum + F / (z + w)
        const CMatrix h = cdiv(Complex(1), s.z + s.w) * (J * inverse3(yhmw) * yhz);
        Real hk = 0;
        for (int mu = 0; mu < 3; ++mu)
            for (int nu = 0; nu < 3; ++nu) {
                Complex ref = sums(mu, nu) + cdiv(f(mu, nu), s.z + s.w);
                hk = std::max(hk, Real(cabs(h(mu, nu) - ref) / std::max(Real(1), cabs(ref))));
            }
        rep.add("matrix_kernel" + tag, pt, hk, tol);
    }
    return rep;
}

// Interior sample points of a support, `count` of them
inline std::vector<Real> cut_points(const Weight& w, int count)
{
    std::vector<Real> pts;
    const auto& ivs = w.support();
    const int per = (count + static_cast<int>(ivs.size()) - 1) / static_cast<int>(ivs.size());
    static const char* offsets[] = {"0.5", "1", "2", "3", "5", "0.25", "7", "1.5"};
    for (const auto& iv : ivs) {
        const Real lo = to_real(iv.lo);
        for (int k = 0; k < per && static_cast<int>(pts.size()) < count; ++k) {
            if (iv.hi)
                pts.push_back(lo + (to_real(*iv.hi) - lo) * (k + 1) / (per + 1));
            else
                pts.push_back(lo + Real(offsets[k % 8]) * (1 + k / 8));
        }
    }
    return pts;
}

struct RhpSettings {
    int cut_samples = 5;
    double jump_tol = 1e-6;
    Real asymptotic_radius = Real("1e6");
    double asymptotic_tol = 1e-4;
    Real minor_radius = Real("1e4");
    double minor_tol = 1e-2;
    Real direction = Real("0.7");    // arg of the large test point
};

// Jumps of Gamma and Gamma^ on their cuts, normalisation at infinity, and the minor ratio.
inline Report verify_rhp(const CDSystem& sys, const RhpSettings& cfg = {})
{
    Report rep;
    const int n = sys.n();
    const std::string win = "n=" + std::to_string(n) + " ";
    const Complex two_pi_i(Real(0), 2 * pi_real());

    auto jump_check = [&](const std::string& name, const CMatrix& gp, const CMatrix& gm, int col_from, int col_to,
                          const Real& density, const std::string& pt) {
        CMatrix jump = CMatrix::identity(3);
        jump(col_from, col_to) = -two_pi_i * Complex(density);
        const CMatrix r = gp - gm * jump;
        rep.add(name, pt, max_abs_entry(r) / std::max(Real(1), max_abs_entry(gp)), cfg.jump_tol);
        const Complex dp = det3(gp), dm = det3(gm);
        rep.add(name + "_det", pt, cabs(dp - dm) / std::max(Real(1), cabs(dp)), cfg.jump_tol);
    };
    auto label = [&](const char* var, const Real& x) { return win + var + "=" + real_label(x); };

    for (const auto& y0 : cut_points(sys.beta(), cfg.cut_samples))
        jump_check("gamma_jump_beta", sys.Gamma_boundary(y0, true), sys.Gamma_boundary(y0, false), 0, 1, sys.beta().density(y0),
                   label("w", y0));
    for (const auto& x0 : cut_points(sys.alpha(), cfg.cut_samples))
        jump_check("gamma_jump_alpha_star", sys.Gamma_boundary(-x0, true), sys.Gamma_boundary(-x0, false), 1, 2,
                   sys.alpha().density(x0), label("w", Real(-x0)));
    for (const auto& x0 : cut_points(sys.alpha(), cfg.cut_samples))
        jump_check("gamma_hat_jump_alpha", sys.Gamma_hat_boundary(x0, true), sys.Gamma_hat_boundary(x0, false), 0, 1,
                   sys.alpha().density(x0), label("z", x0));
    for (const auto& y0 : cut_points(sys.beta(), cfg.cut_samples))
        jump_check("gamma_hat_jump_beta_star", sys.Gamma_hat_boundary(-y0, true), sys.Gamma_hat_boundary(-y0, false), 1, 2,
                   sys.beta().density(y0), label("z", Real(-y0)));

    const Complex dir(cos(cfg.direction), sin(cfg.direction));
    const Complex big = Complex(cfg.asymptotic_radius) * dir;
    const CMatrix g = sys.Gamma(big) * diag3(cpow(big, -n), big, cpow(big, n - 1));
    rep.add("gamma_asymptotics", win + "|w|=" + real_label(cfg.asymptotic_radius), max_abs_entry(g - CMatrix::identity(3)),
            cfg.asymptotic_tol);
    const CMatrix gh = sys.Gamma_hat(big) * diag3(cpow(big, -n), Complex(1), cpow(big, n));
    rep.add("gamma_hat_asymptotics", win + "|z|=" + real_label(cfg.asymptotic_radius), max_abs_entry(gh - CMatrix::identity(3)),
            cfg.asymptotic_tol);

    const Complex mid = Complex(cfg.minor_radius) * dir;
    const CMatrix gm = sys.Gamma(mid);
    const Complex ratio = Complex(n % 2 == 0 ? Real(1) : Real(-1)) * cpow(mid, 2 * n - 1) * cdiv(gm(1, 2), gm(1, 0));
    const Real c2 = sys.c(n - 1) * sys.c(n - 1);
    rep.add("minor_ratio", win + "|w|=" + real_label(cfg.minor_radius), cabs(ratio - Complex(c2)) / c2, cfg.minor_tol,
            "target c_{n-1}^2 = " + to_string(c2, 12));
    return rep;
}

}  // namespace cauchy2mm

#endif
