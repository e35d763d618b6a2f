#ifndef CAUCHY2MM_SCALAR_HPP
#define CAUCHY2MM_SCALAR_HPP

#include <boost/multiprecision/gmp.hpp>
#include <boost/multiprecision/mpfr.hpp>
#include <boost/math/constants/constants.hpp>

#include <cmath>
#include <complex>
#include <cstdlib>
#include <optional>
#include <stdexcept>
#include <string>
#include <type_traits>

namespace cauchy2mm {

namespace bmp = boost::multiprecision;

using Rational = bmp::number<bmp::gmp_rational, bmp::et_off>;
using Integer = bmp::number<bmp::gmp_int, bmp::et_off>;
using Real = bmp::number<bmp::mpfr_float_backend<0>, bmp::et_off>;
using Complex = std::complex<Real>;

// Bad user input: malformed weights, parameters out of range, wrong shapes.
struct InputError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Numerical breakdown: singular systems, divergence, non-convergence.
struct NumericalError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class Mode { exact, big_float };

struct ScalarContext {
    Mode mode = Mode::big_float;
    unsigned bits = 256;
    std::optional<double> tolerance_override;

    // 2^(8 - bits) unless overridden
    Real tolerance() const
    {
        if (tolerance_override)
            return Real(*tolerance_override);
        return ldexp(Real(1), 8 - static_cast<int>(bits));
    }

    // Target for quadrature sums; never finer than about 1e-30.
    Real quadrature_tolerance() const
    {
        int e = static_cast<int>(bits) - 8;
        if (e > 100)
            e = 100;
        return ldexp(Real(1), -e);
    }

    bool exact() const { return mode == Mode::exact; }

    static unsigned bits_from_env(unsigned fallback = 256)
    {
        const char* v = std::getenv("CAUCHY_PRECISION_BITS");
        if (!v || !*v)
            return fallback;
        char* end = nullptr;
        long b = std::strtol(v, &end, 10);
        if (*end != '\0' || b < 64 || b > 100000)
            throw InputError("CAUCHY_PRECISION_BITS must be an integer >= 64");
        return static_cast<unsigned>(b);
    }
};

inline unsigned digits10_for_bits(unsigned bits)
{
    return static_cast<unsigned>(std::ceil(bits * 0.30102999566398120)) + 1;
}

// Sets the working precision of Real for the lifetime of the object.
class PrecisionScope {
public:
    explicit PrecisionScope(unsigned bits) : saved_(Real::default_precision())
    {
        if (bits < 64)
            throw InputError("precision_bits must be >= 64");
        Real::default_precision(digits10_for_bits(bits));
    }
    ~PrecisionScope() { Real::default_precision(saved_); }
    PrecisionScope(const PrecisionScope&) = delete;
    PrecisionScope& operator=(const PrecisionScope&) = delete;

private:
    unsigned saved_;
};

inline unsigned working_bits()
{
    return static_cast<unsigned>(Real(1).backend().data()[0]._mpfr_prec);
}

template <class T>
inline constexpr bool is_exact_v = std::is_same_v<T, Rational> || std::is_same_v<T, Integer>;

template <class T>
inline constexpr bool is_complex_v = std::is_same_v<T, Complex> || std::is_same_v<T, std::complex<double>>;

inline Real to_real(const Rational& q) { return Real(q); }
inline Real to_real(const Real& x) { return x; }
inline Real to_real(double x) { return Real(x); }

inline Real pi_real() { return boost::math::constants::pi<Real>(); }

// |z| without the double-precision fallbacks of the generic complex code
inline Real cabs(const Complex& z) { return sqrt(z.real() * z.real() + z.imag() * z.imag()); }

inline Real magnitude(const Rational& q) { return to_real(abs(q)); }
inline Real magnitude(const Real& x) { return abs(x); }
inline Real magnitude(const Complex& z) { return cabs(z); }
inline double magnitude(double x) { return std::abs(x); }
inline double magnitude(const std::complex<double>& z) { return std::abs(z); }

inline Complex cdiv(const Complex& a, const Complex& b)
{
    Real d = b.real() * b.real() + b.imag() * b.imag();
    return {(a.real() * b.real() + a.imag() * b.imag()) / d, (a.imag() * b.real() - a.real() * b.imag()) / d};
}

inline Complex cinv(const Complex& b)
{
    Real d = b.real() * b.real() + b.imag() * b.imag();
    return {b.real() / d, -b.imag() / d};
}

inline Complex cpow(const Complex& z, int k)
{
    Complex r(1), b = z;
    bool neg = k < 0;
    unsigned e = static_cast<unsigned>(neg ? -k : k);
    while (e) {
        if (e & 1u)
            r *= b;
        b *= b;
        e >>= 1u;
    }
    return neg ? cinv(r) : r;
}

inline Rational parse_rational(const std::string& s)
{
    try {
        auto slash = s.find('/');
        if (slash == std::string::npos)
            return Rational(Integer(s));
        const Integer den(s.substr(slash + 1));
        if (den == 0)
            throw InputError("zero denominator in '" + s + "'");
        return Rational(Integer(s.substr(0, slash)), den);
    } catch (const InputError&) {
        throw;
    } catch (const std::exception&) {
        throw InputError("not a rational literal: '" + s + "'");
    }
}

inline Rational rational_from_double(double v)
{
    if (!std::isfinite(v))
        throw InputError("non-finite number");
    return Rational(v);
}

inline std::string to_string(const Rational& q) { return q.str(); }
inline std::string to_string(const Real& x, int digits = 40) { return x.str(digits, std::ios_base::scientific); }

inline double to_double(const Rational& q) { return q.convert_to<double>(); }
inline double to_double(const Real& x) { return x.convert_to<double>(); }
inline double to_double(double x) { return x; }

}  // namespace cauchy2mm

#endif
