/**
 * @file oracle.hpp
 * @brief High-precision reference evaluations (MPFR, round-to-nearest, no error
 *        tracking). Used by tests, the verify command and nothing rigorous.
 *
 * The code paths here deliberately share nothing with ball.hpp beyond the exact
 * Rational/Dyadic inputs, so a disagreement exposes a bug in one of them.
 */
#pragma once

#include <boost/multiprecision/mpfr.hpp>

#include <cstdint>
#include <string>
#include <vector>

#include "maxterm/dyadic.hpp"
#include "maxterm/error.hpp"
#include "maxterm/rational.hpp"
#include "maxterm/series.hpp"

namespace maxterm::oracle {

using Real = boost::multiprecision::mpfr_float;

/// Sets the default MPFR precision (decimal digits) for the lifetime of the scope.
class DigitsScope {
public:
    explicit DigitsScope(int digits) : saved_(Real::default_precision()) {
        Real::default_precision(static_cast<unsigned>(digits));
    }
    ~DigitsScope() { Real::default_precision(saved_); }
    DigitsScope(const DigitsScope&) = delete;
    DigitsScope& operator=(const DigitsScope&) = delete;

private:
    unsigned saved_;
};

struct Complex {
    Real re;
    Real im;
};

inline Complex operator+(const Complex& a, const Complex& b) { return {a.re + b.re, a.im + b.im}; }
inline Complex operator-(const Complex& a, const Complex& b) { return {a.re - b.re, a.im - b.im}; }
inline Complex operator*(const Complex& a, const Complex& b) {
    return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re};
}
inline Complex operator*(const Complex& a, const Real& s) { return {a.re * s, a.im * s}; }
inline Real abs(const Complex& z) { return boost::multiprecision::sqrt(z.re * z.re + z.im * z.im); }
inline Complex reciprocal(const Complex& z) {
    const Real n = z.re * z.re + z.im * z.im;
    return {z.re / n, -z.im / n};
}
inline Complex expi(const Real& t) { return {boost::multiprecision::cos(t), boost::multiprecision::sin(t)}; }

inline Complex ipow(Complex base, std::uint64_t e) {
    Complex acc{Real(1), Real(0)};
    while (e != 0) {
        if (e & 1U) acc = acc * base;
        e >>= 1U;
        if (e != 0) base = base * base;
    }
    return acc;
}

/// A non-rigorous complex value tagged with the digits it was computed at.
struct OracleValue {
    Real re;
    Real im;
    int digits = 0;

    Real abs() const { return oracle::abs(Complex{re, im}); }
    Complex value() const { return {re, im}; }
};

inline Real to_real(const Rational& q) {
    return Real(q.num().get_str()) / Real(q.den().get_str());
}

/// Exact conversion when the current precision holds all mantissa bits.
inline Real to_real(const Dyadic& d) {
    Real r;
    mpfr_set_z_2exp(r.backend().data(), d.mantissa().get_mpz_t(), static_cast<mpfr_exp_t>(d.exponent()), MPFR_RNDN);
    return r;
}

/// Exact conversion of an MPFR value to a dyadic.
inline Dyadic to_dyadic(const Real& x) {
    if (x == 0) return Dyadic();
    mpz_class m;
    const mpfr_exp_t e = mpfr_get_z_2exp(m.get_mpz_t(), x.backend().data());
    return Dyadic(m, static_cast<std::int64_t>(e));
}

inline Real pi() { return boost::math::constants::pi<Real>(); }

// ----------------------------------------------------------------------------
// series

/// P(theta) = 2 sum_{n<=N} e^{i alpha T_n} K^{-T_n} cos((2n+1) theta), naive summation.
inline OracleValue hp_eval_P(const Real& theta, const FamilyParams& params) {
    const Real K = to_real(params.K);
    const Real alpha = to_real(params.alpha);
    Complex sum{Real(0), Real(0)};
    for (int n = 0; n <= params.N; ++n) {
        const auto t = triangular(n);
        const Real modulus = boost::multiprecision::pow(K, Real(-t));
        const Real c = boost::multiprecision::cos(Real(2 * n + 1) * theta);
        sum = sum + expi(alpha * t) * (modulus * c);
    }
    return {2 * sum.re, 2 * sum.im, static_cast<int>(Real::default_precision())};
}

inline OracleValue hp_eval_P(const Rational& theta, const FamilyParams& params, int digits) {
    DigitsScope scope(digits);
    return hp_eval_P(to_real(theta), params);
}

/// A_n for n = -W..W, indexed by n + W.
struct LaurentCoeffs {
    int window = 0;
    std::vector<Complex> a;

    const Complex& at(long n) const { return a[static_cast<std::size_t>(n + window)]; }
};

inline LaurentCoeffs laurent_coeffs(const FamilyParams& params, int window) {
    const Real K = to_real(params.K);
    const Real alpha = to_real(params.alpha);
    LaurentCoeffs c;
    c.window = window;
    c.a.reserve(2 * static_cast<std::size_t>(window) + 1);
    for (long n = -window; n <= window; ++n)
        c.a.push_back(expi(alpha * (n * (n - 1) / 2)) * boost::multiprecision::pow(K, Real(-triangular(n))));
    return c;
}

/// sum_{n=-W}^{W} A_n z^n with A_n = e^{i alpha n(n-1)/2} K^{-T_n}.
inline Complex eval_k_window(const Complex& z, const LaurentCoeffs& c) {
    Complex sum = c.at(0);
    Complex power = z;
    for (long n = 1; n <= c.window; ++n) {
        sum = sum + c.at(n) * power;
        power = power * z;
    }
    const Complex zinv = reciprocal(z);
    power = zinv;
    for (long n = 1; n <= c.window; ++n) {
        sum = sum + c.at(-n) * power;
        power = power * zinv;
    }
    return sum;
}

inline OracleValue hp_eval_k(const Rational& re, const Rational& im, const FamilyParams& params, int window,
                             int digits) {
    if (re.is_zero() && im.is_zero()) throw DomainError("k is not defined at 0");
    DigitsScope scope(digits);
    const Complex v = eval_k_window({to_real(re), to_real(im)}, laurent_coeffs(params, window));
    return {v.re, v.im, digits};
}

/// f(z) = sum_{n=0}^{W} A_n z^n by Horner (the non-negative half of c).
inline Complex eval_f(const Complex& z, const LaurentCoeffs& c) {
    Complex acc{Real(0), Real(0)};
    for (long n = c.window; n >= 0; --n) acc = acc * z + c.at(n);
    return acc;
}

/// Ramanujan's Phi(a, b) = sum_{n=-W}^{W} a^{n(n+1)/2} b^{n(n-1)/2}, summed from its definition.
inline Complex theta_phi(const Complex& a, const Complex& b, int window) {
    Complex sum{Real(0), Real(0)};
    for (long n = -window; n <= window; ++n) {
        const auto ea = static_cast<std::uint64_t>(n * (n + 1) / 2);
        const auto eb = static_cast<std::uint64_t>(n * (n - 1) / 2);
        sum = sum + ipow(a, ea) * ipow(b, eb);
    }
    return sum;
}

/// Phi(q z, eps / z) with q = 1/K.
inline OracleValue hp_theta_at(const Rational& re, const Rational& im, const FamilyParams& params, int window,
                               int digits) {
    DigitsScope scope(digits);
    const Complex z{to_real(re), to_real(im)};
    const Real q = 1 / to_real(params.K);
    const Complex eps = expi(to_real(params.alpha));
    const Complex v = theta_phi(z * q, eps * reciprocal(z), window);
    return {v.re, v.im, digits};
}

// ----------------------------------------------------------------------------
// maximum modulus and the beta ratio

enum class Series { Bilateral, Entire };

struct ModulusOptions {
    Series series = Series::Bilateral;
    int window = 50;       ///< bilateral window, or extra terms beyond 3m for Entire
    int n_max = 0;         ///< Entire only: highest index kept
    bool refine = false;   ///< golden-section polish around the best sample
};

namespace detail {

inline Real modulus_at(const Real& r, const Real& theta, const LaurentCoeffs& c, Series series) {
    const Complex z = expi(theta) * r;
    return abs(series == Series::Entire ? eval_f(z, c) : eval_k_window(z, c));
}

} // namespace detail

/// max |g| over `samples` uniform points of |z| = r (g = k or f), optionally
/// polished by golden-section search in the neighbouring sample interval.
inline Real max_modulus(const Real& r, const FamilyParams& params, int samples, const ModulusOptions& opt) {
    if (samples < 64) throw DomainError("max_modulus needs at least 64 samples");
    const Real two_pi = 2 * pi();
    const LaurentCoeffs coeffs =
        laurent_coeffs(params, opt.series == Series::Entire ? opt.n_max : opt.window);
    auto at = [&](const Real& theta) { return detail::modulus_at(r, theta, coeffs, opt.series); };
    Real best = -1;
    Real best_theta = 0;
    for (int j = 0; j < samples; ++j) {
        const Real theta = two_pi * j / samples;
        Real v = at(theta);
        if (v > best) {
            best = v;
            best_theta = theta;
        }
    }
    if (!opt.refine) return best;
    const Real h = two_pi / samples;
    const Real g = (boost::multiprecision::sqrt(Real(5)) - 1) / 2;
    Real a = best_theta - h;
    Real b = best_theta + h;
    Real x1 = b - g * (b - a);
    Real x2 = a + g * (b - a);
    Real f1 = at(x1);
    Real f2 = at(x2);
    for (int it = 0; it < 100; ++it) {
        if (f1 < f2) {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + g * (b - a);
            f2 = at(x2);
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - g * (b - a);
            f1 = at(x1);
        }
    }
    const Real polished = f1 > f2 ? f1 : f2;
    return polished > best ? polished : best;
}

/// Sampled estimate of M(r, k) on the circle |z| = r.
inline OracleValue hp_max_modulus(const Rational& r, const FamilyParams& params, int samples, int digits,
                                  int window = 50) {
    if (r.sign() <= 0) throw DomainError("hp_max_modulus needs r > 0");
    DigitsScope scope(digits);
    ModulusOptions opt;
    opt.window = window;
    return {max_modulus(to_real(r), params, samples, opt), Real(0), digits};
}

/// mu(K^m, f) / M(K^m, f) with M estimated from samples plus local polishing;
/// f is truncated at index 3m + window.
inline OracleValue hp_beta_ratio(int m, const FamilyParams& params, int samples, int digits, int window = 50) {
    if (m < 1) throw DomainError("hp_beta_ratio needs m >= 1");
    DigitsScope scope(digits);
    ModulusOptions opt;
    opt.series = Series::Entire;
    opt.n_max = 3 * m + window;
    opt.refine = true;
    const Real r = to_real(params.K.pow(m));
    const Real mhat = max_modulus(r, params, samples, opt);
    const Real mu = to_real(mu_at_Km(m, params));
    return {mu / mhat, Real(0), digits};
}

} // namespace maxterm::oracle
