/**
 * @file ball.hpp
 * @brief Midpoint-radius ball arithmetic over dyadics.
 *
 * A RealBall [m +/- r] denotes {x : |x - m| <= r}. Every operation returns a
 * ball containing the exact result for all exact inputs in the operand balls:
 * midpoints are rounded to the working precision and the rounding error is
 * added to the radius, radii are only ever rounded up.
 */
#pragma once

#include <gmpxx.h>

#include <cmath>
#include <cstdint>
#include <map>
#include <mutex>
#include <ostream>
#include <utility>

#include "maxterm/dyadic.hpp"
#include "maxterm/error.hpp"
#include "maxterm/rational.hpp"

namespace maxterm {

/// Working precision of ball midpoints, in bits.
struct Precision {
    std::int64_t bits;

    explicit Precision(std::int64_t b) : bits(b) {
        if (b < 16) throw DomainError("precision must be at least 16 bits");
    }

    /// ceil(digits * log2(10)) + 10 guard bits.
    static Precision from_digits(int digits) {
        if (digits < 1) throw DomainError("precision must be at least one decimal digit");
        const double exact = static_cast<double>(digits) * 3.32192809488736234787;
        return Precision(static_cast<std::int64_t>(std::ceil(exact)) + 10);
    }

    Precision operator+(std::int64_t extra) const { return Precision(bits + extra); }
};

/// Radii carry this many significant bits; they are always rounded upward.
inline constexpr std::int64_t kRadiusBits = 32;

class RealBall {
public:
    RealBall() = default;
    RealBall(long value) : mid_(value) {} // NOLINT(google-explicit-constructor)
    explicit RealBall(Dyadic mid, const Dyadic& rad = Dyadic()) : mid_(std::move(mid)) {
        if (rad.sign() < 0) throw DomainError("ball radius must be non-negative");
        rad_ = rad.round(kRadiusBits, Rounding::Ceil);
    }

    const Dyadic& mid() const { return mid_; }
    const Dyadic& rad() const { return rad_; }

    Dyadic lower() const { return mid_ - rad_; }
    Dyadic upper() const { return mid_ + rad_; }
    /// Upper bound on |x| over the ball.
    Dyadic mag() const { return mid_.abs() + rad_; }

    bool is_exact() const { return rad_.is_zero(); }
    bool contains(const Dyadic& x) const { return lower() <= x && x <= upper(); }
    bool contains(const Rational& x) const {
        return lower().to_rational() <= x && x <= upper().to_rational();
    }
    bool contains_zero() const { return mid_.abs() <= rad_; }

    friend bool operator==(const RealBall&, const RealBall&) = default;

    friend std::ostream& operator<<(std::ostream& os, const RealBall& b) {
        return os << "[" << b.mid_.to_decimal(30) << " +/- " << b.rad_.to_decimal(3, Rounding::Ceil) << "]";
    }

private:
    Dyadic mid_;
    Dyadic rad_;
};

namespace detail {

inline Dyadic mag_up(const Dyadic& x) { return x.abs().round(kRadiusBits, Rounding::Ceil); }
inline Dyadic mag_down(const Dyadic& x) { return x.abs().round(kRadiusBits, Rounding::Floor); }

/// Rounds an exact midpoint to p bits and folds the rounding error into the radius.
inline RealBall make_rounded(const Dyadic& exact_mid, const Dyadic& rad, Precision p) {
    Dyadic m = exact_mid.round(p.bits, Rounding::Nearest);
    Dyadic err = (exact_mid - m).abs();
    return RealBall(std::move(m), rad + err);
}

} // namespace detail

/// Enclosure of q; exact when q is dyadic with at most p + 1 significant bits.
inline RealBall ball_from_rational(const Rational& q, Precision p) {
    const Dyadic lo = Dyadic::from_rational(q, p.bits + 1, Rounding::Floor);
    const Dyadic hi = Dyadic::from_rational(q, p.bits + 1, Rounding::Ceil);
    return RealBall(lo, hi - lo);
}

inline RealBall ball_from_dyadic(const Dyadic& d, Precision p) { return detail::make_rounded(d, Dyadic(), p); }

inline RealBall neg(const RealBall& a) { return RealBall(-a.mid(), a.rad()); }

inline RealBall add(const RealBall& a, const RealBall& b, Precision p) {
    return detail::make_rounded(a.mid() + b.mid(), a.rad() + b.rad(), p);
}

inline RealBall sub(const RealBall& a, const RealBall& b, Precision p) {
    return detail::make_rounded(a.mid() - b.mid(), a.rad() + b.rad(), p);
}

inline RealBall mul(const RealBall& a, const RealBall& b, Precision p) {
    using detail::mag_up;
    Dyadic rad;
    if (!b.rad().is_zero()) rad = rad + mag_up(a.mid()) * b.rad();
    if (!a.rad().is_zero()) rad = rad + mag_up(b.mid()) * a.rad() + a.rad() * b.rad();
    return detail::make_rounded(a.mid() * b.mid(), rad, p);
}

/// Division; throws DomainError unless the divisor is certainly nonzero.
inline RealBall div(const RealBall& a, const RealBall& b, Precision p) {
    using detail::mag_up;
    const Dyadic bm = b.mid().abs();
    if (!(bm > b.rad())) throw DomainError("ball division by an enclosure that contains zero");
    const Dyadic lo = Dyadic::div(a.mid(), b.mid(), p.bits, Rounding::Floor);
    const Dyadic hi = Dyadic::div(a.mid(), b.mid(), p.bits, Rounding::Ceil);
    Dyadic rad = hi - lo;
    if (!a.rad().is_zero() || !b.rad().is_zero()) {
        // |x/y - am/bm| <= (ar |bm| + |am| br) / ((|bm| - br) |bm|)
        const Dyadic num = (a.rad() * mag_up(bm) + mag_up(a.mid()) * b.rad()).round(kRadiusBits, Rounding::Ceil);
        const Dyadic den = detail::mag_down(bm - b.rad()) * detail::mag_down(bm);
        rad = rad + Dyadic::div(num, den, kRadiusBits, Rounding::Ceil);
    }
    return RealBall(lo, rad);
}

inline RealBall mul_rational(const RealBall& a, const Rational& q, Precision p) {
    return mul(a, ball_from_rational(q, p), p);
}

/// Exact multiplication by an integer, then rounding.
inline RealBall mul_integer(const RealBall& a, const mpz_class& k, Precision p) {
    const Dyadic kd(k);
    return detail::make_rounded(a.mid() * kd, a.rad() * kd.abs(), p);
}

/// Ball intersected with [-1, 1] (used for cosine and sine outputs). The result
/// lies inside [-1, 1] exactly: its radius is rounded up first and the midpoint
/// is then moved inward as far as needed.
inline RealBall clamp_unit(const RealBall& b) {
    const Dyadic one(1);
    Dyadic lo = b.lower();
    Dyadic hi = b.upper();
    if (lo >= -one && hi <= one) return b;
    if (lo < -one) lo = -one;
    if (hi > one) hi = one;
    if (lo > hi) throw PrecisionError("enclosure does not meet [-1, 1]");
    const Dyadic rad = detail::mag_up((hi - lo).ldexp(-1));
    if (rad >= one) return RealBall(Dyadic(), one);
    Dyadic mid = (lo + hi).ldexp(-1);
    if (mid + rad > one) mid = one - rad;
    if (mid - rad < -one) mid = rad - one;
    return RealBall(std::move(mid), rad);
}

// ----------------------------------------------------------------------------
// pi

namespace detail {

/// Fixed-point atan(1/x) * 2^w for integer x >= 5, with error bound in ulps.
inline std::pair<mpz_class, std::uint64_t> atan_inv_fixed(unsigned long x, std::int64_t w) {
    mpz_class t;
    mpz_setbit(t.get_mpz_t(), static_cast<mp_bitcnt_t>(w));
    mpz_fdiv_q_ui(t.get_mpz_t(), t.get_mpz_t(), x);
    mpz_class sum = t;
    mpz_class term;
    const unsigned long x2 = x * x;
    std::uint64_t k = 1;
    for (;; ++k) {
        mpz_fdiv_q_ui(t.get_mpz_t(), t.get_mpz_t(), x2);
        if (t == 0) break;
        mpz_fdiv_q_ui(term.get_mpz_t(), t.get_mpz_t(), 2 * k + 1);
        if (k & 1) sum -= term; else sum += term;
    }
    // each t carries < 2 ulps, each term < 3; the omitted tail is below the last t
    return {sum, 3 * (k + 1) + 2};
}

inline RealBall compute_pi(Precision p) {
    const std::int64_t w = p.bits + 32;
    auto [a5, e5] = atan_inv_fixed(5, w);
    auto [a239, e239] = atan_inv_fixed(239, w);
    mpz_class s = 16 * a5 - 4 * a239;
    const std::uint64_t err = 16 * e5 + 4 * e239;
    return make_rounded(Dyadic(s, -w), Dyadic(mpz_class(static_cast<unsigned long>(err)), -w), p);
}

} // namespace detail

/// Enclosure of pi with radius at most 2^(4 - bits). Cached per precision.
inline RealBall ball_pi(Precision p) {
    static std::mutex lock;
    static std::map<std::int64_t, RealBall> cache;
    std::lock_guard<std::mutex> guard(lock);
    auto it = cache.find(p.bits);
    if (it == cache.end()) it = cache.emplace(p.bits, detail::compute_pi(p)).first;
    return it->second;
}

// ----------------------------------------------------------------------------
// cosine and sine

namespace detail {

struct FixedSinCos {
    mpz_class cos;
    mpz_class sin;
    std::uint64_t cos_err;
    std::uint64_t sin_err;
};

/// Taylor series for cos and sin of t = u * 2^-w with |t| <= 3.2, in w-bit fixed point.
///
/// With X = t^2, each term is T_k = floor(floor(T_{k-1} * u2 / 2^w) / c_k) where
/// u2 = floor(u^2 / 2^w). The error d_k of T_k obeys d_k <= a_k d_{k-1} + 3 with
/// a_1 <= 6 and a_k <= 1 for k >= 2 (because X <= 10.25), so d_k <= 3k. Summation
/// stops at the first k with T_k = 0; the exact omitted term, which bounds the
/// Lagrange remainder, is then at most d_k. Total error <= 2k(k+1) + 2 ulps.
inline FixedSinCos sincos_fixed(const mpz_class& u, std::int64_t w) {
    const auto shift = static_cast<mp_bitcnt_t>(w);
    mpz_class au = ::abs(u);
    {
        mpz_class limit;
        mpz_setbit(limit.get_mpz_t(), shift + 4); // 16 * 2^w
        if (5 * au > limit) throw DomainError("sincos_fixed argument outside |t| <= 3.2");
    }
    mpz_class u2 = au * au;
    mpz_fdiv_q_2exp(u2.get_mpz_t(), u2.get_mpz_t(), shift);

    FixedSinCos out;
    mpz_class term;
    // cos
    mpz_setbit(term.get_mpz_t(), shift);
    out.cos = term;
    std::uint64_t k = 1;
    for (;; ++k) {
        term *= u2;
        mpz_fdiv_q_2exp(term.get_mpz_t(), term.get_mpz_t(), shift);
        mpz_fdiv_q_ui(term.get_mpz_t(), term.get_mpz_t(), (2 * k - 1) * (2 * k));
        if (term == 0) break;
        if (k & 1) out.cos -= term; else out.cos += term;
    }
    out.cos_err = 2 * k * (k + 1) + 2;
    // sin
    term = au;
    out.sin = term;
    for (k = 1;; ++k) {
        term *= u2;
        mpz_fdiv_q_2exp(term.get_mpz_t(), term.get_mpz_t(), shift);
        mpz_fdiv_q_ui(term.get_mpz_t(), term.get_mpz_t(), (2 * k) * (2 * k + 1));
        if (term == 0) break;
        if (k & 1) out.sin -= term; else out.sin += term;
    }
    out.sin_err = 2 * k * (k + 1) + 2;
    if (sgn(u) < 0) out.sin = -out.sin;
    return out;
}

/// cos and sin of every point of x. Both outputs lie inside [-1, 1] up to rounding.
inline std::pair<RealBall, RealBall> sincos(const RealBall& x, Precision p) {
    const std::int64_t w = p.bits + 64;
    const Dyadic& m = x.mid();
    Dyadic t_mid = m;
    Dyadic t_rad;
    if (m.abs() > Dyadic(3)) {
        // reduce modulo 2 pi; the error of the pi enclosure is scaled by |k|
        const std::int64_t extra = std::max<std::int64_t>(0, m.magnitude());
        const RealBall two_pi = mul_integer(ball_pi(Precision(w + extra)), mpz_class(2), Precision(w + extra + 2));
        const Dyadic q = Dyadic::div(m, two_pi.mid(), std::max<std::int64_t>(64, extra + 8), Rounding::Nearest);
        mpz_class k;
        {
            const Dyadic shifted = q + Dyadic(mpz_class(1), -1);
            const Rational r = shifted.to_rational();
            mpz_fdiv_q(k.get_mpz_t(), r.num().get_mpz_t(), r.den().get_mpz_t());
        }
        const Dyadic kd(k);
        t_mid = m - kd * two_pi.mid();
        t_rad = kd.abs() * two_pi.rad();
    }
    mpz_class u;
    {
        const std::int64_t e = t_mid.exponent() + w;
        if (e >= 0) {
            mpz_mul_2exp(u.get_mpz_t(), t_mid.mantissa().get_mpz_t(), static_cast<mp_bitcnt_t>(e));
        } else {
            mpz_fdiv_q_2exp(u.get_mpz_t(), t_mid.mantissa().get_mpz_t(), static_cast<mp_bitcnt_t>(-e));
            t_rad = t_rad + Dyadic::pow2(-w); // fixed-point truncation of the argument
        }
    }
    const FixedSinCos f = sincos_fixed(u, w);
    // both functions are 1-Lipschitz, so argument uncertainty passes straight through
    const Dyadic arg_rad = t_rad + x.rad();
    const Dyadic cos_rad = Dyadic(mpz_class(static_cast<unsigned long>(f.cos_err)), -w) + arg_rad;
    const Dyadic sin_rad = Dyadic(mpz_class(static_cast<unsigned long>(f.sin_err)), -w) + arg_rad;
    return {clamp_unit(make_rounded(Dyadic(f.cos, -w), cos_rad, p)),
            clamp_unit(make_rounded(Dyadic(f.sin, -w), sin_rad, p))};
}

} // namespace detail

inline RealBall ball_cos(const RealBall& x, Precision p) { return detail::sincos(x, p).first; }
inline RealBall ball_sin(const RealBall& x, Precision p) { return detail::sincos(x, p).second; }

// ----------------------------------------------------------------------------
// complex balls

/// Rectangle re x im of complex numbers.
class ComplexBall {
public:
    ComplexBall() = default;
    ComplexBall(long re) : re_(re) {} // NOLINT(google-explicit-constructor)
    ComplexBall(RealBall re, RealBall im) : re_(std::move(re)), im_(std::move(im)) {}
    explicit ComplexBall(RealBall re) : re_(std::move(re)) {}

    const RealBall& re() const { return re_; }
    const RealBall& im() const { return im_; }

    bool contains_zero() const { return re_.contains_zero() && im_.contains_zero(); }
    bool contains(const Rational& re, const Rational& im) const { return re_.contains(re) && im_.contains(im); }

    friend bool operator==(const ComplexBall&, const ComplexBall&) = default;

    friend std::ostream& operator<<(std::ostream& os, const ComplexBall& z) {
        return os << z.re_ << " + i" << z.im_;
    }

private:
    RealBall re_;
    RealBall im_;
};

inline ComplexBall add(const ComplexBall& a, const ComplexBall& b, Precision p) {
    return {add(a.re(), b.re(), p), add(a.im(), b.im(), p)};
}

inline ComplexBall sub(const ComplexBall& a, const ComplexBall& b, Precision p) {
    return {sub(a.re(), b.re(), p), sub(a.im(), b.im(), p)};
}

inline ComplexBall neg(const ComplexBall& a) { return {neg(a.re()), neg(a.im())}; }
inline ComplexBall conj(const ComplexBall& a) { return {a.re(), neg(a.im())}; }

/// (a + bi)(c + di) from the four real products.
inline ComplexBall mul(const ComplexBall& a, const ComplexBall& b, Precision p) {
    const Precision q = p + 8;
    const RealBall ac = mul(a.re(), b.re(), q);
    const RealBall bd = mul(a.im(), b.im(), q);
    const RealBall ad = mul(a.re(), b.im(), q);
    const RealBall bc = mul(a.im(), b.re(), q);
    return {sub(ac, bd, p), add(ad, bc, p)};
}

inline ComplexBall scale(const ComplexBall& a, const RealBall& s, Precision p) {
    return {mul(a.re(), s, p), mul(a.im(), s, p)};
}

/// Squared modulus as a real ball.
inline RealBall norm(const ComplexBall& z, Precision p) {
    return add(mul(z.re(), z.re(), p + 8), mul(z.im(), z.im(), p + 8), p);
}

/// 1/z; throws DomainError unless z is certainly nonzero.
inline ComplexBall inv(const ComplexBall& z, Precision p) {
    const RealBall n = norm(z, p + 8);
    if (n.contains_zero()) throw DomainError("complex inversion of an enclosure that contains zero");
    return {div(z.re(), n, p), neg(div(z.im(), n, p))};
}

/// e^{ix} for every x in the ball.
inline ComplexBall exp_i(const RealBall& x, Precision p) {
    auto [c, s] = detail::sincos(x, p);
    return {std::move(c), std::move(s)};
}

/// Upper bound on sup{|w| : w in z}.
inline Dyadic abs_upper(const ComplexBall& z) {
    const Dyadic x = z.re().mag();
    const Dyadic y = z.im().mag();
    const std::int64_t nbits = std::max<std::int64_t>({x.bits(), y.bits(), 64}) + 8;
    return Dyadic::sqrt(x * x + y * y, nbits, Rounding::Ceil);
}

/// Lower bound on inf{|w| : w in z}.
inline Dyadic abs_lower(const ComplexBall& z) {
    auto low = [](const RealBall& b) {
        const Dyadic d = b.mid().abs() - b.rad();
        return d.sign() > 0 ? d : Dyadic();
    };
    const Dyadic x = low(z.re());
    const Dyadic y = low(z.im());
    const std::int64_t nbits = std::max<std::int64_t>({x.bits(), y.bits(), 64}) + 8;
    return Dyadic::sqrt(x * x + y * y, nbits, Rounding::Floor);
}

// ----------------------------------------------------------------------------
// conservative comparisons: true only when the claim holds for the whole enclosure

inline bool certainly_le(const Dyadic& u, const Rational& c) { return u.to_rational() <= c; }
inline bool certainly_lt(const Dyadic& u, const Rational& c) { return u.to_rational() < c; }
inline bool certainly_ge(const Dyadic& u, const Rational& c) { return u.to_rational() >= c; }
inline bool certainly_gt(const Dyadic& u, const Rational& c) { return u.to_rational() > c; }

inline bool certainly_le(const RealBall& b, const Rational& c) { return certainly_le(b.upper(), c); }
inline bool certainly_lt(const RealBall& b, const Rational& c) { return certainly_lt(b.upper(), c); }
inline bool certainly_ge(const RealBall& b, const Rational& c) { return certainly_ge(b.lower(), c); }
inline bool certainly_gt(const RealBall& b, const Rational& c) { return certainly_gt(b.lower(), c); }
inline bool certainly_ne(const RealBall& b, const Rational& c) { return certainly_lt(b, c) || certainly_gt(b, c); }

} // namespace maxterm
