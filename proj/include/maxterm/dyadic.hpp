/**
 * @file dyadic.hpp
 * @brief Exact binary floating values mantissa * 2^exponent.
 *
 * Dyadics are the midpoint and radius type of the ball arithmetic. Ring
 * operations are exact; rounding only happens through the explicit round(),
 * quotient and square root helpers, each of which takes a direction.
 */
#pragma once

#include <gmpxx.h>

#include <algorithm>
#include <cmath>
#include <compare>
#include <cstdint>
#include <string>

#include "maxterm/error.hpp"
#include "maxterm/rational.hpp"

namespace maxterm {

enum class Rounding { Floor, Ceil, Nearest };

class Dyadic {
public:
    Dyadic() = default;
    Dyadic(long value) : man_(value) { normalize(); } // NOLINT(google-explicit-constructor)
    explicit Dyadic(mpz_class mantissa, std::int64_t exponent = 0)
        : man_(std::move(mantissa)), exp_(exponent) {
        normalize();
    }

    static Dyadic pow2(std::int64_t e) { return Dyadic(mpz_class(1), e); }

    const mpz_class& mantissa() const { return man_; }
    std::int64_t exponent() const { return exp_; }

    int sign() const { return sgn(man_); }
    bool is_zero() const { return sgn(man_) == 0; }

    /// Number of significant bits in the mantissa (0 for zero).
    std::int64_t bits() const {
        return is_zero() ? 0 : static_cast<std::int64_t>(mpz_sizeinbase(man_.get_mpz_t(), 2));
    }

    /// Smallest k with |x| < 2^k. Meaningless for zero.
    std::int64_t magnitude() const { return exp_ + bits(); }

    Dyadic operator-() const {
        Dyadic r = *this;
        r.man_ = -r.man_;
        return r;
    }
    Dyadic abs() const {
        Dyadic r = *this;
        r.man_ = ::abs(r.man_);
        return r;
    }

    /// Multiplies by 2^k exactly.
    Dyadic ldexp(std::int64_t k) const {
        if (is_zero()) return *this;
        Dyadic r = *this;
        r.exp_ += k;
        return r;
    }

    friend Dyadic operator+(const Dyadic& a, const Dyadic& b) {
        if (a.is_zero()) return b;
        if (b.is_zero()) return a;
        mpz_class sum;
        std::int64_t e;
        if (a.exp_ >= b.exp_) {
            mpz_mul_2exp(sum.get_mpz_t(), a.man_.get_mpz_t(), static_cast<mp_bitcnt_t>(a.exp_ - b.exp_));
            sum += b.man_;
            e = b.exp_;
        } else {
            mpz_mul_2exp(sum.get_mpz_t(), b.man_.get_mpz_t(), static_cast<mp_bitcnt_t>(b.exp_ - a.exp_));
            sum += a.man_;
            e = a.exp_;
        }
        return Dyadic(std::move(sum), e);
    }
    friend Dyadic operator-(const Dyadic& a, const Dyadic& b) { return a + (-b); }
    friend Dyadic operator*(const Dyadic& a, const Dyadic& b) {
        if (a.is_zero() || b.is_zero()) return Dyadic();
        Dyadic r;
        r.man_ = a.man_ * b.man_;
        r.exp_ = a.exp_ + b.exp_;
        return r; // product of odd mantissas is odd
    }

    friend bool operator==(const Dyadic& a, const Dyadic& b) {
        return a.man_ == b.man_ && a.exp_ == b.exp_;
    }
    friend std::strong_ordering operator<=>(const Dyadic& a, const Dyadic& b) {
        const int c = (a - b).sign();
        if (c < 0) return std::strong_ordering::less;
        if (c > 0) return std::strong_ordering::greater;
        return std::strong_ordering::equal;
    }

    Rational to_rational() const {
        if (exp_ >= 0) {
            mpz_class n;
            mpz_mul_2exp(n.get_mpz_t(), man_.get_mpz_t(), static_cast<mp_bitcnt_t>(exp_));
            return Rational(n);
        }
        mpz_class d;
        mpz_setbit(d.get_mpz_t(), static_cast<mp_bitcnt_t>(-exp_));
        return Rational(man_, d);
    }

    /// Closest double (not used for any rigorous decision).
    double to_double() const {
        if (is_zero()) return 0.0;
        long e = 0;
        const double m = mpz_get_d_2exp(&e, man_.get_mpz_t());
        return std::ldexp(m, static_cast<int>(e + exp_));
    }

    /// Keeps at most `nbits` significant bits, rounding in the given direction.
    Dyadic round(std::int64_t nbits, Rounding mode) const {
        const std::int64_t excess = bits() - nbits;
        if (excess <= 0) return *this;
        mpz_class m;
        const auto shift = static_cast<mp_bitcnt_t>(excess);
        switch (mode) {
        case Rounding::Floor:
            mpz_fdiv_q_2exp(m.get_mpz_t(), man_.get_mpz_t(), shift);
            break;
        case Rounding::Ceil:
            mpz_cdiv_q_2exp(m.get_mpz_t(), man_.get_mpz_t(), shift);
            break;
        case Rounding::Nearest: {
            mpz_class half;
            mpz_setbit(half.get_mpz_t(), shift - 1);
            mpz_class t = man_ + half;
            mpz_fdiv_q_2exp(m.get_mpz_t(), t.get_mpz_t(), shift);
            break;
        }
        }
        return Dyadic(std::move(m), exp_ + excess);
    }

    /// num/den * 2^shift rounded to `nbits` significant bits. den must be nonzero.
    static Dyadic quotient(const mpz_class& num, const mpz_class& den, std::int64_t shift,
                           std::int64_t nbits, Rounding mode) {
        if (den == 0) throw DomainError("dyadic quotient with zero denominator");
        if (num == 0) return Dyadic();
        const auto nb = static_cast<std::int64_t>(mpz_sizeinbase(num.get_mpz_t(), 2));
        const auto db = static_cast<std::int64_t>(mpz_sizeinbase(den.get_mpz_t(), 2));
        // scale so that the integer quotient carries at least nbits + 2 bits
        const std::int64_t s = std::max<std::int64_t>(0, nbits + 2 - (nb - db));
        mpz_class scaled;
        mpz_mul_2exp(scaled.get_mpz_t(), num.get_mpz_t(), static_cast<mp_bitcnt_t>(s));
        mpz_class q, r;
        mpz_class d = den;
        if (d < 0) {
            d = -d;
            scaled = -scaled;
        }
        mpz_fdiv_qr(q.get_mpz_t(), r.get_mpz_t(), scaled.get_mpz_t(), d.get_mpz_t());
        if (r != 0) {
            // exact value lies strictly inside (q, q+1); q has >= nbits + 2 bits, so the
            // sticky value q + 1/2 rounds to the same nbits result in every mode
            q = 2 * q + 1;
            return Dyadic(std::move(q), shift - s - 1).round(nbits, mode);
        }
        return Dyadic(std::move(q), shift - s).round(nbits, mode);
    }

    static Dyadic from_rational(const Rational& q, std::int64_t nbits, Rounding mode) {
        return quotient(q.num(), q.den(), 0, nbits, mode);
    }

    static Dyadic div(const Dyadic& a, const Dyadic& b, std::int64_t nbits, Rounding mode) {
        if (b.is_zero()) throw DomainError("dyadic division by zero");
        return quotient(a.man_, b.man_, a.exp_ - b.exp_, nbits, mode);
    }

    /// Square root of a non-negative dyadic, rounded to nbits significant bits.
    static Dyadic sqrt(const Dyadic& x, std::int64_t nbits, Rounding mode) {
        if (x.sign() < 0) throw DomainError("square root of a negative dyadic");
        if (x.is_zero()) return Dyadic();
        std::int64_t t = std::max<std::int64_t>(0, 2 * nbits + 4 - x.bits());
        if (((x.exp_ - t) & 1) != 0) ++t;
        mpz_class n;
        mpz_mul_2exp(n.get_mpz_t(), x.man_.get_mpz_t(), static_cast<mp_bitcnt_t>(t));
        mpz_class root, rem;
        mpz_sqrtrem(root.get_mpz_t(), rem.get_mpz_t(), n.get_mpz_t());
        const std::int64_t e = (x.exp_ - t) / 2;
        if (rem != 0) {
            // sticky bit, as in quotient()
            root = 2 * root + 1;
            return Dyadic(std::move(root), e - 1).round(nbits, mode);
        }
        return Dyadic(std::move(root), e).round(nbits, mode);
    }

    /// Decimal rendering with `digits` significant digits in fixed notation
    /// (scientific for very large or small magnitudes).
    std::string to_decimal(int digits, Rounding mode = Rounding::Nearest) const;

private:
    void normalize() {
        if (man_ == 0) {
            exp_ = 0;
            return;
        }
        const auto tz = mpz_scan1(man_.get_mpz_t(), 0);
        if (tz > 0) {
            mpz_tdiv_q_2exp(man_.get_mpz_t(), man_.get_mpz_t(), tz);
            exp_ += static_cast<std::int64_t>(tz);
        }
    }

    mpz_class man_;
    std::int64_t exp_ = 0;
};

/// Decimal rendering of an exact rational with `digits` significant digits.
inline std::string to_decimal(const Rational& value, int digits, Rounding mode = Rounding::Nearest) {
    if (digits < 1) digits = 1;
    if (value.is_zero()) {
        std::string s = "0";
        if (digits > 1) s += "." + std::string(static_cast<std::size_t>(digits - 1), '0');
        return s;
    }
    const bool negative = value.sign() < 0;
    const mpq_class a = ::abs(value.value());
    // decimal exponent d with 10^d <= a < 10^(d+1)
    long d = 0;
    {
        const double approx = static_cast<double>(mpz_sizeinbase(a.get_num_mpz_t(), 2)) -
                              static_cast<double>(mpz_sizeinbase(a.get_den_mpz_t(), 2));
        d = static_cast<long>(std::floor(approx * 0.30102999566398120));
        auto pow10 = [](long k) {
            mpz_class p;
            mpz_ui_pow_ui(p.get_mpz_t(), 10, static_cast<unsigned long>(k < 0 ? -k : k));
            return k < 0 ? mpq_class(mpz_class(1), p) : mpq_class(p);
        };
        while (pow10(d) > a) --d;
        while (pow10(d + 1) <= a) ++d;
    }
    // scaled = a * 10^(digits-1-d), rounded to an integer
    const long k = digits - 1 - d;
    mpz_class p10;
    mpz_ui_pow_ui(p10.get_mpz_t(), 10, static_cast<unsigned long>(k < 0 ? -k : k));
    mpz_class num = a.get_num();
    mpz_class den = a.get_den();
    if (k >= 0) num *= p10; else den *= p10;
    Rounding m = mode;
    if (negative && mode == Rounding::Floor) m = Rounding::Ceil;
    else if (negative && mode == Rounding::Ceil) m = Rounding::Floor;
    mpz_class q, r;
    mpz_fdiv_qr(q.get_mpz_t(), r.get_mpz_t(), num.get_mpz_t(), den.get_mpz_t());
    if (r != 0) {
        if (m == Rounding::Ceil || (m == Rounding::Nearest && 2 * r >= den)) q += 1;
    }
    std::string body = q.get_str();
    if (static_cast<int>(body.size()) > digits) { // rounding carried into a new digit
        body.pop_back();
        ++d;
    }
    std::string out = negative ? "-" : "";
    if (d >= -6 && d < digits) {
        if (d >= 0) {
            out += body.substr(0, static_cast<std::size_t>(d + 1));
            if (static_cast<int>(body.size()) > d + 1) out += "." + body.substr(static_cast<std::size_t>(d + 1));
        } else {
            out += "0." + std::string(static_cast<std::size_t>(-d - 1), '0') + body;
        }
    } else {
        out += body.substr(0, 1);
        if (body.size() > 1) out += "." + body.substr(1);
        out += "e" + std::to_string(d);
    }
    return out;
}

inline std::string Dyadic::to_decimal(int digits, Rounding mode) const {
    return maxterm::to_decimal(to_rational(), digits, mode);
}

} // namespace maxterm
