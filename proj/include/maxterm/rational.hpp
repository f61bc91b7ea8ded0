/**
 * @file rational.hpp
 * @brief Exact arbitrary-precision rationals.
 *
 * Every exact input of a certification run (K, alpha, targets) and every exact
 * bound (tail, Lipschitz constant, maximum term) is a Rational. Values are kept
 * in canonical form: positive denominator, numerator and denominator coprime.
 */
#pragma once

#include <gmpxx.h>

#include <cctype>
#include <compare>
#include <cstdint>
#include <ostream>
#include <string>
#include <string_view>

#include "maxterm/error.hpp"

namespace maxterm {

class Rational {
public:
    Rational() = default;
    Rational(long value) : q_(value) {} // NOLINT(google-explicit-constructor)
    explicit Rational(const mpz_class& integer) : q_(integer) {}

    /// Builds num/den in canonical form. Throws DomainError if den == 0.
    Rational(const mpz_class& num, const mpz_class& den) {
        if (den == 0) throw DomainError("rational with zero denominator");
        q_ = mpq_class(num, den);
        q_.canonicalize();
    }

    static Rational from_mpq(mpq_class q) {
        q.canonicalize();
        Rational r;
        r.q_ = std::move(q);
        return r;
    }

    /// Parses a finite decimal literal such as "-3.56850" or "12" exactly.
    static Rational from_decimal(std::string_view text);

    /// Accepts "p/q" or a decimal literal.
    static Rational parse(std::string_view text);

    const mpq_class& value() const { return q_; }
    mpz_class num() const { return q_.get_num(); }
    mpz_class den() const { return q_.get_den(); }

    int sign() const { return sgn(q_); }
    bool is_zero() const { return sgn(q_) == 0; }
    bool is_integer() const { return q_.get_den() == 1; }

    Rational operator-() const { return from_mpq(-q_); }
    Rational abs() const { return from_mpq(::abs(q_)); }

    Rational& operator+=(const Rational& o) { q_ += o.q_; return *this; }
    Rational& operator-=(const Rational& o) { q_ -= o.q_; return *this; }
    Rational& operator*=(const Rational& o) { q_ *= o.q_; return *this; }
    Rational& operator/=(const Rational& o) {
        if (o.is_zero()) throw DomainError("rational division by zero");
        q_ /= o.q_;
        return *this;
    }

    friend Rational operator+(Rational a, const Rational& b) { return a += b; }
    friend Rational operator-(Rational a, const Rational& b) { return a -= b; }
    friend Rational operator*(Rational a, const Rational& b) { return a *= b; }
    friend Rational operator/(Rational a, const Rational& b) { return a /= b; }

    /// Exact a^e. Negative exponents require a != 0.
    Rational pow(long e) const {
        if (e < 0) {
            if (is_zero()) throw DomainError("zero raised to a negative power");
            return Rational(1) / pow(-e);
        }
        mpz_class n, d;
        mpz_pow_ui(n.get_mpz_t(), q_.get_num_mpz_t(), static_cast<unsigned long>(e));
        mpz_pow_ui(d.get_mpz_t(), q_.get_den_mpz_t(), static_cast<unsigned long>(e));
        return Rational(n, d);
    }

    friend bool operator==(const Rational& a, const Rational& b) { return a.q_ == b.q_; }
    friend std::strong_ordering operator<=>(const Rational& a, const Rational& b) {
        const int c = cmp(a.q_, b.q_);
        if (c < 0) return std::strong_ordering::less;
        if (c > 0) return std::strong_ordering::greater;
        return std::strong_ordering::equal;
    }

    /// "p/q", or "p" for integers.
    std::string str() const {
        if (is_integer()) return q_.get_num().get_str();
        return q_.get_num().get_str() + "/" + q_.get_den().get_str();
    }

    friend std::ostream& operator<<(std::ostream& os, const Rational& r) { return os << r.str(); }

private:
    mpq_class q_;
};

inline Rational Rational::from_decimal(std::string_view text) {
    std::size_t i = 0;
    bool negative = false;
    if (i < text.size() && (text[i] == '+' || text[i] == '-')) {
        negative = text[i] == '-';
        ++i;
    }
    std::string digits;
    std::size_t frac_digits = 0;
    bool seen_point = false;
    bool seen_digit = false;
    for (; i < text.size(); ++i) {
        const char c = text[i];
        if (c == '.') {
            if (seen_point) throw ParseError("malformed decimal: '" + std::string(text) + "'");
            seen_point = true;
        } else if (std::isdigit(static_cast<unsigned char>(c))) {
            digits.push_back(c);
            seen_digit = true;
            if (seen_point) ++frac_digits;
        } else {
            throw ParseError("malformed decimal: '" + std::string(text) + "'");
        }
    }
    if (!seen_digit) throw ParseError("malformed decimal: '" + std::string(text) + "'");
    mpz_class num(digits, 10);
    if (negative) num = -num;
    mpz_class den;
    mpz_ui_pow_ui(den.get_mpz_t(), 10, frac_digits);
    return Rational(num, den);
}

inline Rational Rational::parse(std::string_view text) {
    const auto slash = text.find('/');
    if (slash == std::string_view::npos) return from_decimal(text);
    const auto parse_int = [&](std::string_view part) {
        std::size_t start = (!part.empty() && (part[0] == '-' || part[0] == '+')) ? 1 : 0;
        if (start == part.size()) throw ParseError("malformed rational: '" + std::string(text) + "'");
        for (std::size_t k = start; k < part.size(); ++k)
            if (!std::isdigit(static_cast<unsigned char>(part[k])))
                throw ParseError("malformed rational: '" + std::string(text) + "'");
        std::string s(part[0] == '+' ? part.substr(1) : part);
        return mpz_class(s, 10);
    };
    const mpz_class num = parse_int(text.substr(0, slash));
    const mpz_class den = parse_int(text.substr(slash + 1));
    if (den == 0) throw ParseError("rational with zero denominator: '" + std::string(text) + "'");
    return Rational(num, den);
}

} // namespace maxterm
