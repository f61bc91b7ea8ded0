/**
 * @file series.hpp
 * @brief The two-parameter family f_{K,eps}, its Laurent companion k_{K,eps},
 *        the truncated cosine polynomial P and the exact bounds around them.
 *
 * Coefficients: A_n = eps^{n(n-1)/2} / K^{T_n} with T_n = n(n+1)/2 and
 * eps = e^{i alpha}. On the unit circle, with z = eps e^{2i theta},
 *
 *     e^{i theta} k(z) = 2 sum_{n>=0} c_n cos((2n+1) theta),   c_n = e^{i alpha T_n} / K^{T_n},
 *
 * and P keeps the terms n = 0..N of that cosine series.
 */
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "maxterm/ball.hpp"
#include "maxterm/error.hpp"
#include "maxterm/rational.hpp"

namespace maxterm {

/// (K, alpha, N): family parameters and the truncation index of P.
struct FamilyParams {
    Rational K;
    Rational alpha; ///< radians; eps = e^{i alpha}
    int N = 5;

    /// Checks K > 1 and N >= 1; throws DomainError otherwise.
    void validate() const {
        if (!(K > Rational(1))) throw DomainError("K must exceed 1, got " + K.str());
        if (N < 1) throw DomainError("truncation index N must be at least 1");
    }

    static FamilyParams make(Rational K, Rational alpha, int N) {
        FamilyParams p{std::move(K), std::move(alpha), N};
        p.validate();
        return p;
    }

    friend bool operator==(const FamilyParams&, const FamilyParams&) = default;
};

/// K_0 = 7137/2000, alpha_0 = 198074929/50000000, N = 5.
inline FamilyParams reference_params() {
    return FamilyParams::make(Rational(7137) / Rational(2000), Rational(198074929) / Rational(50000000), 5);
}

/// T_n = n(n+1)/2; for n = -m this equals m(m-1)/2.
constexpr std::int64_t triangular(std::int64_t n) { return n * (n + 1) / 2; }

// ----------------------------------------------------------------------------
// truncated cosine polynomial

/// Enclosure of c_n = e^{i alpha T_n} / K^{T_n}. Both alpha T_n and K^{-T_n}
/// are formed exactly before conversion to balls.
inline ComplexBall coeff_c(int n, const FamilyParams& params, Precision p) {
    if (n < 0 || n > params.N) throw DomainError("coefficient index outside 0..N");
    const std::int64_t t = triangular(n);
    const Precision q = p + 16;
    const ComplexBall phase = exp_i(ball_from_rational(params.alpha * Rational(t), q), q);
    const RealBall modulus = ball_from_rational(params.K.pow(-t), q);
    return scale(phase, modulus, p);
}

/// The coefficients c_0..c_N at one precision; shared read-only across workers.
class CoefficientTable {
public:
    CoefficientTable(const FamilyParams& params, Precision p) : precision_(p) {
        params.validate();
        coeffs_.reserve(static_cast<std::size_t>(params.N) + 1);
        for (int n = 0; n <= params.N; ++n) coeffs_.push_back(coeff_c(n, params, p + 16));
    }

    Precision precision() const { return precision_; }
    const std::vector<ComplexBall>& coefficients() const { return coeffs_; }
    int N() const { return static_cast<int>(coeffs_.size()) - 1; }

private:
    Precision precision_;
    std::vector<ComplexBall> coeffs_;
};

/// Enclosure of P(t) = 2 sum_{n<=N} c_n cos((2n+1) t) for every t in theta.
///
/// cos((2n+1) t) comes from the Chebyshev recurrence on cos t, which is exact
/// algebra, so a single rigorous cosine per point suffices.
inline ComplexBall eval_P(const RealBall& theta, const CoefficientTable& table) {
    const Precision p = table.precision();
    const Precision q = p + 32;
    const RealBall x = ball_cos(theta, q);
    const RealBall two_x = RealBall(x.mid().ldexp(1), x.rad().ldexp(1));
    RealBall prev(1); // T_0
    RealBall cur = x; // T_1
    ComplexBall sum;
    const auto& c = table.coefficients();
    for (int n = 0; n <= table.N(); ++n) {
        // cur = T_{2n+1}(x)
        sum = add(sum, scale(c[static_cast<std::size_t>(n)], cur, q), q);
        if (n == table.N()) break;
        for (int step = 0; step < 2; ++step) {
            RealBall next = sub(mul(two_x, cur, q), prev, q);
            prev = std::move(cur);
            cur = std::move(next);
        }
    }
    const RealBall re = detail::make_rounded(sum.re().mid().ldexp(1), sum.re().rad().ldexp(1), p);
    const RealBall im = detail::make_rounded(sum.im().mid().ldexp(1), sum.im().rad().ldexp(1), p);
    return {re, im};
}

inline ComplexBall eval_P(const RealBall& theta, const FamilyParams& params, Precision p) {
    return eval_P(theta, CoefficientTable(params, p));
}

// ----------------------------------------------------------------------------
// exact bounds

/// 2 K^{-T_{N+1}} / (1 - K^{-(N+2)}): bounds |2 sum_{n>N} c_n cos((2n+1) t)|,
/// because T_{n+1} - T_n = n + 1 >= N + 2 beyond the cut.
inline Rational tail_bound(const Rational& K, int N) {
    if (!(K > Rational(1))) throw DomainError("tail bound needs K > 1");
    if (N < 0) throw DomainError("tail bound needs N >= 0");
    return Rational(2) * K.pow(-triangular(N + 1)) / (Rational(1) - K.pow(-(N + 2)));
}

inline Rational tail_bound(const FamilyParams& params) { return tail_bound(params.K, params.N); }

/// 2 sum_{n<=N} (2n+1) K^{-T_n}, a Lipschitz constant of P on the real line.
inline Rational lipschitz_bound(const Rational& K, int N) {
    if (!(K > Rational(1))) throw DomainError("Lipschitz bound needs K > 1");
    if (N < 0) throw DomainError("Lipschitz bound needs N >= 0");
    Rational sum;
    for (int n = 0; n <= N; ++n) sum += Rational(2 * n + 1) * K.pow(-triangular(n));
    return Rational(2) * sum;
}

inline Rational lipschitz_bound(const FamilyParams& params) { return lipschitz_bound(params.K, params.N); }

// ----------------------------------------------------------------------------
// maximum term of f

/// mu(K^m, f) = K^{m(m-1)/2}.
inline Rational mu_at_Km(int m, const FamilyParams& params) {
    if (m < 0) throw DomainError("mu_at_Km needs m >= 0");
    return params.K.pow(static_cast<long>(m) * (m - 1) / 2);
}

/// Indices n maximising |A_n| r^n. The ratio of consecutive terms is r / K^{n+1},
/// so with K^m <= r < K^{m+1} the maximiser is m, joined by m - 1 when r = K^m.
/// Radii r <= 1 give {0} (the ratio is below one from the start).
inline std::vector<int> maxterm_indices(const Rational& r, const FamilyParams& params) {
    if (r.sign() <= 0) throw DomainError("maxterm_indices needs r > 0");
    if (!(params.K > Rational(1))) throw DomainError("maxterm_indices needs K > 1");
    int m = 0;
    Rational power(1); // K^m
    Rational next = params.K;
    while (next <= r) {
        ++m;
        power = next;
        next *= params.K;
    }
    if (m >= 1 && r == power) return {m - 1, m};
    return {m};
}

// ----------------------------------------------------------------------------
// the bilateral series k

/// Coefficients A_n for -W <= n <= W.
class LaurentTable {
public:
    LaurentTable(const FamilyParams& params, int window, Precision p)
        : params_(params), window_(window), precision_(p) {
        if (!(params.K > Rational(1))) throw DomainError("k needs K > 1");
        if (window < 1) throw DomainError("window must be positive");
        coeffs_.reserve(2 * static_cast<std::size_t>(window) + 1);
        const Precision q = p + 16;
        for (int n = -window; n <= window; ++n) {
            const std::int64_t phase_exp = static_cast<std::int64_t>(n) * (n - 1) / 2;
            const ComplexBall phase = exp_i(ball_from_rational(params.alpha * Rational(phase_exp), q), q);
            coeffs_.push_back(scale(phase, ball_from_rational(params.K.pow(-triangular(n)), q), p));
        }
    }

    const FamilyParams& params() const { return params_; }
    int window() const { return window_; }
    Precision precision() const { return precision_; }
    /// A_n for -W <= n <= W.
    const ComplexBall& at(int n) const { return coeffs_[static_cast<std::size_t>(n + window_)]; }

private:
    FamilyParams params_;
    int window_;
    Precision precision_;
    std::vector<ComplexBall> coeffs_;
};

/// Rigorous bound on sum_{|n|>W} |A_n z^n| for rho <= |z| <= R, from geometric
/// majorants. Throws PrecisionError when a majorant ratio is not below one.
inline Rational laurent_tail_bound(const Rational& K, int W, const Rational& rho, const Rational& R) {
    // n > W: term ratio R / K^{n+1} <= R / K^{W+2}
    const Rational q_pos = R / K.pow(W + 2);
    // n = -m, m > W: term ratio 1 / (K^m rho) <= 1 / (K^{W+1} rho)
    const Rational q_neg = Rational(1) / (K.pow(W + 1) * rho);
    if (q_pos >= Rational(1) || q_neg >= Rational(1))
        throw PrecisionError("Laurent majorant does not converge geometrically at window " + std::to_string(W) +
                             "; use a larger window");
    const Rational first_pos = K.pow(-triangular(W + 1)) * R.pow(W + 1);
    const Rational first_neg = K.pow(-(static_cast<long>(W) + 1) * W / 2) * rho.pow(-(W + 1));
    return first_pos / (Rational(1) - q_pos) + first_neg / (Rational(1) - q_neg);
}

/// Enclosure of k(z) = sum_{n in Z} A_n z^n: the window -W..W in ball arithmetic
/// plus the majorant bound of the rest added to both radii.
inline ComplexBall eval_k(const ComplexBall& z, const LaurentTable& table) {
    const Precision p = table.precision();
    const Precision q = p + 32;
    const Dyadic rho = abs_lower(z);
    if (rho.sign() <= 0) throw DomainError("k is evaluated at an enclosure containing zero");
    const Dyadic R = abs_upper(z);
    const Rational tail = laurent_tail_bound(table.params().K, table.window(), rho.to_rational(), R.to_rational());

    ComplexBall sum = table.at(0);
    ComplexBall power = z;
    for (int n = 1; n <= table.window(); ++n) {
        sum = add(sum, mul(table.at(n), power, q), q);
        if (n < table.window()) power = mul(power, z, q);
    }
    const ComplexBall zinv = inv(z, q);
    power = zinv;
    for (int n = 1; n <= table.window(); ++n) {
        sum = add(sum, mul(table.at(-n), power, q), q);
        if (n < table.window()) power = mul(power, zinv, q);
    }
    const Dyadic tail_up = Dyadic::from_rational(tail, kRadiusBits, Rounding::Ceil);
    return {detail::make_rounded(sum.re().mid(), sum.re().rad() + tail_up, p),
            detail::make_rounded(sum.im().mid(), sum.im().rad() + tail_up, p)};
}

inline ComplexBall eval_k(const ComplexBall& z, const FamilyParams& params, int window, Precision p) {
    return eval_k(z, LaurentTable(params, window, p));
}

/// eval_k starting at `window`, doubling it while the majorant test fails.
inline ComplexBall eval_k_auto(const ComplexBall& z, const FamilyParams& params, Precision p, int window = 40) {
    for (int w = window;; w *= 2) {
        try {
            return eval_k(z, params, w, p);
        } catch (const PrecisionError&) {
            if (w > (1 << 14)) throw;
        }
    }
}

} // namespace maxterm
