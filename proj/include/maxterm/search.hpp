/**
 * @file search.hpp
 * @brief Machine-precision exploration of (K, alpha) minimising an estimate of
 *        A(K, e^{i alpha}) = max_theta |2 sum c_n cos((2n+1) theta)|.
 *
 * Nothing in here is rigorous. Candidates are suggestions for certify().
 */
#pragma once

#include <gmpxx.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <vector>

#include "maxterm/error.hpp"
#include "maxterm/rational.hpp"

namespace maxterm::search {

struct SearchConfig {
    double K_low = 3.4;
    double K_high = 3.7;
    double alpha_low = 3.8;
    double alpha_high = 4.1;
    int grid_K = 50;
    int grid_alpha = 50;
    int theta_samples = 4096;
    int refine_iters = 40;
    int N = 5;
    int keep = 10;
    std::int64_t max_denominator = 1000000;

    void validate() const {
        if (!(K_low > 1.0)) throw DomainError("search range must have K > 1");
        if (!(K_high >= K_low) || !(alpha_high >= alpha_low)) throw DomainError("search range is reversed");
        if ((grid_K > 1 && K_high == K_low) || (grid_alpha > 1 && alpha_high == alpha_low))
            throw DomainError("search range is degenerate");
        if (grid_K < 1 || grid_alpha < 1) throw DomainError("grid dimensions must be positive");
        if (theta_samples < 64) throw DomainError("theta_samples must be at least 64");
        if (refine_iters < 0) throw DomainError("refine_iters must be non-negative");
        if (N < 1) throw DomainError("N must be at least 1");
        if (keep < 1) throw DomainError("keep must be positive");
        if (max_denominator < 1) throw DomainError("max_denominator must be positive");
    }
};

struct TraceStep {
    double K;
    double alpha;
    double A;
};

struct Candidate {
    double K = 0;
    double alpha = 0;
    double A = 0;
    Rational K_rational;
    Rational alpha_rational;
    int grid_K_index = 0;
    int grid_alpha_index = 0;
    std::vector<TraceStep> trace; ///< accepted refinement moves, starting at the grid point
};

/// Closest fraction to x with denominator <= max_denominator (best approximation
/// from the continued-fraction convergents and the last semiconvergent).
inline Rational rationalize(const Rational& x, std::int64_t max_denominator) {
    if (max_denominator < 1) throw DomainError("max_denominator must be positive");
    const mpz_class limit(std::to_string(max_denominator));
    if (x.den() <= limit) return x;
    mpz_class p0 = 0, q0 = 1, p1 = 1, q1 = 0;
    mpz_class n = x.num(), d = x.den();
    for (;;) {
        mpz_class a;
        mpz_fdiv_q(a.get_mpz_t(), n.get_mpz_t(), d.get_mpz_t());
        const mpz_class q2 = q0 + a * q1;
        if (q2 > limit) break;
        const mpz_class p2 = p0 + a * p1;
        p0 = p1;
        q0 = q1;
        p1 = p2;
        q1 = q2;
        const mpz_class r = n - a * d;
        n = d;
        d = r;
    }
    mpz_class k;
    const mpz_class room = limit - q0;
    mpz_fdiv_q(k.get_mpz_t(), room.get_mpz_t(), q1.get_mpz_t());
    const Rational semi(p0 + k * p1, q0 + k * q1);
    const Rational conv(p1, q1);
    return (conv - x).abs() <= (semi - x).abs() ? conv : semi;
}

/// Exact value of a finite double (a dyadic rational).
inline Rational exact_double(double x) {
    if (!std::isfinite(x)) throw DomainError("cannot rationalize a non-finite value");
    mpq_class q(x);
    return Rational::from_mpq(q);
}

inline Rational rationalize(double x, std::int64_t max_denominator) {
    return rationalize(exact_double(x), max_denominator);
}

/// max over theta_samples uniform theta of |P(theta)| plus the tail bound, in
/// double precision.
inline double approx_A(double K, double alpha, const SearchConfig& cfg) {
    if (!(K > 1.0)) throw DomainError("approx_A needs K > 1");
    const int N = cfg.N;
    std::vector<std::complex<double>> c(static_cast<std::size_t>(N) + 1);
    for (int n = 0; n <= N; ++n) {
        const double t = n * (n + 1) / 2.0;
        c[static_cast<std::size_t>(n)] = std::polar(std::pow(K, -t), alpha * t);
    }
    double best = 0.0;
    for (int j = 0; j < cfg.theta_samples; ++j) {
        const double theta = 2.0 * std::numbers::pi * j / cfg.theta_samples;
        // cos((2n+1) theta) by the recurrence C_{n+1} = 2 cos(2 theta) C_n - C_{n-1}
        const double c1 = std::cos(theta);
        const double two_c2 = 2.0 * (2.0 * c1 * c1 - 1.0);
        double prev = c1, cur = c1;
        std::complex<double> sum = c[0] * cur;
        for (int n = 1; n <= N; ++n) {
            const double next = two_c2 * cur - prev;
            prev = cur;
            cur = next;
            sum += c[static_cast<std::size_t>(n)] * cur;
        }
        best = std::max(best, 2.0 * std::abs(sum));
    }
    const double tail = 2.0 * std::pow(K, -(N + 1) * (N + 2) / 2.0) / (1.0 - std::pow(K, -(N + 2.0)));
    return best + tail;
}

namespace detail {

inline double grid_coord(double lo, double hi, int i, int n) { return n == 1 ? lo : lo + (hi - lo) * i / (n - 1); }

/// Pattern search in alpha at fixed K, halving the step down to 1e-9.
inline void line_min_alpha(Candidate& c, double step, const SearchConfig& cfg) {
    while (step > 1e-9) {
        bool moved = false;
        for (const double dir : {-1.0, 1.0}) {
            const double alpha = c.alpha + dir * step;
            const double A = approx_A(c.K, alpha, cfg);
            if (A < c.A) {
                c.alpha = alpha;
                c.A = A;
                moved = true;
                break;
            }
        }
        if (!moved) step /= 2;
    }
}

/// Coordinate descent: moves in K with halving steps, alpha re-minimized after
/// each trial move so the search follows the curved valley of the landscape.
/// Initial steps are the grid spacings; an axis with one grid point stays fixed.
inline void refine(Candidate& c, const SearchConfig& cfg) {
    if (cfg.refine_iters == 0) return;
    double step_K = cfg.grid_K > 1 ? (cfg.K_high - cfg.K_low) / (cfg.grid_K - 1) : 0.0;
    const double step_a = cfg.grid_alpha > 1 ? (cfg.alpha_high - cfg.alpha_low) / (cfg.grid_alpha - 1) : 0.0;
    line_min_alpha(c, step_a, cfg);
    if (c.A < c.trace.back().A) c.trace.push_back({c.K, c.alpha, c.A});
    for (int it = 0; it < cfg.refine_iters && step_K > 0; ++it) {
        bool moved = false;
        for (const double dir : {-1.0, 1.0}) {
            Candidate trial = c;
            trial.K = c.K + dir * step_K;
            if (!(trial.K > 1.0)) continue;
            trial.A = approx_A(trial.K, trial.alpha, cfg);
            line_min_alpha(trial, step_a, cfg);
            if (trial.A < c.A) {
                c.K = trial.K;
                c.alpha = trial.alpha;
                c.A = trial.A;
                c.trace.push_back({c.K, c.alpha, c.A});
                moved = true;
                break;
            }
        }
        if (!moved) step_K /= 2;
    }
}

} // namespace detail

/// Grid evaluation, the best `keep` cells refined by coordinate descent, ranked
/// by (A, grid position). Deterministic for a given config.
inline std::vector<Candidate> grid_search(const SearchConfig& cfg) {
    cfg.validate();
    std::vector<Candidate> cells;
    cells.reserve(static_cast<std::size_t>(cfg.grid_K) * static_cast<std::size_t>(cfg.grid_alpha));
    for (int i = 0; i < cfg.grid_K; ++i) {
        for (int j = 0; j < cfg.grid_alpha; ++j) {
            Candidate c;
            c.K = detail::grid_coord(cfg.K_low, cfg.K_high, i, cfg.grid_K);
            c.alpha = detail::grid_coord(cfg.alpha_low, cfg.alpha_high, j, cfg.grid_alpha);
            c.A = approx_A(c.K, c.alpha, cfg);
            c.grid_K_index = i;
            c.grid_alpha_index = j;
            c.trace.push_back({c.K, c.alpha, c.A});
            cells.push_back(std::move(c));
        }
    }
    auto by_rank = [](const Candidate& a, const Candidate& b) {
        if (a.A != b.A) return a.A < b.A;
        if (a.grid_K_index != b.grid_K_index) return a.grid_K_index < b.grid_K_index;
        return a.grid_alpha_index < b.grid_alpha_index;
    };
    std::sort(cells.begin(), cells.end(), by_rank);
    if (cells.size() > static_cast<std::size_t>(cfg.keep)) cells.resize(static_cast<std::size_t>(cfg.keep));
    for (auto& c : cells) {
        detail::refine(c, cfg);
        c.K_rational = rationalize(c.K, cfg.max_denominator);
        c.alpha_rational = rationalize(c.alpha, cfg.max_denominator);
        if (!(c.K_rational > Rational(1))) throw DomainError("rationalized K is not above 1");
    }
    std::sort(cells.begin(), cells.end(), by_rank);
    return cells;
}

} // namespace maxterm::search
