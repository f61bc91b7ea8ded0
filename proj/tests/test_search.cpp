#include <gtest/gtest.h>

#include <cmath>

#include "maxterm/search.hpp"
#include "maxterm/series.hpp"

using namespace maxterm;
using namespace maxterm::search;

namespace {

Rational q(long p, long d) { return Rational(mpz_class(p), mpz_class(d)); }

SearchConfig small_config() {
    SearchConfig cfg;
    cfg.grid_K = 6;
    cfg.grid_alpha = 6;
    cfg.keep = 3;
    cfg.refine_iters = 8;
    cfg.theta_samples = 1024;
    return cfg;
}

} // namespace

TEST(Search, RationalizeExamples) {
    EXPECT_EQ(rationalize(3.56850, 2000), q(7137, 2000));
    EXPECT_EQ(rationalize(0.5, 2), q(1, 2));
    EXPECT_EQ(rationalize(0.5, 1000000), q(1, 2));
    EXPECT_EQ(rationalize(3.96149858, 50000000), q(198074929, 50000000));
    EXPECT_EQ(rationalize(Rational::from_decimal("3.14159265358979"), 1000), q(355, 113));
    EXPECT_EQ(rationalize(-0.75, 3), q(-2, 3));
    EXPECT_THROW(rationalize(1.0, 0), DomainError);
    EXPECT_THROW(rationalize(std::nan(""), 10), DomainError);
}

TEST(Search, RationalizeIsBestApproximation) {
    // exhaustive scan over every denominator up to d
    const Rational targets[] = {Rational::from_decimal("0.618033988749894848"), Rational::from_decimal("3.56850"),
                                Rational::from_decimal("3.96149858"), Rational::from_decimal("2.718281828459045"),
                                q(-123456789, 987654321)};
    for (const Rational& x : targets) {
        for (const long d : {1L, 2L, 7L, 50L, 113L, 500L, 1000L}) {
            const Rational r = rationalize(x, d);
            EXPECT_LE(r.den(), d);
            Rational best_err = (r - x).abs();
            for (long den = 1; den <= d; ++den) {
                mpz_class num;
                const mpz_class scaled = x.num() * den;
                mpz_fdiv_q(num.get_mpz_t(), scaled.get_mpz_t(), x.den().get_mpz_t());
                for (const mpz_class& n : {num, mpz_class(num + 1)}) {
                    const Rational cand(n, mpz_class(den));
                    EXPECT_GE((cand - x).abs(), best_err) << x << " d=" << d << " " << cand;
                }
            }
            // Dirichlet: some q <= d has |q x - p| < 1 / (d + 1)
            EXPECT_LT(best_err, Rational(1) / Rational(d + 1));
        }
    }
}

TEST(Search, ApproxA) {
    const SearchConfig cfg;
    const double A0 = approx_A(3.5685, 3.96149858, cfg);
    EXPECT_NEAR(A0, 1.70918, 1e-3);
    EXPECT_GT(approx_A(3.5685, M_PI, cfg), A0);
    // alpha = 0: all terms align at theta = 0
    double aligned = 0;
    for (int n = 0; n <= 5; ++n) aligned += 2 * std::pow(3.5685, -n * (n + 1) / 2.0);
    EXPECT_GE(approx_A(3.5685, 0.0, cfg), aligned);
    EXPECT_NEAR(approx_A(3.5685, 0.0, cfg), aligned, 1e-10);
    EXPECT_THROW(approx_A(1.0, 0.0, cfg), DomainError);
}

TEST(Search, SinglePointGrid) {
    SearchConfig cfg;
    cfg.K_low = cfg.K_high = 3.5685;
    cfg.alpha_low = cfg.alpha_high = 3.9615;
    cfg.grid_K = cfg.grid_alpha = 1;
    const auto out = grid_search(cfg);
    ASSERT_EQ(out.size(), 1u);
    EXPECT_EQ(out[0].K, 3.5685);
    EXPECT_EQ(out[0].alpha, 3.9615);
    EXPECT_EQ(out[0].A, approx_A(3.5685, 3.9615, cfg));
    EXPECT_EQ(out[0].trace.size(), 1u);
}

TEST(Search, NoRefinement) {
    SearchConfig cfg = small_config();
    cfg.refine_iters = 0;
    for (const auto& c : grid_search(cfg)) {
        EXPECT_EQ(c.K, search::detail::grid_coord(cfg.K_low, cfg.K_high, c.grid_K_index, cfg.grid_K));
        EXPECT_EQ(c.alpha, search::detail::grid_coord(cfg.alpha_low, cfg.alpha_high, c.grid_alpha_index, cfg.grid_alpha));
        EXPECT_EQ(c.trace.size(), 1u);
    }
}

TEST(Search, Deterministic) {
    const auto a = grid_search(small_config());
    const auto b = grid_search(small_config());
    ASSERT_EQ(a.size(), b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        EXPECT_EQ(a[i].K, b[i].K);
        EXPECT_EQ(a[i].alpha, b[i].alpha);
        EXPECT_EQ(a[i].A, b[i].A);
        EXPECT_EQ(a[i].K_rational, b[i].K_rational);
        EXPECT_EQ(a[i].trace.size(), b[i].trace.size());
    }
    for (std::size_t i = 1; i < a.size(); ++i) EXPECT_LE(a[i - 1].A, a[i].A);
}

TEST(Search, RefinementNeverWorsens) {
    for (const auto& c : grid_search(small_config())) {
        EXPECT_LE(c.A, c.trace.front().A);
        for (std::size_t i = 1; i < c.trace.size(); ++i) EXPECT_LT(c.trace[i].A, c.trace[i - 1].A);
        EXPECT_GT(c.K_rational, Rational(1));
        EXPECT_LE(c.K_rational.den(), 1000000);
    }
}

TEST(Search, Validation) {
    SearchConfig cfg;
    cfg.K_low = 1.0;
    EXPECT_THROW(cfg.validate(), DomainError);
    cfg = SearchConfig{};
    cfg.theta_samples = 10;
    EXPECT_THROW(cfg.validate(), DomainError);
    cfg = SearchConfig{};
    cfg.K_high = cfg.K_low;
    EXPECT_THROW(cfg.validate(), DomainError);
    cfg = SearchConfig{};
    cfg.alpha_high = cfg.alpha_low - 1;
    EXPECT_THROW(cfg.validate(), DomainError);
}

TEST(Search, FindsReferenceParameters) {
    const SearchConfig cfg; // K in [3.4, 3.7], alpha in [3.8, 4.1], 50 x 50, 4096 samples
    const auto out = grid_search(cfg);
    ASSERT_FALSE(out.empty());
    EXPECT_NEAR(out[0].K, 3.5685, 1e-2);
    EXPECT_NEAR(out[0].alpha, 3.96150, 1e-2);
    EXPECT_LT(out[0].A, approx_A(3.5685, 3.96149858, cfg) + 1e-6);
}
