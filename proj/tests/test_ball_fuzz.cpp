#include <gtest/gtest.h>

#include "support/fuzz.hpp"

using namespace maxterm::testing;

namespace {

constexpr std::int64_t kInstances = 10000;

void expect_sound(const FuzzReport& r) {
    EXPECT_GE(r.instances, kInstances) << r.op;
    EXPECT_EQ(r.violations, 0) << r.op << ": " << r.first_failure;
}

} // namespace

TEST(BallFuzz, EveryOperationIsSound) {
    for (const auto& report : fuzz_all(kInstances, 97)) expect_sound(report);
}

TEST(BallFuzz, DetectsAnUnsoundOperation) {
    // addition that drops the operand radii
    const Binary broken = [](const maxterm::RealBall& a, const maxterm::RealBall& b, maxterm::Precision p) {
        return maxterm::RealBall(maxterm::add(a, b, p).mid());
    };
    const FuzzReport r = fuzz_exact_binary(
        "broken_add", broken, [](const maxterm::Dyadic& x, const maxterm::Dyadic& y) { return x + y; }, 2000, 5);
    EXPECT_GT(r.violations, 0);
}
