#include <gtest/gtest.h>

#include <cmath>

#include "lorenz/map_core.hpp"

using namespace lorenz;

namespace {
double left_ref(double c, double a, double u, double x) { return u * (1 - std::pow((c - x) / c, a)); }
double right_ref(double c, double a, double v, double x) { return 1 + v * (-1 + std::pow((x - c) / (1 - c), a)); }
} // namespace

TEST(MapCore, HandValues)
{
    StandardLorenzMap f(0.5, 2, 1, 1);
    EXPECT_DOUBLE_EQ(eval(f, 0.25), 0.75);
    EXPECT_DOUBLE_EQ(eval(f, 0.75), 0.25);
    EXPECT_DOUBLE_EQ(deriv(f, 0.25), 2.0);
    EXPECT_DOUBLE_EQ(deriv(f, 0.0), 4.0);
    EXPECT_DOUBLE_EQ(eval(f, 0.0), 0.0);
    EXPECT_DOUBLE_EQ(eval(f, 1.0), 1.0);
}

TEST(MapCore, MatchesFormulaOnGrid)
{
    StandardLorenzMap f(0.37, 2.75, 0.9, 0.8);
    EXPECT_EQ(f.qalpha, 11);
    for (int i = 0; i <= 100; ++i) {
        double x = i / 100.0;
        if (std::fabs(x - f.c) < 1e-9) continue;
        double want = x < f.c ? left_ref(0.37, 2.75, 0.9, x) : right_ref(0.37, 2.75, 0.8, x);
        EXPECT_NEAR(eval(f, x), want, 1e-14) << x;
    }
    StandardLorenzMap g(0.37, 3.3, 1, 1);
    EXPECT_EQ(g.qalpha, 0);
    EXPECT_NEAR(eval(g, 0.2), left_ref(0.37, 3.3, 1, 0.2), 1e-15);
}

TEST(MapCore, DerivativeMatchesDifferenceQuotient)
{
    StandardLorenzMap f(0.6, 2.5, 0.95, 0.9);
    for (double x : {0.1, 0.3, 0.55, 0.7, 0.9}) {
        double h = 1e-6;
        double fd = (eval(f, x + h) - eval(f, x - h)) / (2 * h);
        EXPECT_NEAR(deriv(f, x), fd, 1e-6 * std::max(1.0, fd)) << x;
    }
}

TEST(MapCore, SymmetricMapCommutesWithReflection)
{
    StandardLorenzMap f(0.5, 3, 0.93, 0.93);
    for (double x : {0.05, 0.2, 0.4, 0.45}) EXPECT_NEAR(eval(f, 1 - x), 1 - eval(f, x), 1e-14);
}

TEST(MapCore, RejectsBadParameters)
{
    EXPECT_THROW(StandardLorenzMap(0, 2, 1, 1), InvalidMap);
    EXPECT_THROW(StandardLorenzMap(1, 2, 1, 1), InvalidMap);
    EXPECT_THROW(StandardLorenzMap(0.5, 1, 1, 1), InvalidMap);
    EXPECT_THROW(StandardLorenzMap(0.5, 101, 1, 1), InvalidMap);
    EXPECT_THROW(StandardLorenzMap(0.5, 2, 0, 1), InvalidMap);
    EXPECT_THROW(StandardLorenzMap(0.5, 2, 1, 1.5), InvalidMap);
}

TEST(MapCore, CriticalPointExcluded)
{
    StandardLorenzMap f(0.5, 2, 1, 1);
    EXPECT_THROW(eval(f, 0.5), CriticalPointHit);
    EXPECT_THROW(deriv(f, 0.5 + 1e-16), CriticalPointHit);
    EXPECT_NO_THROW(eval(f, 0.5 + 1e-6, 1e-8));
    EXPECT_THROW(eval(f, 0.5 + 1e-6, 1e-5), CriticalPointHit);
}

TEST(MapCore, BranchInverseRoundTrip)
{
    StandardLorenzMap f(0.45, 2.2, 0.97, 0.88);
    for (double y : {0.01, 0.3, 0.6, 0.9}) EXPECT_NEAR(eval(f, branch_inverse(f, Side::L, y)), y, 1e-13);
    for (double y : {0.2, 0.5, 0.99}) EXPECT_NEAR(eval(f, branch_inverse(f, Side::R, y)), y, 1e-13);
    EXPECT_THROW(branch_inverse(f, Side::L, 0.98), OutOfRange);
    EXPECT_THROW(branch_inverse(f, Side::R, 0.05), OutOfRange);
}

TEST(MapCore, CritPreimagesMapToC)
{
    StandardLorenzMap f(0.5, 2, 1, 1);
    for (int k = 1; k <= 4; ++k) {
        double x = crit_preimage(f, Side::L, k);
        EXPECT_LT(x, f.c);
        for (int i = 0; i < k; ++i) x = f.branch(x < f.c ? Side::L : Side::R, x);
        EXPECT_NEAR(x, f.c, 1e-12);
    }
    EXPECT_THROW(crit_preimage(f, Side::L, 0), OutOfRange);
}

TEST(MapCore, ItineraryAgreesWithOrbit)
{
    StandardLorenzMap f(0.5, 2, 0.98, 0.96);
    auto o = iterate(f, 0.123, 50);
    auto w = itinerary(f, 0.123, 50);
    ASSERT_EQ(w.size(), 50u);
    ASSERT_EQ(o.points.size(), 51u);
    for (std::size_t k = 0; k < w.size(); ++k) EXPECT_EQ(w[k], o.points[k] < f.c ? 'L' : 'R');
    EXPECT_FALSE(o.hit_critical);
}

TEST(MapCore, OrbitStopsAtCritical)
{
    StandardLorenzMap f(0.5, 2, 1, 1);
    auto o = iterate(f, crit_preimage(f, Side::R, 1), 5, 1e-10);
    ASSERT_TRUE(o.hit_critical);
    EXPECT_EQ(*o.hit_critical, 1u);
}

TEST(MapCore, NontrivialAndBeta)
{
    EXPECT_TRUE(StandardLorenzMap(0.5, 2, 1, 1).nontrivial());
    EXPECT_FALSE(StandardLorenzMap(0.5, 2, 0.4, 1).nontrivial());
    StandardLorenzMap f(0.5, 2, 1, 1);
    EXPECT_DOUBLE_EQ(beta_left(f), 2.0);  // min(f'(0)=4, u/c=2)
}
