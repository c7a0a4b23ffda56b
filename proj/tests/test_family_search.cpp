#include <gtest/gtest.h>

#include <cmath>

#include "lorenz/family_search.hpp"
#include "oracle.hpp"

using namespace lorenz;

TEST(FullVertex, SymmetricAtHalf)
{
    FamilySpec spec{0.5, 2};
    for (int k : {1, 2, 3, 5, 8}) {
        auto rec = full_vertex(spec, k, k);
        EXPECT_NEAR(double(rec.vertex.du - rec.vertex.dv), 0.0, 1e-20) << k;
        EXPECT_NEAR(double(rec.c_prime), 0.5, 1e-9) << k;
        EXPECT_LT(double(num::abs(rec.r1)), 1e-15);
        EXPECT_LT(double(num::abs(rec.r2)), 1e-15);
    }
}

TEST(FullVertex, IndependentFullnessCheck)
{
    // c^- must return onto the right fixed point q of the level branch
    FamilySpec spec{0.6, 2.5};
    auto rec = full_vertex(spec, 3, 2);
    auto of = oracle::from(spec.at(rec.vertex.du, rec.vertex.dv));
    Schedule s{{3, 2}};
    long double p = oracle::fixed_point(of, oracle::word(s, 1, 'L'), 0, of.c);
    long double q = oracle::fixed_point(of, oracle::word(s, 1, 'R'), of.c, 1);
    long double um = oracle::compose(of, oracle::word(s, 1, 'L'), of.u, true);
    long double up = oracle::compose(of, oracle::word(s, 1, 'R'), 1 - of.v, true);
    EXPECT_NEAR(double((um - q) / (q - p)), 0.0, 1e-8);
    EXPECT_NEAR(double((up - p) / (q - p)), 0.0, 1e-8);
}

TEST(FullVertex, GuessIsCloseToSolution)
{
    FamilySpec spec{0.5, 2};
    auto g = standard_guess(0.5, 2, 4, 4);
    auto rec = full_vertex(spec, 4, 4);
    double ratio = double(g.du / rec.vertex.du);
    EXPECT_GT(ratio, 0.5);
    EXPECT_LT(ratio, 2.0);
}

TEST(FullVertex, DeepSymmetricReturn)
{
    FamilySpec spec{0.5, 2};
    auto rec = full_vertex(spec, 20, 20);
    EXPECT_TRUE(renormalizable_at(spec, rec.schedule, rec.vertex));
    EXPECT_NEAR(double(rec.c_prime), 0.5, 1e-6);
}

TEST(Islands, NestedBoxesShrink)
{
    FamilySpec spec{0.5, 2};
    auto chain = vertex_chain(spec, parse_schedule("2,2;3,3"));
    ASSERT_EQ(chain.size(), 2u);
    auto b1 = island_box(spec, chain[0]);
    auto b2 = island_box(spec, chain[1]);
    EXPECT_TRUE(b1.contains(chain[0].vertex));
    EXPECT_TRUE(b1.contains(chain[1].vertex));
    EXPECT_TRUE(b2.contains(chain[1].vertex));
    EXPECT_TRUE(b2.strictly_inside(b1));
    EXPECT_LT(double(b2.width_u()), double(b1.width_u()));
    // points of the inner box renormalize twice
    ParamPoint mid{(b2.du_lo + b2.du_hi) / 2, (b2.dv_lo + b2.dv_hi) / 2};
    EXPECT_TRUE(renormalizable_at(spec, chain[1].schedule, mid));
}

TEST(Islands, OutsideBoxNotRenormalizable)
{
    FamilySpec spec{0.5, 2};
    auto rec = full_vertex(spec, 2, 2);
    auto b = island_box(spec, rec);
    ParamPoint beyond{b.du_hi + 2 * b.width_u(), (b.dv_lo + b.dv_hi) / 2};
    EXPECT_FALSE(renormalizable_at(spec, rec.schedule, beyond));
}

TEST(Asymptotics, ThetaAlphaHandValue)
{
    EXPECT_NEAR(theta_alpha(2), 1 + std::log(2.0) / std::log(6.0), 1e-15);
    EXPECT_NEAR(theta_alpha(2), 1.38685, 1e-5);
    for (double a : {1.01, 2.0, 10.0, 100.0}) EXPECT_GT(theta_alpha(a), 1);
}

TEST(Asymptotics, GAlphaLowerBound)
{
    double bound = std::exp(-3 / std::exp(1.0)) / 2;
    double lo = 1;
    for (int i = 1; i <= 20000; ++i) {
        double a = 1 + 99.0 * i / 20000;
        lo = std::min(lo, g_alpha(a));
        EXPECT_GE(g_alpha(a), bound - 1e-12);
        EXPECT_LT(2 * g_alpha(a), 1);
    }
    EXPECT_NEAR(lo, bound, 1e-6);
    EXPECT_NEAR(bound, 0.165, 1e-3);
}

TEST(Asymptotics, GammaSymmetricAtHalf)
{
    auto f = full_map({0.5, 2});
    auto g = gamma_estimates(f, 60);
    EXPECT_NEAR(g.gamma_minus, g.gamma_plus, 1e-12);
    EXPECT_GE(g.tail_bound, 0);
    EXPECT_NEAR(theta(f), 1.0, 1e-12);
    EXPECT_NEAR(predicted_crit({0.5, 2}, 7, 7), 0.5, 1e-12);
}

TEST(Asymptotics, PredictionTracksMeasuredCrit)
{
    FamilySpec spec{0.6, 2};
    int k = 12;
    double pred = predicted_crit(spec, k, k);
    double meas = double(full_vertex(spec, k, k).c_prime);
    EXPECT_NEAR(pred, meas, 0.05);
}

TEST(Asymptotics, ThetaExceedsThetaAlpha)
{
    auto f = full_map({0.7, 2});
    EXPECT_GT(theta(f), theta_alpha(2));
}

TEST(Errors, InfeasibleInputs)
{
    EXPECT_THROW(flip_offsets({0.5, 2}, {3, 4}), Infeasible);
    EXPECT_THROW(flip_offsets({0.7, 2}, {}), Infeasible);
}
