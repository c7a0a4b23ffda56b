#include <gtest/gtest.h>

#include "lorenz/family_search.hpp"
#include "lorenz/renorm.hpp"
#include "oracle.hpp"

using namespace lorenz;

TEST(Schedule, ParseFormatRoundTrip)
{
    Schedule s = parse_schedule("2,3;4,5");
    ASSERT_EQ(s.size(), 2u);
    EXPECT_EQ(s[0], (TypePair{2, 3}));
    EXPECT_EQ(s[1], (TypePair{4, 5}));
    EXPECT_EQ(format_schedule(s), "2,3;4,5");
    EXPECT_THROW(parse_schedule("2;3"), Error);
    EXPECT_THROW(parse_schedule("0,3"), Error);
    EXPECT_THROW(parse_schedule("x,y"), Error);
}

TEST(Words, MatchConcatenation)
{
    Schedule s = parse_schedule("2,3;1,2;3,1");
    for (int n = 0; n <= 3; ++n) {
        EXPECT_EQ(cycle_word(s, n, Side::L), oracle::word(s, n, 'L'));
        EXPECT_EQ(cycle_word(s, n, Side::R), oracle::word(s, n, 'R'));
        EXPECT_EQ(word_length(s, n, Side::L), oracle::word(s, n, 'L').size());
        EXPECT_EQ(word_length(s, n, Side::R), oracle::word(s, n, 'R').size());
    }
    EXPECT_EQ(cycle_word(s, 1, Side::L), "LRR");
    EXPECT_EQ(cycle_word(s, 1, Side::R), "RLLL");
}

class AtVertex : public ::testing::Test {
protected:
    FamilySpec spec{0.5, 2};
    Schedule s = parse_schedule("2,2;3,3");
    BasicMap<quad> f;
    void SetUp() override
    {
        auto chain = vertex_chain(spec, s);
        f = spec.at(chain.back().vertex.du, chain.back().vertex.dv);
    }
};

TEST_F(AtVertex, PeriodicPointsMatchBisectionOracle)
{
    auto g = Tower<quad>(f, s).geometry(2);
    ASSERT_TRUE(g.ok()) << reason_name(g.reason);
    auto of = oracle::from(f);
    long double lo = 0, hi = 1;
    for (int k = 1; k <= 2; ++k) {
        long double p = oracle::fixed_point(of, oracle::word(s, k, 'L'), lo, of.c);
        long double q = oracle::fixed_point(of, oracle::word(s, k, 'R'), of.c, hi);
        EXPECT_NEAR(double(g.levels[k - 1].p), double(p), 1e-12) << k;
        EXPECT_NEAR(double(g.levels[k - 1].q), double(q), 1e-12) << k;
        lo = p;
        hi = q;
    }
}

TEST_F(AtVertex, CriticalValuesReturnToEndpoints)
{
    // full vertex: c^- returns onto q_n and c^+ onto p_n
    auto g = Tower<quad>(f, s).geometry(2);
    ASSERT_TRUE(g.ok());
    auto of = oracle::from(f);
    long double um = oracle::compose(of, oracle::word(s, 2, 'L'), of.u, true);
    long double up = oracle::compose(of, oracle::word(s, 2, 'R'), 1 - of.v, true);
    long double L = (long double)g.levels[1].length();
    EXPECT_NEAR(double((um - (long double)g.levels[1].q) / L), 0.0, 1e-6);
    EXPECT_NEAR(double((up - (long double)g.levels[1].p) / L), 0.0, 1e-6);
}

TEST_F(AtVertex, CyclesDisjointAndNested)
{
    auto cyc = cycles(f, s, 2);
    ASSERT_EQ(cyc.size(), 3u);
    EXPECT_NO_THROW(check_cycles(cyc));
    for (int k = 0; k <= 2; ++k) {
        EXPECT_EQ(cyc[k].minus_intervals.size(), word_length(s, k, Side::L));
        EXPECT_EQ(cyc[k].plus_intervals.size(), word_length(s, k, Side::R));
    }
    EXPECT_GT(cyc[0].total_length, cyc[1].total_length);
    EXPECT_GT(cyc[1].total_length, cyc[2].total_length);
    // every level-2 interval sits inside some level-1 interval
    auto all1 = cyc[1].minus_intervals;
    all1.insert(all1.end(), cyc[1].plus_intervals.begin(), cyc[1].plus_intervals.end());
    auto all2 = cyc[2].minus_intervals;
    all2.insert(all2.end(), cyc[2].plus_intervals.begin(), cyc[2].plus_intervals.end());
    for (const auto& J : all2) {
        bool inside = false;
        for (const auto& I : all1) inside = inside || (J.lo >= I.lo - 1e-12 && J.hi <= I.hi + 1e-12);
        EXPECT_TRUE(inside) << J.lo << " " << J.hi;
    }
}

TEST_F(AtVertex, CheckCyclesCatchesOverlap)
{
    auto cyc = cycles(f, s, 2);
    cyc[2].minus_intervals.push_back(cyc[2].minus_intervals.front());
    EXPECT_THROW(check_cycles(cyc), InvariantViolation);
}

TEST(Renormalize, SingleLevelAtVertex)
{
    FamilySpec spec{0.5, 2};
    auto rec = full_vertex(spec, 2, 2);
    auto f = rec.map_double(spec);
    auto chk = is_renormalizable(StandardLorenzMap(0.5, 2, double(1 - rec.vertex.du) - 1e-9, double(1 - rec.vertex.dv) - 1e-9), 2, 2);
    EXPECT_TRUE(chk.ok) << reason_name(chk.reason);
    EXPECT_EQ(chk.witness, "LRR");
    auto r = renormalize(StandardLorenzMap(0.5, 2, f.u - 1e-9, f.v - 1e-9), 2, 2);
    EXPECT_NEAR(r.record.c_prime, 0.5, 1e-6);
    EXPECT_EQ(r.record.t_minus, 3u);
    EXPECT_EQ(r.record.t_plus, 3u);
    // the return map fixes 0 and 1 and is unimodal-like around c'
    EXPECT_NEAR(r.map(0.0), 0.0, 1e-9);
    EXPECT_NEAR(r.map(1.0), 1.0, 1e-9);
}

TEST(Renormalize, FullMapIsNotRenormalizable)
{
    StandardLorenzMap f(0.5, 2, 1, 1);
    auto chk = is_renormalizable(f, 1, 1);
    EXPECT_FALSE(chk.ok);
    EXPECT_THROW(renormalize(f, 1, 1), NotRenormalizable);
}

TEST(Renormalize, TrivialMapRejected)
{
    StandardLorenzMap f(0.5, 2, 0.3, 0.3);
    EXPECT_FALSE(is_renormalizable(f, 2, 2).ok);
}

TEST(GapRatios, DecreaseWithDepthOfReturn)
{
    FamilySpec spec{0.5, 2};
    double prev_l = 1e300, prev_r = 1e300;
    for (int k = 2; k <= 6; ++k) {
        auto rec = full_vertex(spec, k, k);
        auto g = gap_ratios(spec.at(rec.vertex.du, rec.vertex.dv), Schedule{{k, k}}, 1);
        ASSERT_EQ(g.size(), 1u);
        EXPECT_LT(g[0].left, prev_l);
        EXPECT_LT(g[0].right, prev_r);
        EXPECT_NEAR(g[0].left, g[0].right, 1e-9);  // symmetric map
        prev_l = g[0].left;
        prev_r = g[0].right;
    }
}
