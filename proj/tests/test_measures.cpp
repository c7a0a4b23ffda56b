#include <gtest/gtest.h>

#include <algorithm>

#include "lorenz/family_search.hpp"
#include "lorenz/measures.hpp"
#include "oracle.hpp"

using namespace lorenz;

TEST(Winding, HandValue)
{
    EXPECT_EQ(winding(2, 3), (WindingMatrix{{{{1, 3}, {2, 1}}}}));
}

TEST(ReturnTimes, HandValues)
{
    auto t = return_times(parse_schedule("2,3;4,5"));
    ASSERT_EQ(t.size(), 3u);
    EXPECT_EQ(t[0], (TimePair{1, 1}));
    EXPECT_EQ(t[1], (TimePair{3, 4}));
    EXPECT_EQ(t[2], (TimePair{19, 19}));
}

TEST(ReturnTimes, MatchWordLengths)
{
    Schedule s = parse_schedule("3,1;1,4;2,2;5,3");
    auto t = return_times(s);
    for (int n = 0; n <= 4; ++n) {
        EXPECT_EQ(t[n].minus, BigInt(oracle::word(s, n, 'L').size()));
        EXPECT_EQ(t[n].plus, BigInt(oracle::word(s, n, 'R').size()));
    }
}

TEST(ReturnTimes, ExactBeyond64Bits)
{
    Schedule s(12, TypePair{40, 40});
    auto t = return_times(s);
    BigInt want = 1;
    for (int i = 0; i < 12; ++i) want *= 41;
    EXPECT_EQ(t.back().minus, want);
    EXPECT_GT(t.back().minus, BigInt(1) << 64);
    EXPECT_EQ(to_string(t[1].minus), "41");
}

TEST(Measures, PushforwardHandValue)
{
    // mu_1^+ for (a,b)=(1,2): W = RLL, so one third of the mass sits right of c
    Schedule s{{1, 2}};
    auto base = project_to_base(basis(s, 1, Side::R), s);
    EXPECT_EQ(base.minus, Rational(2, 3));
    EXPECT_EQ(base.plus, Rational(1, 3));
}

TEST(Measures, ProjectionMatchesSymbolCounts)
{
    Schedule s = parse_schedule("2,3;4,1;1,2");
    for (int n = 0; n <= 3; ++n)
        for (char side : {'L', 'R'}) {
            std::string w = oracle::word(s, n, side);
            Rational left(std::count(w.begin(), w.end(), 'L'), w.size());
            auto base = project_to_base(basis(s, n, side == 'L' ? Side::L : Side::R), s);
            EXPECT_EQ(base.minus, left) << n << side;
            EXPECT_EQ(base.minus + base.plus, 1);
            auto hw = word_half_weights(s, n, side == 'L' ? Side::L : Side::R);
            EXPECT_EQ(hw.left, left);
            EXPECT_EQ(hw.right, 1 - left);
        }
}

TEST(Measures, PushforwardStepsDownOneLevel)
{
    Schedule s = parse_schedule("2,3;4,5");
    auto mv = basis(s, 2, Side::L);
    auto down = pushforward(mv, 4, 5);
    EXPECT_EQ(down.level, 1);
    // W_2^- = W_1^- (W_1^+)^4: 1 copy of the minus word, 4 of the plus word
    EXPECT_EQ(down.minus, Rational(3, 19));
    EXPECT_EQ(down.plus, Rational(16, 19));
}

TEST(Measures, GeometricCountEqualsWordCount)
{
    FamilySpec spec{0.5, 2};
    Schedule s = parse_schedule("2,3;3,2");
    auto chain = vertex_chain(spec, s);
    auto f = spec.at(chain.back().vertex.du, chain.back().vertex.dv);
    for (int n = 1; n <= 2; ++n)
        for (Side side : {Side::L, Side::R}) {
            auto g = half_weights(f, s, n, side);
            auto w = word_half_weights(s, n, side);
            EXPECT_EQ(g.left, w.left) << n;
            EXPECT_EQ(g.right, w.right) << n;
        }
}

TEST(Parity, LargeSymmetricTypesSatisfyIt)
{
    EXPECT_TRUE(parity_holds({{18, 18}}, {0.1}));
    EXPECT_FALSE(parity_holds({{1, 1}}, {0.1}));
}

TEST(Parity, CalibrationIsMinimal)
{
    auto k = calibrate_K(2, 0.5, {0.1}, 1);
    ASSERT_EQ(k.K.size(), 1u);
    int K = k.K[0];
    for (int a : {K, 2 * K})
        for (int b : {K, 2 * K}) EXPECT_TRUE(parity_holds({{a, b}}, {0.1})) << a << "," << b;
    bool some_fail = false;
    for (int a : {K - 1, 2 * K - 2})
        for (int b : {K - 1, 2 * K - 2}) some_fail = some_fail || !parity_holds({{a, b}}, {0.1});
    EXPECT_TRUE(some_fail);
}

TEST(Acim, SymmetricMapHasEqualHalves)
{
    AcimOptions opt;
    opt.samples = 16;
    opt.iterations = 50000;
    opt.workers = 2;
    auto e = acim_half_weights(StandardLorenzMap(0.5, 2, 1, 1), 7, opt);
    EXPECT_NEAR(e.left, 0.5, 0.05);
    EXPECT_NEAR(e.left + e.right, 1.0, 1e-12);
    auto e2 = acim_half_weights(StandardLorenzMap(0.5, 2, 1, 1), 7, opt);
    EXPECT_EQ(e.left, e2.left);
}
