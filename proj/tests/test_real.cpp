#include <gtest/gtest.h>

#include "lorenz/real.hpp"
#include "lorenz/errors.hpp"

using namespace lorenz;

TEST(Real, QuadRoundTrip)
{
    quad x = quad(1) / 3;
    quad y = num::parse_quad(num::to_string(x, 36));
    EXPECT_TRUE(num::abs(x - y) <= 4 * num::epsilon<quad>());
    EXPECT_EQ(num::to_string(num::parse_quad("0.125"), 36).substr(0, 5), "0.125");
}

TEST(Real, QuadKeepsDigitsBeyondDouble)
{
    quad a = num::parse_quad("1e-30");
    quad u = 1 - a;
    EXPECT_TRUE(1 - u > 0);
    EXPECT_NEAR(double((1 - u) / a), 1.0, 1e-3);
}

TEST(Real, ParseRejectsGarbage)
{
    EXPECT_THROW(num::parse_quad(""), Infeasible);
    EXPECT_THROW(num::parse_quad("abc"), Infeasible);
    EXPECT_THROW(num::parse_quad("0.5x"), Infeasible);
}

TEST(Real, ShortestDouble)
{
    EXPECT_EQ(num::to_string(0.1), "0.1");
    EXPECT_EQ(std::stod(num::to_string(1.0 / 3)), 1.0 / 3);
}

TEST(Real, QuarterIntegerPowers)
{
    EXPECT_DOUBLE_EQ(num::ipow(3.0, 4), 81.0);
    EXPECT_NEAR(double(num::pow(quad(2), quad(0.5))), std::sqrt(2.0), 1e-15);
}
