#include <resetwalks/numeric.hpp>

#include <gtest/gtest.h>

using namespace resetwalks;

TEST(Numeric, ParsesFractionsIntegersAndDecimals) {
    EXPECT_EQ(parse_rational("1/3"), Rational(1, 3));
    EXPECT_EQ(parse_rational(" -2/4 "), Rational(-1, 2));
    EXPECT_EQ(parse_rational("7"), Rational(7));
    EXPECT_EQ(parse_rational("0.25"), Rational(1, 4));
    EXPECT_EQ(parse_rational("1.5e-1"), Rational(3, 20));
    EXPECT_EQ(parse_rational(".5"), Rational(1, 2));
}

TEST(Numeric, RejectsMalformedInput) {
    EXPECT_THROW(parse_rational(""), Error);
    EXPECT_THROW(parse_rational("1/0"), Error);
    EXPECT_THROW(parse_rational("abc"), Error);
    EXPECT_THROW(parse_rational("1.2.3"), Error);
    try {
        parse_rational("x/2");
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::ParseError);
    }
}

TEST(Numeric, Formatting) {
    EXPECT_EQ(to_string_value(Rational(3, 8)), "3/8");
    EXPECT_EQ(to_string_value(Rational(-4, 2)), "-2");
    EXPECT_EQ(to_string_value(0.25), "0.25");
    EXPECT_EQ(parse_value<double>("1/4"), 0.25);
}

TEST(Numeric, IntegerPower) {
    EXPECT_EQ(ipow(Rational(1, 2), 10), Rational(1, 1024));
    EXPECT_EQ(ipow(Rational(2, 3), -2), Rational(9, 4));
    EXPECT_DOUBLE_EQ(ipow(0.5, 3), 0.125);
    EXPECT_EQ(ipow(Rational(5), 0), Rational(1));
}
