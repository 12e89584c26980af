#include <gtest/gtest.h>

#include "bvcheck/series.hpp"
#include "support/random_poly.hpp"

namespace bvcheck {
namespace {

using testing::Gen;
using testing::kIterations;

const FormalSeries kLambda = FormalSeries::lambda();
const FormalSeries kHbar = FormalSeries::hbar();

TEST(Series, Identity) { EXPECT_EQ(FormalSeries(1) * FormalSeries(1), FormalSeries(1)); }

TEST(Series, DifferenceOfSquares) {
  EXPECT_EQ((FormalSeries(1) + kLambda) * (FormalSeries(1) - kLambda), FormalSeries(1) - kLambda * kLambda);
}

TEST(Series, Binomial) {
  FormalSeries s = kHbar + kLambda;
  FormalSeries expected = FormalSeries::monomial(2, 0) + FormalSeries::monomial(1, 1, Complex(2)) +
                          FormalSeries::monomial(0, 2);
  EXPECT_EQ(s * s, expected);
}

TEST(Series, CapsTruncateToMinimum) {
  FormalSeries a = (FormalSeries(1) + kLambda).with_caps(3, 1);
  FormalSeries b = (FormalSeries(1) + kLambda).with_caps(3, 4);
  FormalSeries p = a * b;
  EXPECT_EQ(p.lambda_cap(), 1);
  EXPECT_EQ(p, FormalSeries(1) + FormalSeries::monomial(0, 1, Complex(2)));
}

TEST(Series, NormalFormDropsZeros) {
  FormalSeries s = kLambda - kLambda;
  EXPECT_TRUE(s.is_zero());
  EXPECT_EQ(s.terms().size(), 0u);
}

TEST(Series, InvertUnit) { EXPECT_EQ(series_invert(FormalSeries(1)), FormalSeries(1)); }

TEST(Series, InvertConstant) { EXPECT_EQ(series_invert(FormalSeries(2)), FormalSeries(Rational(1, 2))); }

TEST(Series, InvertGeometric) {
  FormalSeries a = (FormalSeries(1) + kLambda).with_caps(0, 4);
  FormalSeries expected;
  for (int k = 0; k <= 4; ++k) expected.add_term(0, k, Complex(k % 2 == 0 ? 1 : -1));
  EXPECT_EQ(series_invert(a), expected);
}

TEST(Series, InvertZeroConstantThrows) {
  EXPECT_THROW(series_invert(kLambda.with_caps(2, 2)), ZeroConstantTerm);
}

TEST(Series, InvertNeedsFiniteCap) {
  EXPECT_THROW(series_invert(FormalSeries(1) + kLambda), UnboundedTruncation);
}

TEST(Series, ExpZero) { EXPECT_EQ(series_exp(FormalSeries(0).with_caps(3, 3)), FormalSeries(1)); }

TEST(Series, ExpLambda) {
  FormalSeries e = series_exp(kLambda.with_caps(0, 3));
  FormalSeries expected = FormalSeries(1) + kLambda + FormalSeries::monomial(0, 2, Complex(Rational(1, 2))) +
                          FormalSeries::monomial(0, 3, Complex(Rational(1, 6)));
  EXPECT_EQ(e, expected);
}

TEST(Series, ExpOfImaginaryHalfHbarLambda) {
  // (i hbar lambda / 2)^2 / 2! = -hbar^2 lambda^2 / 8
  FormalSeries a = FormalSeries::monomial(1, 1, Complex(Rational(0), Rational(1, 2))).with_caps(4, 4);
  EXPECT_EQ(series_exp(a).coeff(2, 2), Complex(Rational(-1, 8)));
}

TEST(Series, ExpNonzeroConstantThrows) {
  EXPECT_THROW(series_exp(FormalSeries(1).with_caps(2, 2)), NonzeroConstantTerm);
}

TEST(Series, LaurentHbarCancels) {
  // exp(i lambda / hbar) * exp(-i lambda / hbar) = 1 with unbounded hbar cap.
  FormalSeries a = FormalSeries::monomial(-1, 1, Complex::i()).with_caps(FormalSeries::kUnbounded, 3);
  EXPECT_EQ(series_exp(a) * series_exp(-a), FormalSeries(1));
  EXPECT_EQ(series_exp(a).coeff(-2, 2), Complex(Rational(-1, 2)));
}

class SeriesProperties : public ::testing::Test {
 protected:
  Gen gen{20240611};
};

TEST_F(SeriesProperties, RingAxioms) {
  for (int it = 0; it < kIterations; ++it) {
    FormalSeries a = gen.series(3, 3), b = gen.series(3, 3), c = gen.series(3, 3);
    ASSERT_EQ(a * b, b * a);
    ASSERT_EQ((a * b) * c, a * (b * c));
    ASSERT_EQ(a * (b + c), a * b + a * c);
    ASSERT_EQ((a + b) - b, a);
  }
}

TEST_F(SeriesProperties, InverseIsTwoSided) {
  for (int it = 0; it < kIterations; ++it) {
    FormalSeries a = gen.series(3, 3);
    a.add_term(0, 0, Complex(gen.nonzero_rational()) - a.constant_term());
    FormalSeries inv = series_invert(a);
    ASSERT_EQ(a * inv, FormalSeries(1));
    ASSERT_EQ(inv * a, FormalSeries(1));
  }
}

TEST_F(SeriesProperties, ExpIsAHomomorphism) {
  for (int it = 0; it < kIterations / 5; ++it) {
    FormalSeries a = gen.series(3, 3), b = gen.series(3, 3);
    a.add_term(0, 0, -a.constant_term());
    b.add_term(0, 0, -b.constant_term());
    ASSERT_EQ(series_exp(a + b), series_exp(a) * series_exp(b));
    ASSERT_EQ(series_exp(a) * series_exp(-a), FormalSeries(1));
  }
}

TEST(Rational, ParsesFractions) {
  EXPECT_EQ(parse_rational("-6/4"), Rational(-3, 2));
  EXPECT_EQ(parse_rational("7"), Rational(7));
  EXPECT_THROW(parse_rational("0.5"), ConfigError);
  EXPECT_THROW(parse_rational("1e3"), ConfigError);
  EXPECT_THROW(parse_rational("x"), ConfigError);
}

}  // namespace
}  // namespace bvcheck
