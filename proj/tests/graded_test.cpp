#include <gtest/gtest.h>

#include "bvcheck/bv.hpp"
#include "bvcheck/conventions.hpp"
#include "support/random_poly.hpp"

namespace bvcheck {
namespace {

using conventions::parity_sign;
using conventions::shifted_sign;
using testing::Gen;
using testing::kAllKinds;
using testing::kIterations;

Generator phi(int site) { return Generator(Kind::field, 0, site); }
Generator phid(int site) { return Generator(Kind::antifield, 0, site); }
Generator c(int site) { return Generator(Kind::ghost, 0, site); }
Generator cbar(int site) { return Generator(Kind::antighost, 0, site); }

Polynomial P(Generator g) { return Polynomial(g); }

TEST(Derivative, EvenGenerators) {
  Polynomial x = P(phi(0)) * P(phi(1));
  EXPECT_EQ(derivative(x, phi(0), Side::left), P(phi(1)));
}

TEST(Derivative, OddLeftPicksUpSign) {
  Polynomial x = P(c(0)) * P(c(1));
  EXPECT_EQ(derivative(x, c(1), Side::left), -P(c(0)));
}

TEST(Derivative, OddRight) {
  Polynomial x = P(c(0)) * P(c(1));
  EXPECT_EQ(derivative(x, c(1), Side::right), P(c(0)));
}

TEST(Derivative, PowerRule) {
  Polynomial x = P(phi(2)) * P(phi(2)) * P(phi(2));
  EXPECT_EQ(derivative(x, phi(2), Side::left), Complex(3) * P(phi(2)) * P(phi(2)));
}

TEST(Derivative, OddSquareIsZero) { EXPECT_TRUE((P(c(0)) * P(c(0))).is_zero()); }

TEST(Derivative, ConstantHasZeroDerivative) { EXPECT_TRUE(derivative(Polynomial(5), phi(0), Side::left).is_zero()); }

TEST(Antibracket, FieldAntifieldPairing) {
  EXPECT_EQ(antibracket(P(phi(1)), P(phid(1))), Polynomial(1));
  EXPECT_TRUE(antibracket(P(phi(1)), P(phid(2))).is_zero());
}

TEST(Antibracket, VanishesWithoutAntifields) {
  Polynomial f = P(phi(0)) * P(phi(1)) + P(c(0)) * P(cbar(1));
  Polynomial g = P(phi(2)) * P(c(3));
  EXPECT_TRUE(antibracket(f, g).is_zero());
}

TEST(Antibracket, QuadraticExample) {
  Polynomial x = P(phi(0)) * P(phi(0));
  Polynomial y = P(phid(0)) * P(phi(0));
  // dr X/dphi = 2 phi, dl Y/dphi' = phi; second term has no dr X/dphi'.
  EXPECT_EQ(antibracket(x, y), Complex(2) * x);
}

TEST(Laplacian, NoAntifield) { EXPECT_TRUE(bv_laplacian(P(phi(0))).is_zero()); }

TEST(Laplacian, PairSign) {
  EXPECT_EQ(bv_laplacian(P(phid(0)) * P(phi(0))), Polynomial(conventions::kLaplacianPairSign));
}

TEST(Laplacian, Nilpotent) {
  Polynomial x = P(phid(0)) * P(phi(0)) * P(c(0)) * P(cbar(0));
  EXPECT_TRUE(bv_laplacian(bv_laplacian(x)).is_zero());
}

TEST(Laplacian, StrictModeRejectsMixedGrade) {
  Polynomial x = P(phi(0)) + P(c(0));
  EXPECT_THROW(bv_laplacian(x, true), MixedGrade);
  EXPECT_NO_THROW(bv_laplacian(x, false));
}

TEST(Grading, Table) {
  auto g = grading(P(phi(0)) * P(phid(0)));
  ASSERT_TRUE(std::holds_alternative<Grading>(g));
  EXPECT_EQ(std::get<Grading>(g), (Grading{-1, 1, 1}));
  EXPECT_EQ(std::get<Grading>(grading(P(c(0)))), (Grading{1, 0, 0}));
  EXPECT_TRUE(std::holds_alternative<MixedTag>(grading(P(phi(0)) + P(c(0)))));
}

TEST(Grading, GeneratorTable) {
  EXPECT_EQ(Generator(Kind::ghost_antifield, 0, 0).af(), 2);
  EXPECT_EQ(Generator(Kind::ghost_antifield, 0, 0).gh(), -2);
  EXPECT_EQ(Generator(Kind::antighost_antifield, 0, 0).gh(), 0);
  EXPECT_EQ(Generator(Kind::nl_antifield, 0, 0).gh(), -1);
  for (Kind k : kAllKinds) {
    Generator g(k, 1, 3);
    EXPECT_EQ(g.odd(), (g.gh() % 2) != 0);
    if (g.is_antifield()) {
      EXPECT_EQ(g.gh(), -g.dual().gh() - 1);
      EXPECT_EQ(g.ta(), 1);
    } else {
      EXPECT_EQ(g.af(), 0);
    }
  }
}

TEST(Substitution, IsAnAlgebraMap) {
  Substitution s;
  s.set(phi(0), P(phi(0)) + P(phi(1)));
  s.set(c(0), P(c(0)) + P(c(1)));
  Polynomial x = P(c(0)) * P(phi(0));
  Polynomial y = P(c(2)) * P(phi(0));
  EXPECT_EQ(s(x * y), s(x) * s(y));
}

class GradedProperties : public ::testing::Test {
 protected:
  Gen gen{77};
  Polynomial random() { return gen.homogeneous(kAllKinds, 2, 2, 3); }
};

TEST_F(GradedProperties, GradedCommutativity) {
  for (int it = 0; it < kIterations; ++it) {
    Polynomial x = random(), y = random();
    ASSERT_EQ(x * y, Complex(parity_sign(x.odd() && y.odd())) * (y * x));
  }
}

TEST_F(GradedProperties, LeftRightDerivativeRelation) {
  for (int it = 0; it < kIterations; ++it) {
    Polynomial x = random();
    Generator g = gen.generator(kAllKinds, 2, 2);
    int sign = parity_sign(g.odd() && !x.odd());
    ASSERT_EQ(derivative(x, g, Side::left), Complex(sign) * derivative(x, g, Side::right));
  }
}

TEST_F(GradedProperties, AntibracketAntisymmetry) {
  for (int it = 0; it < kIterations; ++it) {
    Polynomial x = random(), y = random();
    ASSERT_EQ(antibracket(x, y), Complex(-shifted_sign(x.odd(), y.odd())) * antibracket(y, x));
  }
}

TEST_F(GradedProperties, AntibracketJacobi) {
  for (int it = 0; it < kIterations; ++it) {
    Polynomial x = random(), y = random(), z = random();
    Polynomial lhs = antibracket(x, antibracket(y, z));
    Polynomial rhs = antibracket(antibracket(x, y), z) +
                     Complex(shifted_sign(x.odd(), y.odd())) * antibracket(y, antibracket(x, z));
    ASSERT_EQ(lhs, rhs);
  }
}

TEST_F(GradedProperties, AntibracketLeibniz) {
  for (int it = 0; it < kIterations; ++it) {
    Polynomial x = random(), y = random(), z = random();
    int sign = parity_sign(!x.odd() && y.odd());
    ASSERT_EQ(antibracket(x, y * z), antibracket(x, y) * z + Complex(sign) * (y * antibracket(x, z)));
  }
}

TEST_F(GradedProperties, LaplacianSquaresToZero) {
  for (int it = 0; it < kIterations; ++it) {
    Polynomial x = gen.any(kAllKinds, 2, 2, 4, 4);
    ASSERT_TRUE(bv_laplacian(bv_laplacian(x)).is_zero());
  }
}

TEST_F(GradedProperties, LaplacianGeneratesAntibracket) {
  for (int it = 0; it < kIterations; ++it) {
    Polynomial x = random(), y = random();
    Complex py(parity_sign(y.odd()));
    Polynomial rhs = x * bv_laplacian(y) + py * (bv_laplacian(x) * y) +
                     Complex(conventions::kGeneratorBracketSign) * py * antibracket(x, y);
    ASSERT_EQ(bv_laplacian(x * y), rhs);
  }
}

TEST_F(GradedProperties, LaplacianShiftsGrading) {
  for (int it = 0; it < kIterations; ++it) {
    Polynomial x = random();
    Polynomial l = bv_laplacian(x);
    if (l.is_zero()) continue;
    auto gx = x.grading();
    auto gl = l.grading();
    if (!gx || !gl) continue;
    ASSERT_EQ(gl->gh, gx->gh + 1);
  }
}

}  // namespace
}  // namespace bvcheck
