#include <gtest/gtest.h>

#include "bvcheck/quantum.hpp"
#include "support/fixtures.hpp"

namespace bvcheck {
namespace {

using testing::Gen;
using testing::model_a;
using testing::model_b;
using testing::model_poly;
using testing::props_a;
using testing::props_b;

enum { Q, R, C, CBAR, B };

Polynomial phi(int i) { return Polynomial(model_a().field(i, 0)); }
Polynomial phid(int i) { return Polynomial(model_a().antifield(model_a().flat(i, 0))); }
Polynomial gb(int i, int comp) { return Polynomial(model_b().field(i, comp)); }
Polynomial gbd(int i, int comp) { return Polynomial(model_b().antifield(model_b().flat(i, comp))); }

Polynomial hbar_times(const Complex& c, int power = 1) { return Polynomial(FormalSeries::monomial(power, 0, c)); }
Polynomial lam(const Rational& c, int power = 1) { return Polynomial(FormalSeries::lambda(power) * Complex(c)); }

// Closed-form chain propagators, independent of the Green-function solver:
// Delta^R_xy = -(x - y) for x >= y, and H = 0, so DeltaF_xy = -(i/2)|x - y|.
Complex chain_feynman(int x, int y) { return Complex(Rational(0), Rational(-std::abs(x - y)) / 2); }
Rational chain_retarded(int x, int y) { return x >= y ? Rational(y - x) : Rational(0); }

// ---------------------------------------------------------------- star product

TEST(StarProduct, CommutatorIsPauliJordan) {
  Polynomial c = star_product(model_a(), props_a(), phi(2), phi(5)) - star_product(model_a(), props_a(), phi(5), phi(2));
  // Delta_25 = 5 - 2
  EXPECT_EQ(c, hbar_times(Complex(Rational(0), Rational(3))));
}

TEST(StarProduct, UnitAndAssociativityInstance) {
  const ModelSpec& m = model_a();
  const PropagatorSet& p = props_a();
  Polynomial f = phi(3) * phi(4) + phid(2);
  EXPECT_EQ(star_product(m, p, f, Polynomial(1)), f);
  EXPECT_EQ(star_product(m, p, Polynomial(1), f), f);
  EXPECT_EQ(star_product(m, p, star_product(m, p, phi(2), phi(4)), phi(6)),
            star_product(m, p, phi(2), star_product(m, p, phi(4), phi(6))));
}

TEST(StarProduct, RejectsBoundarySupport) {
  EXPECT_THROW(star_product(model_a(), props_a(), phi(0), phi(3)), BoundarySupport);
  EXPECT_THROW(time_order(model_a(), props_a(), phi(7)), BoundarySupport);
}

TEST(StarProduct, AssociativeOnRandomTriples) {
  Gen g(101);
  for (const auto* mp : {&model_a(), &model_b()}) {
    const ModelSpec& m = *mp;
    const PropagatorSet& p = mp == &model_a() ? props_a() : props_b();
    for (int it = 0; it < 40; ++it) {
      Polynomial x = model_poly(g, m, 2, 2), y = model_poly(g, m, 2, 2), z = model_poly(g, m, 2, 2);
      ASSERT_EQ(star_product(m, p, star_product(m, p, x, y), z), star_product(m, p, x, star_product(m, p, y, z)));
    }
  }
}

// [F, G]_* = i hbar {F, G}_Peierls + O(hbar^2), on linear and quadratic pairs.
TEST(StarProduct, CommutatorMatchesPeierlsAtFirstOrder) {
  Gen g(102);
  const ModelSpec& m = model_a();
  const PropagatorSet& p = props_a();
  for (int it = 0; it < 100; ++it) {
    Polynomial x = model_poly(g, m, 2, 2, false), y = model_poly(g, m, 2, 2, false);
    Polynomial comm = star_product(m, p, x, y) - star_product(m, p, y, x);
    Polynomial expected = peierls_bracket(m, p, x, y) * Complex::i();
    ASSERT_EQ(comm.hbar_slice(1), expected * FormalSeries::hbar());
    ASSERT_TRUE(comm.hbar_slice(0).is_zero());
  }
}

// s0(X * Y) = (-1)^{gh Y} s0X * Y + X * s0Y.
TEST(StarProduct, FreeDifferentialIsRightDerivation) {
  Gen g(103);
  for (const auto* mp : {&model_a(), &model_b()}) {
    const ModelSpec& m = *mp;
    const PropagatorSet& p = mp == &model_a() ? props_a() : props_b();
    Polynomial s0 = ExtendedAction::from_model(m).s0();
    for (int it = 0; it < 60; ++it) {
      Polynomial x = model_poly(g, m, 3, 1), y = model_poly(g, m, 3, 1);
      int sy = y.odd() ? -1 : 1;
      Polynomial lhs = antibracket(detail::star(m, p, x, y), s0);
      Polynomial rhs = detail::star(m, p, antibracket(x, s0), y) * Complex(sy) + detail::star(m, p, x, antibracket(y, s0));
      ASSERT_EQ(lhs, rhs) << "X = " << x << ", Y = " << y;
    }
  }
}

// ---------------------------------------------------------------- time ordering

TEST(TimeOrder, Examples) {
  const ModelSpec& m = model_a();
  const PropagatorSet& p = props_a();
  EXPECT_EQ(time_order(m, p, phi(3)), phi(3));
  EXPECT_EQ(time_order(m, p, Polynomial(1)), Polynomial(1));
  EXPECT_EQ(time_order(m, p, phi(2) * phi(5)), phi(2) * phi(5) + hbar_times(chain_feynman(2, 5)));
  // phi_3^3: three contractions of a pair, each against the zero diagonal.
  EXPECT_EQ(time_order(m, p, phi(3) * phi(3) * phi(3)), phi(3) * phi(3) * phi(3));
  // Antifields are never contracted.
  EXPECT_EQ(time_order(m, p, phid(3) * phi(4)), phid(3) * phi(4));
}

TEST(TimeOrder, QuarticSecondOrder) {
  // T(phi1 phi2 phi4 phi5): one- and two-contraction terms from the closed form.
  const ModelSpec& m = model_a();
  int s[4] = {1, 2, 4, 5};
  Polynomial x = phi(1) * phi(2) * phi(4) * phi(5);
  Polynomial expected = x;
  for (int a = 0; a < 4; ++a)
    for (int b = a + 1; b < 4; ++b) {
      Polynomial rest(1);
      for (int c = 0; c < 4; ++c)
        if (c != a && c != b) rest = rest * phi(s[c]);
      expected += rest * hbar_times(chain_feynman(s[a], s[b]));
    }
  Complex pairings = chain_feynman(1, 2) * chain_feynman(4, 5) + chain_feynman(1, 4) * chain_feynman(2, 5) +
                     chain_feynman(1, 5) * chain_feynman(2, 4);
  expected += hbar_times(pairings, 2);
  EXPECT_EQ(time_order(m, props_a(), x), expected);
}

TEST(TimeOrder, GhostPairBehindOddSpectator) {
  // r'_1 c_2 cbar_1: the ghost pair contracts without a sign from the antifield in front.
  const ModelSpec& m = model_b();
  const PropagatorSet& p = props_b();
  Complex f = p.feynman(m.flat(2, C), m.flat(1, CBAR));
  Polynomial x = gbd(1, R) * gb(2, C) * gb(1, CBAR);
  EXPECT_EQ(time_order(m, p, x), x + gbd(1, R) * hbar_times(f));
  EXPECT_EQ(time_order(m, p, gb(2, C) * gb(1, CBAR)), gb(2, C) * gb(1, CBAR) + hbar_times(f));
}

TEST(TimeOrder, InverseOnRandomPolynomials) {
  Gen g(104);
  for (int it = 0; it < 100; ++it) {
    bool use_a = it % 2 == 0;
    const ModelSpec& m = use_a ? model_a() : model_b();
    const PropagatorSet& p = use_a ? props_a() : props_b();
    Polynomial x = model_poly(g, m, 4, 3);
    ASSERT_EQ(inverse_time_order(m, p, time_order(m, p, x)), x);
  }
}

TEST(TimeOrderedProduct, CommutativeOnRandomPairs) {
  Gen g(105);
  for (int it = 0; it < 50; ++it) {
    bool use_a = it % 2 == 0;
    const ModelSpec& m = use_a ? model_a() : model_b();
    const PropagatorSet& p = use_a ? props_a() : props_b();
    Polynomial x = model_poly(g, m, 3, 1), y = model_poly(g, m, 3, 1);
    int sign = x.odd() && y.odd() ? -1 : 1;
    ASSERT_EQ(time_ordered_product(m, p, x, y), time_ordered_product(m, p, y, x) * Complex(sign));
  }
}

TEST(CausalFactorization, TwoFactors) {
  const ModelSpec& m = model_a();
  const PropagatorSet& p = props_a();
  Polynomial late = phi(6) * phi(6) + phi(6), early = phi(2) * phi(2) * phi(1);
  EXPECT_EQ(time_ordered_product(m, p, late, early), star_product(m, p, late, early));
  EXPECT_EQ(time_ordered_product(m, p, early, late), star_product(m, p, late, early));
  EXPECT_NE(star_product(m, p, early, late), star_product(m, p, late, early));
}

TEST(CausalFactorization, ThreeFactorsWithGhosts) {
  const ModelSpec& m = model_b();
  const PropagatorSet& p = props_b();
  Polynomial f = gb(4, C) * gb(4, CBAR) + gb(4, Q) * gb(4, R);
  Polynomial g = gb(3, Q) * gb(3, B) + gb(3, CBAR);
  Polynomial h = gb(1, CBAR) * gb(2, C) * gb(1, R);
  // supp f later than supp g later than supp h, with supports two sites apart
  // so that the ghost-sector stencil does not overlap.
  Polynomial h2 = gb(1, Q) * gb(1, Q) + gb(1, C);
  Polynomial t3 = detail::tord(m, p, detail::tinv(m, p, f) * detail::tinv(m, p, g) * detail::tinv(m, p, h2));
  EXPECT_EQ(t3, star_product(m, p, star_product(m, p, f, g), h2));
  EXPECT_EQ(time_ordered_product(m, p, f, h), star_product(m, p, f, h));
}

// ---------------------------------------------------------------- S-matrix, interacting fields

TEST(FormalSMatrix, ZeroInteractionIsOne) {
  ExponentialElement s = formal_smatrix(model_a(), props_a(), Polynomial(), 3);
  EXPECT_EQ(s.value, Polynomial(1));
}

TEST(FormalSMatrix, FirstOrderIsTimeOrderedInteraction) {
  const ModelSpec& m = model_a();
  const PropagatorSet& p = props_a();
  Polynomial v = model_a().interaction;
  ExponentialElement s = formal_smatrix(m, p, v, 3);
  EXPECT_EQ(s.value.lambda_slice(0), Polynomial(1));
  // T(V) has no contractions for a sum of single-site cubes with zero diagonal.
  EXPECT_EQ(s.value.lambda_slice(1), (v * detail::i_over_hbar()).lambda_slice(1));
}

TEST(FormalSMatrix, StarInverse) {
  const ModelSpec& m = model_b();
  const PropagatorSet& p = props_b();
  Interaction rv(m, p, m.interaction, 2);
  EXPECT_EQ(detail::star(m, p, rv.smatrix_inverse(), rv.smatrix()).with_caps(FormalSeries::kUnbounded, 2), Polynomial(1));
  EXPECT_EQ(detail::star(m, p, rv.smatrix(), rv.smatrix_inverse()).with_caps(FormalSeries::kUnbounded, 2), Polynomial(1));
  EXPECT_THROW(star_inverse(m, p, Polynomial(2), 2), ZeroConstantTerm);
}

TEST(InteractingField, FreeAndUnitCases) {
  const ModelSpec& m = model_a();
  const PropagatorSet& p = props_a();
  Polynomial x = phi(3) * phi(5) + phid(4);
  EXPECT_EQ(interacting_field(m, p, x, Polynomial(), 2), time_order(m, p, x));
  EXPECT_EQ(interacting_field(m, p, Polynomial(1), m.interaction, 3), Polynomial(1));
}

// R_V(phi_x) at lambda^1 is -sum_y Delta^R_xy dV/dphi_y: only earlier sites enter.
TEST(InteractingField, FirstOrderIsRetarded) {
  const ModelSpec& m = model_a();
  const PropagatorSet& p = props_a();
  for (int x = 1; x <= 6; ++x) {
    Polynomial got = interacting_field(m, p, phi(x), m.interaction, 1).lambda_slice(1);
    Polynomial expected;
    for (int y = 1; y <= 6; ++y) {
      Rational r = chain_retarded(x, y);
      if (sgn(r) != 0) expected += phi(y) * phi(y) * lam(-r / 2);
    }
    ASSERT_EQ(got, expected) << "x = " << x;
    for (int s : spacetime_support(got)) ASSERT_LE(s, x);
  }
}

TEST(InteractingField, InteractingStarIsAssociative) {
  Gen g(106);
  const ModelSpec& m = model_a();
  const PropagatorSet& p = props_a();
  Interaction rv(m, p, m.interaction, 2);
  for (int it = 0; it < 4; ++it) {
    Polynomial x = model_poly(g, m, 2, 1, false), y = model_poly(g, m, 2, 1, false), z = model_poly(g, m, 1, 1, false);
    ASSERT_EQ(rv.star(rv.star(x, y), z), rv.star(x, rv.star(y, z)));
  }
  EXPECT_EQ(rv.inverse(rv.field(phi(4) * phi(2))), phi(4) * phi(2));
}

TEST(InteractingField, ClosedInverseMatchesIteration) {
  const ModelSpec& m = model_b();
  Interaction rv(m, props_b(), m.interaction, 2);
  Gen g(110);
  for (int it = 0; it < 5; ++it) {
    Polynomial x = model_poly(g, m, 3, 2);
    ASSERT_EQ(rv.inverse(x), rv.inverse_iterative(x)) << "X = " << x;
  }
}

// ---------------------------------------------------------------- quantum BV

TEST(QuantumBv, ClosedAntifieldFreeGivesZero) {
  ExtendedAction sa = ExtendedAction::from_model(model_a());
  QuantumBvPair a = quantum_bv_free(model_a(), props_a(), sa, phi(3) * phi(4));
  EXPECT_TRUE(a.conjugated.is_zero());
  EXPECT_TRUE(a.formula.is_zero());
  ExtendedAction sb = ExtendedAction::from_model(model_b());
  Polynomial u = gb(3, Q) - gb(3, R);  // gauge invariant
  QuantumBvPair b = quantum_bv_free(model_b(), props_b(), sb, u * u);
  EXPECT_TRUE(b.conjugated.is_zero());
  EXPECT_TRUE(b.formula.is_zero());
}

TEST(QuantumBv, ChainExample) {
  ExtendedAction sa = ExtendedAction::from_model(model_a());
  QuantumBvPair q = quantum_bv_free(model_a(), props_a(), sa, phid(3) * phi(3));
  // s0 phi'_3 = phi_2 - 2 phi_3 + phi_4; lap(phi'_3 phi_3) = -1.
  Polynomial expected = (phi(2) - phi(3) * Complex(2) + phi(4)) * phi(3) + hbar_times(Complex::i());
  EXPECT_EQ(q.formula, expected);
  EXPECT_EQ(q.conjugated, expected);
}

TEST(QuantumBv, GhostSectorExample) {
  // X = r'_1 c_2 ... built so that a ghost contraction sits behind an odd antifield.
  ExtendedAction sb = ExtendedAction::from_model(model_b());
  Polynomial x = gb(2, R) * gbd(1, R) * gb(1, CBAR);
  QuantumBvPair q = quantum_bv_free(model_b(), props_b(), sb, x);
  EXPECT_EQ(q.conjugated, q.formula);
  EXPECT_TRUE(bv_laplacian(x).is_zero());
}

TEST(QuantumBv, RandomPolynomials) {
  Gen g(107);
  ExtendedAction sa = ExtendedAction::from_model(model_a());
  ExtendedAction sb = ExtendedAction::from_model(model_b());
  for (int it = 0; it < 100; ++it) {
    bool use_a = it % 2 == 0;
    const ModelSpec& m = use_a ? model_a() : model_b();
    Polynomial x = model_poly(g, m, 4, 2);
    QuantumBvPair q = quantum_bv_free(m, use_a ? props_a() : props_b(), use_a ? sa : sb, x);
    SeriesResidual r = series_residual("qbv1", q.conjugated - q.formula, 3, 0);
    ASSERT_TRUE(r.pass()) << "X = " << x;
    ASSERT_EQ(q.conjugated, q.formula) << "X = " << x;
  }
}

TEST(QuantumBv, RequiresConsistentPropagators) {
  const ModelSpec& m = model_b();
  PropagatorSet p = props_b();
  p.symmetric_part(m.flat(2, C), m.flat(3, Q)) += Complex(1);
  ExtendedAction sb = ExtendedAction::from_model(m);
  EXPECT_THROW(quantum_bv_free(m, p, sb, gb(3, Q)), ConsistencyUnverified);
}

TEST(QuantumMaster, BundledModels) {
  ExtendedAction sa = ExtendedAction::from_model(model_a());
  ExtendedAction sb = ExtendedAction::from_model(model_b());
  EXPECT_TRUE(qme_check(model_a(), sa).is_zero());
  EXPECT_TRUE(qme_check(model_b(), sb).is_zero());
  EXPECT_TRUE(bv_laplacian(sa.s0()).is_zero());
  EXPECT_TRUE(bv_laplacian(sb.s0()).is_zero());
}

TEST(QuantumMaster, AntifieldInteractionIsDetected) {
  // V = lambda q'_3 c_3 q_4 breaks the master equation: {S0, V} has a c_3 B-free
  // term that nothing cancels.
  ExtendedAction sb = ExtendedAction::from_model(model_b());
  ExtendedAction bad = sb;
  bad.theta_int = gbd(3, Q) * gb(3, C) * gb(4, Q) * lam(1);
  EXPECT_FALSE(qme_check(model_b(), bad).is_zero());
}

TEST(MasterWard, ZeroInteraction) {
  ExtendedAction sa = ExtendedAction::from_model(model_a());
  MwiReport r = mwi_check(model_a(), props_a(), sa, Polynomial(), Polynomial(), 2, 3);
  EXPECT_TRUE(r.pass());
  EXPECT_TRUE(r.lhs.is_zero());
}

TEST(MasterWard, ChainCubic) {
  ExtendedAction sa = ExtendedAction::from_model(model_a());
  MwiReport r = mwi_check(model_a(), props_a(), sa, model_a().interaction, Polynomial(), 2, 3);
  EXPECT_TRUE(r.pass()) << r.residual.residual_terms();
  EXPECT_EQ(r.residual.hbar_cap, 2);
  EXPECT_EQ(r.residual.lambda_cap, 3);
}

TEST(MasterWard, GaugeModelWithAntifieldTerm) {
  const ModelSpec& m = model_b();
  ExtendedAction sb = ExtendedAction::from_model(m);
  Polynomial w = gbd(3, Q) * gb(3, C) * gb(4, Q) * lam(1);
  MwiReport r = mwi_check(m, props_b(), sb, m.interaction, w, 2, 2);
  EXPECT_TRUE(r.pass()) << r.residual.residual_terms();
  EXPECT_FALSE(r.lhs.is_zero());
}

TEST(InteractingBv, ChainMatchesLocalFormula) {
  const ModelSpec& m = model_a();
  ExtendedAction sa = ExtendedAction::from_model(m);
  Interaction rv(m, props_a(), m.interaction, 2);
  for (Polynomial x : {phid(3), phid(5) * phi(5), phid(2) * phi(4), phi(3) * phi(3)}) {
    InteractingBvPair q = interacting_bv(m, sa, rv, x);
    ASSERT_EQ(q.conjugated, q.local) << "X = " << x;
  }
}

TEST(InteractingBv, GaugeModelMatchesLocalFormula) {
  const ModelSpec& m = model_b();
  ExtendedAction sb = ExtendedAction::from_model(m);
  Interaction rv(m, props_b(), m.interaction, 2);
  for (Polynomial x : {gbd(3, Q), gbd(4, CBAR), gb(3, C) * gb(4, CBAR)}) {
    InteractingBvPair q = interacting_bv(m, sb, rv, x);
    ASSERT_EQ(q.conjugated, q.local) << "X = " << x;
  }
}

}  // namespace
}  // namespace bvcheck
