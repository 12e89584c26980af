#pragma once

#include <cstdint>
#include <vector>

#include "bvcheck/classical.hpp"
#include "bvcheck/models.hpp"
#include "support/random_poly.hpp"

namespace bvcheck::testing {

// Shared bundled instances. Building propagators for the gauge toy is the
// expensive part, so each is made once per test binary.
inline const ModelSpec& model_a() {
  static const ModelSpec m = models::scalar_chain(8);
  return m;
}
inline const PropagatorSet& props_a() {
  static const PropagatorSet p = build_propagators(model_a());
  return p;
}
inline const ModelSpec& model_b_raw() {
  static const ModelSpec m = models::shift_gauge_toy(6);
  return m;
}
inline const ModelSpec& model_b() {
  static const ModelSpec m = gauge_fixed_model(model_b_raw());
  return m;
}
inline const PropagatorSet& props_b() {
  static const PropagatorSet p = build_propagators(model_b());
  return p;
}

/// Random generator of the model (field-like or antifield) on the given sites.
inline Generator model_generator(Gen& g, const ModelSpec& m, int lo, int hi, bool antifields = true) {
  std::size_t a = m.flat(g.uniform(lo, hi), g.uniform(0, m.components() - 1));
  return antifields && g.coin() ? m.antifield(a) : m.field(a);
}

/// Random polynomial in the model's generators on interior sites.
inline Polynomial model_poly(Gen& g, const ModelSpec& m, int max_factors, int max_terms = 3, bool antifields = true) {
  int r = m.stencil_radius();
  Polynomial p;
  int terms = g.uniform(1, max_terms);
  for (int t = 0; t < terms; ++t) {
    Monomial mono;
    int n = g.uniform(1, max_factors);
    for (int k = 0; k < n; ++k) {
      auto [sign, next] = multiply(mono, Monomial(model_generator(g, m, r, m.sites() - 1 - r, antifields)));
      if (sign != 0) mono = next;
    }
    p.add(mono, FormalSeries(g.complex()));
  }
  return p;
}

/// Random even configuration with small rational entries on [lo, hi].
inline Configuration random_configuration(Gen& g, const ModelSpec& m, int lo, int hi) {
  Configuration c(m.dim());
  for (std::size_t a = 0; a < m.dim(); ++a) {
    int s = m.site_of(a);
    if (!m.odd(a) && s >= lo && s <= hi) c[a] = FormalSeries(g.rational());
  }
  return c;
}

}  // namespace bvcheck::testing
