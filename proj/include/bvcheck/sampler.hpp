#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <vector>

#include "bvcheck/model.hpp"

namespace bvcheck {

inline const std::vector<Kind> kEveryKind = {Kind::field,     Kind::antifield,           Kind::ghost,
                                             Kind::antighost, Kind::nl_field,            Kind::ghost_antifield,
                                             Kind::antighost_antifield, Kind::nl_antifield};

/// Seeded source of random exact data for the property checks. mt19937_64
/// plus our own range reduction keeps runs reproducible across standard
/// libraries (uniform_int_distribution is implementation-defined).
class Sampler {
 public:
  explicit Sampler(std::uint64_t seed) : rng_(seed) {}

  int uniform(int lo, int hi) {
    auto span = static_cast<std::uint64_t>(hi - lo) + 1;
    return lo + static_cast<int>(rng_() % span);
  }
  bool coin() { return uniform(0, 1) == 1; }

  Rational rational(int range = 5) {
    Rational q(uniform(-range, range));
    q /= uniform(1, 3);
    return q;
  }
  Rational nonzero_rational(int range = 5) {
    Rational q;
    do q = rational(range);
    while (sgn(q) == 0);
    return q;
  }
  Complex complex() { return coin() ? Complex(rational()) : Complex(rational(), rational()); }

  Generator generator(const std::vector<Kind>& kinds, int components, int sites) {
    Kind k = kinds[static_cast<std::size_t>(uniform(0, static_cast<int>(kinds.size()) - 1))];
    return Generator(k, uniform(0, components - 1), uniform(0, sites - 1));
  }

  Monomial monomial(const std::vector<Kind>& kinds, int components, int sites, int max_factors) {
    Monomial m;
    int n = uniform(0, max_factors);
    for (int k = 0; k < n; ++k) {
      auto [sign, next] = multiply(m, Monomial(generator(kinds, components, sites)));
      if (sign != 0) m = next;
    }
    return m;
  }

  /// Ghost-number homogeneous polynomial; the first monomial fixes the grade.
  Polynomial homogeneous(const std::vector<Kind>& kinds, int components, int sites, int max_factors,
                         int max_terms = 3) {
    Polynomial p;
    int terms = uniform(1, max_terms);
    std::optional<int> gh;
    for (int attempt = 0; attempt < 20 * terms && static_cast<int>(p.size()) < terms; ++attempt) {
      Monomial m = monomial(kinds, components, sites, max_factors);
      if (!gh) gh = m.gh();
      if (m.gh() != *gh) continue;
      p.add(m, FormalSeries(complex()));
    }
    return p;
  }

  Polynomial any(const std::vector<Kind>& kinds, int components, int sites, int max_factors, int max_terms = 3) {
    Polynomial p;
    int terms = uniform(0, max_terms);
    for (int k = 0; k < terms; ++k) p.add(monomial(kinds, components, sites, max_factors), FormalSeries(complex()));
    return p;
  }

  /// Random polynomial in the model's generators on sites [lo, hi].
  Polynomial model_poly(const ModelSpec& m, int lo, int hi, int max_factors, int max_terms = 3,
                        bool antifields = true) {
    Polynomial p;
    int terms = uniform(1, max_terms);
    for (int t = 0; t < terms; ++t) {
      Monomial mono;
      int n = uniform(1, max_factors);
      for (int k = 0; k < n; ++k) {
        std::size_t a = m.flat(uniform(lo, hi), uniform(0, m.components() - 1));
        Generator g = antifields && coin() ? m.antifield(a) : m.field(a);
        auto [sign, next] = multiply(mono, Monomial(g));
        if (sign != 0) mono = next;
      }
      p.add(mono, FormalSeries(complex()));
    }
    return p;
  }

  /// Same, restricted to even field-like generators.
  Polynomial even_field_poly(const ModelSpec& m, int lo, int hi, int max_factors, int max_terms = 3) {
    std::vector<std::size_t> even;
    for (int s = lo; s <= hi; ++s)
      for (int c = 0; c < m.components(); ++c)
        if (!m.odd(m.flat(s, c))) even.push_back(m.flat(s, c));
    Polynomial p;
    if (even.empty()) return p;
    int terms = uniform(1, max_terms);
    for (int t = 0; t < terms; ++t) {
      Polynomial mono(1);
      int n = uniform(1, max_factors);
      for (int k = 0; k < n; ++k) mono = mono * Polynomial(m.field(even[static_cast<std::size_t>(uniform(0, static_cast<int>(even.size()) - 1))]));
      p += mono * complex();
    }
    return p;
  }

  /// Even configuration with small rational entries on sites [lo, hi].
  Configuration configuration(const ModelSpec& m, int lo, int hi) {
    Configuration c(m.dim());
    for (std::size_t a = 0; a < m.dim(); ++a) {
      int s = m.site_of(a);
      if (!m.odd(a) && s >= lo && s <= hi) c[a] = FormalSeries(rational());
    }
    return c;
  }

 private:
  std::mt19937_64 rng_;
};

}  // namespace bvcheck
