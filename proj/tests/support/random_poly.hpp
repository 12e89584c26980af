#pragma once

#include <random>
#include <vector>

#include "bvcheck/polynomial.hpp"

namespace bvcheck::testing {

inline constexpr int kIterations = 500;

class Gen {
 public:
  explicit Gen(std::uint64_t seed) : rng_(seed) {}

  int uniform(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }
  bool coin() { return uniform(0, 1) == 1; }

  Rational rational(int range = 5) {
    int den = uniform(1, 3);
    int num = uniform(-range, range);
    Rational q(num, den);
    q.canonicalize();
    return q;
  }
  Rational nonzero_rational(int range = 5) {
    Rational q;
    do q = rational(range);
    while (sgn(q) == 0);
    return q;
  }
  Complex complex() { return coin() ? Complex(rational()) : Complex(rational(), rational()); }

  FormalSeries series(int hcap, int lcap, int max_terms = 3) {
    FormalSeries s = FormalSeries(0).with_caps(hcap, lcap);
    int n = uniform(0, max_terms);
    for (int k = 0; k < n; ++k) s.add_term(uniform(0, hcap), uniform(0, lcap), complex());
    return s;
  }

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

  std::mt19937_64& engine() { return rng_; }

 private:
  std::mt19937_64 rng_;
};

inline const std::vector<Kind> kAllKinds = {Kind::field,     Kind::antifield,           Kind::ghost,
                                           Kind::antighost, Kind::nl_field,            Kind::ghost_antifield,
                                           Kind::antighost_antifield, Kind::nl_antifield};

inline int parity_sign(bool a, bool b) { return (a && b) ? -1 : 1; }

}  // namespace bvcheck::testing
