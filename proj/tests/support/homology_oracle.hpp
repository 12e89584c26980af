#pragma once

#include <map>
#include <vector>

#include "bvcheck/classical.hpp"
#include "support/modrank.hpp"

namespace bvcheck::testing {

// Image of x under s0 = {., S0}, from the defining double sum.
inline Polynomial s0_image(const ModelSpec& m, const Polynomial& x, const Polynomial& s0) {
  Polynomial out;
  for (std::size_t a = 0; a < m.dim(); ++a) {
    out += derivative(x, m.field(a), Side::right) * derivative(s0, m.antifield(a), Side::left);
    out -= derivative(x, m.antifield(a), Side::right) * derivative(s0, m.field(a), Side::left);
  }
  return out;
}

inline std::size_t oracle_rank(const ModelSpec& m, const std::vector<Monomial>& source, const std::vector<Monomial>& target,
                        const Polynomial& s0) {
  std::map<Monomial, std::size_t> index;
  for (std::size_t k = 0; k < target.size(); ++k) index[target[k]] = k;
  std::vector<std::vector<ModRank::E>> rows;
  for (auto& mono : source) {
    std::vector<ModRank::E> row(target.size());
    Polynomial img = s0_image(m, Polynomial(mono, FormalSeries(1)), s0);
    for (auto& [t, c] : img.terms()) row.at(index.at(t)) = ModRank::from_complex(c.constant_term());
    rows.push_back(std::move(row));
  }
  return ModRank::rank(rows);
}

// H^0 per degree from the oracle ranks.
inline std::vector<std::size_t> oracle_h0(const ModelSpec& m, const ExtendedAction& s, int cap) {
  auto gens = all_generators(m);
  std::vector<std::size_t> h;
  for (int d = 0; d <= cap; ++d) {
    auto bm = monomial_basis(gens, d, -1), b0 = monomial_basis(gens, d, 0), b1 = monomial_basis(gens, d, 1);
    h.push_back(b0.size() - oracle_rank(m, b0, b1, s.s0()) - oracle_rank(m, bm, b0, s.s0()));
  }
  return h;
}

}  // namespace bvcheck::testing
