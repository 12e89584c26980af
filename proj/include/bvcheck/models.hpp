#pragma once

#include <string>
#include <vector>

#include "bvcheck/model.hpp"

namespace bvcheck::models {

/// Interior cutoff: 1 on [radius, N-1-radius], 0 elsewhere.
inline std::vector<Rational> interior_cutoff(int sites, int radius = 1) {
  std::vector<Rational> f(static_cast<std::size_t>(sites), 0);
  for (int i = radius; i <= sites - 1 - radius; ++i) f[static_cast<std::size_t>(i)] = 1;
  return f;
}

/// One even component on a chain of N sites:
///   S00 = 1/2 sum_links (phi_{i+1} - phi_i)^2 - (m2/2) sum phi_i^2,
///   V   = (lambda/6) sum f_i phi_i^3.
/// P is minus the second difference minus m2, with free-end rows at the boundary.
inline ModelSpec scalar_chain(int sites, const Rational& m2 = 0, std::vector<Rational> cutoff = {}) {
  ModelSpec m("scalar_chain", sites, {{"phi", Kind::field}});
  if (cutoff.empty()) cutoff = interior_cutoff(sites);
  auto phi = [&](int i) { return Polynomial(m.field(i, 0)); };
  const Complex half(Rational(1, 2));
  for (int i = 0; i + 1 < sites; ++i) {
    Polynomial d = phi(i + 1) - phi(i);
    m.s00 += d * d * half;
  }
  if (sgn(m2) != 0)
    for (int i = 0; i < sites; ++i) m.s00 -= phi(i) * phi(i) * Complex(m2 / 2);
  Polynomial cubic_density;
  for (int i = 0; i < sites; ++i) {
    Polynomial cube = phi(i) * phi(i) * phi(i);
    FormalSeries coupling = FormalSeries::lambda() * Complex(Rational(1, 6));
    cubic_density += cube * coupling;
    const Rational& f = cutoff.at(static_cast<std::size_t>(i));
    if (sgn(f) != 0) m.interaction += cube * (coupling * Complex(f));
  }
  m.lagrangian = m.s00 + cubic_density;
  m.validate();
  return m;
}

/// Dirichlet second difference on N sites (rows truncated at the ends).
inline Matrix dirichlet_laplacian(int sites) {
  auto n = static_cast<std::size_t>(sites);
  Matrix l(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    l(i, i) = Complex(-2);
    if (i > 0) l(i, i - 1) = Complex(1);
    if (i + 1 < n) l(i, i + 1) = Complex(1);
  }
  return l;
}

/// Shift-symmetric toy with fields q, r, ghost c, antighost cbar and
/// Nakanishi-Lautrup field B:
///   S00    = 1/2 sum_links (du_i)^2, u = q - r,
///   theta0 = sum q'_i c_i + r'_i c_i + i cbar'_i B_i,
///   Psi    = i sum_k cbar_k ((a/2)(L B)_k + (L w)_k), w = q + r,
///   V      = (lambda/6) sum f_i u_i^3,
/// with L the Dirichlet second difference. The q + r combination in Psi is
/// what makes the gauge-fixed operator retarded-invertible (q - r is gauge
/// invariant and cannot fix the shift).
inline ModelSpec shift_gauge_toy(int sites, const Rational& a = 1, std::vector<Rational> cutoff = {}) {
  ModelSpec m("shift_gauge_toy", sites,
              {{"q", Kind::field}, {"r", Kind::field}, {"c", Kind::ghost}, {"cbar", Kind::antighost}, {"B", Kind::nl_field}});
  if (cutoff.empty()) cutoff = interior_cutoff(sites);
  enum { Q, R, C, CBAR, B };
  auto g = [&](int i, int comp) { return Polynomial(m.field(i, comp)); };
  auto gd = [&](int i, int comp) { return Polynomial(m.field(i, comp).dual()); };
  auto u = [&](int i) { return g(i, Q) - g(i, R); };
  auto w = [&](int i) { return g(i, Q) + g(i, R); };
  const Complex half(Rational(1, 2));
  const Complex i_unit = Complex::i();
  for (int i = 0; i + 1 < sites; ++i) {
    Polynomial d = u(i + 1) - u(i);
    m.s00 += d * d * half;
  }
  for (int i = 0; i < sites; ++i) {
    m.theta0 += gd(i, Q) * g(i, C) + gd(i, R) * g(i, C) + gd(i, CBAR) * g(i, B) * i_unit;
  }
  Matrix l = dirichlet_laplacian(sites);
  Polynomial psi;
  for (int k = 0; k < sites; ++k) {
    Polynomial inner;
    for (int j = 0; j < sites; ++j) {
      const Complex& lkj = l(static_cast<std::size_t>(k), static_cast<std::size_t>(j));
      if (lkj.is_zero()) continue;
      inner += (g(j, B) * Complex(a / 2) + w(j)) * lkj;
    }
    psi += g(k, CBAR) * inner * i_unit;
  }
  m.gauge_fermion = psi;
  Polynomial cubic_density;
  for (int i = 0; i < sites; ++i) {
    Polynomial cube = u(i) * u(i) * u(i);
    FormalSeries coupling = FormalSeries::lambda() * Complex(Rational(1, 6));
    cubic_density += cube * coupling;
    const Rational& f = cutoff.at(static_cast<std::size_t>(i));
    if (sgn(f) != 0) m.interaction += cube * (coupling * Complex(f));
  }
  m.lagrangian = m.s00 + cubic_density;
  m.validate();
  return m;
}

}  // namespace bvcheck::models
