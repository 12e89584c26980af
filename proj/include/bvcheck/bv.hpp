#pragma once

#include <optional>
#include <set>
#include <variant>

#include "bvcheck/polynomial.hpp"

namespace bvcheck {

namespace detail {

// Field-like generators g such that g or its antifield occurs in one of the arguments.
inline std::set<Generator> paired_fields(const Polynomial& x, const Polynomial& y) {
  std::set<Generator> out;
  for (const Polynomial* p : {&x, &y})
    for (auto& [m, c] : p->terms())
      for (auto& f : m.factors()) out.insert(f.gen.is_antifield() ? f.gen.dual() : f.gen);
  return out;
}

}  // namespace detail

/// {X,Y} = sum_g dr X/dg * dl Y/dg' - dr X/dg' * dl Y/dg, g' the antifield of g.
inline Polynomial antibracket(const Polynomial& x, const Polynomial& y) {
  Polynomial r;
  if (x.is_zero() || y.is_zero()) return r;
  for (Generator g : detail::paired_fields(x, y)) {
    Generator gd = g.dual();
    Polynomial dxg = derivative(x, g, Side::right);
    if (!dxg.is_zero()) {
      Polynomial dyd = derivative(y, gd, Side::left);
      if (!dyd.is_zero()) r += dxg * dyd;
    }
    Polynomial dxd = derivative(x, gd, Side::right);
    if (!dxd.is_zero()) {
      Polynomial dyg = derivative(y, g, Side::left);
      if (!dyg.is_zero()) r -= dxd * dyg;
    }
  }
  return r;
}

/// BV Laplacian, applied monomial by monomial:
///   lap X = -sum_g (-1)^{|g|} dr(dr X/dg')/dg.
/// Built from right derivatives only, so it obeys a right-handed Leibniz rule
/// like s0 = {., S0} does (see conventions.hpp). The (-1)^{|g|} factor is
/// trivial for even fields and matters once odd ghosts are present.
/// With strict = true a ghost-number inhomogeneous argument is rejected.
inline Polynomial bv_laplacian(const Polynomial& x, bool strict = false) {
  if (strict && !x.gh()) throw MixedGrade();
  Polynomial r;
  for (auto& [m, c] : x.terms()) {
    for (auto& f : m.factors()) {
      if (!f.gen.is_antifield()) continue;
      int s = f.gen.dual().odd() ? 1 : -1;
      auto [k1, m1] = m.derivative(f.gen, Side::right);
      auto [k2, m2] = m1.derivative(f.gen.dual(), Side::right);
      if (k2 == 0) continue;
      r.add(m2, c * Complex(static_cast<long>(s) * k1 * k2));
    }
  }
  return r;
}

struct MixedTag {
  friend bool operator==(MixedTag, MixedTag) { return true; }
};

/// (gh, af, ta) of a homogeneous polynomial or Mixed.
inline std::variant<Grading, MixedTag> grading(const Polynomial& x) {
  auto g = x.grading();
  if (!g) return MixedTag{};
  return *g;
}

}  // namespace bvcheck
