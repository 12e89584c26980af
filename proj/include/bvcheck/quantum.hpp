#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "bvcheck/bv.hpp"
#include "bvcheck/classical.hpp"

namespace bvcheck {

namespace detail {

inline bool field_like(const Factor& f) { return !f.gen.is_antifield(); }
/// sum_{a,b} K^{ab} dr(dr X/dphi^b)/dphi^a. Both derivatives act from the right so that odd
/// spectators to the left of a contracted pair do not pick up a sign.
inline Polynomial self_contraction(const ModelSpec& m, const Matrix& k, const Polynomial& x) {
  Polynomial out;
  for (auto& [mono, c] : x.terms()) {
    for (auto& fb : mono.factors()) {
      if (!field_like(fb)) continue;
      std::size_t b = m.index_of(fb.gen);
      auto [k1, m1] = mono.derivative(fb.gen, Side::right);
      for (auto& fa : m1.factors()) {
        if (!field_like(fa)) continue;
        const Complex& kab = k(m.index_of(fa.gen), b);
        if (kab.is_zero()) continue;
        auto [k2, m2] = m1.derivative(fa.gen, Side::right);
        out.add(m2, c * (kab * Complex(static_cast<long>(k1) * k2)));
      }
    }
  }
  return out;
}

/// exp(t D_K) X; terminates because D_K lowers the degree by two.
inline Polynomial self_contraction_exp(const ModelSpec& m, const Matrix& k, const Polynomial& x,
                                       const FormalSeries& t) {
  Polynomial out = x, term = x;
  for (long n = 1; !term.is_zero(); ++n) {
    term = self_contraction(m, k, term) * (t * Complex(Rational(1, n)));
    out += term;
  }
  return out;
}

/// m o exp(t D_W)(F (x) G) with D_W(F (x) G) = sum W^{ab} dr F/dphi^a (x) dl G/dphi^b.
inline Polynomial bicontraction(const ModelSpec& m, const Matrix& w, const Polynomial& f, const Polynomial& g,
                                const FormalSeries& t) {
  using Pair = std::pair<Monomial, Monomial>;
  std::map<Pair, FormalSeries> cur;
  for (auto& [mf, cf] : f.terms())
    for (auto& [mg, cg] : g.terms()) {
      FormalSeries c = cf * cg;
      if (c.is_zero()) continue;
      auto [it, fresh] = cur.try_emplace({mf, mg}, c);
      if (!fresh) it->second += c;
    }
  Polynomial out;
  for (long n = 1; !cur.empty(); ++n) {
    std::map<Pair, FormalSeries> next;
    for (auto& [lr, c] : cur) {
      if (c.is_zero()) continue;
      auto& [l, r] = lr;
      auto [sign, prod] = multiply(l, r);
      if (sign != 0) out.add(prod, c * Complex(sign));
      FormalSeries step = c * t * Complex(Rational(1, n));
      if (step.is_zero()) continue;
      for (auto& fa : l.factors()) {
        if (!field_like(fa)) continue;
        std::size_t a = m.index_of(fa.gen);
        auto [k1, l1] = l.derivative(fa.gen, Side::right);
        for (auto& fb : r.factors()) {
          if (!field_like(fb)) continue;
          const Complex& wab = w(a, m.index_of(fb.gen));
          if (wab.is_zero()) continue;
          auto [k2, r1] = r.derivative(fb.gen, Side::left);
          FormalSeries v = step * (wab * Complex(static_cast<long>(k1) * k2));
          auto [it, fresh] = next.try_emplace({l1, r1}, v);
          if (!fresh) it->second += v;
        }
      }
    }
    cur = std::move(next);
  }
  return out;
}

inline FormalSeries i_over_hbar() { return FormalSeries::monomial(-1, 0, Complex::i()); }

}  // namespace detail

inline void require_interior_support(const ModelSpec& m, const Polynomial& f) {
  if (!interior_supported(m, f)) throw BoundarySupport();
}

namespace detail {

// Unchecked forms. Internal code applies T^{-1} to s0-images, which reach the
// boundary sites even when the argument does not.
inline Polynomial star(const ModelSpec& m, const PropagatorSet& p, const Polynomial& f, const Polynomial& g) {
  return bicontraction(m, p.two_point, f, g, FormalSeries::hbar());
}
inline Polynomial tord(const ModelSpec& m, const PropagatorSet& p, const Polynomial& f, bool inverse = false) {
  FormalSeries t = FormalSeries::monomial(1, 0, Complex(Rational(inverse ? -1 : 1, 2)));
  return self_contraction_exp(m, p.feynman, f, t);
}
inline Polynomial tinv(const ModelSpec& m, const PropagatorSet& p, const Polynomial& f) { return tord(m, p, f, true); }

}  // namespace detail

/// F * G = sum_n hbar^n/n! <W^n, dr^n F (x) dl^n G>.
inline Polynomial star_product(const ModelSpec& m, const PropagatorSet& p, const Polynomial& f,
                               const Polynomial& g) {
  require_interior_support(m, f);
  require_interior_support(m, g);
  return detail::star(m, p, f, g);
}

/// T = exp((hbar/2) D_F); `inverse` runs it with -hbar/2.
inline Polynomial time_order(const ModelSpec& m, const PropagatorSet& p, const Polynomial& f, bool inverse = false) {
  require_interior_support(m, f);
  return detail::tord(m, p, f, inverse);
}
inline Polynomial inverse_time_order(const ModelSpec& m, const PropagatorSet& p, const Polynomial& f) {
  return time_order(m, p, f, true);
}

/// F ._T G = T(T^{-1}F T^{-1}G).
inline Polynomial time_ordered_product(const ModelSpec& m, const PropagatorSet& p, const Polynomial& f,
                                       const Polynomial& g) {
  require_interior_support(m, f);
  require_interior_support(m, g);
  return detail::tord(m, p, detail::tinv(m, p, f) * detail::tinv(m, p, g));
}

/// sum_n X^n/n! for X whose coefficients all start at lambda^1, under a finite lambda cap.
inline Polynomial poly_exp(const Polynomial& x, int lambda_cap) {
  Polynomial xc = cap_lambda(x, lambda_cap);
  for (auto& [mono, c] : xc.terms())
    for (auto& [k, v] : c.terms())
      if (k.second == 0) throw NonzeroConstantTerm();
  Polynomial out(FormalSeries(1).with_caps(FormalSeries::kUnbounded, lambda_cap));
  Polynomial term = out;
  for (long n = 1; !term.is_zero(); ++n) {
    term = term * xc * Complex(Rational(1, n));
    out += term;
  }
  return out;
}

/// e_T^{X} = T(exp X); the formal S-matrix is S(V) = e_T^{iV/hbar}.
struct ExponentialElement {
  Polynomial prefactor;  // multiplies the time-ordered exponential pointwise before T
  Polynomial exponent;
  int lambda_cap = 0;
  Polynomial value;      // T(prefactor exp(exponent)) expanded to the lambda cap
};

inline ExponentialElement exponential_element(const ModelSpec& m, const PropagatorSet& p, const Polynomial& prefactor,
                                              const Polynomial& exponent, int lambda_cap) {
  ExponentialElement e{prefactor, exponent, lambda_cap, {}};
  e.value = cap_lambda(detail::tord(m, p, cap_lambda(prefactor, lambda_cap) * poly_exp(exponent, lambda_cap)), lambda_cap);
  return e;
}

inline ExponentialElement formal_smatrix(const ModelSpec& m, const PropagatorSet& p, const Polynomial& v,
                                         int lambda_cap) {
  require_interior_support(m, v);
  return exponential_element(m, p, Polynomial(1), v * detail::i_over_hbar(), lambda_cap);
}

/// Star inverse of 1 + X with X of lambda order >= 1.
inline Polynomial star_inverse(const ModelSpec& m, const PropagatorSet& p, const Polynomial& s, int lambda_cap) {
  Polynomial sc = cap_lambda(s, lambda_cap);
  if (sc.lambda_slice(0) != Polynomial(1)) throw ZeroConstantTerm();
  Polynomial x = sc - Polynomial(1);
  Polynomial out(1), term(1);
  while (true) {
    term = cap_lambda(-detail::star(m, p, term, x), lambda_cap);
    if (term.is_zero()) break;
    out += term;
  }
  return cap_lambda(out, lambda_cap);
}

/// Interacting fields R_V(F) = S(V)^{*-1} * (S(V) ._T F) and their inverse,
/// with the S-matrix computed once.
class Interaction {
 public:
  Interaction(const ModelSpec& m, const PropagatorSet& p, const Polynomial& v, int lambda_cap)
      : m_(&m), p_(&p), cap_(lambda_cap), v_(cap_lambda(v, lambda_cap)) {
    require_interior_support(m, v);
    exp_ = poly_exp(v * detail::i_over_hbar(), lambda_cap);
    exp_inv_ = poly_exp(v * detail::i_over_hbar() * Complex(-1), lambda_cap);
    s_ = cap_lambda(detail::tord(m, p, exp_), lambda_cap);
    sinv_ = star_inverse(m, p, s_, lambda_cap);
  }

  const Polynomial& smatrix() const { return s_; }
  const Polynomial& smatrix_inverse() const { return sinv_; }
  int lambda_cap() const { return cap_; }
  const Polynomial& interaction() const { return v_; }

  /// S(V) ._T F = T(exp(iV/hbar) T^{-1}F).
  Polynomial smatrix_times(const Polynomial& f) const {
    return cap_lambda(detail::tord(*m_, *p_, exp_ * detail::tinv(*m_, *p_, f)), cap_);
  }

  /// R_V(F) = S^{*-1} * (S ._T T(F)) = S^{*-1} * T(exp(iV/hbar) F); R_0 = T.
  Polynomial field(const Polynomial& f) const {
    Polynomial t = cap_lambda(detail::tord(*m_, *p_, exp_ * cap_lambda(f, cap_)), cap_);
    return cap_lambda(detail::star(*m_, *p_, sinv_, t), cap_);
  }

  /// R_V^{-1}(G) = exp(-iV/hbar) T^{-1}(S * G), read off from T(exp(iV/hbar) F) = S * R_V(F).
  Polynomial inverse(const Polynomial& g) const {
    Polynomial sg = cap_lambda(detail::star(*m_, *p_, s_, cap_lambda(g, cap_)), cap_);
    return cap_lambda(exp_inv_ * detail::tinv(*m_, *p_, sg), cap_);
  }

  /// The same inverse by fixed-point iteration: R_V = T + O(lambda), so
  /// y <- T^{-1}(g - (R_V y - T y)) is exact after cap steps. Slower; kept as a cross-check.
  Polynomial inverse_iterative(const Polynomial& g) const {
    Polynomial gc = cap_lambda(g, cap_);
    Polynomial y = detail::tinv(*m_, *p_, gc);
    for (int k = 0; k < cap_; ++k) {
      Polynomial rest = field(y) - detail::tord(*m_, *p_, y);
      y = cap_lambda(detail::tinv(*m_, *p_, gc - rest), cap_);
    }
    return y;
  }

  /// F *_int G = R_V^{-1}(R_V F * R_V G).
  Polynomial star(const Polynomial& f, const Polynomial& g) const {
    return inverse(cap_lambda(detail::star(*m_, *p_, field(f), field(g)), cap_));
  }

 private:
  const ModelSpec* m_;
  const PropagatorSet* p_;
  int cap_;
  Polynomial v_, exp_, exp_inv_, s_, sinv_;
};

inline Polynomial interacting_field(const ModelSpec& m, const PropagatorSet& p, const Polynomial& f,
                                    const Polynomial& v, int lambda_cap) {
  require_interior_support(m, f);
  return Interaction(m, p, v, lambda_cap).field(f);
}

/// Residual slices of a difference polynomial at (hbar, lambda) orders.
struct SeriesOrder {
  int hbar = 0;
  int lambda = 0;
  Polynomial residual;
};

struct SeriesResidual {
  std::string identity;
  std::vector<SeriesOrder> orders;  // only nonzero slices within the caps are listed
  int hbar_cap = 0;
  int lambda_cap = 0;
  bool pass() const { return orders.empty(); }
  std::size_t residual_terms() const {
    std::size_t n = 0;
    for (auto& o : orders) n += o.residual.size();
    return n;
  }
};

inline SeriesResidual series_residual(std::string name, const Polynomial& diff, int hbar_cap, int lambda_cap) {
  std::map<std::pair<int, int>, Polynomial> slices;
  for (auto& [mono, c] : diff.terms())
    for (auto& [k, v] : c.terms()) {
      if (k.first > hbar_cap || k.second > lambda_cap) continue;
      slices[k].add(mono, FormalSeries(v));
    }
  SeriesResidual r{std::move(name), {}, hbar_cap, lambda_cap};
  for (auto& [k, poly] : slices)
    if (!poly.is_zero()) r.orders.push_back({k.first, k.second, poly});
  return r;
}

struct QuantumBvPair {
  Polynomial conjugated;  // T^{-1}(s0(T X))
  Polynomial formula;     // s0 X - i hbar lap X
};

/// Free quantum BV operator in both forms. The consistency conditions are a
/// precondition of the identity and are checked first.
inline QuantumBvPair quantum_bv_free(const ModelSpec& m, const PropagatorSet& p, const ExtendedAction& s,
                                     const Polynomial& x) {
  if (!consistency_check(m, p).pass()) throw ConsistencyUnverified();
  require_interior_support(m, x);
  const Polynomial s0 = s.s0();
  QuantumBvPair out;
  out.conjugated = detail::tinv(m, p, antibracket(detail::tord(m, p, x), s0));
  out.formula = antibracket(x, s0) - bv_laplacian(x) * FormalSeries::monomial(1, 0, Complex::i());
  return out;
}

/// (1/2){S0+V, S0+V} - i hbar lap(S0+V), interior part.
inline Polynomial qme_check(const ModelSpec& m, const ExtendedAction& s) {
  Polynomial t = s.total();
  Polynomial q = antibracket(t, t) * Complex(Rational(1, 2)) - bv_laplacian(t) * FormalSeries::monomial(1, 0, Complex::i());
  return restrict_interior(m, q);
}

/// s0 applied to S(W) against (i/hbar) S(W) ._T T((1/2){S0+W, S0+W} - i hbar lap W),
/// W = V + F. Both sides are expanded exactly; residuals are listed per order.
struct MwiReport {
  SeriesResidual residual;
  Polynomial lhs;
  Polynomial rhs;
  bool pass() const { return residual.pass(); }
};

inline MwiReport mwi_check(const ModelSpec& m, const PropagatorSet& p, const ExtendedAction& s,
                           const Polynomial& v, const Polynomial& f, int hbar_cap, int lambda_cap) {
  Polynomial w = cap_lambda(v + f, lambda_cap);
  require_interior_support(m, w);
  const Polynomial s0 = s.s0();
  Polynomial e = poly_exp(w * detail::i_over_hbar(), lambda_cap);
  Polynomial smat = cap_lambda(detail::tord(m, p, e), lambda_cap);
  MwiReport r;
  r.lhs = cap_lambda(antibracket(smat, s0), lambda_cap);
  Polynomial full = s0 + w;
  Polynomial insertion = antibracket(full, full) * Complex(Rational(1, 2)) -
                         bv_laplacian(w) * FormalSeries::monomial(1, 0, Complex::i());
  // S(W) ._T T(Y) = T(exp(iW/hbar) Y)
  r.rhs = cap_lambda(detail::tord(m, p, e * cap_lambda(insertion, lambda_cap)) * detail::i_over_hbar(), lambda_cap);
  r.residual = series_residual("master_ward_identity", r.lhs - r.rhs, hbar_cap, lambda_cap);
  return r;
}

/// Interacting BV operator by conjugation, R_V^{-1} s0 R_V X, against the local
/// form {X, S0 + V} - i hbar lap X. At V = 0 this is the free T-conjugation.
struct InteractingBvPair {
  Polynomial conjugated;
  Polynomial local;
};

inline InteractingBvPair interacting_bv(const ModelSpec& m, const ExtendedAction& s, const Interaction& rv,
                                        const Polynomial& x) {
  require_interior_support(m, x);
  const int cap = rv.lambda_cap();
  const Polynomial s0 = s.s0();
  InteractingBvPair out;
  out.conjugated = rv.inverse(cap_lambda(antibracket(rv.field(x), s0), cap));
  out.local = cap_lambda(antibracket(x, s0 + rv.interaction()) - bv_laplacian(x) * FormalSeries::monomial(1, 0, Complex::i()), cap);
  return out;
}

}  // namespace bvcheck
