#pragma once

#include <array>
#include <functional>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "bvcheck/quantum.hpp"

namespace bvcheck {

/// a precedes b in the site order: a ends no later than b starts, and they are disjoint.
inline bool precedes(const std::set<int>& a, const std::set<int>& b) {
  if (a.empty() || b.empty()) return true;
  return *a.rbegin() <= *b.begin() && *a.rbegin() != *b.begin();
}

/// One letter S(payload)^{exponent}. Symbolic letters stand for an unspecified
/// functional with a declared support; they are never split.
struct Letter {
  Polynomial payload;
  std::string label;
  std::set<int> support;
  int exponent = 1;

  bool symbolic() const { return !label.empty(); }
  bool same_symbol(const Letter& o) const { return label == o.label && payload == o.payload; }
  friend bool operator==(const Letter& a, const Letter& b) {
    return a.same_symbol(b) && a.exponent == b.exponent && a.support == b.support;
  }
};

/// Element of the group algebra of the free group on the symbols S(F).
class SWord {
 public:
  SWord() = default;

  static SWord s(const Polynomial& f, int exponent = 1) {
    SWord w;
    w.letters_.push_back({f, {}, f.support(), exponent});
    return w;
  }
  static SWord symbol(std::string label, std::set<int> support, int exponent = 1) {
    SWord w;
    w.letters_.push_back({Polynomial(), std::move(label), std::move(support), exponent});
    return w;
  }

  const std::vector<Letter>& letters() const { return letters_; }
  std::vector<Letter>& letters() { return letters_; }
  bool empty() const { return letters_.empty(); }
  std::size_t size() const { return letters_.size(); }

  SWord inverse() const {
    SWord w;
    for (auto it = letters_.rbegin(); it != letters_.rend(); ++it) {
      Letter l = *it;
      l.exponent = -l.exponent;
      w.letters_.push_back(std::move(l));
    }
    return w;
  }

  friend SWord operator*(SWord a, const SWord& b) {
    a.letters_.insert(a.letters_.end(), b.letters_.begin(), b.letters_.end());
    return a;
  }
  friend bool operator==(const SWord& a, const SWord& b) { return a.letters_ == b.letters_; }
  friend std::ostream& operator<<(std::ostream& os, const SWord& w) { return os << w.str(); }

  std::string str() const {
    if (letters_.empty()) return "1";
    std::string s;
    for (auto& l : letters_) {
      if (!s.empty()) s += " ";
      s += "S(" + (l.symbolic() ? l.label : l.payload.str()) + ")";
      if (l.exponent < 0) s += "^-1";
    }
    return s;
  }

 private:
  std::vector<Letter> letters_;
};

struct ReduceStats {
  int cancellations = 0;
  int identity_removals = 0;
  int hammerstein_rewrites = 0;
};

namespace detail {

/// Splits a payload at the first site cut k that leaves monomials wholly at or
/// before k (early) and wholly after k (late). Straddling monomials and constants
/// form the common part. Returns {late + common, common, common + early}.
inline std::optional<std::array<Polynomial, 3>> hammerstein_split(const Polynomial& g) {
  std::set<int> sites = g.support();
  if (sites.size() < 2) return std::nullopt;
  for (auto it = sites.begin(); std::next(it) != sites.end(); ++it) {
    int k = *it;
    Polynomial early, late, common;
    for (auto& [mono, c] : g.terms()) {
      Polynomial t(mono, c);
      std::set<int> s = t.support();
      if (!s.empty() && *s.rbegin() <= k)
        early += t;
      else if (!s.empty() && *s.begin() > k)
        late += t;
      else
        common += t;
    }
    if (!early.is_zero() && !late.is_zero()) return std::array<Polynomial, 3>{late + common, common, common + early};
  }
  return std::nullopt;
}

}  // namespace detail

/// Free reduction, S(0) removal and directed Hammerstein rewriting to a fixed point.
/// The rewrite puts the later payload on the left, S(E+F+L) -> S(L+F) S(F)^-1 S(F+E)
/// for E before L, matching causal factorization of the time-ordered product.
/// Every rewrite replaces a letter by letters with strictly fewer monomials, so
/// the loop terminates.
inline SWord word_reduce(const SWord& w, ReduceStats* stats = nullptr) {
  ReduceStats local;
  ReduceStats& st = stats ? *stats : local;
  std::vector<Letter> cur = w.letters();
  while (true) {
    std::vector<Letter> stack;
    for (auto& l : cur) {
      if (!l.symbolic() && l.payload.is_zero()) {
        ++st.identity_removals;
        continue;
      }
      if (!stack.empty() && stack.back().same_symbol(l) && stack.back().exponent == -l.exponent) {
        stack.pop_back();
        ++st.cancellations;
        continue;
      }
      stack.push_back(l);
    }
    bool rewrote = false;
    std::vector<Letter> next;
    for (auto& l : stack) {
      auto split = l.symbolic() ? std::nullopt : detail::hammerstein_split(l.payload);
      if (!split) {
        next.push_back(l);
        continue;
      }
      rewrote = true;
      ++st.hammerstein_rewrites;
      auto& [a, b, c] = *split;
      SWord piece = SWord::s(a) * SWord::s(b, -1) * SWord::s(c);
      if (l.exponent < 0) piece = piece.inverse();
      next.insert(next.end(), piece.letters().begin(), piece.letters().end());
    }
    cur = std::move(next);
    if (!rewrote) break;
  }
  SWord out;
  out.letters() = std::move(cur);
  return out;
}

/// Product of S(payload)^{+-1} under the star product, with S(G) = T(exp(iG/hbar)).
inline Polynomial evaluate_word(const ModelSpec& m, const PropagatorSet& p, const SWord& w, int lambda_cap) {
  Polynomial out(1);
  for (auto& l : w.letters()) {
    if (l.symbolic()) throw DomainError("symbolic letter '" + l.label + "' has no concrete value");
    Polynomial s = formal_smatrix(m, p, l.payload, lambda_cap).value;
    if (l.exponent < 0) s = star_inverse(m, p, s, lambda_cap);
    out = cap_lambda(detail::star(m, p, out, s), lambda_cap);
  }
  return out;
}

/// A named bundle of residuals; passes when every part does.
struct IdentityReport {
  std::string name;
  std::vector<SeriesResidual> parts;
  std::map<std::string, Polynomial> values;  // intermediate results worth inspecting
  bool pass() const {
    for (auto& r : parts)
      if (!r.pass()) return false;
    return true;
  }
};

struct HammersteinReport {
  SeriesResidual residual;  // S(F1+F+F2) - S(F2+F) * S(F)^-1 * S(F+F1)
  SeriesResidual mirrored;  // same with the factors in the opposite order; informational
  bool pass() const { return residual.pass(); }
};

/// Requires supp F1 before supp F2. The later argument F2 stands on the left, as in
/// the causal factorization T(later) * T(earlier).
inline HammersteinReport hammerstein_check(const ModelSpec& m, const PropagatorSet& p, const Polynomial& f1,
                                           const Polynomial& f, const Polynomial& f2, int hbar_cap, int lambda_cap) {
  if (!precedes(f1.support(), f2.support())) throw SupportsNotOrdered();
  auto value = [&](const SWord& w) { return evaluate_word(m, p, w, lambda_cap); };
  Polynomial lhs = value(SWord::s(f1 + f + f2));
  Polynomial rhs = value(SWord::s(f2 + f) * SWord::s(f, -1) * SWord::s(f + f1));
  Polynomial mirror = value(SWord::s(f1 + f) * SWord::s(f, -1) * SWord::s(f + f2));
  return {series_residual("hammerstein", lhs - rhs, hbar_cap, lambda_cap),
          series_residual("hammerstein_mirrored", lhs - mirror, hbar_cap, lambda_cap)};
}

inline Configuration add(const Configuration& a, const Configuration& b) {
  Configuration c(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) c[i] = a[i] + b[i];
  return c;
}

inline Configuration scale(const Configuration& a, const Rational& t) {
  Configuration c(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) c[i] = a[i] * Complex(t);
  return c;
}

/// sigma*_psi G = G(phi + psi).
inline Polynomial pullback(const ModelSpec& m, const Configuration& psi, const Polynomial& g) {
  return m.shift(psi)(g);
}

/// alpha_psi(L)(f) = L(f)[phi + psi] - L(f)[phi].
inline Polynomial alpha(const CutoffLagrangian& l, const std::vector<Rational>& f, const Configuration& psi) {
  return l.delta(psi, f);
}

/// alpha_{psi+chi} = sigma*_psi alpha_chi + alpha_psi and the form with psi, chi swapped,
/// compared as polynomials and at each probe configuration.
inline IdentityReport cocycle_check(const CutoffLagrangian& l, const Configuration& psi, const Configuration& chi,
                                    const std::vector<Configuration>& probes) {
  const ModelSpec& m = l.model();
  std::set<int> supp = l.support_of(psi);
  for (int s : l.support_of(chi)) supp.insert(s);
  l.require_fit(supp);
  std::vector<Rational> f = l.admissible_cutoff(supp);
  Polynomial both = alpha(l, f, add(psi, chi));
  Polynomial a = alpha(l, f, psi), b = alpha(l, f, chi);
  Polynomial r1 = both - (pullback(m, psi, b) + a);
  Polynomial r2 = both - (pullback(m, chi, a) + b);
  const int u = FormalSeries::kUnbounded;
  IdentityReport rep{"cocycle", {series_residual("cocycle", r1, u, u), series_residual("cocycle_swapped", r2, u, u)}, {}};
  for (std::size_t k = 0; k < probes.size(); ++k) {
    Substitution ev = m.evaluation(probes[k]);
    rep.parts.push_back(series_residual("cocycle_probe_" + std::to_string(k), ev(r1), u, u));
    rep.parts.push_back(series_residual("cocycle_swapped_probe_" + std::to_string(k), ev(r2), u, u));
  }
  return rep;
}

/// alpha-hat_psi applied letter by letter: S(G) -> S(alpha_psi L(f) + sigma*_psi G) S(alpha_psi L(f))^-1.
inline SWord alpha_hat(const SWord& w, const CutoffLagrangian& l, const std::vector<Rational>& f,
                       const Configuration& psi) {
  const ModelSpec& m = l.model();
  Polynomial a = alpha(l, f, psi);
  SWord out;
  for (auto& letter : w.letters()) {
    if (letter.symbolic()) throw DomainError("alpha-hat needs a polynomial payload, got '" + letter.label + "'");
    SWord img = SWord::s(a + pullback(m, psi, letter.payload)) * SWord::s(a, -1);
    out = out * (letter.exponent < 0 ? img.inverse() : img);
  }
  return out;
}

inline SWord alpha_hat(const Polynomial& fn, const CutoffLagrangian& l, const std::vector<Rational>& f,
                       const Configuration& psi) {
  return alpha_hat(SWord::s(fn), l, f, psi);
}

/// Concrete alpha-hat. Translations must carry a factor lambda for S(alpha_psi L) to be
/// a formal power series.
inline Polynomial alpha_hat_series(const ModelSpec& m, const PropagatorSet& p, const Polynomial& fn,
                                   const CutoffLagrangian& l, const std::vector<Rational>& f,
                                   const Configuration& psi, int lambda_cap) {
  return evaluate_word(m, p, alpha_hat(fn, l, f, psi), lambda_cap);
}

/// alpha-hat_{psi+chi} = alpha-hat_psi o alpha-hat_chi = alpha-hat_chi o alpha-hat_psi on S(F),
/// with one cutoff admissible for both translations. Abstract mode compares reduced
/// words; concrete mode compares series (when a propagator set is given).
inline IdentityReport action_check(const CutoffLagrangian& l, const Configuration& psi, const Configuration& chi,
                                   const Polynomial& fn, const PropagatorSet* p = nullptr, int hbar_cap = 0,
                                   int lambda_cap = 0) {
  std::set<int> supp = l.support_of(psi);
  for (int s : l.support_of(chi)) supp.insert(s);
  l.require_fit(supp);
  std::vector<Rational> f = l.admissible_cutoff(supp);
  SWord sum = alpha_hat(fn, l, f, add(psi, chi));
  SWord psi_chi = alpha_hat(alpha_hat(fn, l, f, chi), l, f, psi);
  SWord chi_psi = alpha_hat(alpha_hat(fn, l, f, psi), l, f, chi);
  IdentityReport rep{"alpha_hat_action", {}, {}};
  auto word_part = [&](const std::string& name, const SWord& w) {
    SeriesResidual r{name, {}, 0, 0};
    if (!(word_reduce(w) == word_reduce(sum))) r.orders.push_back({0, 0, Polynomial(1)});
    rep.parts.push_back(r);
  };
  word_part("action_abstract_psi_chi", psi_chi);
  word_part("action_abstract_chi_psi", chi_psi);
  if (p) {
    const ModelSpec& m = l.model();
    Polynomial target = evaluate_word(m, *p, sum, lambda_cap);
    rep.parts.push_back(series_residual("action_concrete_psi_chi", target - evaluate_word(m, *p, psi_chi, lambda_cap),
                                        hbar_cap, lambda_cap));
    rep.parts.push_back(series_residual("action_concrete_chi_psi", target - evaluate_word(m, *p, chi_psi, lambda_cap),
                                        hbar_cap, lambda_cap));
  }
  return rep;
}

inline void require_quadratic(const CutoffLagrangian& l) {
  for (auto& [site, d] : l.density())
    if (d.max_degree() > 2) throw NonQuadraticAction();
}

/// Free Schwinger-Dyson relation alpha-hat_psi(S(F)) = S(F) for quadratic L0.
inline IdentityReport sd_relation_check(const ModelSpec& m, const PropagatorSet& p, const CutoffLagrangian& l0,
                                        const Configuration& psi, const Polynomial& fn, int hbar_cap, int lambda_cap) {
  require_quadratic(l0);
  std::vector<Rational> f = l0.admissible_cutoff(l0.support_of(psi));
  Polynomial lhs = alpha_hat_series(m, p, fn, l0, f, psi, lambda_cap);
  Polynomial rhs = formal_smatrix(m, p, fn, lambda_cap).value;
  return {"schwinger_dyson", {series_residual("schwinger_dyson", lhs - rhs, hbar_cap, lambda_cap)}, {}};
}

/// S(F) * S(dL0(psi)) = S(dL0(psi)) * S(F).
inline IdentityReport sd_centrality_check(const ModelSpec& m, const PropagatorSet& p, const CutoffLagrangian& l0,
                                          const Configuration& psi, const Polynomial& fn, int hbar_cap,
                                          int lambda_cap) {
  require_quadratic(l0);
  Polynomial d = l0.delta(psi);
  Polynomial a = evaluate_word(m, p, SWord::s(fn) * SWord::s(d), lambda_cap);
  Polynomial b = evaluate_word(m, p, SWord::s(d) * SWord::s(fn), lambda_cap);
  return {"sd_centrality", {series_residual("sd_centrality", a - b, hbar_cap, lambda_cap)}, {}};
}

/// d/dt g(t) at t = 0 for g polynomial in t of degree <= deg, from exact values at
/// t = 0..deg. One extra node guards the degree bound.
inline Polynomial derivative_at_zero(const std::function<Polynomial(const Rational&)>& g, int deg) {
  std::vector<Polynomial> v;
  for (int k = 0; k <= deg + 1; ++k) v.push_back(g(Rational(k)));
  auto weight = [&](int k, const Rational& t) {  // Lagrange basis on 0..deg at t
    Rational w = 1;
    for (int j = 0; j <= deg; ++j)
      if (j != k) w *= (t - j) / Rational(k - j);
    return w;
  };
  Polynomial extra;
  for (int k = 0; k <= deg; ++k) extra += v[static_cast<std::size_t>(k)] * Complex(weight(k, Rational(deg + 1)));
  if (extra != v.back()) throw DomainError("t-degree exceeds the interpolation bound");
  Polynomial out;
  for (int k = 0; k <= deg; ++k) {
    Rational d = 0;  // l_k'(0)
    if (k == 0) {
      for (int j = 1; j <= deg; ++j) d -= Rational(1) / j;
    } else {
      d = Rational(1) / k;
      for (int j = 1; j <= deg; ++j)
        if (j != k) d *= Rational(-j) / Rational(k - j);
    }
    out += v[static_cast<std::size_t>(k)] * Complex(d);
  }
  return out;
}

/// X_psi = -sum psi_a phi'_a, the constant vector field in antifield form, so that
/// s0(X_psi) = <psi, P phi>.
inline Polynomial translation_field(const ModelSpec& m, const Configuration& psi) {
  Polynomial x;
  for (std::size_t a = 0; a < psi.size(); ++a)
    if (!psi[a].is_zero()) x -= Polynomial(m.antifield(a)) * psi[a];
  return x;
}

enum class InfinitesimalKind { alpha_tilde, beta, alpha_hat };

namespace detail {

inline void require_lambda_weight(const Configuration& psi) {
  for (auto& c : psi)
    for (auto& [k, v] : c.terms())
      if (k.second < 1) throw DomainError("translation must carry at least one power of lambda");
}

/// Koszul-Tate part of s0 near supp: {Y, L0(f)} only moves antifields.
inline Polynomial koszul(const Polynomial& y, const Polynomial& l0f) { return antibracket(y, l0f); }

}  // namespace detail

/// Compares the t-derivative at 0 of the finite action along t psi with its
/// infinitesimal formulas. L0 is the model's free Lagrangian with a cutoff admissible
/// for supp psi. S0 here is the antifield-free S00, so s0 = {., S00} is the Koszul-Tate
/// part; the gauge part of the full s0 would act on non-invariant F.
///  alpha_tilde: S(F) * S(dL0(t psi)) against (i/hbar) S(F) * s0(X_psi), the delta_S form
///               (i/hbar) delta_S(S(F) * X_psi) and the time-ordered form (i/hbar) delta_S(S(F) ._T X_psi).
///  beta:        dL0(t psi) + sigma*_{t psi} F against {X_psi, S0 + F}.
///  alpha_hat:   alpha-hat_{t psi}(S(F)) against (i/hbar)(S(F) ._T s(X_psi) - s0(S(F) ._T X_psi)) and
///               the same with the quantum operator s-hat.
inline IdentityReport infinitesimal_check(InfinitesimalKind kind, const ModelSpec& m, const PropagatorSet& p,
                                          const Configuration& psi, const Polynomial& fn, int hbar_cap,
                                          int lambda_cap) {
  CutoffLagrangian l0(m, m.s00);
  std::set<int> supp = l0.support_of(psi);
  l0.require_fit(supp);
  const std::vector<Rational> f = l0.admissible_cutoff(supp);
  const Polynomial l0f = l0(f);
  const Polynomial& s0 = m.s00;
  const Polynomial xpsi = translation_field(m, psi);
  const FormalSeries ih = detail::i_over_hbar();
  const int u = FormalSeries::kUnbounded;
  IdentityReport rep;

  if (kind == InfinitesimalKind::beta) {
    rep.name = "beta_infinitesimal";
    int deg = std::max(2, fn.max_degree());
    Polynomial d = derivative_at_zero(
        [&](const Rational& t) {
          Configuration tp = scale(psi, t);
          return alpha(l0, f, tp) + pullback(m, tp, fn);
        },
        deg);
    rep.values["derivative"] = d;
    rep.parts.push_back(series_residual("beta_bracket_form", d - antibracket(xpsi, s0 + fn), u, u));
    return rep;
  }

  detail::require_lambda_weight(psi);
  require_interior_support(m, fn);
  const Polynomial e = poly_exp(fn * ih, lambda_cap);
  const Polynomial sf = cap_lambda(detail::tord(m, p, e), lambda_cap);
  auto cap = [&](const Polynomial& x) { return cap_lambda(x, lambda_cap); };
  // S(F) ._T Y for a classical Y is T(exp(iF/hbar) Y).
  auto tprod = [&](const Polynomial& y) { return cap(detail::tord(m, p, e * cap(y))); };

  if (kind == InfinitesimalKind::alpha_tilde) {
    rep.name = "alpha_tilde_infinitesimal";
    Polynomial d = derivative_at_zero(
        [&](const Rational& t) {
          return evaluate_word(m, p, SWord::s(fn) * SWord::s(alpha(l0, f, scale(psi, t))), lambda_cap);
        },
        lambda_cap);
    rep.values["derivative"] = d;
    Polynomial s0_form = cap(detail::star(m, p, sf, antibracket(xpsi, s0)) * ih);
    Polynomial delta_form = cap(detail::koszul(detail::star(m, p, sf, xpsi), l0f) * ih);
    Polynomial t_form = cap(detail::koszul(tprod(xpsi), l0f) * ih);
    rep.parts.push_back(series_residual("alpha_tilde_s0_form", d - s0_form, hbar_cap, lambda_cap));
    rep.parts.push_back(series_residual("alpha_tilde_delta_form", d - delta_form, hbar_cap, lambda_cap));
    rep.parts.push_back(series_residual("alpha_tilde_time_ordered_form", d - t_form, hbar_cap, lambda_cap));
    return rep;
  }

  rep.name = "alpha_hat_infinitesimal";
  Polynomial d = derivative_at_zero(
      [&](const Rational& t) { return alpha_hat_series(m, p, fn, l0, f, scale(psi, t), lambda_cap); }, lambda_cap);
  rep.values["derivative"] = d;
  Polynomial sx = antibracket(xpsi, s0 + fn);
  Polynomial shat_x = sx - bv_laplacian(xpsi) * FormalSeries::monomial(1, 0, Complex::i());
  Polynomial tail = cap(antibracket(tprod(xpsi), s0));
  rep.parts.push_back(series_residual("alpha_hat_classical_form", d - cap((tprod(sx) - tail) * ih), hbar_cap, lambda_cap));
  rep.parts.push_back(series_residual("alpha_hat_quantum_form", d - cap((tprod(shat_x) - tail) * ih), hbar_cap, lambda_cap));
  return rep;
}

/// A vector field sum_a X^a(phi) d/dphi^a, keyed by the flat index a.
using VectorField = std::map<std::size_t, Polynomial>;

inline Polynomial vector_field_antifield_form(const ModelSpec& m, const VectorField& x) {
  Polynomial out;
  for (auto& [a, c] : x) out -= c * Polynomial(m.antifield(a));
  return out;
}

namespace detail {

inline Polynomial relabel_copy(const Polynomial& x, int from, int to) {
  Polynomial out;
  for (auto& [mono, c] : x.terms()) {
    Polynomial t(c);
    for (auto& f : mono.factors()) {
      Generator g = f.gen.copy() == from ? f.gen.with_copy(to) : f.gen;
      t = t * Polynomial(Monomial(g, f.power), FormalSeries(1));
    }
    out += t;
  }
  return out;
}

/// exp(t D) X with D = sum K^{ab} d/dphi^a_(ci) d/dphi^b_(cj) on even generators.
inline Polynomial copy_contraction_exp(const ModelSpec& m, const Matrix& k, const Polynomial& x, int ci, int cj,
                                       const FormalSeries& t) {
  auto once = [&](const Polynomial& y) {
    Polynomial out;
    for (auto& [mono, c] : y.terms())
      for (auto& fb : mono.factors()) {
        if (!field_like(fb) || fb.gen.copy() != cj) continue;
        std::size_t b = m.index_of(fb.gen);
        auto [k1, m1] = mono.derivative(fb.gen, Side::right);
        for (auto& fa : m1.factors()) {
          if (!field_like(fa) || fa.gen.copy() != ci) continue;
          const Complex& kab = k(m.index_of(fa.gen), b);
          if (kab.is_zero()) continue;
          auto [k2, m2] = m1.derivative(fa.gen, Side::right);
          out.add(m2, c * (kab * Complex(static_cast<long>(k1) * k2)));
        }
      }
    return out;
  };
  Polynomial out = x, term = x;
  for (long n = 1; !term.is_zero(); ++n) {
    term = once(term) * (t * Complex(Rational(1, n)));
    out += term;
  }
  return out;
}

inline void require_even(const Polynomial& x, const char* what) {
  for (auto g : x.generators())
    if (g.odd()) throw DomainError(std::string(what) + " must involve even generators only");
}

}  // namespace detail

struct DiffeoReport {
  IdentityReport identity;
  Polynomial derivative;  // d/dt of the three-configuration formula at t = 0
  Polynomial expected;    // (i/hbar) delta_S(S(F) ._T X)
  Polynomial beta;        // beta_g(F) = alpha_g L0(f) + sigma*_g F + D_F(X) at g = exp(X)
  bool pass() const { return identity.pass(); }
};

/// Anomaly hook D_F(X); the default is zero.
using AnomalyTerm = std::function<Polynomial(const Polynomial& f, const VectorField& x)>;

/// Three-configuration definition of alpha-tilde_{exp(tX)}(S(F)): S(F) lives on copy 0,
/// S(alpha_{exp(tX(phi3))} L0 [phi2]) on copies 2 and 3; contract 0-3 with the Feynman
/// propagator, identify 3 with 0, contract 0-2 with W, identify 2 with 0. The field
/// dependent flow exp(tX(phi3)) acts on phi2 as the translation by tX(phi3).
/// Restricted to even generators, where no contraction signs arise.
inline DiffeoReport diffeo_action_check(const ModelSpec& m, const PropagatorSet& p, const VectorField& x,
                                        const Polynomial& fn, int hbar_cap, int lambda_cap,
                                        const AnomalyTerm& anomaly = {}) {
  detail::require_even(fn, "F");
  require_interior_support(m, fn);
  std::set<int> supp;
  for (auto& [a, c] : x) {
    if (m.odd(a)) throw DomainError("vector field must act on even components");
    detail::require_even(c, "vector field coefficients");
    require_interior_support(m, c);
    for (auto& [mono, v] : c.terms())
      for (auto& [k, z] : v.terms())
        if (k.second < 1) throw DomainError("vector field must carry at least one power of lambda");
    supp.insert(m.site_of(a));
  }
  CutoffLagrangian l0(m, m.s00);
  l0.require_fit(supp);
  const std::vector<Rational> f = l0.admissible_cutoff(supp);
  const Polynomial l0f = l0(f);
  const FormalSeries ih = detail::i_over_hbar();
  const FormalSeries hbar = FormalSeries::hbar();
  auto cap = [&](const Polynomial& y) { return cap_lambda(y, lambda_cap); };

  const Polynomial e = poly_exp(fn * ih, lambda_cap);
  const Polynomial sf = cap(detail::tord(m, p, e));
  const Polynomial l2 = detail::relabel_copy(l0f, 0, 2);

  auto formula = [&](const Rational& t) {
    Substitution flow;
    for (auto& [a, c] : x) {
      Generator g = m.field(a).with_copy(2);
      flow.set(g, Polynomial(g) + detail::relabel_copy(c, 0, 3) * Complex(t));
    }
    Polynomial shifted = cap(flow(l2) - l2);
    Polynomial b = cap(detail::copy_contraction_exp(m, p.feynman, poly_exp(shifted * ih, lambda_cap), 2, 2,
                                                    hbar * Complex(Rational(1, 2))));
    Polynomial y = cap(detail::copy_contraction_exp(m, p.feynman, cap(sf * b), 0, 3, hbar));
    y = detail::relabel_copy(y, 3, 0);
    Polynomial z = cap(detail::copy_contraction_exp(m, p.two_point, y, 0, 2, hbar));
    return detail::relabel_copy(z, 2, 0);
  };

  DiffeoReport rep;
  rep.derivative = derivative_at_zero(formula, lambda_cap);
  Polynomial xa = vector_field_antifield_form(m, x);
  Polynomial sfx = cap(detail::tord(m, p, e * detail::tinv(m, p, xa)));
  rep.expected = cap(detail::koszul(sfx, l0f) * ih);
  rep.identity = {"diffeo_infinitesimal",
                  {series_residual("diffeo_infinitesimal", rep.derivative - rep.expected, hbar_cap, lambda_cap)},
                  {}};

  // g = exp(X) as the time-one flow, truncated by the lambda cap (X carries lambda).
  std::map<std::size_t, Polynomial> image;
  for (auto& [a, c] : x) {
    Polynomial term(m.field(a)), sum(m.field(a));
    for (int n = 1; n <= lambda_cap; ++n) {
      Polynomial d;  // X(term) = sum_b X^b d term / d phi^b
      for (auto& [b, cb] : x) d += cb * derivative(term, m.field(b), Side::left);
      term = cap(d * Complex(Rational(1, n)));
      if (term.is_zero()) break;
      sum += term;
    }
    image[a] = sum;
  }
  Substitution g;
  for (auto& [a, v] : image) g.set(m.field(a), v);
  rep.beta = cap(g(l0f) - l0f + g(fn));
  if (anomaly) rep.beta += anomaly(fn, x);
  return rep;
}

}  // namespace bvcheck
