#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "bvcheck/model.hpp"

namespace bvcheck {

/// S^ext = S00 + theta0 + V0 + theta_int, split by polynomial degree,
/// lambda order and total antifield number.
struct ExtendedAction {
  Polynomial s00;
  Polynomial theta0;
  Polynomial v0;
  Polynomial theta_int;

  Polynomial total() const { return s00 + theta0 + v0 + theta_int; }
  Polynomial s0() const { return s00 + theta0; }
  /// Antifield-independent part S = S00 + V0.
  Polynomial antifield_free() const { return s00 + v0; }
  Polynomial interaction() const { return v0 + theta_int; }
  bool quadratic() const { return v0.is_zero() && theta_int.is_zero(); }

  static ExtendedAction split(const Polynomial& total) {
    ExtendedAction s;
    for (auto& [m, c] : total.terms()) {
      FormalSeries free = c.lambda_slice(0);
      FormalSeries rest = c - free;
      bool quadratic = m.degree() == 2 && m.ta() <= 1;
      if (!quadratic) {
        rest = c;
        free = FormalSeries();
      }
      Polynomial& freepart = m.ta() == 0 ? s.s00 : s.theta0;
      Polynomial& intpart = m.ta() == 0 ? s.v0 : s.theta_int;
      freepart.add(m, free);
      intpart.add(m, rest);
    }
    return s;
  }

  static ExtendedAction from_model(const ModelSpec& m) {
    ExtendedAction s = split(m.interaction);
    s.s00 += m.s00;
    s.theta0 += m.theta0;
    return s;
  }
};

inline void require_interior(const ModelSpec& m, int site) {
  if (!m.interior(site)) throw BoundarySite(site);
}

inline bool interior_supported(const ModelSpec& m, const Polynomial& f) {
  for (int s : f.support())
    if (!m.interior(s)) return false;
  return true;
}

/// Keeps the monomials supported on interior sites.
inline Polynomial restrict_interior(const ModelSpec& m, const Polynomial& f) {
  return f.filter([&](const Monomial& mono) {
    for (auto& x : mono.factors())
      if (!m.interior(x.gen.site())) return false;
    return true;
  });
}

inline Polynomial euler_lagrange(const ModelSpec& m, const Polynomial& s, int component, int site) {
  require_interior(m, site);
  return derivative(s, m.field(site, component), Side::left);
}

enum class BvPart { s, delta, gamma, s0, delta0, gamma0 };

inline Polynomial action_part(const ExtendedAction& s, BvPart part) {
  switch (part) {
    case BvPart::s: return s.total();
    case BvPart::delta: return s.antifield_free();
    case BvPart::gamma: return s.theta0 + s.theta_int;
    case BvPart::s0: return s.s0();
    case BvPart::delta0: return s.s00;
    case BvPart::gamma0: return s.theta0;
  }
  return {};
}

inline Polynomial classical_bv(const Polynomial& x, const ExtendedAction& s, BvPart part) {
  return antibracket(x, action_part(s, part));
}

/// {S^ext, S^ext} restricted to interior-supported monomials.
inline Polynomial cme_check(const ModelSpec& m, const ExtendedAction& s) {
  Polynomial t = s.total();
  return restrict_interior(m, antibracket(t, t));
}

/// The canonical map alpha_Psi: phi' -> phi' + dr Psi/dphi on every antifield
/// of the model, fields unchanged.
inline Substitution gauge_fixing_map(const ModelSpec& m, const Polynomial& psi) {
  if (!psi.is_zero()) {
    auto gh = psi.gh();
    if (!gh || *gh != -1) throw BadGhostNumber("gauge fermion must have ghost number -1");
    for (auto& [mono, c] : psi.terms())
      if (mono.ta() != 0) throw BadGhostNumber("gauge fermion must not contain antifields");
  }
  Substitution a;
  for (std::size_t k = 0; k < m.dim(); ++k) {
    Polynomial d = derivative(psi, m.field(k), Side::right);
    if (d.is_zero()) continue;
    a.set(m.antifield(k), Polynomial(m.antifield(k)) + d);
  }
  return a;
}

inline ExtendedAction gauge_fix(const ModelSpec& m, const ExtendedAction& s, const Polynomial& psi) {
  return ExtendedAction::split(gauge_fixing_map(m, psi)(s.total()));
}

/// The model with its gauge fermion applied: S00, theta0 and the interaction
/// are replaced by the re-split gauge-fixed action.
inline ModelSpec gauge_fixed_model(const ModelSpec& m) {
  if (!m.gauge_fermion) return m;
  ExtendedAction s = gauge_fix(m, ExtendedAction::from_model(m), *m.gauge_fermion);
  ModelSpec out = m;
  out.lagrangian = s.s00 + (m.lagrangian - m.s00);
  out.s00 = s.s00;
  out.theta0 = s.theta0;
  out.interaction = s.v0 + s.theta_int;
  out.gauge_fermion.reset();
  out.validate();
  return out;
}

/// Peierls bracket sum dr F/dphi^a Delta^{ab} dl G/dphi^b.
inline Polynomial peierls_bracket(const ModelSpec& m, const PropagatorSet& p, const Polynomial& f,
                                  const Polynomial& g) {
  if (!interior_supported(m, f) || !interior_supported(m, g)) throw BoundarySupport();
  std::vector<Polynomial> df(m.dim()), dg(m.dim());
  for (std::size_t a = 0; a < m.dim(); ++a) {
    df[a] = derivative(f, m.field(a), Side::right);
    dg[a] = derivative(g, m.field(a), Side::left);
  }
  Polynomial out;
  for (std::size_t a = 0; a < m.dim(); ++a) {
    if (df[a].is_zero()) continue;
    for (std::size_t b = 0; b < m.dim(); ++b) {
      const Complex& d = p.pauli_jordan(a, b);
      if (d.is_zero() || dg[b].is_zero()) continue;
      out += df[a] * dg[b] * d;
    }
  }
  return out;
}

/// Action of the gauge algebra on ghost-free, antifield-free F, assembled from K:
/// sum_a dr F/dphi^a (K c)^a.
inline Polynomial chevalley_eilenberg(const ModelSpec& m, const Polynomial& f) {
  Matrix k = m.K();
  Polynomial out;
  for (std::size_t a = 0; a < m.dim(); ++a) {
    Polynomial d = derivative(f, m.field(a), Side::right);
    if (d.is_zero()) continue;
    Polynomial kc;
    for (std::size_t s = 0; s < m.dim(); ++s)
      if (!k(a, s).is_zero()) kc += Polynomial(m.field(s)) * k(a, s);
    out += d * kc;
  }
  // Pure ghost part: gamma c^a = -1/2 f^a_{bc} c^b c^c.
  for (auto& [abc, fv] : m.structure_constants) {
    auto [a, b, c] = abc;
    for (int site = 0; site < m.sites(); ++site) {
      Polynomial d = derivative(f, m.field(site, a), Side::right);
      if (d.is_zero()) continue;
      out += d * (Polynomial(m.field(site, b)) * Polynomial(m.field(site, c))) * (fv * Complex(Rational(-1, 2)));
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Homology of s0 on polynomials of bounded degree.

struct HomologyDegree {
  int degree = 0;
  std::size_t basis_gh_minus1 = 0;
  std::size_t basis_gh0 = 0;
  std::size_t rank_in = 0;   // rank of s0 : gh -1 -> gh 0
  std::size_t rank_out = 0;  // rank of s0 : gh 0 -> gh 1
  std::size_t kernel() const { return basis_gh0 - rank_out; }
  std::size_t h0() const { return kernel() - rank_in; }
};

struct HomologyReport {
  std::vector<HomologyDegree> degrees;
  /// Representatives of H^0 in degree 1 (when computed).
  std::vector<Polynomial> degree1_basis;
};

/// Monomials of exactly `degree` in the given generators with ghost number gh.
inline std::vector<Monomial> monomial_basis(const std::vector<Generator>& gens, int degree, int gh) {
  std::vector<Monomial> out;
  std::function<void(std::size_t, int, Monomial)> rec = [&](std::size_t from, int left, Monomial acc) {
    if (left == 0) {
      if (acc.gh() == gh) out.push_back(acc);
      return;
    }
    for (std::size_t i = from; i < gens.size(); ++i) {
      auto [sign, next] = multiply(acc, Monomial(gens[i]));
      if (sign == 0) continue;
      rec(i, left - 1, next);
    }
  };
  rec(0, degree, Monomial());
  return out;
}

inline std::vector<Generator> all_generators(const ModelSpec& m) {
  std::vector<Generator> gens;
  for (std::size_t a = 0; a < m.dim(); ++a) {
    gens.push_back(m.field(a));
    gens.push_back(m.antifield(a));
  }
  std::sort(gens.begin(), gens.end());
  return gens;
}

/// Sparse matrix (as rows indexed by source monomial) of x -> {x, S0}.
inline std::vector<SparseRow> s0_rows(const std::vector<Monomial>& source, const std::vector<Monomial>& target,
                                      const Polynomial& s0) {
  std::map<Monomial, std::size_t> index;
  for (std::size_t k = 0; k < target.size(); ++k) index.emplace(target[k], k);
  std::vector<SparseRow> rows;
  rows.reserve(source.size());
  for (auto& mono : source) {
    Polynomial img = antibracket(Polynomial(mono, FormalSeries(1)), s0);
    SparseRow row;
    for (auto& [m, c] : img.terms()) {
      auto it = index.find(m);
      if (it == index.end()) throw DomainError("s0 left the expected degree/ghost sector");
      row[it->second] = c.constant_term();
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

inline HomologyReport koszul_homology(const ModelSpec& m, const ExtendedAction& s, int degree_cap,
                                      bool degree1_basis = true) {
  if (!s.quadratic()) throw NonQuadraticAction();
  const Polynomial s0 = s.s0();
  const auto gens = all_generators(m);
  HomologyReport rep;
  for (int d = 0; d <= degree_cap; ++d) {
    auto bm = monomial_basis(gens, d, -1);
    auto b0 = monomial_basis(gens, d, 0);
    auto b1 = monomial_basis(gens, d, 1);
    HomologyDegree h;
    h.degree = d;
    h.basis_gh_minus1 = bm.size();
    h.basis_gh0 = b0.size();
    h.rank_in = sparse_rank(s0_rows(bm, b0, s0));
    h.rank_out = sparse_rank(s0_rows(b0, b1, s0));
    rep.degrees.push_back(h);
    if (d == 1 && degree1_basis) {
      // Kernel of s0 on gh 0 modulo the image, by dense elimination.
      auto out_rows = s0_rows(b0, b1, s0);
      auto in_rows = s0_rows(bm, b0, s0);
      Matrix a(b1.size(), b0.size());  // columns are gh-0 monomials
      for (std::size_t j = 0; j < b0.size(); ++j)
        for (auto& [i, v] : out_rows[j]) a(i, j) = v;
      std::vector<std::size_t> order(b0.size());
      for (std::size_t j = 0; j < order.size(); ++j) order[j] = j;
      auto piv = row_reduce(a, order);
      std::vector<bool> is_pivot(b0.size(), false);
      for (auto c : piv) is_pivot[c] = true;
      std::vector<std::vector<Complex>> kernel;
      for (std::size_t f = 0; f < b0.size(); ++f) {
        if (is_pivot[f]) continue;
        std::vector<Complex> v(b0.size());
        v[f] = Complex(1);
        for (std::size_t k = 0; k < piv.size(); ++k) v[piv[k]] = -a(k, f);
        kernel.push_back(std::move(v));
      }
      // Greedily keep kernel vectors independent of image + kept vectors.
      std::vector<SparseRow> span;
      for (auto& r : in_rows) span.push_back(r);
      std::size_t base = sparse_rank(span);
      for (auto& v : kernel) {
        SparseRow r;
        for (std::size_t j = 0; j < v.size(); ++j)
          if (!v[j].is_zero()) r[j] = v[j];
        span.push_back(r);
        std::size_t now = sparse_rank(span);
        if (now == base) {
          span.pop_back();
          continue;
        }
        base = now;
        Polynomial rep_poly;
        for (std::size_t j = 0; j < v.size(); ++j) rep_poly.add(b0[j], FormalSeries(v[j]));
        rep.degree1_basis.push_back(rep_poly);
      }
    }
  }
  return rep;
}

/// Restriction of a model to a subset of multiplet components (polynomials that
/// mention the dropped components lose those monomials).
inline ModelSpec drop_components(const ModelSpec& m, const std::set<int>& dropped) {
  std::vector<Component> keep;
  std::map<int, int> renumber;
  for (int c = 0; c < m.components(); ++c)
    if (!dropped.count(c)) {
      renumber[c] = static_cast<int>(keep.size());
      keep.push_back(m.multiplet()[static_cast<std::size_t>(c)]);
    }
  ModelSpec out(m.name() + "_reduced", m.sites(), keep);
  auto convert = [&](const Polynomial& p) {
    Polynomial r;
    for (auto& [mono, c] : p.terms()) {
      Monomial nm;
      bool ok = true;
      for (auto& f : mono.factors()) {
        auto it = renumber.find(f.gen.component());
        if (it == renumber.end()) {
          ok = false;
          break;
        }
        Generator g(f.gen.kind(), it->second, f.gen.site(), f.gen.copy());
        auto [sign, next] = multiply(nm, Monomial(g, f.power));
        nm = next;
        if (sign < 0) throw DomainError("component renumbering changed a Koszul sign");
      }
      if (ok) r.add(nm, c);
    }
    return r;
  };
  out.s00 = convert(m.s00);
  out.theta0 = convert(m.theta0);
  out.interaction = convert(m.interaction);
  out.lagrangian = convert(m.lagrangian);
  if (m.gauge_fermion) out.gauge_fermion = convert(*m.gauge_fermion);
  out.hbar_cap = m.hbar_cap;
  out.lambda_cap = m.lambda_cap;
  return out;
}

// ---------------------------------------------------------------------------
// Moller maps.

/// Substitution rules on field-like generators; antifields are left alone.
struct MollerSeries {
  Substitution rule;
  int order = 0;
  /// Image of one generator restricted to lambda order l.
  Polynomial at_order(Generator g, int l) const {
    const Polynomial* p = rule.find(g);
    Polynomial full = p ? *p : Polynomial(g);
    return full.lambda_slice(l);
  }
};

inline Polynomial cap_lambda(const Polynomial& x, int k) { return x.with_caps(FormalSeries::kUnbounded, k); }

/// phi^a -> phi^a + sum_b R^{ab} dl V/dphi^b for one generator.
inline Polynomial moller_inverse_image(const ModelSpec& m, const PropagatorSet& p, const Polynomial& v,
                                       std::size_t a) {
  Polynomial img(m.field(a));
  for (std::size_t b = 0; b < m.dim(); ++b) {
    const Complex& r = p.retarded(a, b);
    if (r.is_zero()) continue;
    Polynomial d = derivative(v, m.field(b), Side::left);
    if (!d.is_zero()) img += d * r;
  }
  return img;
}

inline Polynomial moller_inverse(const ModelSpec& m, const PropagatorSet& p, const Polynomial& v, int component,
                                 int site) {
  require_interior(m, site);
  return moller_inverse_image(m, p, v, m.flat(site, component));
}

inline MollerSeries moller_inverse(const ModelSpec& m, const PropagatorSet& p, const Polynomial& v, int order) {
  MollerSeries s;
  s.order = order;
  Polynomial vk = cap_lambda(v, order);
  for (std::size_t a = 0; a < m.dim(); ++a) {
    Polynomial img = moller_inverse_image(m, p, vk, a);
    if (img != Polynomial(m.field(a))) s.rule.set(m.field(a), img);
  }
  return s;
}

/// Fixed-point iteration of r(phi) = phi - R V'(r(phi)), one lambda order per pass.
inline MollerSeries moller_forward(const ModelSpec& m, const PropagatorSet& p, const Polynomial& v, int order) {
  Polynomial vk = cap_lambda(v, order);
  std::vector<Polynomial> dv(m.dim());
  for (std::size_t b = 0; b < m.dim(); ++b) dv[b] = derivative(vk, m.field(b), Side::left);
  MollerSeries s;
  s.order = order;
  for (int pass = 0; pass < order; ++pass) {
    Substitution next;
    std::vector<Polynomial> dv_at(m.dim());
    for (std::size_t b = 0; b < m.dim(); ++b)
      if (!dv[b].is_zero()) dv_at[b] = s.rule(dv[b]);
    for (std::size_t a = 0; a < m.dim(); ++a) {
      Polynomial img(m.field(a));
      for (std::size_t b = 0; b < m.dim(); ++b) {
        const Complex& r = p.retarded(a, b);
        if (r.is_zero() || dv_at[b].is_zero()) continue;
        img -= dv_at[b] * r;
      }
      img = cap_lambda(img, order);
      if (img != Polynomial(m.field(a))) next.set(m.field(a), img);
    }
    s.rule = next;
  }
  return s;
}

/// Images of every field-like generator under first applying `inner` to the
/// configuration and then `outer`, i.e. the configuration map outer o inner.
inline Substitution compose_configuration_maps(const ModelSpec& m, const Substitution& outer,
                                               const Substitution& inner, int order) {
  Substitution out;
  for (std::size_t a = 0; a < m.dim(); ++a) {
    const Polynomial* o = outer.find(m.field(a));
    Polynomial img = inner(o ? *o : Polynomial(m.field(a)));
    out.set(m.field(a), cap_lambda(img, order));
  }
  return out;
}

inline bool is_identity(const ModelSpec& m, const Substitution& s) {
  for (std::size_t a = 0; a < m.dim(); ++a) {
    const Polynomial* p = s.find(m.field(a));
    if (p && *p != Polynomial(m.field(a))) return false;
  }
  return true;
}

struct OrderResidual {
  int order = 0;
  Polynomial residual;
};

struct IdentityResult {
  std::string identity;
  std::vector<OrderResidual> orders;
  bool pass() const {
    for (auto& o : orders)
      if (!o.residual.is_zero()) return false;
    return true;
  }
  std::size_t residual_terms() const {
    std::size_t n = 0;
    for (auto& o : orders) n += o.residual.size();
    return n;
  }
};

inline IdentityResult per_lambda_order(std::string name, const Polynomial& diff, int order) {
  IdentityResult r;
  r.identity = std::move(name);
  for (int l = 0; l <= order; ++l) r.orders.push_back({l, diff.lambda_slice(l)});
  return r;
}

struct TheoremReport {
  IdentityResult lemma1;
  IdentityResult lemma2;
  IdentityResult theorem;
  IdentityResult intertwining;
  bool pass() const { return lemma1.pass() && lemma2.pass() && theorem.pass() && intertwining.pass(); }
};

/// sum_{g,b} rinv(dr X/dphi^g) R^{gb} dl C/dphi^b.
inline Polynomial moller_correction(const ModelSpec& m, const Matrix& retarded, const Substitution& rinv,
                                    const Polynomial& x, const Polynomial& c) {
  std::vector<Polynomial> dc(m.dim());
  for (std::size_t b = 0; b < m.dim(); ++b) dc[b] = derivative(c, m.field(b), Side::left);
  Polynomial out;
  for (std::size_t g = 0; g < m.dim(); ++g) {
    Polynomial dx = derivative(x, m.field(g), Side::right);
    if (dx.is_zero()) continue;
    Polynomial dxr = rinv(dx);
    Polynomial contracted;
    for (std::size_t b = 0; b < m.dim(); ++b) {
      const Complex& r = retarded(g, b);
      if (r.is_zero() || dc[b].is_zero()) continue;
      contracted += dc[b] * r;
    }
    out += dxr * contracted;
  }
  return out;
}

/// Both lemmas, the combined identity and the intertwining on the ta = 1 sector,
/// with the interaction of the model. `retarded` may be supplied to test with a
/// deliberately modified Green function.
inline TheoremReport verify_moller_theorem(const ModelSpec& m, const PropagatorSet& p, const Polynomial& x,
                                           int order, const std::optional<Matrix>& retarded = std::nullopt) {
  PropagatorSet q = p;
  if (retarded) q.retarded = *retarded;
  ExtendedAction s = ExtendedAction::from_model(m);
  const Polynomial v = cap_lambda(s.interaction(), order);
  const Polynomial s00 = s.s00, theta0 = s.theta0;
  Substitution rinv = moller_inverse(m, q, v, order).rule;
  auto cap = [&](const Polynomial& y) { return cap_lambda(y, order); };
  Polynomial rx = cap(rinv(x));

  TheoremReport rep;
  {
    Polynomial sv = s00 + v;
    Polynomial lhs = rinv(antibracket(x, s00));
    Polynomial rhs = antibracket(rx, sv) -
                     moller_correction(m, q.retarded, rinv, x, antibracket(sv, sv) * Complex(Rational(1, 2)));
    rep.lemma1 = per_lambda_order("moller_lemma_s00", cap(lhs - rhs), order);
  }
  {
    Polynomial lhs = rinv(antibracket(x, theta0));
    Polynomial rhs = antibracket(rx, theta0) - moller_correction(m, q.retarded, rinv, x, antibracket(v, theta0));
    rep.lemma2 = per_lambda_order("moller_lemma_theta0", cap(lhs - rhs), order);
  }
  {
    Polynomial s0 = s00 + theta0;
    Polynomial full = s0 + v;
    Polynomial lhs = rinv(antibracket(x, s0));
    Polynomial rhs = antibracket(rx, full) -
                     moller_correction(m, q.retarded, rinv, x, antibracket(full, full) * Complex(Rational(1, 2)));
    rep.theorem = per_lambda_order("moller_theorem", cap(lhs - rhs), order);
  }
  {
    // r^{-1} o delta0 = delta o r^{-1} on the ta = 1 part of X, with the
    // antifield-free interaction only.
    Polynomial v0 = cap_lambda(s.v0, order);
    Substitution r0 = moller_inverse(m, q, v0, order).rule;
    Polynomial x1 = x.filter([](const Monomial& mono) { return mono.ta() == 1; });
    Polynomial lhs = r0(antibracket(x1, s00));
    Polynomial rhs = antibracket(r0(x1), s00 + v0);
    rep.intertwining = per_lambda_order("moller_intertwining", cap(lhs - rhs), order);
  }
  return rep;
}

}  // namespace bvcheck
