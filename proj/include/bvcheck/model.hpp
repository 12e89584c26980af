#pragma once

#include <algorithm>
#include <array>
#include <cstdlib>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "bvcheck/bv.hpp"
#include "bvcheck/linalg.hpp"

namespace bvcheck {

struct Component {
  std::string name;
  Kind kind = Kind::field;
};

/// Values of the even field-like generators, indexed by flat index
/// site * m + component. Odd entries must be zero.
using Configuration = std::vector<FormalSeries>;

/// A theory on a one-dimensional lattice of `sites` points; site order is the
/// causal order. Matrices are indexed by flat index a = site * m + component.
class ModelSpec {
 public:
  ModelSpec() = default;
  ModelSpec(std::string name, int sites, std::vector<Component> multiplet)
      : name_(std::move(name)), sites_(sites), multiplet_(std::move(multiplet)) {
    if (sites_ <= 0) throw ConfigError("sites must be positive");
    if (multiplet_.empty()) throw ConfigError("multiplet must not be empty");
    for (auto& c : multiplet_)
      if (is_antifield_kind(c.kind)) throw ConfigError("multiplet component '" + c.name + "' is an antifield kind");
  }

  const std::string& name() const { return name_; }
  int sites() const { return sites_; }
  int components() const { return static_cast<int>(multiplet_.size()); }
  const std::vector<Component>& multiplet() const { return multiplet_; }
  std::size_t dim() const { return static_cast<std::size_t>(sites_) * multiplet_.size(); }

  std::size_t flat(int site, int component) const {
    return static_cast<std::size_t>(site) * multiplet_.size() + static_cast<std::size_t>(component);
  }
  int site_of(std::size_t a) const { return static_cast<int>(a / multiplet_.size()); }
  int component_of(std::size_t a) const { return static_cast<int>(a % multiplet_.size()); }

  Generator field(int site, int component) const {
    return Generator(multiplet_[static_cast<std::size_t>(component)].kind, component, site);
  }
  Generator field(std::size_t a) const { return field(site_of(a), component_of(a)); }
  Generator antifield(std::size_t a) const { return field(a).dual(); }
  bool odd(std::size_t a) const { return field(a).odd(); }

  /// Flat index of a field-like generator of this model (antifields map to their partner).
  std::size_t index_of(Generator g) const {
    Generator f = g.is_antifield() ? g.dual() : g;
    return flat(f.site(), f.component());
  }
  bool owns(Generator g) const {
    Generator f = g.is_antifield() ? g.dual() : g;
    return f.site() < sites_ && f.component() < components() &&
           multiplet_[static_cast<std::size_t>(f.component())].kind == f.kind();
  }

  // Extended action data.
  Polynomial s00;
  Polynomial theta0;
  Polynomial interaction;
  std::optional<Polynomial> gauge_fermion;
  /// Uncut Lagrangian density source (S00 + V with cutoff 1); used by CutoffLagrangian.
  Polynomial lagrangian;
  /// Structure constants f^a_{bc} of the gauge algebra on ghost components (default none).
  std::map<std::tuple<int, int, int>, Complex> structure_constants;
  int hbar_cap = 2;
  int lambda_cap = 3;

  /// P_{ab} = dr(dl S00/dphi^a)/dphi^b.
  Matrix P() const { return second_derivative_matrix(s00, false); }
  /// K^a_s = dr(dl theta0/dphi'_a)/dphi^s.
  Matrix K() const { return second_derivative_matrix(theta0, true); }

  int stencil_radius() const {
    Matrix p = P();
    int r = 0;
    for (std::size_t a = 0; a < dim(); ++a)
      for (std::size_t b = 0; b < dim(); ++b)
        if (!p(a, b).is_zero()) r = std::max(r, std::abs(site_of(a) - site_of(b)));
    return r;
  }
  bool interior(int site) const {
    int r = stencil_radius();
    return site >= r && site <= sites_ - 1 - r;
  }

  /// S00 = 1/2 sum phi^a P_ab phi^b.
  Polynomial quadratic_form(const Matrix& p) const {
    Polynomial s;
    for (std::size_t a = 0; a < dim(); ++a)
      for (std::size_t b = 0; b < dim(); ++b) {
        if (p(a, b).is_zero()) continue;
        s += Polynomial(field(a)) * Polynomial(field(b)) * (p(a, b) * Complex(Rational(1, 2)));
      }
    return s;
  }
  /// theta0 = sum phi'_a K^a_s phi^s.
  Polynomial linear_symmetry(const Matrix& k) const {
    Polynomial t;
    for (std::size_t a = 0; a < dim(); ++a)
      for (std::size_t s = 0; s < dim(); ++s) {
        if (k(a, s).is_zero()) continue;
        t += Polynomial(antifield(a)) * Polynomial(field(s)) * k(a, s);
      }
    return t;
  }

  /// Throws ConfigError when the structural invariants of the action split fail.
  void validate() const {
    for (auto& [m, c] : s00.terms()) {
      if (m.ta() != 0) throw ConfigError("S00 contains antifields");
      if (m.degree() != 2) throw ConfigError("S00 is not quadratic");
    }
    for (auto& [m, c] : theta0.terms()) {
      if (m.ta() != 1 || m.degree() != 2) throw ConfigError("theta0 must be (antifield) x (field)");
    }
    for (const Polynomial* p : {&s00, &theta0, &interaction, &lagrangian})
      for (Generator g : p->generators())
        if (!owns(g)) throw ConfigError("generator " + g.str() + " does not belong to the model");
    if (gauge_fermion) {
      auto gh = gauge_fermion->gh();
      if (!gauge_fermion->is_zero() && (!gh || *gh != -1)) throw BadGhostNumber("gauge fermion must have ghost number -1");
    }
  }

  /// Substitution phi -> phi + psi on even field-like generators.
  Substitution shift(const Configuration& psi) const {
    Substitution s;
    for (std::size_t a = 0; a < dim() && a < psi.size(); ++a) {
      if (psi[a].is_zero()) continue;
      if (odd(a)) throw DomainError("configurations cannot shift odd generators");
      s.set(field(a), Polynomial(field(a)) + Polynomial(psi[a]));
    }
    return s;
  }
  /// Substitution phi -> value for even field-like generators (odd ones untouched).
  Substitution evaluation(const Configuration& phi) const {
    Substitution s;
    for (std::size_t a = 0; a < dim() && a < phi.size(); ++a) {
      if (odd(a)) continue;
      s.set(field(a), Polynomial(phi[a]));
    }
    return s;
  }

 private:
  Matrix second_derivative_matrix(const Polynomial& x, bool first_is_antifield) const {
    Matrix m(dim(), dim());
    for (std::size_t a = 0; a < dim(); ++a) {
      Polynomial d = derivative(x, first_is_antifield ? antifield(a) : field(a), Side::left);
      if (d.is_zero()) continue;
      for (std::size_t b = 0; b < dim(); ++b) {
        Polynomial e = derivative(d, field(b), Side::right);
        if (e.is_zero()) continue;
        if (e.size() != 1 || !e.terms().begin()->first.empty())
          throw ConfigError("second derivative is not constant: action part is not quadratic");
        const FormalSeries& c = e.terms().begin()->second;
        if (!c.is_constant()) throw ConfigError("quadratic coefficients must not depend on hbar or lambda");
        m(a, b) = c.constant_term();
      }
    }
    return m;
  }

  std::string name_;
  int sites_ = 0;
  std::vector<Component> multiplet_;
};

inline std::set<int> spacetime_support(const Polynomial& f) { return f.support(); }

struct PropagatorSet {
  Matrix retarded;
  Matrix advanced;
  Matrix pauli_jordan;
  Matrix symmetric_part;
  Matrix two_point;
  Matrix feynman;
  int radius = 0;
  int sites = 0;
  bool interior(int site) const { return site >= radius && site <= sites - 1 - radius; }
};

namespace detail {

// Solves the causal column problem for Green functions.
//   retarded: unknowns at sites >= j, equations on rows [max(0, j-r), N-1-r]
//   advanced: unknowns at sites <= j, equations on rows [r, min(N-1, j+r)]
// Later (resp. earlier) unknowns are pivoted first; leftover unknowns are set to
// zero, which is only legitimate when the column sits within r of the initial
// (resp. final) boundary.
inline void solve_green_column(const ModelSpec& m, const Matrix& p, int r, std::size_t col, bool retarded,
                               Matrix& out) {
  const int n_sites = m.sites();
  const int j = m.site_of(col);
  std::vector<std::size_t> unknowns;
  for (std::size_t a = 0; a < m.dim(); ++a) {
    int s = m.site_of(a);
    if (retarded ? s >= j : s <= j) unknowns.push_back(a);
  }
  std::vector<std::size_t> eqs;
  int lo = retarded ? std::max(0, j - r) : r;
  int hi = retarded ? n_sites - 1 - r : std::min(n_sites - 1, j + r);
  for (std::size_t a = 0; a < m.dim(); ++a) {
    int s = m.site_of(a);
    if (s >= lo && s <= hi) eqs.push_back(a);
  }
  Matrix aug(eqs.size(), unknowns.size() + 1);
  for (std::size_t e = 0; e < eqs.size(); ++e) {
    for (std::size_t u = 0; u < unknowns.size(); ++u) aug(e, u) = p(eqs[e], unknowns[u]);
    if (eqs[e] == col) aug(e, unknowns.size()) = Complex(1);
  }
  std::vector<std::size_t> order(unknowns.size());
  for (std::size_t u = 0; u < order.size(); ++u) order[u] = u;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
    int sx = m.site_of(unknowns[x]), sy = m.site_of(unknowns[y]);
    return retarded ? sx > sy : sx < sy;
  });
  auto pivots = row_reduce(aug, order);
  for (std::size_t e = pivots.size(); e < eqs.size(); ++e)
    if (!aug(e, unknowns.size()).is_zero()) throw NotRetardedInvertible(j, m.component_of(col));
  bool near_boundary = retarded ? j < r : j > n_sites - 1 - r;
  if (pivots.size() < unknowns.size() && !near_boundary) throw NotRetardedInvertible(j, m.component_of(col));
  for (std::size_t k = 0; k < pivots.size(); ++k) out(unknowns[pivots[k]], col) = aug(k, unknowns.size());
}

}  // namespace detail

/// Retarded/advanced Green functions by causal substitution and the derived
/// propagators. `h` defaults to zero; a user H must be graded symmetric and
/// annihilated by P on interior rows.
inline PropagatorSet build_propagators(const ModelSpec& m, const std::optional<Matrix>& h = std::nullopt) {
  const Matrix p = m.P();
  const std::size_t n = m.dim();
  const int r = m.stencil_radius();
  PropagatorSet out;
  out.radius = r;
  out.sites = m.sites();
  out.retarded = Matrix(n, n);
  out.advanced = Matrix(n, n);
  for (std::size_t col = 0; col < n; ++col) {
    detail::solve_green_column(m, p, r, col, true, out.retarded);
    detail::solve_green_column(m, p, r, col, false, out.advanced);
  }
  // P G = Id on the rows where the Green function problem is posed.
  Matrix pr = p * out.retarded, pa = p * out.advanced;
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < n; ++b) {
      Complex id = a == b ? Complex(1) : Complex(0);
      int s = m.site_of(a);
      if (s <= m.sites() - 1 - r && pr(a, b) != id) throw NotRetardedInvertible(m.site_of(b), m.component_of(b));
      if (s >= r && pa(a, b) != id) throw NotRetardedInvertible(m.site_of(b), m.component_of(b));
    }
  out.pauli_jordan = out.retarded - out.advanced;
  out.symmetric_part = Matrix(n, n);
  if (h) {
    if (h->rows() != n || h->cols() != n) throw BadH("H has the wrong shape");
    for (std::size_t a = 0; a < n; ++a)
      for (std::size_t b = 0; b < n; ++b) {
        Complex sign = (m.odd(a) && m.odd(b)) ? Complex(-1) : Complex(1);
        if ((*h)(a, b) != sign * (*h)(b, a)) throw BadH("H is not graded symmetric");
      }
    Matrix ph = p * *h;
    for (std::size_t a = 0; a < n; ++a)
      if (m.interior(m.site_of(a)))
        for (std::size_t b = 0; b < n; ++b)
          if (!ph(a, b).is_zero()) throw BadH("H is not a bisolution on interior rows");
    out.symmetric_part = *h;
  }
  const Complex half_i(Rational(0), Rational(1, 2));
  out.two_point = half_i * out.pauli_jordan + out.symmetric_part;
  out.feynman = half_i * (out.advanced + out.retarded) + out.symmetric_part;
  return out;
}

struct ConsistencyEntry {
  std::string name;
  std::size_t nonzero = 0;  // number of nonzero residual entries
  std::optional<std::pair<std::size_t, std::size_t>> first;
};

struct ConsistencyReport {
  std::vector<ConsistencyEntry> entries;
  bool pass() const {
    return std::all_of(entries.begin(), entries.end(), [](const ConsistencyEntry& e) { return e.nonzero == 0; });
  }
};

/// C_{a g} = sum_s (-1)^{|a|} K^a_s D^{s g} + (-1)^{|a|+|g|} K^g_s D^{a s}.
/// The second sign follows from gamma0-invariance of S00 with D a right
/// inverse of P (P D = Id) and the derivative conventions in conventions.hpp;
/// only entries with |a| != |g| can be nonzero, where it equals -1.
inline Matrix consistency_residual(const ModelSpec& m, const Matrix& k, const Matrix& d) {
  const std::size_t n = m.dim();
  Matrix c(n, n);
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t g = 0; g < n; ++g) {
      Complex v;
      for (std::size_t s = 0; s < n; ++s) {
        if (!k(a, s).is_zero() && !d(s, g).is_zero()) {
          Complex t = k(a, s) * d(s, g);
          if (m.odd(a)) t = -t;
          v += t;
        }
        if (!k(g, s).is_zero() && !d(a, s).is_zero()) {
          Complex t = k(g, s) * d(a, s);
          if (m.odd(a) != m.odd(g)) t = -t;
          v += t;
        }
      }
      c(a, g) = v;
    }
  return c;
}

/// Residuals restricted to pairs of interior sites.
inline ConsistencyReport consistency_check(const ModelSpec& m, const PropagatorSet& p) {
  ConsistencyReport rep;
  Matrix k = m.K();
  auto entry = [&](const std::string& name, const Matrix& d) {
    ConsistencyEntry e;
    e.name = name;
    Matrix c = consistency_residual(m, k, d);
    for (std::size_t a = 0; a < c.rows(); ++a)
      for (std::size_t g = 0; g < c.cols(); ++g) {
        if (!p.interior(m.site_of(a)) || !p.interior(m.site_of(g))) continue;
        if (c(a, g).is_zero()) continue;
        if (!e.first) e.first = std::make_pair(a, g);
        ++e.nonzero;
      }
    rep.entries.push_back(std::move(e));
  };
  entry("retarded", p.retarded);
  entry("advanced", p.advanced);
  entry("pauli_jordan", p.pauli_jordan);
  entry("symmetric_part", p.symmetric_part);
  return rep;
}

/// A generalized Lagrangian L(f) = sum_i f_i l_i built from a density, where each
/// monomial of the source polynomial is attributed to its earliest site.
class CutoffLagrangian {
 public:
  CutoffLagrangian(const ModelSpec& m, const Polynomial& source) : model_(&m) {
    for (auto& [mono, c] : source.terms()) {
      int site = mono.empty() ? 0 : mono.factors().front().gen.site();
      for (auto& f : mono.factors()) site = std::min(site, f.gen.site());
      density_[site].add(mono, c);
      reach_ = std::max(reach_, span(mono));
    }
  }

  const std::map<int, Polynomial>& density() const { return density_; }
  /// Largest site distance inside one density monomial (the stencil radius).
  int reach() const { return reach_; }

  Polynomial operator()(const std::vector<Rational>& f) const {
    Polynomial out;
    for (auto& [site, l] : density_) {
      const Rational& w = f.at(static_cast<std::size_t>(site));
      if (sgn(w) == 0) continue;
      out += l * Complex(w);
    }
    return out;
  }

  FormalSeries evaluate(const std::vector<Rational>& f, const Configuration& phi) const {
    Polynomial v = model_->evaluation(phi)((*this)(f));
    if (v.is_zero()) return FormalSeries();
    if (v.size() != 1 || !v.terms().begin()->first.empty())
      throw DomainError("evaluation left symbolic generators (odd components?)");
    return v.terms().begin()->second;
  }

  /// Sites where an admissible cutoff must equal 1 for a variation supported on supp.
  std::set<int> required_sites(const std::set<int>& supp) const {
    std::set<int> s;
    for (int x : supp)
      for (int k = x - reach_; k <= x; ++k)
        if (k >= 0) s.insert(k);
    return s;
  }

  /// A cutoff that is 1 where required and `fill` elsewhere.
  std::vector<Rational> admissible_cutoff(const std::set<int>& supp, const Rational& fill = 0) const {
    std::vector<Rational> f(static_cast<std::size_t>(model_->sites()), fill);
    for (int k : required_sites(supp)) f[static_cast<std::size_t>(k)] = 1;
    return f;
  }

  std::set<int> support_of(const Configuration& psi) const {
    std::set<int> s;
    for (std::size_t a = 0; a < psi.size(); ++a)
      if (!psi[a].is_zero()) s.insert(model_->site_of(a));
    return s;
  }

  void require_fit(const std::set<int>& supp) const {
    for (int x : supp)
      if (x < reach_ || x > model_->sites() - 1 - reach_) throw CutoffDoesNotFit();
  }

  /// dL(psi) = L(f)[phi + psi] - L(f)[phi] as a functional of phi.
  Polynomial delta(const Configuration& psi, const std::vector<Rational>& f) const {
    auto supp = support_of(psi);
    require_fit(supp);
    for (int k : required_sites(supp))
      if (f.at(static_cast<std::size_t>(k)) != 1) throw DomainError("cutoff is not admissible for this variation");
    Polynomial l = (*this)(f);
    return model_->shift(psi)(l) - l;
  }
  Polynomial delta(const Configuration& psi) const { return delta(psi, admissible_cutoff(support_of(psi))); }

  const ModelSpec& model() const { return *model_; }

 private:
  static int span(const Monomial& m) {
    if (m.empty()) return 0;
    int lo = m.factors().front().gen.site(), hi = lo;
    for (auto& f : m.factors()) {
      lo = std::min(lo, f.gen.site());
      hi = std::max(hi, f.gen.site());
    }
    return hi - lo;
  }

  const ModelSpec* model_;
  std::map<int, Polynomial> density_;
  int reach_ = 0;
};

inline FormalSeries delta_L(const CutoffLagrangian& l, const Configuration& psi, const Configuration& phi) {
  Polynomial d = l.delta(psi);
  Polynomial v = l.model().evaluation(phi)(d);
  return v.constant_term();
}

struct AdditivityResult {
  bool additive = true;
  std::optional<std::array<Configuration, 3>> witness;  // (phi, chi, psi)
};

/// Samples triples with supp phi and supp psi disjoint and checks
/// F(phi+chi+psi) = F(phi+chi) - F(chi) + F(chi+psi).
template <class Rng>
AdditivityResult additivity_check(const ModelSpec& m, const Polynomial& f, int trials, Rng& rng) {
  AdditivityResult res;
  auto value = [&](const Configuration& c) { return m.evaluation(c)(f); };
  std::uniform_int_distribution<int> small(-3, 3);
  std::uniform_int_distribution<int> cut(0, m.sites());
  auto random_on = [&](int lo, int hi) {
    Configuration c(m.dim());
    for (std::size_t a = 0; a < m.dim(); ++a) {
      int s = m.site_of(a);
      if (!m.odd(a) && s >= lo && s < hi) c[a] = FormalSeries(Rational(small(rng)));
    }
    return c;
  };
  auto sum = [&](const Configuration& x, const Configuration& y) {
    Configuration z(m.dim());
    for (std::size_t a = 0; a < m.dim(); ++a) z[a] = x[a] + y[a];
    return z;
  };
  // Crafted triple: the earliest and latest sites, chi = 0.
  std::vector<std::array<Configuration, 3>> triples;
  triples.push_back({random_on(0, 1), Configuration(m.dim()), random_on(m.sites() - 1, m.sites())});
  for (int t = 0; t < trials; ++t) {
    int k = cut(rng);
    triples.push_back({random_on(0, k), random_on(0, m.sites()), random_on(k, m.sites())});
  }
  for (auto& [phi, chi, psi] : triples) {
    Polynomial lhs = value(sum(sum(phi, chi), psi));
    Polynomial rhs = value(sum(phi, chi)) - value(chi) + value(sum(chi, psi));
    if (lhs != rhs) {
      res.additive = false;
      res.witness = std::array<Configuration, 3>{phi, chi, psi};
      return res;
    }
  }
  return res;
}

}  // namespace bvcheck
