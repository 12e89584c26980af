#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "bvcheck/conventions.hpp"
#include "bvcheck/model_io.hpp"
#include "bvcheck/sampler.hpp"
#include "bvcheck/smatrix.hpp"

namespace bvcheck {

inline const std::vector<std::string> kSuites = {"algebra", "propagators", "cme",  "homology", "moller",
                                                 "quantum", "qme",         "mwi",  "smatrix",  "diffeo"};

struct VerificationPlan {
  std::string model_path;
  std::vector<std::string> suites;  // empty means every suite
  std::optional<int> hbar_cap;      // default: the model file's caps
  std::optional<int> lambda_cap;
  std::uint64_t seed = 1;
  int trials = 50;
  bool strict_grading = false;
  int homology_degree = 2;
  std::optional<std::string> corpus;  // overrides the model file's corpus
};

struct CheckResult {
  std::string name;
  std::string paper_ref;
  std::string order;
  std::size_t residual_norm = 0;  // number of nonzero residual monomials (or entries)
  bool pass = true;
  std::string note;
};

struct SuiteReport {
  std::string suite;
  std::vector<CheckResult> checks;
  bool pass() const {
    return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.pass; });
  }
};

struct RunReport {
  static constexpr int kSchemaVersion = 1;
  std::string model;
  VerificationPlan plan;
  int hbar_cap = 0;
  int lambda_cap = 0;
  std::vector<SuiteReport> suites;

  bool pass() const {
    return std::all_of(suites.begin(), suites.end(), [](const SuiteReport& s) { return s.pass(); });
  }

  nlohmann::ordered_json json() const {
    using J = nlohmann::ordered_json;
    J j;
    j["schema_version"] = kSchemaVersion;
    j["model"] = model;
    j["plan"] = J{{"hbar_cap", hbar_cap}, {"lambda_cap", lambda_cap}, {"seed", plan.seed},
                  {"trials", plan.trials},  {"strict_grading", plan.strict_grading}};
    J suites_json = J::array();
    for (auto& s : suites) {
      J checks = J::array();
      for (auto& c : s.checks) {
        J cj{{"name", c.name}, {"paper_ref", c.paper_ref}, {"order", c.order}, {"residual_norm", c.residual_norm},
             {"pass", c.pass}};
        if (!c.note.empty()) cj["note"] = c.note;
        checks.push_back(std::move(cj));
      }
      suites_json.push_back(J{{"suite", s.suite}, {"checks", std::move(checks)}, {"pass", s.pass()}});
    }
    j["suites"] = std::move(suites_json);
    j["pass"] = pass();
    return j;
  }

  std::string summary() const {
    std::ostringstream os;
    os << "model " << model << " (hbar<=" << hbar_cap << ", lambda<=" << lambda_cap << ", seed " << plan.seed << ")\n";
    for (auto& s : suites) {
      std::size_t ok = 0;
      for (auto& c : s.checks) ok += c.pass ? 1 : 0;
      os << "  " << (s.pass() ? "PASS " : "FAIL ") << s.suite << "  " << ok << "/" << s.checks.size() << "\n";
      for (auto& c : s.checks)
        if (!c.pass)
          os << "    failed " << c.name << " [" << c.order << "] residual " << c.residual_norm
             << (c.note.empty() ? "" : " (" + c.note + ")") << "\n";
    }
    os << (pass() ? "all checks passed" : "some checks FAILED") << "\n";
    return os.str();
  }
};

// ------------------------------------------------------------------ explain

struct Explanation {
  std::string identity;
  std::string reference;
  std::string conventions;
};

inline const std::map<std::string, Explanation>& explanations() {
  static const std::map<std::string, Explanation> table = {
      {"graded_commutativity", {"XY = (-1)^{|X||Y|} YX", "graded commutative algebra of fields and antifields", "Koszul order"}},
      {"derivative_sides", {"dl X/dg = (-1)^{|g|(|X|+1)} dr X/dg", "left and right derivatives", "derivatives"}},
      {"antibracket_antisymmetry", {"{X,Y} = -(-1)^{(|X|+1)(|Y|+1)} {Y,X}", "antibracket as odd Poisson bracket", "antibracket"}},
      {"antibracket_jacobi", {"graded Jacobi identity of the antibracket", "antibracket as odd Poisson bracket", "antibracket"}},
      {"antibracket_leibniz", {"{X,YZ} = {X,Y}Z + (-1)^{|Y|(|X|+1)} Y{X,Z}", "antibracket as a graded derivation", "antibracket"}},
      {"laplacian_nilpotent", {"lap lap X = 0", "BV Laplacian", "BV Laplacian"}},
      {"laplacian_generates_antibracket",
       {"lap(XY) = X lap Y + (-1)^{|Y|} lap X Y + (-1)^{|Y|} {X,Y}", "BV Laplacian generates the antibracket",
        "BV Laplacian, antibracket"}},
      {"retarded_green_function", {"P DeltaR = Id on rows away from the final boundary; DeltaR vanishes at earlier sites", "retarded Green function of the free operator", "propagators"}},
      {"advanced_green_function", {"P DeltaA = Id on rows away from the initial boundary; DeltaA vanishes at later sites", "advanced Green function of the free operator", "propagators"}},
      {"pauli_jordan_bisolution", {"P Delta = 0 on interior rows, Delta = DeltaR - DeltaA", "Pauli-Jordan function", "propagators"}},
      {"pauli_jordan_antisymmetry", {"Delta_ab = -(-1)^{|a||b|} Delta_ba", "Pauli-Jordan function", "propagators"}},
      {"consistency", {"(-1)^{|a|} K^a_s D^{sg} + (-1)^{|a|+|g|} K^g_s D^{as} = 0 for D in {DeltaR, DeltaA, Delta, H}",
                       "consistency of propagators with the linearized symmetry", "consistency condition sign"}},
      {"h_perturbation_detected", {"a single-entry change of H violates symmetry, the bisolution property or consistency", "consistency of the two-point function", "propagators"}},
      {"cme", {"{S, S} = 0 for the extended action, interior part", "classical master equation", "antibracket"}},
      {"cme_gauge_fixed", {"{S, S} = 0 after the canonical gauge-fixing map", "classical master equation after gauge fixing", "gauge fixing map"}},
      {"gauge_fixing_antibracket", {"alpha_Psi{X,Y} = {alpha_Psi X, alpha_Psi Y}", "gauge fixing as a canonical transformation", "gauge fixing map"}},
      {"nilpotency_s", {"s s X = 0 with s = {., S}", "BV differential", "antibracket"}},
      {"nilpotency_s0", {"s0 s0 X = 0 with s0 = {., S0}", "linearized BV differential", "antibracket"}},
      {"anticommutator_delta0_gamma0", {"delta0 gamma0 + gamma0 delta0 = 0", "Koszul-Tate and Chevalley-Eilenberg parts of s0", "antibracket"}},
      {"homology", {"dim H^0(s0) per polynomial degree, sparse elimination against dense elimination", "Koszul-Tate homology of the free theory", "antibracket"}},
      {"trivial_pair", {"dropping (cbar, B) leaves H^0(s0) unchanged", "trivial pairs in the BV complex", "antibracket"}},
      {"homology_representatives", {"degree-one H^0 representatives are s0-closed", "Koszul-Tate homology of the free theory", "antibracket"}},
      {"moller_round_trip", {"r_V o r_V^{-1} = id = r_V^{-1} o r_V as substitution rules", "classical Moller map", "propagators"}},
      {"moller_lemma1", {"first lemma of the Moller theorem, per order in lambda", "appendix lemma on the retarded Moller map", "propagators, antibracket"}},
      {"moller_lemma2", {"second lemma of the Moller theorem, per order in lambda", "appendix lemma on the retarded Moller map", "propagators, antibracket"}},
      {"moller_theorem",
       {"r_V^{-1} intertwines the free and interacting BV differentials, so the full theory obeys the classical master equation",
        "Moller theorem", "propagators, antibracket, consistency condition sign"}},
      {"moller_intertwining", {"r_V^{-1} s X = s0 r_V^{-1} X on the antifield-number one sector", "Moller map intertwining", "propagators"}},
      {"moller_broken_retarded", {"changing one entry of DeltaR makes the Moller identities fail", "Moller theorem", "propagators"}},
      {"star_associativity", {"(F * G) * H = F * (G * H)", "star product", "star product"}},
      {"star_commutator", {"[phi_a, phi_b]_* = i hbar Delta_ab", "star product and the Pauli-Jordan function", "star product"}},
      {"s0_right_derivation", {"s0(F * G) = (-1)^{|G|} s0F * G + F * s0G", "free BV differential on the star algebra", "star product, antibracket"}},
      {"quantum_bv_free", {"T^{-1} s0 T = s0 - i hbar lap", "quantum BV operator of the free theory", "time ordering, BV Laplacian"}},
      {"time_order_inverse", {"T^{-1} T X = X", "time-ordering operator", "time ordering"}},
      {"causal_factorization", {"T(F G) = F * G when F lies later than G (n = 2, 3 factors)", "causal factorization of time-ordered products", "time ordering, star product"}},
      {"qme", {"(1/2){S,S} - i hbar lap S = 0, interior part", "quantum master equation", "BV Laplacian"}},
      {"laplacian_free_action", {"lap S0 = 0", "quantum master equation of the free theory", "BV Laplacian"}},
      {"interacting_bv", {"R_V^{-1} s0 R_V X = {X, S0 + V} - i hbar lap X", "quantum BV operator of the interacting theory", "interacting fields"}},
      {"mwi", {"s0 S(W) = (i/hbar) S(W) ._T T((1/2){S0+W,S0+W} - i hbar lap W), per order", "master Ward identity", "time ordering, BV Laplacian"}},
      {"s1_identity", {"S(0) = 1", "axiom S1 of local S-matrices", "S-matrix words"}},
      {"word_reduction", {"reduction is idempotent, yields normal forms and agrees when halves are reduced first", "S-matrix word relations", "Hammerstein orientation"}},
      {"word_value", {"a word and its reduced form have the same concrete value", "S-matrix word relations", "Hammerstein orientation"}},
      {"hammerstein", {"S(F1+F+F2) = S(F2+F) S(F)^{-1} S(F+F1) for F1 before F2", "Hammerstein property", "Hammerstein orientation"}},
      {"cocycle", {"alpha_{psi+chi} = alpha_psi o alpha_chi on the action, symbolic and at probe configurations", "cocycle property of the translation action", "S-matrix checks"}},
      {"alpha_hat_action", {"alpha-hat_{psi+chi} = alpha-hat_psi o alpha-hat_chi, abstract and concrete", "group action on local S-matrices", "S-matrix checks"}},
      {"schwinger_dyson", {"alpha-hat_psi S(F) = S(F) for quadratic L0", "Schwinger-Dyson relation of the free theory", "S-matrix checks, s0 without theta0"}},
      {"centrality", {"S(dL0(psi)) commutes with S(F) under the star product", "centrality of the Schwinger-Dyson elements", "S-matrix checks"}},
      {"alpha_tilde_infinitesimal", {"d/dt alpha-tilde_{t psi}(S(F)) at t = 0 matches its three displayed forms", "infinitesimal translations", "infinitesimal translations"}},
      {"beta_infinitesimal", {"d/dt beta_{t psi}(F) at t = 0 = {X_psi, S00 + F}", "infinitesimal translations", "infinitesimal translations"}},
      {"alpha_hat_infinitesimal", {"d/dt alpha-hat_{t psi}(S(F)) at t = 0 matches the Ward form", "infinitesimal translations", "infinitesimal translations, s0 without theta0"}},
      {"diffeo_three_configuration", {"d/dt of the three-configuration alpha-tilde_{exp(tX)}(S(F)) = (i/hbar) delta_S(S(F) ._T X)", "field-dependent diffeomorphisms", "three-configuration formula"}},
  };
  return table;
}

inline std::string explain(const std::string& check) {
  auto it = explanations().find(check);
  if (it == explanations().end()) throw UnknownCheck(check);
  std::ostringstream os;
  os << check << "\n  identity:    " << it->second.identity << "\n  reference:   " << it->second.reference
     << "\n  conventions: " << it->second.conventions << "\n";
  return os.str();
}

inline std::string paper_ref(const std::string& check) {
  auto it = explanations().find(check);
  return it == explanations().end() ? std::string() : it->second.reference;
}

// ------------------------------------------------------------------- context

struct SuiteContext {
  ModelFile file;
  ModelSpec fixed;
  std::optional<PropagatorSet> props;
  std::vector<SWord> corpus;
  int hbar_cap = 2;
  int lambda_cap = 3;
  std::uint64_t seed = 1;
  int trials = 50;
  bool strict = false;
  int homology_degree = 2;

  const ModelSpec& raw() const { return file.model; }
  const PropagatorSet& p() const {
    if (!props) throw DomainError("propagators are not available for this model");
    return *props;
  }
  int lo() const { return p().radius; }
  int hi() const { return fixed.sites() - 1 - p().radius; }
  int mid() const { return std::min(hi() - 1, (lo() + hi() + 1) / 2); }

  /// Independent stream per suite, so selecting suites never shifts the others.
  Sampler sampler(const std::string& suite) const {
    std::uint64_t h = 1469598103934665603ULL;
    for (char ch : suite) h = (h ^ static_cast<unsigned char>(ch)) * 1099511628211ULL;
    return Sampler(seed ^ h);
  }
  std::vector<int> even_field_components() const {
    std::vector<int> out;
    for (int c = 0; c < fixed.components(); ++c)
      if (fixed.multiplet()[static_cast<std::size_t>(c)].kind == Kind::field) out.push_back(c);
    return out;
  }
  std::optional<int> component_of_kind(Kind k) const {
    for (int c = 0; c < fixed.components(); ++c)
      if (fixed.multiplet()[static_cast<std::size_t>(c)].kind == k) return c;
    return std::nullopt;
  }
};

namespace detail {

inline std::string caps_order(int h, int l) { return "hbar<=" + std::to_string(h) + ", lambda<=" + std::to_string(l); }
inline std::string lambda_order(int l) { return "lambda^" + std::to_string(l); }

inline CheckResult make_check(const std::string& name, const std::string& order, std::size_t residual,
                              std::string note = {}) {
  return {name, paper_ref(name), order, residual, residual == 0, std::move(note)};
}

/// A check whose pass condition is "something was detected".
inline CheckResult detection_check(const std::string& name, bool detected, std::size_t witness, std::string note = {}) {
  return {name, paper_ref(name), "exact", witness, detected, std::move(note)};
}

inline std::size_t count_nonzero(const Matrix& m) {
  std::size_t n = 0;
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) n += m(i, j).is_zero() ? 0 : 1;
  return n;
}

/// Up to three short-range monomials in even field components on [lo, hi], each
/// carrying one power of lambda.
inline Polynomial local_payload(Sampler& g, const SuiteContext& c, int lo, int hi) {
  auto comps = c.even_field_components();
  const ModelSpec& m = c.fixed;
  Polynomial p;
  int terms = g.uniform(1, 3);
  for (int t = 0; t < terms; ++t) {
    auto comp = [&] { return comps[static_cast<std::size_t>(g.uniform(0, static_cast<int>(comps.size()) - 1))]; };
    int s = g.uniform(lo, hi);
    Polynomial mono(m.field(s, comp()));
    if (g.coin()) mono = mono * Polynomial(m.field(std::min(hi, s + g.uniform(0, 1)), comp()));
    p += mono * (FormalSeries::lambda() * Complex(g.nonzero_rational()));
  }
  return p;
}

inline Configuration lambda_configuration(Sampler& g, const SuiteContext& c, int lo, int hi) {
  Configuration x = g.configuration(c.fixed, lo, hi);
  for (auto& v : x) v = v * FormalSeries::lambda();
  return x;
}

// ---------------------------------------------------------------- suites

inline SuiteReport algebra_suite(const SuiteContext& c) {
  SuiteReport rep{"algebra", {}};
  Sampler g = c.sampler("algebra");
  const int n = c.trials;
  auto random = [&] { return g.homogeneous(kEveryKind, 2, 2, 3); };
  using conventions::parity_sign;
  using conventions::shifted_sign;
  std::size_t comm = 0, sides = 0, anti = 0, jacobi = 0, leibniz = 0, nil = 0, gen = 0;
  for (int t = 0; t < n; ++t) {
    Polynomial x = random(), y = random();
    comm += (x * y - Complex(parity_sign(x.odd() && y.odd())) * (y * x)).size();
  }
  for (int t = 0; t < n; ++t) {
    Polynomial x = random();
    Generator q = g.generator(kEveryKind, 2, 2);
    Complex sign(parity_sign(q.odd() && !x.odd()));
    sides += (derivative(x, q, Side::left) - sign * derivative(x, q, Side::right)).size();
  }
  for (int t = 0; t < n; ++t) {
    Polynomial x = random(), y = random();
    anti += (antibracket(x, y) + Complex(shifted_sign(x.odd(), y.odd())) * antibracket(y, x)).size();
  }
  for (int t = 0; t < n; ++t) {
    Polynomial x = random(), y = random(), z = random();
    Polynomial lhs = antibracket(x, antibracket(y, z));
    Polynomial rhs = antibracket(antibracket(x, y), z) +
                     Complex(shifted_sign(x.odd(), y.odd())) * antibracket(y, antibracket(x, z));
    jacobi += (lhs - rhs).size();
  }
  for (int t = 0; t < n; ++t) {
    Polynomial x = random(), y = random(), z = random();
    Complex sign(parity_sign(!x.odd() && y.odd()));
    leibniz += (antibracket(x, y * z) - antibracket(x, y) * z - sign * (y * antibracket(x, z))).size();
  }
  for (int t = 0; t < n; ++t) {
    // Strict grading refuses inhomogeneous input, so only then stay homogeneous.
    Polynomial x = c.strict ? g.homogeneous(kEveryKind, 2, 2, 4, 4) : g.any(kEveryKind, 2, 2, 4, 4);
    nil += bv_laplacian(bv_laplacian(x, c.strict), c.strict).size();
  }
  for (int t = 0; t < n; ++t) {
    Polynomial x = random(), y = random();
    Complex py(parity_sign(y.odd()));
    Polynomial rhs = x * bv_laplacian(y, c.strict) + py * (bv_laplacian(x, c.strict) * y) +
                     Complex(conventions::kGeneratorBracketSign) * py * antibracket(x, y);
    gen += (bv_laplacian(x * y, c.strict) - rhs).size();
  }
  std::string order = std::to_string(n) + " instances";
  rep.checks = {make_check("graded_commutativity", order, comm),
                make_check("derivative_sides", order, sides),
                make_check("antibracket_antisymmetry", order, anti),
                make_check("antibracket_jacobi", order, jacobi),
                make_check("antibracket_leibniz", order, leibniz),
                make_check("laplacian_nilpotent", order, nil),
                make_check("laplacian_generates_antibracket", order, gen)};
  return rep;
}

inline SuiteReport propagator_suite(const SuiteContext& c) {
  SuiteReport rep{"propagators", {}};
  const ModelSpec& m = c.fixed;
  const PropagatorSet& p = c.p();
  const std::size_t n = m.dim();
  const int r = p.radius;
  Matrix pr = m.P() * p.retarded, pa = m.P() * p.advanced, pd = m.P() * p.pauli_jordan;
  std::size_t ret = 0, adv = 0, bisol = 0, anti = 0;
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < n; ++b) {
      int sa = m.site_of(a), sb = m.site_of(b);
      Complex id = a == b ? Complex(1) : Complex(0);
      if (sa <= m.sites() - 1 - r && pr(a, b) != id) ++ret;
      if (sa >= r && pa(a, b) != id) ++adv;
      if (sa < sb && !p.retarded(a, b).is_zero()) ++ret;
      if (sa > sb && !p.advanced(a, b).is_zero()) ++adv;
      if (p.interior(sa) && !pd(a, b).is_zero()) ++bisol;
      Complex sign = m.odd(a) && m.odd(b) ? Complex(-1) : Complex(1);
      if (p.pauli_jordan(a, b) != -sign * p.pauli_jordan(b, a)) ++anti;
    }
  rep.checks.push_back(make_check("retarded_green_function", "exact", ret));
  rep.checks.push_back(make_check("advanced_green_function", "exact", adv));
  rep.checks.push_back(make_check("pauli_jordan_bisolution", "exact", bisol));
  rep.checks.push_back(make_check("pauli_jordan_antisymmetry", "exact", anti));
  for (auto& e : consistency_check(m, p).entries) rep.checks.push_back(make_check("consistency", e.name, e.nonzero));

  // Perturb one H entry: a ghost-field pair when there is a ghost, else a diagonal entry.
  auto ghost = c.component_of_kind(Kind::ghost);
  std::size_t ea = m.flat(c.mid(), ghost ? *ghost : 0), eb = m.flat(ghost ? c.mid() + 1 : c.mid(), 0);
  Matrix h = p.symmetric_part;
  h(ea, eb) += Complex(1);
  bool rejected = false;
  std::string why;
  try {
    build_propagators(m, h);
  } catch (const BadH& e) {
    rejected = true;
    why = e.what();
  }
  PropagatorSet q = p;
  q.symmetric_part = h;
  std::size_t flagged = consistency_check(m, q).entries.back().nonzero;
  rep.checks.push_back(detection_check("h_perturbation_detected", rejected || flagged > 0, flagged,
                                       rejected ? "rejected: " + why : std::string()));
  return rep;
}

inline SuiteReport cme_suite(const SuiteContext& c) {
  SuiteReport rep{"cme", {}};
  const ModelSpec& raw = c.raw();
  rep.checks.push_back(make_check("cme", "all orders", cme_check(raw, ExtendedAction::from_model(raw)).size()));
  if (raw.gauge_fermion) {
    rep.checks.push_back(
        make_check("cme_gauge_fixed", "all orders", cme_check(c.fixed, ExtendedAction::from_model(c.fixed)).size()));
    Substitution alpha = gauge_fixing_map(raw, *raw.gauge_fermion);
    Sampler g = c.sampler("cme/gauge");
    int r = raw.stencil_radius();
    std::size_t res = 0;
    for (int t = 0; t < c.trials; ++t) {
      Polynomial x = g.model_poly(raw, r, raw.sites() - 1 - r, 3), y = g.model_poly(raw, r, raw.sites() - 1 - r, 3);
      res += (antibracket(alpha(x), alpha(y)) - alpha(antibracket(x, y))).size();
    }
    rep.checks.push_back(make_check("gauge_fixing_antibracket", std::to_string(c.trials) + " pairs", res));
  }
  Sampler g = c.sampler("cme/nilpotency");
  const ModelSpec& m = c.fixed;
  ExtendedAction s = ExtendedAction::from_model(m);
  int r = m.stencil_radius();
  std::size_t ss = 0, s0s0 = 0, anti = 0;
  for (int t = 0; t < c.trials; ++t) {
    Polynomial x = g.model_poly(m, r, m.sites() - 1 - r, 3);
    auto apply = [&](const Polynomial& y, BvPart part) { return classical_bv(y, s, part); };
    ss += apply(apply(x, BvPart::s), BvPart::s).size();
    s0s0 += apply(apply(x, BvPart::s0), BvPart::s0).size();
    anti += (apply(apply(x, BvPart::gamma0), BvPart::delta0) + apply(apply(x, BvPart::delta0), BvPart::gamma0)).size();
  }
  std::string order = std::to_string(c.trials) + " instances";
  rep.checks.push_back(make_check("nilpotency_s", order, ss));
  rep.checks.push_back(make_check("nilpotency_s0", order, s0s0));
  rep.checks.push_back(make_check("anticommutator_delta0_gamma0", order, anti));
  return rep;
}

/// H^0 dimensions by dense elimination of the s0 matrices.
inline std::vector<std::size_t> dense_h0(const ModelSpec& m, const Polynomial& s0, int cap) {
  auto gens = all_generators(m);
  auto dense_rank = [&](const std::vector<Monomial>& src, const std::vector<Monomial>& dst) -> std::size_t {
    if (src.empty() || dst.empty()) return 0;
    auto rows = s0_rows(src, dst, s0);
    Matrix a(rows.size(), dst.size());
    for (std::size_t i = 0; i < rows.size(); ++i)
      for (auto& [j, v] : rows[i]) a(i, j) = v;
    return rank(std::move(a));
  };
  std::vector<std::size_t> out;
  for (int d = 0; d <= cap; ++d) {
    auto bm = monomial_basis(gens, d, -1), b0 = monomial_basis(gens, d, 0), b1 = monomial_basis(gens, d, 1);
    out.push_back(b0.size() - dense_rank(b0, b1) - dense_rank(bm, b0));
  }
  return out;
}

inline SuiteReport homology_suite(const SuiteContext& c) {
  SuiteReport rep{"homology", {}};
  const ModelSpec& m = c.raw();
  ExtendedAction s;
  s.s00 = m.s00;
  s.theta0 = m.theta0;
  const int cap = c.homology_degree;
  HomologyReport h = koszul_homology(m, s, cap);
  auto dense = dense_h0(m, s.s0(), cap);
  auto diff = [](std::size_t a, std::size_t b) { return a > b ? a - b : b - a; };
  for (int d = 0; d <= cap; ++d) {
    std::size_t hs = h.degrees[static_cast<std::size_t>(d)].h0();
    std::size_t hd = dense[static_cast<std::size_t>(d)];
    rep.checks.push_back(make_check("homology", "degree " + std::to_string(d), diff(hs, hd),
                                    "dim H0 = " + std::to_string(hs)));
  }
  auto cbar = c.component_of_kind(Kind::antighost);
  auto nl = c.component_of_kind(Kind::nl_field);
  if (cbar && nl) {
    ModelSpec reduced = drop_components(m, {*cbar, *nl});
    ExtendedAction rs;
    rs.s00 = reduced.s00;
    rs.theta0 = reduced.theta0;
    HomologyReport without = koszul_homology(reduced, rs, cap, false);
    for (int d = 0; d <= cap; ++d)
      rep.checks.push_back(make_check("trivial_pair", "degree " + std::to_string(d),
                                      diff(without.degrees[static_cast<std::size_t>(d)].h0(),
                                           h.degrees[static_cast<std::size_t>(d)].h0())));
  }
  if (cap >= 1) {
    std::size_t open = 0;
    for (auto& x : h.degree1_basis) open += antibracket(x, s.s0()).size();
    open += diff(h.degree1_basis.size(), h.degrees[1].h0());
    rep.checks.push_back(make_check("homology_representatives", "degree 1", open));
  }
  return rep;
}

inline SuiteReport moller_suite(const SuiteContext& c) {
  SuiteReport rep{"moller", {}};
  const ModelSpec& m = c.fixed;
  const PropagatorSet& p = c.p();
  const int order = c.lambda_cap;
  MollerSeries f = moller_forward(m, p, m.interaction, order);
  MollerSeries inv = moller_inverse(m, p, m.interaction, order);
  std::size_t off = 0;
  for (const Substitution& both : {compose_configuration_maps(m, f.rule, inv.rule, order),
                                   compose_configuration_maps(m, inv.rule, f.rule, order)})
    for (std::size_t a = 0; a < m.dim(); ++a) {
      const Polynomial* img = both.find(m.field(a));
      if (img && *img != Polynomial(m.field(a))) off += (*img - Polynomial(m.field(a))).size();
    }
  rep.checks.push_back(make_check("moller_round_trip", "lambda<=" + std::to_string(order), off));

  auto ghost = c.component_of_kind(Kind::ghost);
  Polynomial x(m.antifield(m.flat(c.mid(), 0)));
  if (ghost) x = x * Polynomial(m.field(c.mid(), *ghost));
  TheoremReport t = verify_moller_theorem(m, p, x, order);
  auto emit = [&](const std::string& name, const IdentityResult& r) {
    for (auto& o : r.orders) rep.checks.push_back(make_check(name, lambda_order(o.order), o.residual.size()));
  };
  emit("moller_lemma1", t.lemma1);
  emit("moller_lemma2", t.lemma2);
  emit("moller_theorem", t.theorem);
  emit("moller_intertwining", t.intertwining);

  Matrix broken = p.retarded;
  broken(m.flat(c.mid(), 0), m.flat(c.mid() - 1, 0)) += Complex(1);
  TheoremReport b = verify_moller_theorem(m, p, x, std::min(order, 2), broken);
  std::size_t witness = b.lemma1.residual_terms() + b.lemma2.residual_terms() + b.theorem.residual_terms() +
                        b.intertwining.residual_terms();
  rep.checks.push_back(detection_check("moller_broken_retarded", !b.pass(), witness));
  return rep;
}

inline SuiteReport quantum_suite(const SuiteContext& c) {
  SuiteReport rep{"quantum", {}};
  const ModelSpec& m = c.fixed;
  const PropagatorSet& p = c.p();
  const int lo = c.lo(), hi = c.hi();
  Sampler g = c.sampler("quantum");
  const Polynomial s0 = ExtendedAction::from_model(m).s0();

  int n = std::min(c.trials, 40);
  std::size_t assoc = 0;
  for (int t = 0; t < n; ++t) {
    Polynomial x = g.model_poly(m, lo, hi, 2, 2), y = g.model_poly(m, lo, hi, 2, 2), z = g.model_poly(m, lo, hi, 2, 2);
    assoc += (star_product(m, p, star_product(m, p, x, y), z) - star_product(m, p, x, star_product(m, p, y, z))).size();
  }
  rep.checks.push_back(make_check("star_associativity", std::to_string(n) + " triples", assoc));

  std::size_t comm = 0;
  for (std::size_t a = 0; a < m.dim(); ++a)
    for (std::size_t b = 0; b < m.dim(); ++b) {
      if (m.odd(a) || m.odd(b) || !p.interior(m.site_of(a)) || !p.interior(m.site_of(b))) continue;
      Polynomial fa(m.field(a)), fb(m.field(b));
      Polynomial diff = star_product(m, p, fa, fb) - star_product(m, p, fb, fa) -
                        Polynomial(FormalSeries::monomial(1, 0, Complex::i() * p.pauli_jordan(a, b)));
      comm += diff.size();
    }
  rep.checks.push_back(make_check("star_commutator", "hbar^1", comm));

  n = std::min(c.trials, 60);
  std::size_t deriv = 0;
  for (int t = 0; t < n; ++t) {
    Polynomial x = g.model_poly(m, lo, hi, 3, 1), y = g.model_poly(m, lo, hi, 3, 1);
    Complex sy(y.odd() ? -1 : 1);
    // s0 spreads support by the stencil radius, hence the unchecked product.
    Polynomial lhs = antibracket(detail::star(m, p, x, y), s0);
    Polynomial rhs = detail::star(m, p, antibracket(x, s0), y) * sy + detail::star(m, p, x, antibracket(y, s0));
    deriv += (lhs - rhs).size();
  }
  rep.checks.push_back(make_check("s0_right_derivation", std::to_string(n) + " pairs", deriv));

  n = std::min(c.trials, 100);
  ExtendedAction s = ExtendedAction::from_model(m);
  std::size_t qbv = 0, tinv = 0;
  for (int t = 0; t < n; ++t) {
    QuantumBvPair q = quantum_bv_free(m, p, s, g.model_poly(m, lo, hi, 4, 2));
    qbv += (q.conjugated - q.formula).size();
    Polynomial x = g.model_poly(m, lo, hi, 4, 3);
    tinv += (inverse_time_order(m, p, time_order(m, p, x)) - x).size();
  }
  rep.checks.push_back(make_check("quantum_bv_free", std::to_string(n) + " instances", qbv));
  rep.checks.push_back(make_check("time_order_inverse", std::to_string(n) + " instances", tinv));

  // Factors on single, strictly ordered sites.
  n = std::min(c.trials, 20);
  std::size_t two = 0, three = 0;
  for (int t = 0; t < n; ++t) {
    int s1 = g.uniform(lo, hi - 1);
    int s2 = g.uniform(s1 + 1, hi);
    Polynomial early = g.model_poly(m, s1, s1, 3, 2), late = g.model_poly(m, s2, s2, 3, 2);
    two += (time_ordered_product(m, p, late, early) - star_product(m, p, late, early)).size();
  }
  if (hi - lo >= 2)
    for (int t = 0; t < n; ++t) {
      int s1 = g.uniform(lo, hi - 2);
      int s2 = g.uniform(s1 + 1, hi - 1);
      int s3 = g.uniform(s2 + 1, hi);
      Polynomial h = g.model_poly(m, s1, s1, 2, 2), y = g.model_poly(m, s2, s2, 2, 2), f = g.model_poly(m, s3, s3, 2, 2);
      Polynomial t3 = time_order(m, p, inverse_time_order(m, p, f) * inverse_time_order(m, p, y) * inverse_time_order(m, p, h));
      three += (t3 - star_product(m, p, star_product(m, p, f, y), h)).size();
    }
  rep.checks.push_back(make_check("causal_factorization", "n=2", two));
  rep.checks.push_back(make_check("causal_factorization", "n=3", three));
  return rep;
}

inline SuiteReport qme_suite(const SuiteContext& c) {
  SuiteReport rep{"qme", {}};
  const ModelSpec& m = c.fixed;
  ExtendedAction s = ExtendedAction::from_model(m);
  rep.checks.push_back(make_check("qme", "all orders", qme_check(m, s).size()));
  rep.checks.push_back(make_check("laplacian_free_action", "exact", bv_laplacian(s.s0()).size()));
  const PropagatorSet& p = c.p();
  Interaction rv(m, p, m.interaction, c.lambda_cap);
  const int mid = c.mid();
  Polynomial phid(m.antifield(m.flat(mid, 0))), phi(m.field(mid, 0)), next(m.field(mid + 1, 0));
  std::vector<Polynomial> xs = {phid, phid * phi, phi * phi, phid * next};
  Sampler g = c.sampler("qme");
  for (int t = 0; t < std::min(c.trials, 3); ++t) xs.push_back(g.model_poly(m, c.lo(), c.hi(), 2, 1));
  std::size_t res = 0;
  for (auto& x : xs) {
    InteractingBvPair q = interacting_bv(m, s, rv, x);
    res += (q.conjugated - q.local).size();
  }
  rep.checks.push_back(make_check("interacting_bv", "lambda<=" + std::to_string(c.lambda_cap), res,
                                  std::to_string(xs.size()) + " functionals"));
  return rep;
}

inline SuiteReport mwi_suite(const SuiteContext& c) {
  SuiteReport rep{"mwi", {}};
  const ModelSpec& m = c.fixed;
  const PropagatorSet& p = c.p();
  ExtendedAction s = ExtendedAction::from_model(m);
  const int mid = c.mid();
  // Extra term F: an antifield insertion for gauge models, a local product otherwise.
  auto ghost = c.component_of_kind(Kind::ghost);
  Polynomial extra = ghost ? Polynomial(m.antifield(m.flat(mid, 0))) * Polynomial(m.field(mid, *ghost)) *
                                 Polynomial(m.field(mid + 1, 0))
                           : Polynomial(m.field(mid, 0)) * Polynomial(m.field(mid + 1, 0));
  extra = extra * FormalSeries::lambda();
  for (const Polynomial& f : {Polynomial(), extra}) {
    MwiReport r = mwi_check(m, p, s, m.interaction, f, c.hbar_cap, c.lambda_cap);
    std::map<int, std::size_t> per;
    for (int l = 0; l <= c.lambda_cap; ++l) per[l] = 0;
    for (auto& o : r.residual.orders) per[o.lambda] += o.residual.size();
    for (auto& [l, k] : per)
      rep.checks.push_back(make_check("mwi", "hbar<=" + std::to_string(c.hbar_cap) + ", " + lambda_order(l), k,
                                      f.is_zero() ? "W = V" : "W = V + F"));
  }
  return rep;
}

inline SuiteReport smatrix_suite(const SuiteContext& c) {
  SuiteReport rep{"smatrix", {}};
  const ModelSpec& m = c.fixed;
  const PropagatorSet& p = c.p();
  const int lo = c.lo(), hi = c.hi(), hc = c.hbar_cap, lc = c.lambda_cap;
  const std::string caps = caps_order(hc, lc);
  Sampler g = c.sampler("smatrix");

  {
    std::size_t bad = word_reduce(SWord::s(Polynomial())).size();
    bad += (evaluate_word(m, p, SWord::s(Polynomial()), lc) - Polynomial(1)).size();
    rep.checks.push_back(make_check("s1_identity", "exact", bad));
  }

  // Abstract word reduction on the corpus plus sampled words.
  std::vector<SWord> words = c.corpus;
  std::vector<Polynomial> pool;
  for (int k = 0; k < 6; ++k) pool.push_back(local_payload(g, c, lo, hi));
  pool.push_back(Polynomial());
  const int sampled = std::min(c.trials, 200);
  for (int it = 0; it < sampled; ++it) {
    SWord w;
    int len = g.uniform(0, 12);
    for (int k = 0; k < len; ++k) {
      if (g.uniform(0, 5) == 0)
        w = w * (g.coin() ? SWord::symbol("A", {lo + 1}) : SWord::symbol("B", {hi}, -1));
      else
        w = w * SWord::s(pool[static_cast<std::size_t>(g.uniform(0, 6))], g.coin() ? 1 : -1);
    }
    words.push_back(w);
  }
  std::size_t failing = 0;
  for (auto& w : words) {
    SWord r = word_reduce(w);
    bool ok = word_reduce(r) == r;
    for (std::size_t k = 0; k < r.size(); ++k) {
      const Letter& l = r.letters()[k];
      if (!l.symbolic() && l.payload.is_zero()) ok = false;
      if (k + 1 < r.size() && l.same_symbol(r.letters()[k + 1]) && l.exponent == -r.letters()[k + 1].exponent) ok = false;
    }
    std::size_t cut = static_cast<std::size_t>(g.uniform(0, static_cast<int>(w.size())));
    SWord head, tail;
    for (std::size_t k = 0; k < w.size(); ++k) {
      SWord one;
      one.letters().push_back(w.letters()[k]);
      if (k < cut)
        head = head * one;
      else
        tail = tail * one;
    }
    if (word_reduce(word_reduce(head) * word_reduce(tail)) != r) ok = false;
    failing += ok ? 0 : 1;
  }
  rep.checks.push_back(make_check("word_reduction", std::to_string(words.size()) + " words", failing,
                                  std::to_string(c.corpus.size()) + " from corpus"));

  const int few = std::min(c.trials, 10);
  std::size_t value = 0;
  for (int it = 0; it < few; ++it) {
    SWord w;
    int len = g.uniform(1, 3);
    for (int k = 0; k < len; ++k) w = w * SWord::s(local_payload(g, c, lo, hi), g.coin() ? 1 : -1);
    value += (evaluate_word(m, p, w, lc) - evaluate_word(m, p, word_reduce(w), lc)).size();
  }
  rep.checks.push_back(make_check("word_value", caps, value));

  std::size_t ham = 0;
  for (int it = 0; it < few; ++it) {
    int k = g.uniform(lo + 1, hi - 1);
    Polynomial f1 = local_payload(g, c, lo, k - 1), f2 = local_payload(g, c, k + 1, hi);
    Polynomial f = local_payload(g, c, k - 1, k + 1);
    ham += hammerstein_check(m, p, f1, f, f2, hc, lc).residual.residual_terms();
  }
  rep.checks.push_back(make_check("hammerstein", caps, ham));

  // Translations live strictly inside the interior so that an admissible cutoff fits.
  const int plo = lo + 1, phi_ = hi - 1;
  const int reps = std::min(c.trials, 4);
  std::size_t coc = 0, act = 0;
  for (const Polynomial* src : {&m.s00, &m.lagrangian}) {
    CutoffLagrangian l(m, *src);
    for (int it = 0; it < reps; ++it) {
      Configuration psi = g.configuration(m, plo, phi_), chi = g.configuration(m, plo, phi_);
      std::vector<Configuration> probes;
      for (int k = 0; k < 10; ++k) probes.push_back(g.configuration(m, 0, m.sites() - 1));
      for (auto& part : cocycle_check(l, psi, chi, probes).parts) coc += part.residual_terms();
      Configuration lpsi = lambda_configuration(g, c, plo, phi_), lchi = lambda_configuration(g, c, plo, phi_);
      auto r = action_check(l, lpsi, lchi, local_payload(g, c, plo, phi_), &p, hc, lc);
      for (auto& part : r.parts) act += part.residual_terms();
    }
  }
  rep.checks.push_back(make_check("cocycle", "exact", coc));
  rep.checks.push_back(make_check("alpha_hat_action", caps, act, "abstract and concrete"));

  CutoffLagrangian l0(m, m.s00);
  std::size_t sd = 0, central = 0;
  for (int it = 0; it < reps; ++it) {
    Configuration psi = lambda_configuration(g, c, plo, phi_);
    for (auto& part : sd_relation_check(m, p, l0, psi, local_payload(g, c, lo, hi), hc, lc).parts)
      sd += part.residual_terms();
    for (auto& part : sd_centrality_check(m, p, l0, psi, local_payload(g, c, lo, hi), hc, lc).parts)
      central += part.residual_terms();
  }
  rep.checks.push_back(make_check("schwinger_dyson", caps, sd));
  rep.checks.push_back(make_check("centrality", caps, central));

  std::map<InfinitesimalKind, std::size_t> inf;
  for (int it = 0; it < reps; ++it) {
    Configuration psi = lambda_configuration(g, c, plo, phi_);
    Polynomial fn = local_payload(g, c, lo, hi);
    for (auto k : {InfinitesimalKind::alpha_tilde, InfinitesimalKind::beta, InfinitesimalKind::alpha_hat})
      for (auto& part : infinitesimal_check(k, m, p, psi, fn, hc, lc).parts) inf[k] += part.residual_terms();
  }
  rep.checks.push_back(make_check("alpha_tilde_infinitesimal", caps, inf[InfinitesimalKind::alpha_tilde]));
  rep.checks.push_back(make_check("beta_infinitesimal", caps, inf[InfinitesimalKind::beta]));
  rep.checks.push_back(make_check("alpha_hat_infinitesimal", caps, inf[InfinitesimalKind::alpha_hat]));
  return rep;
}

inline SuiteReport diffeo_suite(const SuiteContext& c) {
  SuiteReport rep{"diffeo", {}};
  const ModelSpec& m = c.fixed;
  const PropagatorSet& p = c.p();
  const int lo = c.lo(), hi = c.hi(), mid = c.mid();
  const int hc = c.hbar_cap, lc = c.lambda_cap;
  Sampler g = c.sampler("diffeo");
  auto comps = c.even_field_components();
  std::size_t a = m.flat(mid, comps.front());
  Polynomial phi(m.field(a));
  auto lam = [](long k) { return FormalSeries::lambda() * Complex(k); };
  struct Case {
    std::string label;
    VectorField x;
  };
  std::vector<Case> cases = {{"constant", {{a, Polynomial(lam(2))}}},
                             {"linear", {{a, phi * lam(1)}}},
                             {"quadratic", {{a, phi * Polynomial(m.field(mid + 1, comps.back())) * lam(1)}}}};
  for (int t = 0; t < std::min(c.trials, 2); ++t) {
    std::size_t b = m.flat(g.uniform(lo + 1, hi - 1), comps[static_cast<std::size_t>(g.uniform(0, static_cast<int>(comps.size()) - 1))]);
    cases.push_back({"random", {{b, local_payload(g, c, lo, hi)}}});
  }
  for (auto& cs : cases) {
    Polynomial fn = local_payload(g, c, lo, hi);
    DiffeoReport d = diffeo_action_check(m, p, cs.x, fn, hc, lc);
    std::size_t res = 0;
    for (auto& part : d.identity.parts) res += part.residual_terms();
    rep.checks.push_back(make_check("diffeo_three_configuration", caps_order(hc, lc), res, cs.label + " field"));
  }
  return rep;
}

}  // namespace detail

using SuiteRunner = std::function<SuiteReport(const SuiteContext&)>;

inline const std::map<std::string, SuiteRunner>& suite_runners() {
  static const std::map<std::string, SuiteRunner> table = {
      {"algebra", detail::algebra_suite}, {"propagators", detail::propagator_suite}, {"cme", detail::cme_suite},
      {"homology", detail::homology_suite}, {"moller", detail::moller_suite},     {"quantum", detail::quantum_suite},
      {"qme", detail::qme_suite},           {"mwi", detail::mwi_suite},           {"smatrix", detail::smatrix_suite},
      {"diffeo", detail::diffeo_suite}};
  return table;
}

inline bool suite_needs_propagators(const std::string& s) {
  return s != "algebra" && s != "cme" && s != "homology";
}

/// Validates the plan against the model and builds the shared context. All
/// ConfigErrors are raised here, before any suite runs.
inline SuiteContext prepare(const VerificationPlan& plan, const ModelFile& file) {
  for (auto& s : plan.suites)
    if (!suite_runners().count(s)) throw ConfigError("unknown suite '" + s + "'");
  std::vector<std::string> suites = plan.suites.empty() ? kSuites : plan.suites;
  bool explicit_homology = std::find(plan.suites.begin(), plan.suites.end(), "homology") != plan.suites.end();
  if (explicit_homology && !file.model.interaction.is_zero())
    throw ConfigError("suite 'homology' requires a quadratic action, but the model has an interaction");
  if (plan.trials < 1) throw ConfigError("trials must be positive");
  SuiteContext c;
  c.file = file;
  c.hbar_cap = plan.hbar_cap.value_or(file.model.hbar_cap);
  c.lambda_cap = plan.lambda_cap.value_or(file.model.lambda_cap);
  c.seed = plan.seed;
  c.trials = plan.trials;
  c.strict = plan.strict_grading;
  c.homology_degree = plan.homology_degree;
  bool quantum = std::any_of(suites.begin(), suites.end(), [](const std::string& s) {
    return s == "quantum" || s == "qme" || s == "mwi" || s == "smatrix" || s == "diffeo";
  });
  if (quantum && (c.hbar_cap < 1 || c.lambda_cap < 1)) throw ConfigError("quantum suites need hbar and lambda caps >= 1");
  if (c.hbar_cap < 0 || c.lambda_cap < 0) throw ConfigError("caps must be nonnegative");
  c.fixed = file.gauge_fixed();
  std::optional<std::string> corpus = plan.corpus ? plan.corpus : file.corpus;
  if (corpus) c.corpus = load_corpus(*corpus, file.functionals);
  return c;
}

/// Runs the selected suites in the canonical suite order. Suites are
/// independent; each draws from its own seeded stream.
inline RunReport run(const VerificationPlan& plan, const ModelFile& file) {
  SuiteContext c = prepare(plan, file);
  RunReport out;
  out.model = file.model.name();
  out.plan = plan;
  out.hbar_cap = c.hbar_cap;
  out.lambda_cap = c.lambda_cap;
  bool implicit = plan.suites.empty();
  std::vector<std::string> chosen;
  for (auto& s : kSuites)
    if (implicit || std::find(plan.suites.begin(), plan.suites.end(), s) != plan.suites.end()) chosen.push_back(s);
  std::optional<std::string> build_error;
  if (std::any_of(chosen.begin(), chosen.end(), suite_needs_propagators)) {
    try {
      c.props = build_propagators(c.fixed);
    } catch (const DomainError& e) {
      build_error = e.what();
    }
  }
  for (auto& s : chosen) {
    // Without an explicit request, homology only runs on quadratic models.
    if (s == "homology" && implicit && !file.model.interaction.is_zero()) continue;
    if (suite_needs_propagators(s) && build_error) {
      out.suites.push_back({s, {{s, paper_ref(s), "setup", 1, false, *build_error}}});
      continue;
    }
    try {
      out.suites.push_back(suite_runners().at(s)(c));
    } catch (const ConfigError&) {
      throw;
    } catch (const DomainError& e) {
      out.suites.push_back({s, {{s, paper_ref(s), "setup", 1, false, e.what()}}});
    }
  }
  return out;
}

inline RunReport run(const VerificationPlan& plan) { return run(plan, load_model_file(plan.model_path)); }

}  // namespace bvcheck
