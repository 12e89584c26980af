#pragma once

#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "bvcheck/classical.hpp"
#include "bvcheck/models.hpp"
#include "bvcheck/smatrix.hpp"

namespace bvcheck {

/// A model file: the un-gauge-fixed model plus named functionals that word
/// corpora may refer to.
struct ModelFile {
  ModelSpec model;
  std::map<std::string, Polynomial> functionals;
  std::optional<std::string> corpus;
  /// The model with its gauge fermion applied (equal to `model` without one).
  ModelSpec gauge_fixed() const { return gauge_fixed_model(model); }
};

/// Parses "p/q", "i", "-i", "2/3i", "1/2+3i" or "1-i".
inline Complex parse_complex_literal(std::string_view text) {
  if (text.empty() || text.back() != 'i') return Complex(parse_rational(text));
  std::string_view body = text.substr(0, text.size() - 1);
  std::size_t split = std::string_view::npos;
  for (std::size_t k = body.size(); k-- > 1;)
    if (body[k] == '+' || body[k] == '-') {
      split = k;
      break;
    }
  std::string_view re = split == std::string_view::npos ? std::string_view() : body.substr(0, split);
  std::string_view im = split == std::string_view::npos ? body : body.substr(split);
  Rational imag;
  if (im.empty() || im == "+")
    imag = 1;
  else if (im == "-")
    imag = -1;
  else
    imag = parse_rational(im.front() == '+' ? im.substr(1) : im);
  return {re.empty() ? Rational(0) : parse_rational(re), imag};
}

inline std::string complex_literal(const Complex& z) {
  if (z.is_real()) return z.re().get_str();
  std::string im = z.im() == 1 ? "i" : z.im() == -1 ? "-i" : z.im().get_str() + "i";
  if (sgn(z.re()) == 0) return im;
  return z.re().get_str() + (sgn(z.im()) > 0 ? "+" : "") + im;
}

namespace detail {

using Json = nlohmann::json;
using OrderedJson = nlohmann::ordered_json;

inline const Json& require_key(const Json& j, const std::string& key, const std::string& path) {
  if (!j.is_object()) throw ConfigError(path + ": expected an object");
  auto it = j.find(key);
  if (it == j.end()) throw ConfigError(path + ": missing key '" + key + "'");
  return *it;
}

inline std::string join(const std::string& path, const std::string& key) {
  return path.empty() ? key : path + "." + key;
}

inline void reject_float(const Json& j, const std::string& path) {
  if (j.is_number_float())
    throw ConfigError("floating literal " + j.dump() + " at '" + path + "'; use a rational string \"p/q\"");
}

inline int read_int(const Json& j, const std::string& path, int lo = 0) {
  reject_float(j, path);
  if (!j.is_number_integer()) throw ConfigError("'" + path + "' must be an integer");
  auto v = j.get<long long>();
  if (v < lo || v > 1000000) throw ConfigError("'" + path + "' is out of range");
  return static_cast<int>(v);
}

inline Complex read_number(const Json& j, const std::string& path) {
  reject_float(j, path);
  if (!j.is_string()) throw ConfigError("'" + path + "' must be a rational string \"p/q\"");
  try {
    return parse_complex_literal(j.get<std::string>());
  } catch (const ConfigError& e) {
    throw ConfigError("'" + path + "': " + e.what());
  }
}

inline Matrix read_matrix(const Json& j, std::size_t n, const std::string& path) {
  if (!j.is_array() || j.size() != n) throw ConfigError("'" + path + "' must be a " + std::to_string(n) + "x" + std::to_string(n) + " array");
  Matrix m(n, n);
  for (std::size_t r = 0; r < n; ++r) {
    std::string rp = path + "[" + std::to_string(r) + "]";
    if (!j[r].is_array() || j[r].size() != n) throw ConfigError("'" + rp + "' must have " + std::to_string(n) + " entries");
    for (std::size_t c = 0; c < n; ++c) m(r, c) = read_number(j[r][c], rp + "[" + std::to_string(c) + "]");
  }
  return m;
}

inline Polynomial read_polynomial(const Json& j, const ModelSpec& m, const std::string& path) {
  if (!j.is_array()) throw ConfigError("'" + path + "' must be a list of monomials");
  Polynomial out;
  for (std::size_t t = 0; t < j.size(); ++t) {
    std::string tp = path + "[" + std::to_string(t) + "]";
    const Json& term = j[t];
    Complex coeff = read_number(require_key(term, "coefficient", tp), join(tp, "coefficient"));
    int l = term.contains("lambda") ? read_int(term["lambda"], join(tp, "lambda")) : 0;
    int h = term.contains("hbar") ? read_int(term["hbar"], join(tp, "hbar"), -1000) : 0;
    Polynomial mono(FormalSeries::monomial(h, l, coeff));
    const Json& gens = require_key(term, "generators", tp);
    if (!gens.is_array()) throw ConfigError("'" + join(tp, "generators") + "' must be a list");
    for (std::size_t k = 0; k < gens.size(); ++k) {
      std::string gp = join(tp, "generators") + "[" + std::to_string(k) + "]";
      const Json& kind = require_key(gens[k], "kind", gp);
      if (!kind.is_string()) throw ConfigError("'" + join(gp, "kind") + "' must be a string");
      Generator g(parse_kind(kind.get<std::string>()), read_int(require_key(gens[k], "component", gp), join(gp, "component")),
                  read_int(require_key(gens[k], "site", gp), join(gp, "site")));
      if (!m.owns(g)) throw ConfigError("'" + gp + "': generator " + g.str() + " does not belong to the model");
      int power = gens[k].contains("power") ? read_int(gens[k]["power"], join(gp, "power"), 1) : 1;
      for (int p = 0; p < power; ++p) mono = mono * Polynomial(g);
    }
    out += mono;
  }
  return out;
}

template <class J>
J write_polynomial(const Polynomial& x) {
  J out = J::array();
  for (auto& [mono, series] : x.terms())
    for (auto& [key, c] : series.terms()) {
      J term;
      term["coefficient"] = complex_literal(c);
      if (key.second != 0) term["lambda"] = key.second;
      if (key.first != 0) term["hbar"] = key.first;
      J gens = J::array();
      for (auto& f : mono.factors()) {
        J g;
        g["kind"] = std::string(kind_name(f.gen.kind()));
        g["component"] = f.gen.component();
        g["site"] = f.gen.site();
        if (f.power != 1) g["power"] = f.power;
        gens.push_back(std::move(g));
      }
      term["generators"] = std::move(gens);
      out.push_back(std::move(term));
    }
  return out;
}

}  // namespace detail

/// Builds a model from parsed JSON. `source` prefixes diagnostics.
inline ModelFile parse_model(const nlohmann::json& j, const std::string& source = "model") {
  using detail::read_int;
  using detail::require_key;
  if (!j.is_object()) throw ConfigError(source + ": top level must be an object");
  int sites = read_int(require_key(j, "sites", source), "sites", 1);
  const auto& mj = require_key(j, "multiplet", source);
  if (!mj.is_array()) throw ConfigError("'multiplet' must be a list");
  std::vector<Component> multiplet;
  for (std::size_t k = 0; k < mj.size(); ++k) {
    std::string p = "multiplet[" + std::to_string(k) + "]";
    const auto& name = require_key(mj[k], "name", p);
    const auto& kind = require_key(mj[k], "kind", p);
    if (!name.is_string() || !kind.is_string()) throw ConfigError("'" + p + "' needs string name and kind");
    multiplet.push_back({name.get<std::string>(), parse_kind(kind.get<std::string>())});
  }
  std::string name = j.contains("name") && j["name"].is_string() ? j["name"].get<std::string>() : "model";
  ModelFile out;
  out.model = ModelSpec(name, sites, std::move(multiplet));
  ModelSpec& m = out.model;
  m.s00 = m.quadratic_form(detail::read_matrix(require_key(j, "P", source), m.dim(), "P"));
  m.theta0 = m.linear_symmetry(detail::read_matrix(require_key(j, "K", source), m.dim(), "K"));
  m.interaction = detail::read_polynomial(require_key(j, "interaction", source), m, "interaction");
  const auto& gf = require_key(j, "gauge_fermion", source);
  if (!gf.is_null()) m.gauge_fermion = detail::read_polynomial(gf, m, "gauge_fermion");
  m.hbar_cap = read_int(require_key(j, "hbar_cap", source), "hbar_cap");
  m.lambda_cap = read_int(require_key(j, "lambda_cap", source), "lambda_cap");
  m.lagrangian = j.contains("density") ? m.s00 + detail::read_polynomial(j["density"], m, "density") : m.s00 + m.interaction;
  if (j.contains("functionals")) {
    const auto& fj = j["functionals"];
    if (!fj.is_object()) throw ConfigError("'functionals' must be an object");
    for (auto it = fj.begin(); it != fj.end(); ++it)
      out.functionals[it.key()] = detail::read_polynomial(it.value(), m, "functionals." + it.key());
  }
  if (j.contains("corpus")) {
    if (!j["corpus"].is_string()) throw ConfigError("'corpus' must be a path string");
    out.corpus = j["corpus"].get<std::string>();
  }
  m.validate();
  return out;
}

inline nlohmann::json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open '" + path + "'");
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

/// Loads a model file; a relative corpus path is resolved against the file's directory.
inline ModelFile load_model_file(const std::string& path) {
  ModelFile f = parse_model(read_json_file(path), path);
  if (f.corpus && std::filesystem::path(*f.corpus).is_relative())
    f.corpus = (std::filesystem::path(path).parent_path() / *f.corpus).string();
  return f;
}

inline ModelFile parse_model_text(const std::string& text, const std::string& source = "model") {
  try {
    return parse_model(nlohmann::json::parse(text), source);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(source + ": " + e.what());
  }
}

/// Serializes a model. The density key is written only when it differs from
/// the default S00 + interaction.
inline nlohmann::ordered_json dump_model(const ModelSpec& m, const std::map<std::string, Polynomial>& functionals = {},
                                         const std::optional<std::string>& corpus = std::nullopt) {
  using J = nlohmann::ordered_json;
  J j;
  j["name"] = m.name();
  j["sites"] = m.sites();
  J mult = J::array();
  for (auto& c : m.multiplet()) mult.push_back(J{{"name", c.name}, {"kind", std::string(kind_name(c.kind))}});
  j["multiplet"] = mult;
  auto matrix = [](const Matrix& a) {
    J rows = J::array();
    for (std::size_t r = 0; r < a.rows(); ++r) {
      J row = J::array();
      for (std::size_t c = 0; c < a.cols(); ++c) row.push_back(complex_literal(a(r, c)));
      rows.push_back(std::move(row));
    }
    return rows;
  };
  j["P"] = matrix(m.P());
  j["K"] = matrix(m.K());
  j["interaction"] = detail::write_polynomial<J>(m.interaction);
  j["gauge_fermion"] = m.gauge_fermion ? detail::write_polynomial<J>(*m.gauge_fermion) : J(nullptr);
  j["hbar_cap"] = m.hbar_cap;
  j["lambda_cap"] = m.lambda_cap;
  if (m.lagrangian != m.s00 + m.interaction) j["density"] = detail::write_polynomial<J>(m.lagrangian - m.s00);
  if (!functionals.empty()) {
    J f = J::object();
    for (auto& [name, x] : functionals) f[name] = detail::write_polynomial<J>(x);
    j["functionals"] = f;
  }
  if (corpus) j["corpus"] = *corpus;
  return j;
}

/// Word corpus: a list of {letters: [{payload_ref, exp}]}.
inline std::vector<SWord> parse_corpus(const nlohmann::json& j, const std::map<std::string, Polynomial>& functionals) {
  if (!j.is_array()) throw ConfigError("corpus must be a list of words");
  std::vector<SWord> out;
  for (std::size_t w = 0; w < j.size(); ++w) {
    std::string wp = "corpus[" + std::to_string(w) + "]";
    const auto& letters = detail::require_key(j[w], "letters", wp);
    if (!letters.is_array()) throw ConfigError("'" + wp + ".letters' must be a list");
    SWord word;
    for (std::size_t k = 0; k < letters.size(); ++k) {
      std::string lp = wp + ".letters[" + std::to_string(k) + "]";
      const auto& ref = detail::require_key(letters[k], "payload_ref", lp);
      if (!ref.is_string()) throw ConfigError("'" + lp + ".payload_ref' must be a string");
      auto it = functionals.find(ref.get<std::string>());
      if (it == functionals.end()) throw ConfigError("'" + lp + "': unknown functional '" + ref.get<std::string>() + "'");
      int e = detail::read_int(detail::require_key(letters[k], "exp", lp), lp + ".exp", -1);
      if (e != 1 && e != -1) throw ConfigError("'" + lp + ".exp' must be 1 or -1");
      word = word * SWord::s(it->second, e);
    }
    out.push_back(std::move(word));
  }
  return out;
}

inline std::vector<SWord> load_corpus(const std::string& path, const std::map<std::string, Polynomial>& functionals) {
  return parse_corpus(read_json_file(path), functionals);
}

/// Bundled models by name, with their default sizes: scalar_chain (8 sites, with
/// the word-corpus functionals), shift_gauge_toy (6) and free_gauge_toy (4, no
/// interaction, for homology). sites = 0 keeps the default.
inline nlohmann::ordered_json dump_bundled(const std::string& name, int sites = 0) {
  if (name == "scalar_chain") {
    ModelSpec m = models::scalar_chain(sites ? sites : 8);
    int n = m.sites();
    auto phi = [&](int i) { return Polynomial(m.field(i, 0)); };
    auto lam = [](long num, long den = 1) { return FormalSeries::lambda() * Complex(Rational(num) / den); };
    std::map<std::string, Polynomial> fns;
    fns["early"] = phi(1) * phi(1) * lam(1);
    fns["early_linear"] = phi(2) * lam(-2);
    fns["middle"] = phi(n / 2 - 1) * phi(n / 2) * lam(1, 2);
    fns["late"] = phi(n - 2) * lam(3);
    fns["late_pair"] = phi(n - 3) * phi(n - 2) * lam(1);
    fns["spread"] = fns["early"] + fns["middle"] + fns["late"];
    fns["zero"] = Polynomial();
    return dump_model(m, fns, std::string("scalar_chain_words.json"));
  }
  if (name == "shift_gauge_toy") return dump_model(models::shift_gauge_toy(sites ? sites : 6));
  if (name == "free_gauge_toy") {
    int n = sites ? sites : 4;
    ModelSpec m = models::shift_gauge_toy(n, 1, std::vector<Rational>(static_cast<std::size_t>(n), 0));
    return dump_model(m);
  }
  throw ConfigError("unknown bundled model '" + name + "'");
}

}  // namespace bvcheck
