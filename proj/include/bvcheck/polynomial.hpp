#pragma once

#include <algorithm>
#include <functional>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "bvcheck/generator.hpp"
#include "bvcheck/series.hpp"

namespace bvcheck {

enum class Side { left, right };

struct Factor {
  Generator gen;
  int power = 1;
  friend bool operator==(const Factor&, const Factor&) = default;
  friend auto operator<=>(const Factor& a, const Factor& b) {
    if (auto c = a.gen <=> b.gen; c != 0) return c;
    return a.power <=> b.power;
  }
};

/// Generators in ascending code order; odd generators have power 1.
class Monomial {
 public:
  Monomial() = default;
  explicit Monomial(Generator g, int power = 1) {
    if (power > 0) f_.push_back({g, power});
  }

  const std::vector<Factor>& factors() const { return f_; }
  bool empty() const { return f_.empty(); }
  int degree() const {
    int d = 0;
    for (auto& x : f_) d += x.power;
    return d;
  }
  int degree_in(Kind k) const {
    int d = 0;
    for (auto& x : f_)
      if (x.gen.kind() == k) d += x.power;
    return d;
  }

  int gh() const {
    int s = 0;
    for (auto& x : f_) s += x.gen.gh() * x.power;
    return s;
  }
  int af() const {
    int s = 0;
    for (auto& x : f_) s += x.gen.af() * x.power;
    return s;
  }
  int ta() const {
    int s = 0;
    for (auto& x : f_) s += x.gen.ta() * x.power;
    return s;
  }
  bool odd() const { return (gh() & 1) != 0; }

  int power_of(Generator g) const {
    auto it = find(g);
    return it == f_.end() ? 0 : it->power;
  }

  /// Product with Koszul sign. Returns sign 0 if an odd generator repeats.
  friend std::pair<int, Monomial> multiply(const Monomial& a, const Monomial& b) {
    Monomial r;
    r.f_.reserve(a.f_.size() + b.f_.size());
    int sign = 1;
    // Odd factors of a that are strictly greater than the current odd factor of b
    // must be passed by it.
    int odd_a_total = 0;
    for (auto& x : a.f_)
      if (x.gen.odd()) ++odd_a_total;
    std::size_t i = 0, j = 0;
    int odd_a_seen = 0;
    while (i < a.f_.size() || j < b.f_.size()) {
      if (j == b.f_.size() || (i < a.f_.size() && a.f_[i].gen < b.f_[j].gen)) {
        if (a.f_[i].gen.odd()) ++odd_a_seen;
        r.f_.push_back(a.f_[i++]);
      } else if (i == a.f_.size() || b.f_[j].gen < a.f_[i].gen) {
        if (b.f_[j].gen.odd() && ((odd_a_total - odd_a_seen) & 1)) sign = -sign;
        r.f_.push_back(b.f_[j++]);
      } else {
        if (a.f_[i].gen.odd()) return {0, Monomial()};
        r.f_.push_back({a.f_[i].gen, a.f_[i].power + b.f_[j].power});
        ++i;
        ++j;
      }
    }
    return {sign, std::move(r)};
  }

  /// Derivative with respect to g from the given side: returns (multiplicity*sign, rest).
  std::pair<int, Monomial> derivative(Generator g, Side side) const {
    auto it = find(g);
    if (it == f_.end()) return {0, Monomial()};
    Monomial r = *this;
    auto pos = static_cast<std::size_t>(it - f_.begin());
    int coeff = it->power;
    if (g.odd()) {
      int passed = 0;
      if (side == Side::left) {
        for (std::size_t k = 0; k < pos; ++k) passed += f_[k].gen.odd() ? 1 : 0;
      } else {
        for (std::size_t k = pos + 1; k < f_.size(); ++k) passed += f_[k].gen.odd() ? 1 : 0;
      }
      if (passed & 1) coeff = -coeff;
    }
    if (--r.f_[pos].power == 0) r.f_.erase(r.f_.begin() + static_cast<std::ptrdiff_t>(pos));
    return {coeff, std::move(r)};
  }

  std::string str() const {
    if (f_.empty()) return "1";
    std::string s;
    for (auto& x : f_) {
      if (!s.empty()) s += "*";
      s += x.gen.str();
      if (x.power != 1) s += "^" + std::to_string(x.power);
    }
    return s;
  }

  friend bool operator==(const Monomial&, const Monomial&) = default;
  friend auto operator<=>(const Monomial& a, const Monomial& b) { return a.f_ <=> b.f_; }

 private:
  std::vector<Factor>::const_iterator find(Generator g) const {
    auto it = std::lower_bound(f_.begin(), f_.end(), g, [](const Factor& x, Generator y) { return x.gen < y; });
    return (it != f_.end() && it->gen == g) ? it : f_.end();
  }
  std::vector<Factor> f_;
};

struct Grading {
  int gh = 0;
  int af = 0;
  int ta = 0;
  friend bool operator==(const Grading&, const Grading&) = default;
};

/// Finite sum of monomials with FormalSeries coefficients, in normal form.
class Polynomial {
 public:
  using Map = std::map<Monomial, FormalSeries>;

  Polynomial() = default;
  Polynomial(long c) { add(Monomial(), FormalSeries(c)); }  // NOLINT(google-explicit-constructor)
  Polynomial(FormalSeries c) { add(Monomial(), std::move(c)); }  // NOLINT(google-explicit-constructor)
  Polynomial(Generator g) { add(Monomial(g), FormalSeries(1)); }  // NOLINT(google-explicit-constructor)
  Polynomial(const Monomial& m, FormalSeries c) { add(m, std::move(c)); }

  const Map& terms() const { return t_; }
  bool is_zero() const { return t_.empty(); }
  std::size_t size() const { return t_.size(); }

  void add(const Monomial& m, const FormalSeries& c) {
    if (c.is_zero()) return;
    auto [it, fresh] = t_.try_emplace(m, c);
    if (!fresh) {
      it->second += c;
      if (it->second.is_zero()) t_.erase(it);
    }
  }

  FormalSeries coeff(const Monomial& m) const {
    auto it = t_.find(m);
    return it == t_.end() ? FormalSeries() : it->second;
  }
  FormalSeries constant_term() const { return coeff(Monomial()); }

  int max_degree() const {
    int d = 0;
    for (auto& [m, c] : t_) d = std::max(d, m.degree());
    return d;
  }

  /// Grading of a homogeneous polynomial; nullopt when monomials disagree.
  /// The zero polynomial reports (0,0,0).
  std::optional<Grading> grading() const {
    std::optional<Grading> g;
    for (auto& [m, c] : t_) {
      Grading h{m.gh(), m.af(), m.ta()};
      if (!g)
        g = h;
      else if (!(*g == h))
        return std::nullopt;
    }
    return g ? g : Grading{};
  }
  std::optional<int> gh() const {
    std::optional<int> g;
    for (auto& [m, c] : t_) {
      if (!g)
        g = m.gh();
      else if (*g != m.gh())
        return std::nullopt;
    }
    return g ? g : 0;
  }
  /// Parity of a parity-homogeneous polynomial (zero counts as even).
  bool odd() const {
    std::optional<bool> p;
    for (auto& [m, c] : t_) {
      if (!p)
        p = m.odd();
      else if (*p != m.odd())
        throw MixedGrade();
    }
    return p.value_or(false);
  }

  std::set<int> support() const {
    std::set<int> s;
    for (auto& [m, c] : t_)
      for (auto& f : m.factors()) s.insert(f.gen.site());
    return s;
  }
  std::set<Generator> generators() const {
    std::set<Generator> s;
    for (auto& [m, c] : t_)
      for (auto& f : m.factors()) s.insert(f.gen);
    return s;
  }

  template <class Pred>
  Polynomial filter(Pred keep) const {
    Polynomial r;
    for (auto& [m, c] : t_)
      if (keep(m)) r.t_.emplace(m, c);
    return r;
  }
  template <class Fn>
  Polynomial map_coeffs(Fn fn) const {
    Polynomial r;
    for (auto& [m, c] : t_) r.add(m, fn(c));
    return r;
  }

  Polynomial with_caps(int hbar_cap, int lambda_cap) const {
    return map_coeffs([&](const FormalSeries& c) { return c.with_caps(hbar_cap, lambda_cap); });
  }
  Polynomial lambda_slice(int l) const {
    return map_coeffs([&](const FormalSeries& c) { return c.lambda_slice(l); });
  }

  Polynomial hbar_slice(int h) const {
    return map_coeffs([&](const FormalSeries& c) { return c.hbar_slice(h); });
  }

  Polynomial& operator+=(const Polynomial& o) {
    for (auto& [m, c] : o.t_) add(m, c);
    return *this;
  }
  Polynomial& operator-=(const Polynomial& o) {
    for (auto& [m, c] : o.t_) add(m, -c);
    return *this;
  }
  Polynomial& operator*=(const FormalSeries& s) {
    *this = map_coeffs([&](const FormalSeries& c) { return c * s; });
    return *this;
  }
  Polynomial& operator*=(const Complex& z) { return *this *= FormalSeries(z); }

  friend Polynomial operator+(Polynomial a, const Polynomial& b) { return a += b; }
  friend Polynomial operator-(Polynomial a, const Polynomial& b) { return a -= b; }
  friend Polynomial operator-(const Polynomial& a) {
    return a.map_coeffs([](const FormalSeries& c) { return -c; });
  }
  friend Polynomial operator*(const Polynomial& a, const Polynomial& b) {
    Polynomial r;
    for (auto& [ma, ca] : a.t_)
      for (auto& [mb, cb] : b.t_) {
        auto [sign, m] = multiply(ma, mb);
        if (sign == 0) continue;
        FormalSeries c = ca * cb;
        if (sign < 0) c = -c;
        r.add(m, c);
      }
    return r;
  }
  friend Polynomial operator*(Polynomial a, const FormalSeries& s) { return a *= s; }
  friend Polynomial operator*(const FormalSeries& s, Polynomial a) { return a *= s; }
  friend Polynomial operator*(Polynomial a, const Complex& z) { return a *= z; }
  friend Polynomial operator*(const Complex& z, Polynomial a) { return a *= z; }

  friend bool operator==(const Polynomial& a, const Polynomial& b) { return a.t_ == b.t_; }
  friend bool operator!=(const Polynomial& a, const Polynomial& b) { return !(a == b); }

  std::string str() const {
    if (t_.empty()) return "0";
    std::string s;
    for (auto& [m, c] : t_) {
      if (!s.empty()) s += " + ";
      s += "(" + c.str() + ")";
      if (!m.empty()) s += "*" + m.str();
    }
    return s;
  }
  friend std::ostream& operator<<(std::ostream& os, const Polynomial& p) { return os << p.str(); }

 private:
  Map t_;
};

inline Polynomial derivative(const Polynomial& x, Generator g, Side side) {
  Polynomial r;
  for (auto& [m, c] : x.terms()) {
    auto [k, rest] = m.derivative(g, side);
    if (k == 0) continue;
    r.add(rest, c * Complex(k));
  }
  return r;
}

/// Graded algebra homomorphism determined by images of generators. Generators
/// without an image are kept. Images must have the parity of the generator.
class Substitution {
 public:
  Substitution() = default;

  void set(Generator g, Polynomial image) { images_[g] = std::move(image); }
  const Polynomial* find(Generator g) const {
    auto it = images_.find(g);
    return it == images_.end() ? nullptr : &it->second;
  }
  const std::map<Generator, Polynomial>& images() const { return images_; }

  Polynomial operator()(const Polynomial& x) const {
    Polynomial r;
    std::map<std::pair<Generator, int>, Polynomial> powers;
    for (auto& [m, c] : x.terms()) {
      Polynomial acc(Monomial(), c);
      for (auto& f : m.factors()) {
        const Polynomial* img = find(f.gen);
        if (!img) {
          acc = acc * Polynomial(Monomial(f.gen, f.power), FormalSeries(1));
          continue;
        }
        auto key = std::make_pair(f.gen, f.power);
        auto it = powers.find(key);
        if (it == powers.end()) {
          Polynomial p(1);
          for (int k = 0; k < f.power; ++k) p = p * *img;
          it = powers.emplace(key, std::move(p)).first;
        }
        acc = acc * it->second;
        if (acc.is_zero()) break;
      }
      r += acc;
    }
    return r;
  }

 private:
  std::map<Generator, Polynomial> images_;
};

}  // namespace bvcheck
