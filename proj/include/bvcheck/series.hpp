#pragma once

#include <algorithm>
#include <climits>
#include <map>
#include <ostream>
#include <string>
#include <utility>

#include "bvcheck/rational.hpp"

namespace bvcheck {

/// Truncated bivariate series in hbar and lambda with Gaussian rational
/// coefficients. Keys are (hbar power, lambda power); the hbar power may be
/// negative, which is how the 1/hbar in exp(i V / hbar) is carried around.
/// A cap of kUnbounded means "never truncate in this variable".
class FormalSeries {
 public:
  static constexpr int kUnbounded = INT_MAX;
  using Key = std::pair<int, int>;
  using Map = std::map<Key, Complex>;

  FormalSeries() = default;
  FormalSeries(long c) { add_term(0, 0, Complex(c)); }  // NOLINT(google-explicit-constructor)
  FormalSeries(Complex c) { add_term(0, 0, std::move(c)); }  // NOLINT(google-explicit-constructor)
  FormalSeries(Rational c) { add_term(0, 0, Complex(std::move(c))); }  // NOLINT(google-explicit-constructor)

  static FormalSeries monomial(int h, int l, Complex c = Complex(1)) {
    FormalSeries s;
    s.add_term(h, l, std::move(c));
    return s;
  }
  static FormalSeries hbar(int power = 1) { return monomial(power, 0); }
  static FormalSeries lambda(int power = 1) { return monomial(0, power); }
  static FormalSeries i() { return FormalSeries(Complex::i()); }

  int hbar_cap() const { return hcap_; }
  int lambda_cap() const { return lcap_; }

  /// Lowers the caps (never raises them) and drops keys above the new caps.
  FormalSeries& set_caps(int hbar_cap, int lambda_cap) {
    hcap_ = std::min(hcap_, hbar_cap);
    lcap_ = std::min(lcap_, lambda_cap);
    for (auto it = c_.begin(); it != c_.end();) {
      if (it->first.first > hcap_ || it->first.second > lcap_)
        it = c_.erase(it);
      else
        ++it;
    }
    return *this;
  }
  FormalSeries with_caps(int hbar_cap, int lambda_cap) const {
    FormalSeries s = *this;
    s.set_caps(hbar_cap, lambda_cap);
    return s;
  }

  const Map& terms() const { return c_; }
  bool is_zero() const { return c_.empty(); }
  std::size_t size() const { return c_.size(); }

  Complex coeff(int h, int l) const {
    auto it = c_.find({h, l});
    return it == c_.end() ? Complex() : it->second;
  }
  Complex constant_term() const { return coeff(0, 0); }

  bool is_constant() const { return c_.empty() || (c_.size() == 1 && c_.begin()->first == Key{0, 0}); }

  int min_hbar() const {
    int m = INT_MAX;
    for (auto& [k, v] : c_) m = std::min(m, k.first);
    return m;
  }
  int max_lambda() const {
    int m = -1;
    for (auto& [k, v] : c_) m = std::max(m, k.second);
    return m;
  }

  void add_term(int h, int l, const Complex& v) {
    if (v.is_zero() || h > hcap_ || l > lcap_) return;
    auto [it, fresh] = c_.try_emplace({h, l}, v);
    if (!fresh) {
      it->second += v;
      if (it->second.is_zero()) c_.erase(it);
    }
  }

  /// Keeps only the coefficients with the given lambda power (as a series in hbar).
  FormalSeries lambda_slice(int l) const {
    FormalSeries s;
    s.hcap_ = hcap_;
    s.lcap_ = lcap_;
    for (auto& [k, v] : c_)
      if (k.second == l) s.c_.emplace(k, v);
    return s;
  }

  /// Keeps only the coefficients with the given hbar power.
  FormalSeries hbar_slice(int h) const {
    FormalSeries s;
    s.hcap_ = hcap_;
    s.lcap_ = lcap_;
    for (auto& [k, v] : c_)
      if (k.first == h) s.c_.emplace(k, v);
    return s;
  }

  FormalSeries& operator+=(const FormalSeries& o) {
    set_caps(o.hcap_, o.lcap_);
    for (auto& [k, v] : o.c_) add_term(k.first, k.second, v);
    return *this;
  }
  FormalSeries& operator-=(const FormalSeries& o) {
    set_caps(o.hcap_, o.lcap_);
    for (auto& [k, v] : o.c_) add_term(k.first, k.second, -v);
    return *this;
  }
  FormalSeries& operator*=(const FormalSeries& o) {
    *this = *this * o;
    return *this;
  }
  FormalSeries& operator*=(const Complex& z) {
    if (z.is_zero()) {
      c_.clear();
      return *this;
    }
    for (auto& [k, v] : c_) v *= z;
    return *this;
  }

  friend FormalSeries operator+(FormalSeries a, const FormalSeries& b) { return a += b; }
  friend FormalSeries operator-(FormalSeries a, const FormalSeries& b) { return a -= b; }
  friend FormalSeries operator-(FormalSeries a) {
    for (auto& [k, v] : a.c_) v = -v;
    return a;
  }
  friend FormalSeries operator*(const FormalSeries& a, const FormalSeries& b) {
    FormalSeries r;
    r.hcap_ = std::min(a.hcap_, b.hcap_);
    r.lcap_ = std::min(a.lcap_, b.lcap_);
    for (auto& [ka, va] : a.c_)
      for (auto& [kb, vb] : b.c_) {
        int h = ka.first + kb.first;
        int l = ka.second + kb.second;
        if (h > r.hcap_ || l > r.lcap_) continue;
        r.add_term(h, l, va * vb);
      }
    return r;
  }
  friend FormalSeries operator*(FormalSeries a, const Complex& z) { return a *= z; }
  friend FormalSeries operator*(const Complex& z, FormalSeries a) { return a *= z; }

  /// Equality of coefficients; caps are not compared.
  friend bool operator==(const FormalSeries& a, const FormalSeries& b) { return a.c_ == b.c_; }
  friend bool operator!=(const FormalSeries& a, const FormalSeries& b) { return !(a == b); }

  std::string str() const {
    if (c_.empty()) return "0";
    std::string out;
    for (auto& [k, v] : c_) {
      if (!out.empty()) out += " + ";
      out += v.str();
      if (k.first != 0) out += "*hbar^" + std::to_string(k.first);
      if (k.second != 0) out += "*lambda^" + std::to_string(k.second);
    }
    return out;
  }
  friend std::ostream& operator<<(std::ostream& os, const FormalSeries& s) { return os << s.str(); }

 private:
  Map c_;
  int hcap_ = kUnbounded;
  int lcap_ = kUnbounded;
};

namespace detail {

// Every key of n must be killed by a finite cap after enough multiplications.
inline void require_nilpotent(const FormalSeries& n) {
  for (auto& [k, v] : n.terms()) {
    bool ok = (k.second >= 1 && n.lambda_cap() != FormalSeries::kUnbounded) ||
              (k.second == 0 && k.first >= 1 && n.hbar_cap() != FormalSeries::kUnbounded);
    if (!ok)
      throw UnboundedTruncation("series term hbar^" + std::to_string(k.first) + " lambda^" +
                                std::to_string(k.second) + " is not nilpotent under the caps");
  }
}

}  // namespace detail

inline FormalSeries series_mul(const FormalSeries& a, const FormalSeries& b) { return a * b; }

inline FormalSeries series_invert(const FormalSeries& a) {
  Complex a0 = a.constant_term();
  if (a0.is_zero()) throw ZeroConstantTerm();
  FormalSeries n = a;
  n.add_term(0, 0, -a0);
  detail::require_nilpotent(n);
  Complex inv0 = Complex(1) / a0;
  FormalSeries q = n * (-inv0);
  FormalSeries result = FormalSeries(inv0).with_caps(a.hbar_cap(), a.lambda_cap());
  FormalSeries power = result;
  while (true) {
    power = power * q;
    if (power.is_zero()) break;
    result += power;
  }
  return result;
}

inline FormalSeries series_exp(const FormalSeries& a) {
  if (!a.constant_term().is_zero()) throw NonzeroConstantTerm();
  detail::require_nilpotent(a);
  FormalSeries result = FormalSeries(1).with_caps(a.hbar_cap(), a.lambda_cap());
  FormalSeries term = result;
  for (long k = 1;; ++k) {
    term = term * a * Complex(Rational(1, k));
    if (term.is_zero()) break;
    result += term;
  }
  return result;
}

}  // namespace bvcheck
