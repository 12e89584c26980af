#pragma once

#include <cstddef>
#include <functional>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>

#include <gmpxx.h>

#include "bvcheck/error.hpp"

namespace bvcheck {

using Rational = mpq_class;

/// Parses "p/q" or "p". Anything with '.', 'e' or 'E' is rejected so that
/// floating literals never leak into exact computations.
inline Rational parse_rational(std::string_view text) {
  std::string s(text);
  if (s.empty()) throw ConfigError("empty rational literal");
  for (char ch : s) {
    if (ch == '.' || ch == 'e' || ch == 'E')
      throw ConfigError("floating literal '" + s + "' where a rational \"p/q\" is required");
  }
  Rational q;
  if (q.set_str(s, 10) != 0) throw ConfigError("malformed rational literal '" + s + "'");
  if (s.find('/') != std::string::npos && q.get_den() == 0)
    throw ConfigError("zero denominator in '" + s + "'");
  q.canonicalize();
  return q;
}

inline std::string to_string(const Rational& q) { return q.get_str(); }

/// Gaussian rational re + i*im.
class Complex {
 public:
  Complex() = default;
  Complex(long v) : re_(v) {}  // NOLINT(google-explicit-constructor)
  Complex(Rational re) : re_(std::move(re)) {}  // NOLINT(google-explicit-constructor)
  Complex(Rational re, Rational im) : re_(std::move(re)), im_(std::move(im)) {}

  static Complex i() { return {Rational(0), Rational(1)}; }

  const Rational& re() const { return re_; }
  const Rational& im() const { return im_; }

  bool is_zero() const { return sgn(re_) == 0 && sgn(im_) == 0; }
  bool is_real() const { return sgn(im_) == 0; }

  Complex conj() const { return {re_, -im_}; }
  Rational norm2() const { return re_ * re_ + im_ * im_; }

  Complex& operator+=(const Complex& o) {
    re_ += o.re_;
    im_ += o.im_;
    return *this;
  }
  Complex& operator-=(const Complex& o) {
    re_ -= o.re_;
    im_ -= o.im_;
    return *this;
  }
  Complex& operator*=(const Complex& o) {
    Rational r = re_ * o.re_ - im_ * o.im_;
    im_ = re_ * o.im_ + im_ * o.re_;
    re_ = std::move(r);
    return *this;
  }
  Complex& operator/=(const Complex& o) {
    if (o.is_zero()) throw DomainError("division by zero Gaussian rational");
    Rational n = o.norm2();
    Complex c = *this * o.conj();
    re_ = c.re_ / n;
    im_ = c.im_ / n;
    return *this;
  }

  friend Complex operator+(Complex a, const Complex& b) { return a += b; }
  friend Complex operator-(Complex a, const Complex& b) { return a -= b; }
  friend Complex operator*(Complex a, const Complex& b) { return a *= b; }
  friend Complex operator/(Complex a, const Complex& b) { return a /= b; }
  friend Complex operator-(const Complex& a) { return {-a.re_, -a.im_}; }
  friend bool operator==(const Complex& a, const Complex& b) { return a.re_ == b.re_ && a.im_ == b.im_; }
  friend bool operator!=(const Complex& a, const Complex& b) { return !(a == b); }

  std::string str() const {
    if (sgn(im_) == 0) return re_.get_str();
    std::string imag = (im_ == 1) ? "i" : (im_ == -1 ? "-i" : im_.get_str() + "i");
    if (sgn(re_) == 0) return imag;
    return "(" + re_.get_str() + (sgn(im_) > 0 ? "+" : "") + imag + ")";
  }

  friend std::ostream& operator<<(std::ostream& os, const Complex& c) { return os << c.str(); }

 private:
  Rational re_{0};
  Rational im_{0};
};

/// Parses "p/q", or a pair "re,im" of rationals.
inline Complex parse_complex(std::string_view text) {
  auto comma = text.find(',');
  if (comma == std::string_view::npos) return Complex(parse_rational(text));
  return {parse_rational(text.substr(0, comma)), parse_rational(text.substr(comma + 1))};
}

}  // namespace bvcheck
