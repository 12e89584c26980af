#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "bvcheck/error.hpp"

namespace bvcheck {

enum class Kind : std::uint8_t {
  field = 0,
  antifield = 1,
  ghost = 2,
  antighost = 3,
  nl_field = 4,
  ghost_antifield = 5,
  antighost_antifield = 6,
  nl_antifield = 7,
};

inline constexpr std::array<std::string_view, 8> kKindNames = {
    "field", "antifield", "ghost", "antighost", "nl_field", "ghost_antifield", "antighost_antifield", "nl_antifield"};

inline std::string_view kind_name(Kind k) { return kKindNames[static_cast<int>(k)]; }

inline Kind parse_kind(std::string_view s) {
  for (std::size_t i = 0; i < kKindNames.size(); ++i)
    if (kKindNames[i] == s) return static_cast<Kind>(i);
  throw ConfigError("unknown generator kind '" + std::string(s) + "'");
}

inline constexpr bool is_antifield_kind(Kind k) {
  return k == Kind::antifield || k == Kind::ghost_antifield || k == Kind::antighost_antifield ||
         k == Kind::nl_antifield;
}

/// Field-like partner of an antifield kind and vice versa.
inline constexpr Kind partner(Kind k) {
  switch (k) {
    case Kind::field: return Kind::antifield;
    case Kind::antifield: return Kind::field;
    case Kind::ghost: return Kind::ghost_antifield;
    case Kind::ghost_antifield: return Kind::ghost;
    case Kind::antighost: return Kind::antighost_antifield;
    case Kind::antighost_antifield: return Kind::antighost;
    case Kind::nl_field: return Kind::nl_antifield;
    case Kind::nl_antifield: return Kind::nl_field;
  }
  return k;
}

inline constexpr int kind_gh(Kind k) {
  constexpr int table[8] = {0, -1, 1, -1, 0, -2, 0, -1};
  return table[static_cast<int>(k)];
}

/// Antifield number: 1 + pure ghost number of the partner for antifields, 0 otherwise.
inline constexpr int kind_af(Kind k) {
  constexpr int table[8] = {0, 1, 0, 0, 0, 2, 1, 1};
  return table[static_cast<int>(k)];
}

inline constexpr int kind_ta(Kind k) { return is_antifield_kind(k) ? 1 : 0; }

inline constexpr bool kind_odd(Kind k) { return (kind_gh(k) & 1) != 0; }

/// A generator packed into 32 bits: copy(4) kind(4) component(8) site(16).
/// Ordering of codes is the normal-form order: (copy, kind, component, site).
/// The copy index distinguishes independent configurations (phi_1, phi_2, ...)
/// when several are needed in one expression; copy 0 is the default.
class Generator {
 public:
  constexpr Generator() = default;
  constexpr Generator(Kind kind, int component, int site, int copy = 0)
      : code_((static_cast<std::uint32_t>(copy) << 28) | (static_cast<std::uint32_t>(kind) << 24) |
              (static_cast<std::uint32_t>(component) << 16) | static_cast<std::uint32_t>(site)) {}

  static constexpr Generator from_code(std::uint32_t code) {
    Generator g;
    g.code_ = code;
    return g;
  }

  constexpr std::uint32_t code() const { return code_; }
  constexpr Kind kind() const { return static_cast<Kind>((code_ >> 24) & 0xF); }
  constexpr int component() const { return static_cast<int>((code_ >> 16) & 0xFF); }
  constexpr int site() const { return static_cast<int>(code_ & 0xFFFF); }
  constexpr int copy() const { return static_cast<int>(code_ >> 28); }

  constexpr int gh() const { return kind_gh(kind()); }
  constexpr int af() const { return kind_af(kind()); }
  constexpr int ta() const { return kind_ta(kind()); }
  constexpr bool odd() const { return kind_odd(kind()); }
  constexpr bool is_antifield() const { return is_antifield_kind(kind()); }

  constexpr Generator dual() const { return Generator(partner(kind()), component(), site(), copy()); }
  constexpr Generator with_copy(int c) const { return Generator(kind(), component(), site(), c); }
  constexpr Generator with_site(int s) const { return Generator(kind(), component(), s, copy()); }

  std::string str() const {
    std::string s(kind_name(kind()));
    s += "[" + std::to_string(component()) + "]@" + std::to_string(site());
    if (copy() != 0) s += "#" + std::to_string(copy());
    return s;
  }

  friend constexpr bool operator==(Generator a, Generator b) { return a.code_ == b.code_; }
  friend constexpr auto operator<=>(Generator a, Generator b) { return a.code_ <=> b.code_; }

 private:
  std::uint32_t code_ = 0;
};

}  // namespace bvcheck
