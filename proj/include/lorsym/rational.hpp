#pragma once

#include <cstdint>
#include <cstdlib>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>

#include <Eigen/Core>

namespace lorsym {

/// Exact rational scalar on 64-bit words.
/// Denominator is kept positive and the fraction gcd-normalized. Arithmetic
/// runs through 128-bit intermediates and throws std::overflow_error instead
/// of wrapping; coefficient chains in this project stay far inside that range.
class Rational {
public:
  Rational() : m_num(0), m_den(1) {}
  Rational(std::int64_t n) : m_num(n), m_den(1) {}
  Rational(std::int64_t n, std::int64_t d) : m_num(n), m_den(d) {
    if (d == 0) throw std::domain_error("Rational: zero denominator");
    normalize();
  }

  std::int64_t num() const { return m_num; }
  std::int64_t den() const { return m_den; }

  double toDouble() const {
    return static_cast<double>(m_num) / static_cast<double>(m_den);
  }

  bool isZero() const { return m_num == 0; }
  bool isInteger() const { return m_den == 1; }

  Rational operator-() const { return Rational(checkedNeg(m_num), m_den, Raw{}); }

  friend Rational operator+(const Rational& a, const Rational& b) {
    __int128 n = i128(a.m_num) * b.m_den + i128(b.m_num) * a.m_den;
    __int128 d = i128(a.m_den) * b.m_den;
    return fromWide(n, d);
  }
  friend Rational operator-(const Rational& a, const Rational& b) {
    __int128 n = i128(a.m_num) * b.m_den - i128(b.m_num) * a.m_den;
    __int128 d = i128(a.m_den) * b.m_den;
    return fromWide(n, d);
  }
  friend Rational operator*(const Rational& a, const Rational& b) {
    return fromWide(i128(a.m_num) * b.m_num, i128(a.m_den) * b.m_den);
  }
  friend Rational operator/(const Rational& a, const Rational& b) {
    if (b.m_num == 0) throw std::domain_error("Rational: division by zero");
    return fromWide(i128(a.m_num) * b.m_den, i128(a.m_den) * b.m_num);
  }

  Rational& operator+=(const Rational& o) { return *this = *this + o; }
  Rational& operator-=(const Rational& o) { return *this = *this - o; }
  Rational& operator*=(const Rational& o) { return *this = *this * o; }
  Rational& operator/=(const Rational& o) { return *this = *this / o; }

  friend bool operator==(const Rational& a, const Rational& b) {
    return a.m_num == b.m_num && a.m_den == b.m_den;
  }
  friend bool operator!=(const Rational& a, const Rational& b) { return !(a == b); }
  friend bool operator<(const Rational& a, const Rational& b) {
    return i128(a.m_num) * b.m_den < i128(b.m_num) * a.m_den;
  }
  friend bool operator>(const Rational& a, const Rational& b) { return b < a; }
  friend bool operator<=(const Rational& a, const Rational& b) { return !(b < a); }
  friend bool operator>=(const Rational& a, const Rational& b) { return !(a < b); }

  /// "7", "-3/4" and decimal forms like "0.25" or "2.5e-3".
  /// Throws std::invalid_argument when the text is not a rational literal
  /// or the value does not fit.
  static Rational parse(const std::string& text);

  std::string str() const {
    if (m_den == 1) return std::to_string(m_num);
    return std::to_string(m_num) + "/" + std::to_string(m_den);
  }

  Rational abs() const { return m_num < 0 ? -*this : *this; }

private:
  struct Raw {};
  Rational(std::int64_t n, std::int64_t d, Raw) : m_num(n), m_den(d) {}

  static __int128 i128(std::int64_t v) { return static_cast<__int128>(v); }

  static std::int64_t narrow(__int128 v) {
    if (v > std::numeric_limits<std::int64_t>::max() ||
        v < std::numeric_limits<std::int64_t>::min())
      throw std::overflow_error("Rational: 64-bit overflow");
    return static_cast<std::int64_t>(v);
  }

  static std::int64_t checkedNeg(std::int64_t v) {
    if (v == std::numeric_limits<std::int64_t>::min())
      throw std::overflow_error("Rational: 64-bit overflow");
    return -v;
  }

  static Rational fromWide(__int128 n, __int128 d) {
    if (d == 0) throw std::domain_error("Rational: zero denominator");
    if (d < 0) { n = -n; d = -d; }
    __int128 an = n < 0 ? -n : n;
    __int128 g = gcdWide(an, d);
    if (g > 1) { n /= g; d /= g; }
    return Rational(narrow(n), narrow(d), Raw{});
  }

  static __int128 gcdWide(__int128 a, __int128 b) {
    while (b != 0) { __int128 t = a % b; a = b; b = t; }
    return a < 0 ? -a : a;
  }

  void normalize() {
    if (m_den < 0) {
      m_num = checkedNeg(m_num);
      m_den = checkedNeg(m_den);
    }
    std::int64_t g = std::gcd(m_num < 0 ? -m_num : m_num, m_den);
    if (g > 1) { m_num /= g; m_den /= g; }
  }

  std::int64_t m_num;
  std::int64_t m_den;
};

inline Rational Rational::parse(const std::string& text) {
  const char* s = text.c_str();
  std::size_t i = 0, n = text.size();
  while (i < n && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
  bool neg = false;
  if (i < n && (s[i] == '+' || s[i] == '-')) neg = (s[i++] == '-');

  auto readInt = [&](std::int64_t& out) {
    if (i >= n || !std::isdigit(static_cast<unsigned char>(s[i])))
      throw std::invalid_argument("Rational::parse: expected digits in '" + text + "'");
    __int128 v = 0;
    while (i < n && std::isdigit(static_cast<unsigned char>(s[i]))) {
      v = v * 10 + (s[i++] - '0');
      if (v > std::numeric_limits<std::int64_t>::max())
        throw std::invalid_argument("Rational::parse: value too large in '" + text + "'");
    }
    out = static_cast<std::int64_t>(v);
  };

  std::int64_t ip = 0;
  readInt(ip);
  Rational r(ip);

  if (i < n && s[i] == '.') {
    ++i;
    std::size_t start = i;
    std::int64_t frac = 0;
    readInt(frac);
    std::int64_t scale = 1;
    for (std::size_t k = start; k < i; ++k) {
      if (scale > std::numeric_limits<std::int64_t>::max() / 10)
        throw std::invalid_argument("Rational::parse: too many fraction digits in '" + text + "'");
      scale *= 10;
    }
    r = r + Rational(frac, scale);
  }
  if (i < n && (s[i] == 'e' || s[i] == 'E')) {
    ++i;
    bool eneg = false;
    if (i < n && (s[i] == '+' || s[i] == '-')) eneg = (s[i++] == '-');
    std::int64_t ev = 0;
    readInt(ev);
    if (ev > 18) throw std::invalid_argument("Rational::parse: exponent too large in '" + text + "'");
    std::int64_t p = 1;
    for (std::int64_t k = 0; k < ev; ++k) p *= 10;
    r = eneg ? r / Rational(p) : r * Rational(p);
  }
  if (i < n && s[i] == '/') {
    ++i;
    std::int64_t d = 0;
    readInt(d);
    r = r / Rational(d);
  }
  while (i < n && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
  if (i != n)
    throw std::invalid_argument("Rational::parse: trailing characters in '" + text + "'");
  return neg ? -r : r;
}

}  // namespace lorsym

namespace Eigen {
template <>
struct NumTraits<lorsym::Rational> {
  using Real = lorsym::Rational;
  using NonInteger = lorsym::Rational;
  using Literal = lorsym::Rational;
  using Nested = lorsym::Rational;
  enum {
    IsComplex = 0,
    IsInteger = 0,
    IsSigned = 1,
    RequireInitialization = 1,
    ReadCost = 1,
    AddCost = 4,
    MulCost = 4,
  };
  static inline Real epsilon() { return lorsym::Rational(0); }
  static inline Real dummy_precision() { return lorsym::Rational(0); }
  static inline int digits10() { return 18; }
  static inline Real highest() {
    return lorsym::Rational(std::numeric_limits<std::int64_t>::max());
  }
  static inline Real lowest() {
    return lorsym::Rational(std::numeric_limits<std::int64_t>::min());
  }
};
}  // namespace Eigen

namespace lorsym {
inline Rational abs(const Rational& r) { return r.abs(); }
}
