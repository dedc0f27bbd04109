#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <numeric>
#include <optional>
#include <string>
#include <string_view>
#include <utility>

#include "qsmpc/error.hpp"

namespace qsmpc {

using Bit = std::uint8_t;

/// An angle (numerator / denominator) * pi in lowest terms.
///
/// The stored representative is reduced modulo 4*pi into (-2pi, 2pi], the
/// period of R_y itself, so gate matrices compose exactly. Equality is
/// coarser: two angles compare equal iff they agree modulo a full 2*pi turn.
/// pi and 3*pi compare equal but keep distinct representatives, and their
/// rotations differ by a global sign.
class RationalAngle {
 public:
  static constexpr std::int64_t kMaxDenominator = 1'000'000;

  constexpr RationalAngle() = default;

  RationalAngle(std::int64_t numerator, std::int64_t denominator) {
    if (denominator == 0) throw DomainError("RationalAngle: zero denominator");
    if (denominator < 0) {
      numerator = -numerator;
      denominator = -denominator;
    }
    const std::int64_t g = std::gcd(numerator, denominator);
    numerator /= g;
    denominator /= g;
    if (denominator > kMaxDenominator) {
      throw ArithmeticCapacityError("RationalAngle: reduced denominator " +
                                    std::to_string(denominator) + " exceeds " +
                                    std::to_string(kMaxDenominator));
    }
    const std::int64_t period = 4 * denominator;
    numerator %= period;
    if (numerator <= -2 * denominator) numerator += period;
    if (numerator > 2 * denominator) numerator -= period;
    num_ = numerator;
    den_ = denominator;
  }

  static RationalAngle zero() { return {}; }
  static RationalAngle pi() { return {1, 1}; }
  /// pi / k, the rotation argument of U_k.
  static RationalAngle pi_over(std::int64_t k) { return {1, k}; }

  std::int64_t numerator() const { return num_; }
  std::int64_t denominator() const { return den_; }
  bool is_zero() const { return num_ == 0; }
  double radians() const { return std::numbers::pi * static_cast<double>(num_) / static_cast<double>(den_); }

  friend bool operator==(const RationalAngle& a, const RationalAngle& b) {
    return a.den_ == b.den_ && (a.num_ - b.num_) % (2 * a.den_) == 0;
  }

  /// Same stored representative, i.e. equal modulo 4*pi.
  bool identical(const RationalAngle& other) const { return num_ == other.num_ && den_ == other.den_; }

 private:
  std::int64_t num_ = 0;
  std::int64_t den_ = 1;
};

inline RationalAngle compose(const RationalAngle& a, const RationalAngle& b) {
  const std::int64_t l = std::lcm(a.denominator(), b.denominator());
  return {a.numerator() * (l / a.denominator()) + b.numerator() * (l / b.denominator()), l};
}

inline RationalAngle invert(const RationalAngle& a) { return {-a.numerator(), a.denominator()}; }

/// m-fold composition; negative m composes the inverse.
inline RationalAngle scale(const RationalAngle& a, std::int64_t m) {
  // a * m mod 4 only depends on m mod 4*den, which keeps the product small.
  const std::int64_t period = 4 * a.denominator();
  return {a.numerator() * (m % period), a.denominator()};
}

/// m mod 2 when the angle is m*pi for an integer m; empty otherwise.
inline std::optional<Bit> classify_pole(const RationalAngle& a) {
  if (a.denominator() != 1) return std::nullopt;
  return static_cast<Bit>(a.numerator() % 2 != 0 ? 1 : 0);
}

inline RationalAngle operator+(const RationalAngle& a, const RationalAngle& b) { return compose(a, b); }
inline RationalAngle operator-(const RationalAngle& a) { return invert(a); }
inline RationalAngle operator-(const RationalAngle& a, const RationalAngle& b) { return compose(a, invert(b)); }
inline RationalAngle operator*(std::int64_t m, const RationalAngle& a) { return scale(a, m); }

/// "p/q·π", "p·π", or "0".
inline std::string to_string(const RationalAngle& a) {
  if (a.is_zero()) return "0";
  std::string out = std::to_string(a.numerator());
  if (a.denominator() != 1) out += "/" + std::to_string(a.denominator());
  return out + "·π";
}

namespace detail {

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
  return s;
}

inline std::int64_t parse_int(std::string_view s, std::string_view context) {
  s = trim(s);
  if (s.empty()) throw ParseError("empty integer in '" + std::string(context) + "'");
  std::size_t i = 0;
  bool negative = false;
  if (s[0] == '+' || s[0] == '-') {
    negative = s[0] == '-';
    i = 1;
  }
  if (i == s.size()) throw ParseError("bad integer in '" + std::string(context) + "'");
  std::int64_t value = 0;
  for (; i < s.size(); ++i) {
    if (s[i] < '0' || s[i] > '9') throw ParseError("bad integer in '" + std::string(context) + "'");
    if (value > (std::int64_t{1} << 58)) throw ParseError("integer too large in '" + std::string(context) + "'");
    value = value * 10 + (s[i] - '0');
  }
  return negative ? -value : value;
}

}  // namespace detail

/// Accepts the to_string forms plus ASCII spellings: "3/4*pi", "-pi/2",
/// "pi", "2*pi/3", "0".
inline RationalAngle parse_angle(std::string_view text) {
  std::string s;
  const std::string_view trimmed = detail::trim(text);
  for (std::size_t i = 0; i < trimmed.size(); ++i) {
    if (trimmed.compare(i, 2, "·") == 0) {  // U+00B7, two bytes in UTF-8
      s += '*';
      ++i;
    } else if (trimmed.compare(i, 2, "π") == 0) {
      s += "pi";
      ++i;
    } else if (trimmed[i] != ' ') {
      s += trimmed[i];
    }
  }
  if (s.empty()) throw ParseError("empty angle");
  const auto pi_pos = s.find("pi");
  if (pi_pos == std::string::npos) {
    if (detail::parse_int(s, text) != 0) throw ParseError("angle must be a multiple of pi: '" + std::string(text) + "'");
    return RationalAngle::zero();
  }
  // Forms: [sign][p[/q]*]pi[/q]
  std::string before = s.substr(0, pi_pos);
  std::string after = s.substr(pi_pos + 2);
  std::int64_t num = 1;
  std::int64_t den = 1;
  if (!before.empty() && (before == "-" || before == "+")) {
    num = before == "-" ? -1 : 1;
  } else if (!before.empty()) {
    if (before.back() != '*') throw ParseError("bad angle '" + std::string(text) + "'");
    before.pop_back();
    const auto slash = before.find('/');
    if (slash == std::string::npos) {
      num = detail::parse_int(before, text);
    } else {
      num = detail::parse_int(std::string_view(before).substr(0, slash), text);
      den = detail::parse_int(std::string_view(before).substr(slash + 1), text);
    }
  }
  if (!after.empty()) {
    if (after[0] != '/') throw ParseError("bad angle '" + std::string(text) + "'");
    den *= detail::parse_int(std::string_view(after).substr(1), text);
  }
  if (den == 0) throw ParseError("zero denominator in '" + std::string(text) + "'");
  return {num, den};
}

/// Row-major real 2x2 matrix.
struct RealMat2 {
  double m00 = 1, m01 = 0, m10 = 0, m11 = 1;

  friend RealMat2 operator*(const RealMat2& a, const RealMat2& b) {
    return {a.m00 * b.m00 + a.m01 * b.m10, a.m00 * b.m01 + a.m01 * b.m11,
            a.m10 * b.m00 + a.m11 * b.m10, a.m10 * b.m01 + a.m11 * b.m11};
  }
  double determinant() const { return m00 * m11 - m01 * m10; }
};

namespace detail {

// cos and sin of (num/den)*pi, exact whenever the angle is a multiple of pi/2.
inline std::pair<double, double> cos_sin_pi(std::int64_t num, std::int64_t den) {
  const std::int64_t g = std::gcd(num, den);
  num /= g;
  den /= g;
  if (den < 0) {
    num = -num;
    den = -den;
  }
  if (den <= 2) {
    const std::int64_t quarter = ((num * (2 / den)) % 4 + 4) % 4;  // angle in units of pi/2
    constexpr double kCos[] = {1, 0, -1, 0};
    constexpr double kSin[] = {0, 1, 0, -1};
    return {kCos[quarter], kSin[quarter]};
  }
  const double theta = std::numbers::pi * static_cast<double>(num) / static_cast<double>(den);
  return {std::cos(theta), std::sin(theta)};
}

}  // namespace detail

/// Rotation about the y axis by `angle`:
///   [[cos(t/2), -sin(t/2)], [sin(t/2), cos(t/2)]].
///
/// RationalAngle keeps its representative modulo 4*pi, so
/// matrix(compose(a, b)) == matrix(a) * matrix(b) exactly (up to rounding).
struct RyGate {
  RationalAngle angle;

  static RyGate u(std::int64_t k) { return {RationalAngle::pi_over(k)}; }
  static RyGate u_dagger(std::int64_t k) { return {invert(RationalAngle::pi_over(k))}; }
  static RyGate v() { return {RationalAngle::pi()}; }
  static RyGate identity() { return {}; }

  RyGate adjoint() const { return {invert(angle)}; }

  RealMat2 matrix() const {
    // Half angle is (num / 2den) * pi.
    const auto [c, s] = detail::cos_sin_pi(angle.numerator(), 2 * angle.denominator());
    return {c, -s, s, c};
  }

  friend bool operator==(const RyGate& a, const RyGate& b) { return a.angle.identical(b.angle); }
};

}  // namespace qsmpc
