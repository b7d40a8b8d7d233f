#pragma once

// Forward-mode dual numbers: a + b*eps with eps^2 = 0. Instantiating the
// dynamics templates over Dual yields exact directional derivatives of
// everything downstream of the perturbed inputs.

#include <cmath>

namespace dynhess {

struct Dual {
  double re{};
  double du{};

  constexpr Dual() = default;
  constexpr Dual(double r) : re(r) {}
  constexpr Dual(double r, double d) : re(r), du(d) {}

  friend constexpr Dual operator+(const Dual& a) { return a; }
  friend constexpr Dual operator-(const Dual& a) { return {-a.re, -a.du}; }

  friend constexpr Dual operator+(const Dual& a, const Dual& b) { return {a.re + b.re, a.du + b.du}; }
  friend constexpr Dual operator-(const Dual& a, const Dual& b) { return {a.re - b.re, a.du - b.du}; }
  friend constexpr Dual operator*(const Dual& a, const Dual& b) {
    return {a.re * b.re, a.re * b.du + a.du * b.re};
  }
  friend constexpr Dual operator/(const Dual& a, const Dual& b) {
    return {a.re / b.re, (a.du * b.re - a.re * b.du) / (b.re * b.re)};
  }

  Dual& operator+=(const Dual& o) { return *this = *this + o; }
  Dual& operator-=(const Dual& o) { return *this = *this - o; }
  Dual& operator*=(const Dual& o) { return *this = *this * o; }
  Dual& operator/=(const Dual& o) { return *this = *this / o; }

  // Comparisons act on the real part so control flow matches the double path.
  friend constexpr bool operator==(const Dual& a, const Dual& b) { return a.re == b.re; }
  friend constexpr bool operator!=(const Dual& a, const Dual& b) { return a.re != b.re; }
  friend constexpr bool operator<(const Dual& a, const Dual& b) { return a.re < b.re; }
  friend constexpr bool operator>(const Dual& a, const Dual& b) { return a.re > b.re; }
  friend constexpr bool operator<=(const Dual& a, const Dual& b) { return a.re <= b.re; }
  friend constexpr bool operator>=(const Dual& a, const Dual& b) { return a.re >= b.re; }
};

inline Dual sqrt(const Dual& x) {
  const double r = std::sqrt(x.re);
  return {r, x.du / (2 * r)};
}
inline Dual sin(const Dual& x) { return {std::sin(x.re), std::cos(x.re) * x.du}; }
inline Dual cos(const Dual& x) { return {std::cos(x.re), -std::sin(x.re) * x.du}; }
inline Dual abs(const Dual& x) { return x.re < 0 ? Dual{-x.re, -x.du} : x; }

inline double scalar_real(const Dual& x) { return x.re; }

}  // namespace dynhess
