#pragma once

#include <array>
#include <cmath>

namespace nhl {

// Points and displacements in R^n, n <= 2. The second component is ignored
// when n == 1.
using Vec = std::array<double, 2>;

inline double dot(const Vec& a, const Vec& b, int n) {
  return n == 1 ? a[0] * b[0] : a[0] * b[0] + a[1] * b[1];
}

inline double norm(const Vec& v, int n) {
  return n == 1 ? std::abs(v[0]) : std::hypot(v[0], v[1]);
}

inline Vec add(const Vec& a, const Vec& b) { return {a[0] + b[0], a[1] + b[1]}; }
inline Vec sub(const Vec& a, const Vec& b) { return {a[0] - b[0], a[1] - b[1]}; }
inline Vec scale(const Vec& a, double k) { return {k * a[0], k * a[1]}; }

}  // namespace nhl
