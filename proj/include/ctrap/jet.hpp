#pragma once

#include <array>
#include <cmath>

namespace ctrap {

/// Truncated Taylor series c0 + c1 t + c2 t^2 + c3 t^3 with exact arithmetic on the coefficients.
struct Jet3 {
  std::array<double, 4> c{};

  Jet3() = default;
  Jet3(double v) : c{v, 0, 0, 0} {}  // NOLINT: implicit constants
  static Jet3 variable(double v, double dv) {
    Jet3 j;
    j.c = {v, dv, 0, 0};
    return j;
  }
  double value() const { return c[0]; }
  /// n-th derivative with respect to t at t = 0.
  double derivative(int n) const {
    static constexpr double fact[4] = {1, 1, 2, 6};
    return c[n] * fact[n];
  }
};

inline Jet3 operator+(const Jet3& a, const Jet3& b) {
  Jet3 r;
  for (int i = 0; i < 4; ++i) r.c[i] = a.c[i] + b.c[i];
  return r;
}
inline Jet3 operator-(const Jet3& a, const Jet3& b) {
  Jet3 r;
  for (int i = 0; i < 4; ++i) r.c[i] = a.c[i] - b.c[i];
  return r;
}
inline Jet3 operator-(const Jet3& a) { return Jet3(0.0) - a; }
inline Jet3 operator*(const Jet3& a, const Jet3& b) {
  Jet3 r;
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; i + j < 4; ++j) r.c[i + j] += a.c[i] * b.c[j];
  }
  return r;
}
inline Jet3 operator/(const Jet3& a, const Jet3& b) {
  Jet3 q;
  for (int k = 0; k < 4; ++k) {
    double s = a.c[k];
    for (int j = 1; j <= k; ++j) s -= b.c[j] * q.c[k - j];
    q.c[k] = s / b.c[0];
  }
  return q;
}
inline Jet3 sqrt(const Jet3& a) {
  Jet3 s;
  s.c[0] = std::sqrt(a.c[0]);
  s.c[1] = a.c[1] / (2 * s.c[0]);
  s.c[2] = (a.c[2] - s.c[1] * s.c[1]) / (2 * s.c[0]);
  s.c[3] = (a.c[3] - 2 * s.c[1] * s.c[2]) / (2 * s.c[0]);
  return s;
}

}  // namespace ctrap
