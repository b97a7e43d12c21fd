#pragma once

#include <cmath>
#include <numbers>

namespace tph {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;
};

inline Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
inline Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
inline Vec2 operator-(Vec2 a) { return {-a.x, -a.y}; }
inline Vec2 operator*(double s, Vec2 a) { return {s * a.x, s * a.y}; }
inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
inline double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
inline double norm(Vec2 a) { return std::hypot(a.x, a.y); }
inline Vec2 normalized(Vec2 a) {
  const double n = norm(a);
  return {a.x / n, a.y / n};
}

// Row-major [[a, b], [c, d]].
struct Mat2 {
  double a = 1.0, b = 0.0;
  double c = 0.0, d = 1.0;

  static Mat2 identity() { return {}; }
  static Mat2 diag(double p, double q) { return {p, 0.0, 0.0, q}; }
};

inline Vec2 operator*(const Mat2& m, Vec2 v) {
  return {m.a * v.x + m.b * v.y, m.c * v.x + m.d * v.y};
}

inline Mat2 operator*(const Mat2& m, const Mat2& n) {
  return {m.a * n.a + m.b * n.c, m.a * n.b + m.b * n.d,
          m.c * n.a + m.d * n.c, m.c * n.b + m.d * n.d};
}

inline double det(const Mat2& m) { return m.a * m.d - m.b * m.c; }

inline Mat2 inverse(const Mat2& m) {
  const double k = 1.0 / det(m);
  return {m.d * k, -m.b * k, -m.c * k, m.a * k};
}

inline double max_abs_entry(const Mat2& m) {
  return std::fmax(std::fmax(std::fabs(m.a), std::fabs(m.b)),
                   std::fmax(std::fabs(m.c), std::fabs(m.d)));
}

inline double wrap01(double x) {
  double r = x - std::floor(x);
  if (r >= 1.0) r = 0.0;
  return r;
}

inline Vec2 wrap(Vec2 p) { return {wrap01(p.x), wrap01(p.y)}; }

// Signed difference a - b reduced to [-1/2, 1/2).
inline double circle_diff(double a, double b) {
  double d = a - b;
  return d - std::floor(d + 0.5);
}

// Angle in [0, pi/2] between the lines spanned by u and v.
inline double line_angle(Vec2 u, Vec2 v) {
  const double c = std::fabs(dot(u, v));
  const double s = std::fabs(cross(u, v));
  return std::atan2(s, c);
}

// Reduce an angle to [0, pi).
inline double mod_pi(double t) {
  constexpr double pi = std::numbers::pi;
  double r = std::fmod(t, pi);
  if (r < 0) r += pi;
  if (r >= pi) r -= pi;
  return r;
}

inline Vec2 direction(double angle) { return {std::cos(angle), std::sin(angle)}; }

}  // namespace tph
