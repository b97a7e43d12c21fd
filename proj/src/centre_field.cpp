#include "tph/centre_field.hpp"

#include <cmath>

namespace tph {

Svd2 svd2(const Mat2& m) {
  const double E = 0.5 * (m.a + m.d);
  const double F = 0.5 * (m.a - m.d);
  const double G = 0.5 * (m.c + m.b);
  const double H = 0.5 * (m.c - m.b);
  const double Q = std::hypot(E, H);
  const double R = std::hypot(F, G);
  Svd2 s;
  s.s_max = Q + R;
  s.s_min = std::fabs(Q - R);
  // Right singular vectors diagonalise M^T M.
  const double p = m.a * m.a + m.c * m.c;
  const double q = m.a * m.b + m.c * m.d;
  const double r = m.b * m.b + m.d * m.d;
  const double theta = 0.5 * std::atan2(2 * q, p - r);
  s.v_max = direction(theta);
  s.v_min = {-s.v_max.y, s.v_max.x};
  return s;
}

namespace {

Mat2 renormalized(const Mat2& m) {
  const double k = max_abs_entry(m);
  return {m.a / k, m.b / k, m.c / k, m.d / k};
}

CentreSample finish(Vec2 p, int n, const Mat2& prev, const Mat2& cur) {
  CentreSample out;
  out.p = p;
  out.n_used = n;
  const Svd2 s = svd2(cur);
  out.direction = s.v_min;
  out.ratio = s.s_min > 0 ? s.s_max / s.s_min : INFINITY;
  out.undetermined = !(out.ratio >= 1 + 1e-9);
  out.residual = n > 1 ? line_angle(svd2(prev).v_min, s.v_min) : 0.0;
  return out;
}

}  // namespace

CentreSample centre_direction(const TorusEndo& f, Vec2 p, int n) {
  if (n < 1) throw std::invalid_argument("centre_direction: n must be at least 1");
  Mat2 prev = Mat2::identity();
  Mat2 cur = Mat2::identity();
  Vec2 q = p;
  for (int k = 0; k < n; ++k) {
    prev = cur;
    cur = renormalized(f.derivative(q) * cur);
    q = f.apply(q);
  }
  return finish(p, n, prev, cur);
}

CentreSample centre_direction_adaptive(const TorusEndo& f, Vec2 p, const DepthPolicy& policy) {
  Mat2 prev = Mat2::identity();
  Mat2 cur = Mat2::identity();
  Vec2 q = p;
  int k = 0;
  int target = policy.n_min;
  for (;;) {
    for (; k < target; ++k) {
      prev = cur;
      cur = renormalized(f.derivative(q) * cur);
      q = f.apply(q);
    }
    CentreSample s = finish(p, target, prev, cur);
    if ((s.residual < policy.tol && !s.undetermined) || target >= policy.n_max) return s;
    target = std::min(2 * target, policy.n_max);
  }
}

CentreSample centre_direction_along(const TorusEndo& f, const std::vector<Vec2>& orbit, int n) {
  if (orbit.empty() || n < 1) throw std::invalid_argument("centre_direction_along: empty orbit or n < 1");
  Mat2 prev = Mat2::identity();
  Mat2 cur = Mat2::identity();
  Vec2 q = orbit[0];
  for (int k = 0; k < n; ++k) {
    if (std::size_t(k) < orbit.size()) q = orbit[k];
    prev = cur;
    cur = renormalized(f.derivative(q) * cur);
    q = f.apply(q);
  }
  return finish(orbit[0], n, prev, cur);
}

double invariance_check(const TorusEndo& f, Vec2 p, int n, bool* undetermined) {
  const CentreSample a = centre_direction(f, p, n);
  const CentreSample b = centre_direction(f, f.apply(p), n);
  if (undetermined) *undetermined = a.undetermined || b.undetermined;
  return line_angle(f.derivative(p) * a.direction, b.direction);
}

std::string to_string(SlopeClass c) {
  switch (c) {
    case SlopeClass::neg: return "neg";
    case SlopeClass::pos: return "pos";
    case SlopeClass::vertical: return "vertical";
    case SlopeClass::undetermined: return "undetermined";
  }
  return "undetermined";
}

SlopeClass classify(const CentreSample& s, double vertical_tol) {
  if (s.undetermined) return SlopeClass::undetermined;
  if (std::fabs(s.direction.x) < vertical_tol) return SlopeClass::vertical;
  return s.direction.x * s.direction.y < 0 ? SlopeClass::neg : SlopeClass::pos;
}

}  // namespace tph
