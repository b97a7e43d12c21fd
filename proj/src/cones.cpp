#include "tph/cones.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace tph {

namespace {

constexpr double kPi = std::numbers::pi;

double angle_of(Vec2 u) { return std::atan2(u.y, u.x); }

}  // namespace

Cone make_cone(Vec2 b1, Vec2 b2) {
  if (norm(b1) == 0.0 || norm(b2) == 0.0) throw ConeError("zero cone boundary vector");
  Cone c{normalized(b1), normalized(b2)};
  const double w = width(c);
  if (!(w > 0.0 && w < kPi)) throw ConeError("cone width " + std::to_string(w) + " outside (0, pi)");
  return c;
}

double width(const Cone& c) { return std::atan2(cross(c.b1, c.b2), dot(c.b1, c.b2)); }

Vec2 cone_axis(const Cone& c) { return direction(angle_of(c.b1) + 0.5 * width(c)); }

QuadForm to_form(const Cone& c) {
  const Vec2 l1{-c.b1.y, c.b1.x};
  const Vec2 l2{c.b2.y, -c.b2.x};
  return {l1.x * l2.x, 0.5 * (l1.x * l2.y + l1.y * l2.x), l1.y * l2.y};
}

std::optional<Cone> to_cone(const QuadForm& q) {
  // Q(theta) = m + R cos(2 theta - phi0).
  const double m = 0.5 * (q.q11 + q.q22);
  const double R = std::hypot(0.5 * (q.q11 - q.q22), q.q12);
  if (!(std::fabs(m) < R)) return std::nullopt;
  const double phi0 = std::atan2(q.q12, 0.5 * (q.q11 - q.q22));
  const double w = 0.5 * std::acos(-m / R);
  return Cone{direction(0.5 * phi0 - w), direction(0.5 * phi0 + w)};
}

ConeTest cone_contains(const Cone& c, Vec2 u, double tol) {
  const double n = norm(u);
  if (n == 0.0) throw ConeError("zero direction");
  const double m = to_form(c)({u.x / n, u.y / n});
  if (m > tol) return {Side::inside, m};
  if (m < -tol) return {Side::outside, m};
  return {Side::boundary, m};
}

double exclusion_margin(const Cone& c, Vec2 u) {
  if (norm(u) == 0.0) throw ConeError("zero direction");
  const double w = width(c);
  const double t = mod_pi(angle_of(u) - angle_of(c.b1));
  if (t <= w) return -std::min(t, w - t);
  return std::min(t - w, kPi - t);
}

double containment_margin(const Cone& inner, const Cone& outer) {
  const double wa = width(inner);
  const double wb = width(outer);
  double t1 = mod_pi(angle_of(inner.b1) - angle_of(outer.b1));
  // A start just clockwise of outer.b1 is a small negative offset, not one near pi.
  if (t1 > 0.5 * (kPi + wb - wa)) t1 -= kPi;
  return std::min(t1, wb - t1 - wa);
}

Cone map_cone(const Mat2& m, const Cone& c) {
  const double d = det(m);
  if (d == 0.0) throw ConeError("singular matrix");
  const Vec2 u1 = normalized(m * c.b1);
  const Vec2 u2 = normalized(m * c.b2);
  return d > 0 ? Cone{u1, u2} : Cone{u2, u1};
}

Cone cone_eps(double eps, int shear_sign) {
  if (shear_sign >= 0) return make_cone({1.0, -eps}, {-eps, 1.0});
  return make_cone({-eps, -1.0}, {1.0, eps});
}

Cone cone_delta(double delta) { return make_cone({1.0, -delta}, {1.0, delta}); }

Cone blend(const Cone& p, const Cone& q, double alpha) {
  if (alpha <= 0.0) return p;
  if (alpha >= 1.0) return q;
  // Scale both forms to unit oscillation so neither dominates by width alone.
  auto unit = [](QuadForm f) {
    const double R = std::hypot(0.5 * (f.q11 - f.q22), f.q12);
    return QuadForm{f.q11 / R, f.q12 / R, f.q22 / R};
  };
  const QuadForm fp = unit(to_form(p));
  const QuadForm fq = unit(to_form(q));
  const QuadForm b{(1 - alpha) * fp.q11 + alpha * fq.q11, (1 - alpha) * fp.q12 + alpha * fq.q12,
                   (1 - alpha) * fp.q22 + alpha * fq.q22};
  const auto c = to_cone(b);
  if (!c) throw ConeError("degenerate blended form at alpha = " + std::to_string(alpha));
  // Keep b1 on the same side as the inputs.
  if (dot(c->b1, p.b1) + dot(c->b1, q.b1) < 0) return {-c->b1, -c->b2};
  return *c;
}

int shear_sign(const TorusEndo& f, const CentreAnnulus& A) {
  const Mat2 m = f.step_derivative({A.centre, 0.0});
  return m.c * m.a >= 0 ? 1 : -1;
}

namespace {

double min_growth(const Mat2& m, const Cone& c, int directions) {
  const double t0 = angle_of(c.b1);
  const double w = width(c);
  double g = INFINITY;
  for (int j = 0; j < directions; ++j) g = std::min(g, norm(m * direction(t0 + w * j / (directions - 1))));
  return g;
}

}  // namespace

EpsilonResult find_epsilon(const TorusEndo& f, int samples) {
  if (f.annuli().empty()) throw ConeError("no attracting circle to build C_eps around");
  EpsilonResult r;
  for (int k = 1; k <= 20; ++k) {
    const double eps = std::ldexp(1.0, -k);
    r.tried = k;
    double margin = INFINITY;
    double growth = INFINITY;
    for (const CentreAnnulus& A : f.annuli()) {
      const int s = shear_sign(f, A);
      const Cone c = cone_eps(eps, s);
      for (int i = 0; i < samples; ++i) {
        const double x = A.centre + A.core_radius * (2.0 * (i + 0.5) / samples - 1.0);
        const Mat2 m = f.step_derivative({x, 0.0});
        margin = std::min(margin, containment_margin(map_cone(m, c), c));
        growth = std::min(growth, min_growth(m, c, 65));
      }
    }
    if (margin > 0 && growth > 1.001) {
      r.eps = eps;
      r.margin = margin;
      r.growth = growth;
      return r;
    }
  }
  throw ConeError("no eps in 2^-1 .. 2^-20 makes C_eps invariant and expanded on the cores");
}

Cone pullback_cone(const TorusEndo& f, const StripV& v, double eps, int sign, Vec2 p) {
  const CentreAnnulus& A = f.annuli()[v.annulus];
  std::vector<Mat2> chain;
  chain.reserve(v.N);
  double x = A.lo + (p.x - A.lo - std::floor(p.x - A.lo));
  for (int k = 0; k < v.N; ++k) {
    chain.push_back(f.step_derivative({x, 0.0}));
    x = f.step_x_lift(x) - A.lift_shift;
  }
  Cone c = cone_eps(eps, sign);
  for (int k = v.N - 1; k >= 0; --k) c = map_cone(inverse(chain[k]), c);
  return c;
}

DeltaResult find_delta(const TorusEndo& f, const Regions& regions, double eps, int samples) {
  std::vector<int> signs;
  for (const CentreAnnulus& A : f.annuli()) signs.push_back(shear_sign(f, A));
  auto cn = [&](int strip, double x) {
    const StripV& v = regions.strips()[strip];
    return pullback_cone(f, v, eps, signs[v.annulus], {x, 0.0});
  };

  // Everything here depends on x only.
  struct Sample {
    double x, fx;
    int strip;
    int image_strip;
    Mat2 df;
    std::optional<Cone> cn_here, cn_image;
  };
  std::vector<Sample> pts;
  for (int i = 0; i < samples; ++i) {
    const double x = (i + 0.5) / samples;
    if (!f.in_UK(x)) continue;
    Sample s;
    s.x = x;
    s.fx = wrap01(f.step_x_lift(x));
    s.strip = regions.strip_of(x);
    s.image_strip = regions.strip_of(s.fx);
    s.df = f.step_derivative({x, 0.0});
    if (s.strip >= 0) s.cn_here = cn(s.strip, x);
    if (s.image_strip >= 0) s.cn_image = cn(s.image_strip, s.fx);
    pts.push_back(std::move(s));
  }

  auto glued = [&](double x, int strip, const std::optional<Cone>& c, const Cone& bd) {
    if (strip < 0) return bd;
    return blend(bd, *c, regions.alpha(x));
  };

  std::vector<DeltaResult> passing;
  for (int k = 1; k <= 20; ++k) {
    const double delta = std::ldexp(1.0, -k);
    const Cone bd = cone_delta(delta);
    DeltaResult r;
    r.delta = delta;
    r.invariance_margin = r.containment_margin = r.entry_margin = INFINITY;
    try {
      for (const Sample& s : pts) {
        const Cone src = glued(s.x, s.strip, s.cn_here, bd);
        const Cone dst = glued(s.fx, s.image_strip, s.cn_image, bd);
        r.invariance_margin = std::min(r.invariance_margin, containment_margin(map_cone(s.df, src), dst));
        if (s.cn_here) r.containment_margin = std::min(r.containment_margin, containment_margin(bd, *s.cn_here));
        if (s.cn_image)
          r.entry_margin = std::min(r.entry_margin, containment_margin(map_cone(s.df, bd), *s.cn_image));
      }
    } catch (const ConeError&) {
      continue;
    }
    if (r.invariance_margin > 0 && r.containment_margin > 0 && r.entry_margin > 0) passing.push_back(r);
  }
  if (passing.empty()) throw ConeError("no delta in 2^-1 .. 2^-20 satisfies the B_delta conditions");
  // Middle of the passing run keeps slack on both sides.
  DeltaResult best = passing[passing.size() / 2];
  best.passing = int(passing.size());
  return best;
}

UnstableCones::UnstableCones(const TorusEndo& f, double eps, double delta)
    : f_(&f), regions_(f), eps_(eps), delta_(delta) {
  for (const CentreAnnulus& A : f.annuli()) signs_.push_back(shear_sign(f, A));
}

Cone UnstableCones::cn(int strip, Vec2 p) const {
  const StripV& v = regions_.strips()[strip];
  return pullback_cone(*f_, v, eps_, signs_[v.annulus], p);
}

Cone UnstableCones::at(Vec2 p) const {
  const int i = regions_.strip_of(p.x);
  const Cone bd = cone_delta(delta_);
  if (i < 0) return bd;
  const double a = regions_.alpha(p.x);
  if (a <= 0.0) return bd;
  const Cone c = cn(i, p);
  if (a >= 1.0) return c;
  return blend(bd, c, a);
}

ConeField UnstableCones::field() const {
  return {"C^u", [this](Vec2 p) { return at(p); }};
}

}  // namespace tph
