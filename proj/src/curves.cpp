#include "tph/curves.hpp"

#include <algorithm>
#include <cmath>

namespace tph {

double arclength(const CurveSegment& c) {
  double s = 0.0;
  for (std::size_t i = 1; i < c.pts.size(); ++i) s += norm(c.pts[i] - c.pts[i - 1]);
  return s;
}

namespace {

// E^c at p oriented along `prev`; nullopt when undetermined.
std::optional<Vec2> oriented(const TorusEndo& f, Vec2 p, Vec2 prev, const DepthPolicy& policy) {
  const CentreSample s = centre_direction_adaptive(f, wrap(p), policy);
  if (s.undetermined) return std::nullopt;
  return dot(s.direction, prev) < 0 ? -s.direction : s.direction;
}

}  // namespace

CurveSegment integrate_centre_curve(const TorusEndo& f, Vec2 p0, double length, double step, Vec2 hint,
                                    const DepthPolicy& policy) {
  if (!(step > 0.0 && step <= 1e-3)) throw std::invalid_argument("integrate_centre_curve: step must be in (0, 1e-3]");
  CurveSegment c;
  c.step = step;
  c.pts.push_back(p0);
  Vec2 tangent = hint;
  if (auto d = oriented(f, p0, hint, policy)) {
    // A hint orthogonal to E^c picks the upward (then rightward) orientation.
    tangent = *d;
    if (std::fabs(dot(*d, hint)) < 1e-12 && (d->y < 0 || (d->y == 0 && d->x < 0))) tangent = -*d;
  } else {
    c.truncated = true;
    return c;
  }
  double travelled = 0.0;
  double h = step;
  Vec2 p = p0;
  while (travelled < length - 1e-15) {
    h = std::min(h, length - travelled);
    const auto k1 = oriented(f, p, tangent, policy);
    if (!k1) break;
    const auto k2 = oriented(f, p + 0.5 * h * *k1, *k1, policy);
    if (!k2) break;
    const auto k3 = oriented(f, p + 0.5 * h * *k2, *k2, policy);
    if (!k3) break;
    const auto k4 = oriented(f, p + h * *k3, *k3, policy);
    if (!k4) break;
    // The shear ramps turn E^c quickly; halve the step there.
    if (line_angle(*k1, *k4) > 1e-3 && h > step / 1024) {
      h *= 0.5;
      continue;
    }
    const Vec2 dir = normalized((1.0 / 6) * (*k1 + 2.0 * *k2 + 2.0 * *k3 + *k4));
    p = p + h * dir;
    tangent = dir;
    travelled += h;
    c.pts.push_back(p);
    h = std::min(step, 2 * h);
  }
  c.truncated = travelled < length - 1e-12;
  c.tangency_residual = tangency_residual(f, c, policy);
  return c;
}

double tangency_residual(const TorusEndo& f, const CurveSegment& c, const DepthPolicy& policy) {
  double worst = 0.0;
  for (std::size_t i = 1; i < c.pts.size(); ++i) {
    const Vec2 chord = c.pts[i] - c.pts[i - 1];
    if (norm(chord) == 0.0) continue;
    const Vec2 mid = 0.5 * (c.pts[i] + c.pts[i - 1]);
    const CentreSample s = centre_direction_adaptive(f, wrap(mid), policy);
    if (s.undetermined) continue;
    worst = std::max(worst, line_angle(chord, s.direction));
  }
  return worst;
}

namespace {

Vec2 back(const TorusEndo& f, Vec2 p, int n, const CentreAnnulus* A) {
  for (int k = 0; k < n; ++k) p = A ? f.step_inverse_in(*A, p) : f.inverse_lift(p);
  return p;
}

double point_segment(Vec2 p, Vec2 a, Vec2 b) {
  const Vec2 ab = b - a;
  const double l2 = dot(ab, ab);
  double t = l2 > 0 ? dot(p - a, ab) / l2 : 0.0;
  t = std::clamp(t, 0.0, 1.0);
  return norm(p - (a + t * ab));
}

// Distance from p to an x-monotone polyline.
double distance_to_curve(Vec2 p, const std::vector<Vec2>& poly, double window) {
  auto lo = std::lower_bound(poly.begin(), poly.end(), p.x - window, [](Vec2 q, double x) { return q.x < x; });
  std::size_t i0 = lo == poly.begin() ? 0 : std::size_t(lo - poly.begin()) - 1;
  double best = INFINITY;
  for (std::size_t i = i0; i + 1 < poly.size(); ++i) {
    if (poly[i].x > p.x + window) break;
    best = std::min(best, point_segment(p, poly[i], poly[i + 1]));
  }
  return best;
}

}  // namespace

CurveSegment backward_curve(const TorusEndo& f, const CurveSegment& seg, int n, const CentreAnnulus* A) {
  CurveSegment out;
  out.step = seg.step;
  out.truncated = seg.truncated;
  out.pts.reserve(seg.pts.size());
  for (const Vec2& p : seg.pts) out.pts.push_back(back(f, p, n, A));
  return out;
}

BoundsCheck bounded_box_check(const TorusEndo& f, const CentreAnnulus& A, double r0, int n_max, int samples) {
  if (!(r0 > 0)) throw std::invalid_argument("bounded_box_check: r0 must be positive");
  BoundsCheck b;
  b.r0 = r0;
  b.n_max = n_max;
  b.lambda = std::pow(std::fabs(double(f.lambda())), f.period());
  b.C = f.period() == 1 ? f.dist_to_linear() : lift_distance(f, &A);
  b.r = std::max(r0, b.lambda / (b.lambda - 1) * b.C) + 0.01;
  double observed = 0.0;
  for (int i = 0; i < samples; ++i) {
    const double x = A.lo + (A.hi - A.lo) * (i + 0.5) / samples;
    for (int j = 0; j < samples; ++j) {
      Vec2 p{x, -r0 + 2 * r0 * (j + 0.5) / samples};
      for (int n = 0; n < n_max; ++n) {
        p = f.step_inverse_in(A, p);
        observed = std::max(observed, std::fabs(p.y));
      }
    }
  }
  b.observed = observed;
  b.pass = observed <= b.r;
  return b;
}

BranchingReport branching_witness(const TorusEndo& f, int annulus, const BranchingOptions& opt) {
  BranchingReport r;
  r.side = opt.side >= 0 ? 1 : -1;
  const CentreAnnulus* A = nullptr;
  if (!f.annuli().empty()) {
    if (annulus < 0 || annulus >= int(f.annuli().size())) throw std::out_of_range("branching_witness: annulus index");
    A = &f.annuli()[annulus];
  }

  // Anchor: the lifted attracting circle's fixed point, or the origin.
  Vec2 anchor{0.0, 0.0};
  bool fixed = true;
  if (A) {
    const double Lam = std::pow(double(f.lambda()), f.period());
    const double S = f.step_lift_in(*A, {A->centre, 0.0}).y;
    anchor = {A->centre, S / (1 - Lam)};
    fixed = norm(f.step_lift_in(*A, anchor) - anchor) < 1e-12;
    r.annulus = A->name;
    r.boundary_x = r.side > 0 ? A->hi : A->lo;
  } else {
    r.annulus = "none";
  }
  r.anchor = anchor;
  r.anchor_fixed = fixed;

  const CurveSegment J = integrate_centre_curve(f, anchor, opt.jc_length, opt.step, {double(r.side), 0.0});
  // Levels f^-n(J), each the image of the previous polyline. The backward
  // orbit of the anchor repels in x in floating point, so it is pinned.
  auto inv = [&](Vec2 p) { return A ? f.step_inverse_in(*A, p) : f.inverse_lift(p); };
  std::vector<std::vector<Vec2>> levels{J.pts};
  r.free_x.push_back(J.pts.back().x);
  for (int n = 1; n <= opt.n_back; ++n) {
    const std::vector<Vec2>& prev = levels.back();
    std::vector<Vec2> refined{anchor};
    for (std::size_t i = 1; i < prev.size(); ++i) {
      // Bisect the previous chord until image chords are short and flat.
      struct Node {
        double t;
        Vec2 p;
      };
      const Vec2 a0 = prev[i - 1];
      const Vec2 a1 = prev[i];
      std::vector<Node> stack{{1.0, inv(a1)}};
      double t0 = 0.0;
      int guard = 0;
      while (!stack.empty()) {
        const Node top = stack.back();
        const double tm = 0.5 * (t0 + top.t);
        const Vec2 pm = inv(a0 + tm * (a1 - a0));
        const Vec2 p0 = refined.back();
        if (guard < 4096 && (norm(top.p - p0) > 1e-3 || norm(pm - 0.5 * (p0 + top.p)) > opt.sagitta)) {
          ++guard;
          stack.push_back({tm, pm});
          continue;
        }
        refined.push_back(top.p);
        t0 = top.t;
        stack.pop_back();
      }
    }
    // Drop points the chords already represent; the tail piles up near q otherwise.
    std::vector<Vec2> cur{refined.front()};
    for (std::size_t i = 1; i + 1 < refined.size(); ++i) {
      const Vec2 a = cur.back();
      const Vec2 b = refined[i + 1];
      if (norm(b - a) <= 1e-3 && point_segment(refined[i], a, b) <= 0.25 * opt.sagitta) continue;
      cur.push_back(refined[i]);
    }
    cur.push_back(refined.back());
    r.free_x.push_back(cur.back().x);
    levels.push_back(std::move(cur));
  }
  r.monotone = true;
  for (std::size_t n = 1; n < r.free_x.size(); ++n) {
    const double step = r.side * (r.free_x[n] - r.free_x[n - 1]);
    const bool saturated = A && std::fabs(r.free_x[n - 1] - r.boundary_x) < 1e-14;
    if (step < 0 || (!saturated && step == 0)) r.monotone = false;
  }
  if (!A) r.boundary_x = r.free_x.back();
  r.endpoint_gap = std::fabs(r.free_x.back() - r.boundary_x);

  double nest = 0.0;
  for (std::size_t n = 0; n + 1 < levels.size(); ++n) {
    std::vector<Vec2> next = levels[n + 1];
    if (r.side < 0)
      for (Vec2& p : next) p.x = -p.x;
    for (Vec2 p : levels[n]) {
      if (r.side < 0) p.x = -p.x;
      nest = std::max(nest, distance_to_curve(p, next, 2e-3));
    }
  }
  r.nesting_error = nest;

  if (A) r.bounds = bounded_box_check(f, *A, opt.r0, 40);

  r.q = {r.boundary_x, levels.back().back().y};
  double vert = 0.0;
  for (int k = -4; k <= 4; ++k) {
    const CentreSample s = boundary_direction(f, wrap(Vec2{r.q.x, r.q.y + k * 0.25 * opt.neighbourhood}));
    vert = std::max(vert, std::fabs(s.direction.x));
  }
  r.boundary_verticality = vert;

  // Levels nest, so the last one carries B near q.
  std::vector<Vec2> near;
  for (const Vec2& p : levels.back())
    if (norm(p - r.q) <= opt.neighbourhood && r.side * (r.boundary_x - p.x) > 0) near.push_back(p);
  r.near_points = int(near.size());
  const std::size_t stride = std::max<std::size_t>(1, near.size() / std::max(1, opt.angle_samples));
  double angle = 0.0;
  for (std::size_t i = 0; i < near.size(); i += stride) {
    const CentreSample s = centre_direction_adaptive(f, wrap(near[i]));
    if (!s.undetermined) angle = std::max(angle, line_angle(s.direction, {0.0, 1.0}));
  }
  r.angle = angle;

  if (!A) {
    r.reason = "no periodic centre annulus";
  } else if (!r.anchor_fixed) {
    r.reason = "anchor is not fixed by the strip lift";
  } else if (!r.monotone) {
    r.reason = "free endpoint not monotone";
  } else if (r.endpoint_gap > opt.endpoint_tol) {
    r.reason = "free endpoint did not reach the boundary circle";
  } else if (!r.bounds.pass) {
    r.reason = "backward iterates not vertically bounded";
  } else if (r.boundary_verticality > 1e-9) {
    r.reason = "boundary circle not tangent to E^c";
  } else if (near.empty()) {
    r.reason = "no backward iterate near the boundary point";
  } else if (angle < opt.angle_threshold) {
    r.reason = "curves near the boundary point are not separated by the angle threshold";
  }
  r.pass = r.reason.empty();
  return r;
}

std::vector<BranchingReport> branching_scan(const TorusEndo& f, BranchingOptions opt) {
  std::vector<BranchingReport> out;
  const int n = std::max<int>(1, int(f.annuli().size()));
  for (int i = 0; i < n; ++i)
    for (int side : {1, -1}) {
      opt.side = side;
      out.push_back(branching_witness(f, i, opt));
    }
  return out;
}

double hausdorff_from(const std::vector<Vec2>& a, const std::vector<Vec2>& b) {
  double worst = 0.0;
  for (const Vec2& p : a) {
    double best = INFINITY;
    if (b.size() == 1) best = norm(p - b[0]);
    for (std::size_t i = 0; i + 1 < b.size(); ++i) best = std::min(best, point_segment(p, b[i], b[i + 1]));
    worst = std::max(worst, best);
  }
  return worst;
}

namespace {

// Leaf through p followed in chunks until it leaves (lo, hi) or reaches max_len.
std::vector<Vec2> leaf_inside(const TorusEndo& f, const CentreAnnulus& A, Vec2 p, Vec2 hint, double max_len,
                              double step) {
  std::vector<Vec2> out{p};
  double len = 0.0;
  while (len < max_len - 1e-15) {
    const double chunk = std::min(0.05, max_len - len);
    const CurveSegment c = integrate_centre_curve(f, out.back(), chunk, step, hint);
    if (c.pts.size() < 2) break;
    for (std::size_t i = 1; i < c.pts.size(); ++i) {
      const Vec2 q = c.pts[i];
      if (q.x <= A.lo || q.x >= A.hi) {
        const Vec2 r = out.back();
        const double b = q.x <= A.lo ? A.lo : A.hi;
        const double t = (b - r.x) / (q.x - r.x);
        out.push_back(r + t * (q - r));
        return out;
      }
      len += norm(q - out.back());
      out.push_back(q);
    }
    if (c.truncated) break;
    hint = c.pts.back() - c.pts[c.pts.size() - 2];
  }
  return out;
}

double poly_length(const std::vector<Vec2>& v) {
  double s = 0.0;
  for (std::size_t i = 1; i < v.size(); ++i) s += norm(v[i] - v[i - 1]);
  return s;
}

// Point at arclength u along v, with the local tangent.
std::pair<Vec2, Vec2> at_arclength(const std::vector<Vec2>& v, double u) {
  double s = 0.0;
  for (std::size_t i = 1; i < v.size(); ++i) {
    const double l = norm(v[i] - v[i - 1]);
    if (s + l >= u && l > 0) return {v[i - 1] + ((u - s) / l) * (v[i] - v[i - 1]), v[i] - v[i - 1]};
    s += l;
  }
  return {v.back(), v.back() - v[v.size() - 2]};
}

}  // namespace

CentreSample boundary_direction(const TorusEndo& f, Vec2 p, int n) {
  std::vector<double> edges;
  for (const CentreAnnulus& A : f.annuli()) {
    edges.push_back(wrap01(A.lo));
    edges.push_back(wrap01(A.hi));
  }
  auto snap = [&](double x) {
    double best = x, d = INFINITY;
    for (double e : edges)
      if (std::fabs(circle_diff(x, e)) < d) {
        d = std::fabs(circle_diff(x, e));
        best = e;
      }
    return best;
  };
  std::vector<Vec2> orbit{p};
  orbit.reserve(n);
  while (int(orbit.size()) < n) {
    const Vec2 q = f.apply(orbit.back());
    orbit.push_back({snap(q.x), q.y});
  }
  return centre_direction_along(f, orbit, n);
}

UniquenessReport annulus_uniqueness(const TorusEndo& f, const CentreAnnulus& A, double length, double step,
                                    double offset) {
  UniquenessReport rep;
  const Vec2 p0{A.centre, 0.3};
  const double coarse = std::max(step, 1e-3);
  const std::vector<Vec2> up = leaf_inside(f, A, p0, {0.0, 1.0}, 2.0 * length, coarse);
  const std::vector<Vec2> down = leaf_inside(f, A, p0, {0.0, -1.0}, 2.0 * length, coarse);
  const double l_up = poly_length(up), l_down = poly_length(down);
  rep.leaf_length = l_up + l_down;
  // Short leaves are compared over most of their length instead.
  rep.length_used = std::min(length, 0.95 * rep.leaf_length);
  const double L = rep.length_used;
  // Start up the leaf so that L of it lies ahead, centred in the slack.
  const double u = std::clamp(0.5 * (l_up + L - l_down), 0.0, l_up);
  auto [start, tangent] = at_arclength(up, u);
  rep.start = start;
  const Vec2 hint = -1.0 * tangent;
  const CurveSegment c1 = integrate_centre_curve(f, start, L, step, hint);
  const CurveSegment c2 = integrate_centre_curve(f, start + Vec2{offset, 0.0}, L, step, hint);
  auto inside = [&](const CurveSegment& c) {
    return std::all_of(c.pts.begin(), c.pts.end(), [&](Vec2 q) { return q.x > A.lo && q.x < A.hi; });
  };
  rep.inside = inside(c1) && inside(c2) && !c1.truncated && !c2.truncated;
  rep.separation = std::max(hausdorff_from(c1.pts, c2.pts), hausdorff_from(c2.pts, c1.pts));
  rep.tangency_residual = std::max(c1.tangency_residual, c2.tangency_residual);
  if (!rep.inside) rep.reason = "curve left the annulus";
  else if (rep.separation > 1e-4) rep.reason = "curves separated";
  else if (rep.tangency_residual > 1e-3) rep.reason = "tangency residual too large";
  rep.pass = rep.reason.empty();
  return rep;
}

IncoherenceReport incoherence_witness(const TorusEndo& f, const DepthPolicy& policy) {
  IncoherenceReport r;
  const auto& an = f.annuli();
  int left = -1, right = -1;
  for (std::size_t i = 0; i < an.size() && left < 0; ++i)
    for (std::size_t j = 0; j < an.size(); ++j)
      if (i != j && std::fabs(circle_diff(an[i].hi, an[j].lo)) < 1e-12) {
        left = int(i);
        right = int(j);
        break;
      }
  if (left < 0) {
    r.reason = "no circle shared by two centre annuli";
    return r;
  }
  r.applicable = true;
  r.circle = wrap01(an[right].lo);
  r.min_abs_slope = INFINITY;
  bool consistent = true;
  for (int k = 2; k <= 5; ++k) {
    const double d = std::pow(10.0, -k);
    r.distances.push_back(d);
    const CentreSample sl = centre_direction_adaptive(f, wrap(Vec2{r.circle - d, 0.5}), policy);
    const CentreSample sr = centre_direction_adaptive(f, wrap(Vec2{r.circle + d, 0.5}), policy);
    const double ml = sl.direction.y / sl.direction.x;
    const double mr = sr.direction.y / sr.direction.x;
    r.slope_left.push_back(ml);
    r.slope_right.push_back(mr);
    const int a = ml > 0 ? 1 : (ml < 0 ? -1 : 0);
    const int b = mr > 0 ? 1 : (mr < 0 ? -1 : 0);
    if (k == 2) {
      r.sign_left = a;
      r.sign_right = b;
    }
    if (a != r.sign_left || b != r.sign_right || sl.undetermined || sr.undetermined) consistent = false;
    r.min_abs_slope = std::min({r.min_abs_slope, std::fabs(ml), std::fabs(mr)});
  }
  if (!consistent) {
    r.reason = "slope sign changes with distance";
  } else if (r.sign_left == 0 || r.sign_left != -r.sign_right) {
    r.reason = "slopes on the two sides do not have opposite signs";
  } else if (!(r.min_abs_slope > 1e-3)) {
    r.reason = "slope magnitude not bounded away from zero";
  }
  r.pass = r.reason.empty();
  return r;
}

double max_gap(std::vector<Arc> arcs) {
  if (arcs.empty()) return 1.0;
  for (Arc& a : arcs) {
    const double s = std::floor(a.lo);
    a.lo -= s;
    a.hi -= s;
  }
  std::sort(arcs.begin(), arcs.end(), [](const Arc& a, const Arc& b) { return a.lo < b.lo; });
  double gap = 0.0;
  double reach = arcs.front().hi;
  for (std::size_t i = 1; i < arcs.size(); ++i) {
    gap = std::max(gap, arcs[i].lo - reach);
    reach = std::max(reach, arcs[i].hi);
  }
  // Wrap from the furthest reach back to the first arc.
  gap = std::max(gap, arcs.front().lo + 1.0 - reach);
  return std::max(gap, 0.0);
}

std::vector<AnnulusFamily> preimage_lamination(const CircleMap& g, const Arc& X, int n_levels) {
  return preimage_lamination(g, std::vector<Arc>{X}, n_levels);
}

std::vector<AnnulusFamily> preimage_lamination(const CircleMap& g, const std::vector<Arc>& level0, int n_levels) {
  if (n_levels < 0) throw std::invalid_argument("preimage_lamination: n_levels must be >= 0");
  std::vector<AnnulusFamily> out;
  AnnulusFamily first;
  first.intervals = level0;
  first.max_gap = max_gap(first.intervals);
  out.push_back(first);
  for (int n = 1; n <= n_levels; ++n) {
    AnnulusFamily fam;
    fam.level = n;
    for (const Arc& parent : out.back().intervals) {
      const std::vector<Arc> pre = g.preimage_interval(parent);
      fam.intervals.insert(fam.intervals.end(), pre.begin(), pre.end());
    }
    std::sort(fam.intervals.begin(), fam.intervals.end(), [](const Arc& a, const Arc& b) { return a.lo < b.lo; });
    // The union over levels 0..n is level n itself when the family nests; merge anyway.
    std::vector<Arc> all = fam.intervals;
    for (const AnnulusFamily& prev : out) all.insert(all.end(), prev.intervals.begin(), prev.intervals.end());
    fam.max_gap = max_gap(std::move(all));
    out.push_back(std::move(fam));
  }
  return out;
}

}  // namespace tph
