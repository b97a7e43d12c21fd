#include "tph/circle_map.hpp"

#include "tph/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace tph {

namespace {

constexpr double kTol = 1e-13;

std::string fmt(const char* pattern, double a, double b = 0.0, double c = 0.0, double d = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, pattern, a, b, c, d);
  return buf;
}

bool near(double a, double b, double scale = 1.0) {
  return std::fabs(a - b) <= 1e-12 * std::max(1.0, scale);
}

bool interval_affine(const Knot& k0, const Knot& k1) {
  const double chord = (k1.y - k0.y) / (k1.x - k0.x);
  const double scale = std::max({1.0, std::fabs(chord)});
  return std::fabs(k0.slope - chord) <= 1e-13 * scale &&
         std::fabs(k1.slope - chord) <= 1e-13 * scale;
}

// Derivative of the Hermite cubic is quadratic in t: range over [0, 1].
void hermite_slope_range(const Knot& k0, const Knot& k1, double& lo, double& hi) {
  const double h = k1.x - k0.x;
  const double chord = (k1.y - k0.y) / h;
  // s(t) = s0 + t (6 chord - 4 s0 - 2 s1) + t^2 (3 s0 + 3 s1 - 6 chord)
  const double c1 = 6 * chord - 4 * k0.slope - 2 * k1.slope;
  const double c2 = 3 * k0.slope + 3 * k1.slope - 6 * chord;
  lo = std::min(k0.slope, k1.slope);
  hi = std::max(k0.slope, k1.slope);
  if (std::fabs(c2) > 0) {
    const double t = -c1 / (2 * c2);
    if (t > 0 && t < 1) {
      const double s = k0.slope + t * c1 + t * t * c2;
      lo = std::min(lo, s);
      hi = std::max(hi, s);
    }
  }
}

}  // namespace

double hermite_value(const Knot& k0, const Knot& k1, double x) {
  const double h = k1.x - k0.x;
  const double t = (x - k0.x) / h;
  const double t2 = t * t;
  const double t3 = t2 * t;
  return (2 * t3 - 3 * t2 + 1) * k0.y + (t3 - 2 * t2 + t) * h * k0.slope +
         (-2 * t3 + 3 * t2) * k1.y + (t3 - t2) * h * k1.slope;
}

double hermite_slope(const Knot& k0, const Knot& k1, double x) {
  const double h = k1.x - k0.x;
  const double t = (x - k0.x) / h;
  const double t2 = t * t;
  return (6 * t2 - 6 * t) * (k0.y - k1.y) / h + (3 * t2 - 4 * t + 1) * k0.slope +
         (3 * t2 - 2 * t) * k1.slope;
}

CircleMap::CircleMap(int degree, std::vector<Knot> knots) : degree_(degree), knots_(std::move(knots)) {
  if (degree_ == 0) throw BuildError("degree must be nonzero");
  if (knots_.size() < 2) throw BuildError("a circle map needs at least two knots");
  const Knot& first = knots_.front();
  Knot& last = knots_.back();
  if (!near(last.x, first.x + 1.0, std::fabs(first.x)))
    throw BuildError(fmt("knot table must span one period: first x=%.17g, last x=%.17g", first.x, last.x));
  if (!near(last.y, first.y + degree_, std::fabs(first.y) + std::abs(degree_)))
    throw BuildError(fmt("last value %.17g differs from first value %.17g plus the degree", last.y, first.y));
  if (!near(last.slope, first.slope, std::fabs(first.slope)))
    throw BuildError(fmt("slope mismatch across the period: %.17g vs %.17g", first.slope, last.slope));
  last.x = first.x + 1.0;
  last.y = first.y + degree_;
  last.slope = first.slope;

  const int o = orientation();
  for (std::size_t i = 0; i + 1 < knots_.size(); ++i) {
    const Knot& k0 = knots_[i];
    const Knot& k1 = knots_[i + 1];
    if (!(k1.x > k0.x)) throw BuildError(fmt("knots not strictly increasing at x=%.17g", k1.x));
    if (o * k0.slope < 0 || o * k1.slope < 0)
      throw BuildError(fmt("monotonicity violated: slope of wrong sign on [%.17g, %.17g]", k0.x, k1.x));
    const double chord = (k1.y - k0.y) / (k1.x - k0.x);
    if (o * chord < 0)
      throw BuildError(fmt("monotonicity violated: chord %.17g on [%.17g, %.17g]", chord, k0.x, k1.x));
    if (std::fabs(chord) <= 1e-15) {
      if (std::fabs(k0.slope) > 1e-12 || std::fabs(k1.slope) > 1e-12)
        throw BuildError(fmt("flat interval [%.17g, %.17g] with nonzero end slopes", k0.x, k1.x));
      continue;
    }
    const double alpha = k0.slope / chord;
    const double beta = k1.slope / chord;
    if (alpha * alpha + beta * beta > 9.0 + 1e-9)
      throw BuildError(fmt("Fritsch-Carlson condition alpha^2+beta^2<=9 fails on [%.17g, %.17g]: %.17g",
                           k0.x, k1.x, alpha * alpha + beta * beta));
  }
  invertible_ = strictly_monotone();
}

CircleMap CircleMap::affine(int degree, double value_at_zero) {
  return CircleMap(degree, {{0.0, value_at_zero, double(degree)}, {1.0, value_at_zero + degree, double(degree)}});
}

double CircleMap::reduce(double x, double& shift) const {
  const double x0 = knots_.front().x;
  const double n = std::floor(x - x0);
  shift = n;
  return x - n;
}

std::size_t CircleMap::locate(double xr) const {
  auto it = std::upper_bound(knots_.begin(), knots_.end(), xr,
                             [](double v, const Knot& k) { return v < k.x; });
  std::size_t i = it == knots_.begin() ? 0 : std::size_t(it - knots_.begin()) - 1;
  return std::min(i, knots_.size() - 2);
}

double CircleMap::lift(double x) const {
  double n;
  const double xr = reduce(x, n);
  const std::size_t i = locate(xr);
  const Knot& k0 = knots_[i];
  const Knot& k1 = knots_[i + 1];
  double v;
  if (interval_affine(k0, k1))
    v = k0.y + k0.slope * (xr - k0.x);
  else
    v = hermite_value(k0, k1, xr);
  return v + n * degree_;
}

double CircleMap::eval(double x) const { return wrap01(lift(x)); }

double CircleMap::deriv(double x) const {
  double n;
  const double xr = reduce(x, n);
  const std::size_t i = locate(xr);
  const Knot& k0 = knots_[i];
  const Knot& k1 = knots_[i + 1];
  if (interval_affine(k0, k1)) return k0.slope;
  return hermite_slope(k0, k1, xr);
}

std::vector<Arc> CircleMap::linear_pieces() const {
  std::vector<Arc> out;
  double last_slope = 0.0;
  for (std::size_t i = 0; i + 1 < knots_.size(); ++i) {
    const Knot& k0 = knots_[i];
    const Knot& k1 = knots_[i + 1];
    if (!interval_affine(k0, k1)) continue;
    if (!out.empty() && out.back().hi == k0.x && near(last_slope, k0.slope, std::fabs(k0.slope)))
      out.back().hi = k1.x;
    else
      out.push_back({k0.x, k1.x});
    last_slope = k0.slope;
  }
  return out;
}

double CircleMap::max_abs_deriv() const {
  double best = 0.0;
  for (std::size_t i = 0; i + 1 < knots_.size(); ++i) {
    double lo, hi;
    hermite_slope_range(knots_[i], knots_[i + 1], lo, hi);
    best = std::max({best, std::fabs(lo), std::fabs(hi)});
  }
  return best;
}

double CircleMap::min_abs_deriv() const {
  double best = INFINITY;
  for (std::size_t i = 0; i + 1 < knots_.size(); ++i) {
    double lo, hi;
    hermite_slope_range(knots_[i], knots_[i + 1], lo, hi);
    best = std::min(best, orientation() > 0 ? lo : -hi);
  }
  return best;
}

bool CircleMap::strictly_monotone() const {
  for (std::size_t i = 0; i + 1 < knots_.size(); ++i)
    if (std::fabs(knots_[i + 1].y - knots_[i].y) <= 1e-15) return false;
  return true;
}

void CircleMap::require_invertible() const {
  if (invertible_) return;
  for (std::size_t i = 0; i + 1 < knots_.size(); ++i)
    if (std::fabs(knots_[i + 1].y - knots_[i].y) <= 1e-15)
      throw BuildError(fmt("non-invertible branch: derivative vanishes on [%.17g, %.17g]", knots_[i].x,
                           knots_[i + 1].x));
}

double CircleMap::lift_inverse(double y) const {
  require_invertible();
  const int o = orientation();
  const double D = std::abs(degree_);
  const double h0 = o * knots_.front().y;
  const double n = std::floor((o * y - h0) / D);
  double tau = o * y - n * D;
  // tau in [h0, h0 + D); locate the knot interval on H = o * G.
  auto it = std::upper_bound(knots_.begin(), knots_.end(), tau,
                             [o](double v, const Knot& k) { return v < o * k.y; });
  std::size_t i = it == knots_.begin() ? 0 : std::size_t(it - knots_.begin()) - 1;
  i = std::min(i, knots_.size() - 2);
  const Knot& k0 = knots_[i];
  const Knot& k1 = knots_[i + 1];
  double x;
  if (interval_affine(k0, k1)) {
    x = k0.x + (tau - o * k0.y) / (o * k0.slope);
    x = std::clamp(x, k0.x, k1.x);
  } else {
    double lo = k0.x, hi = k1.x;
    for (int it2 = 0; it2 < 200; ++it2) {
      const double mid = 0.5 * (lo + hi);
      if (mid <= lo || mid >= hi) break;
      if (o * hermite_value(k0, k1, mid) < tau)
        lo = mid;
      else
        hi = mid;
    }
    const double flo = std::fabs(o * hermite_value(k0, k1, lo) - tau);
    const double fhi = std::fabs(o * hermite_value(k0, k1, hi) - tau);
    x = flo <= fhi ? lo : hi;
  }
  return x + n;
}

std::vector<double> CircleMap::preimages(double y) const {
  require_invertible();
  const int o = orientation();
  const int D = std::abs(degree_);
  const double h0 = o * lift(0.0);
  // Need o*(y + k) in [h0, h0 + D).
  const double j0 = std::ceil(h0 - o * y);
  std::vector<double> out;
  out.reserve(D);
  for (int j = 0; j < D; ++j) {
    const double k = o * (j0 + j);
    out.push_back(wrap01(lift_inverse(y + k)));
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<Arc> CircleMap::preimage_interval(const Arc& arc) const {
  require_invertible();
  if (!(arc.hi > arc.lo) || arc.hi - arc.lo >= 1.0) throw BuildError("preimage_interval needs a proper arc");
  const int o = orientation();
  const int D = std::abs(degree_);
  const double h0 = o * lift(0.0);
  const double start = o > 0 ? arc.lo : arc.hi;
  const double j0 = std::ceil(h0 - o * start);
  std::vector<Arc> out;
  out.reserve(D);
  for (int j = 0; j < D; ++j) {
    const double k = o * (j0 + j);
    double a = lift_inverse(arc.lo + k);
    double b = lift_inverse(arc.hi + k);
    if (a > b) std::swap(a, b);
    const double s = std::floor(a);
    out.push_back({a - s, b - s});
  }
  std::sort(out.begin(), out.end(), [](const Arc& p, const Arc& q) { return p.lo < q.lo; });
  return out;
}

std::string CircleMap::to_table() const {
  std::ostringstream os;
  os << "# circle map knot table: x lift_value slope\n";
  os << "degree " << degree_ << "\n";
  char buf[128];
  for (const Knot& k : knots_) {
    std::snprintf(buf, sizeof buf, "%.17g %.17g %.17g\n", k.x, k.y, k.slope);
    os << buf;
  }
  return os.str();
}

CircleMap CircleMap::from_table(std::string_view text) {
  std::istringstream is{std::string(text)};
  std::string line;
  std::optional<int> degree;
  std::vector<Knot> knots;
  while (std::getline(is, line)) {
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    std::istringstream ls(line);
    if (!degree) {
      std::string key;
      int d = 0;
      if (!(ls >> key >> d) || key != "degree") throw BuildError("knot table: expected 'degree <d>' header");
      degree = d;
      continue;
    }
    Knot k{};
    if (!(ls >> k.x >> k.y >> k.slope)) throw BuildError("knot table: malformed line '" + line + "'");
    knots.push_back(k);
  }
  if (!degree) throw BuildError("knot table: missing degree header");
  return CircleMap(*degree, std::move(knots));
}

std::vector<Knot> splice_pieces(const std::vector<Piece>& pieces, double smoothing, int orientation) {
  if (pieces.empty()) throw BuildError("no affine pieces to splice");
  const std::size_t n = pieces.size();
  std::vector<double> xs(n), xe(n);
  std::vector<double> window(n > 0 ? n - 1 : 0, 0.0);
  std::vector<bool> corner(n > 0 ? n - 1 : 0, false);
  for (std::size_t i = 0; i < n; ++i) {
    xs[i] = pieces[i].x0;
    xe[i] = pieces[i].x1;
    if (orientation * pieces[i].slope < 0)
      throw BuildError(fmt("monotonicity violated: affine piece at [%.17g, %.17g] has slope %.17g",
                           pieces[i].x0, pieces[i].x1, pieces[i].slope));
  }
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const Piece& p = pieces[i];
    const Piece& q = pieces[i + 1];
    const double gap = q.x0 - p.x1;
    if (gap < -kTol) throw BuildError(fmt("overlapping affine constraints at x=%.17g", q.x0));
    if (gap <= kTol) {
      const double jump = q.y0 - p.at(p.x1);
      if (std::fabs(jump) > 1e-12 * std::max(1.0, std::fabs(q.y0)))
        throw BuildError(fmt("discontinuity at x=%.17g: left value %.17g, right value %.17g", q.x0, p.at(p.x1),
                             q.y0));
      if (near(p.slope, q.slope, std::fabs(p.slope))) continue;
      if (smoothing <= 0)
        throw BuildError(fmt("C1 mismatch at x=%.17g: slope %.17g on the left, %.17g on the right, no smoothing window",
                             q.x0, p.slope, q.slope));
      const double h = std::min({smoothing, 0.5 * (p.x1 - p.x0), 0.5 * (q.x1 - q.x0)});
      if (h <= 0)
        throw BuildError(fmt("C1 mismatch at x=%.17g: no room for a splice window", q.x0));
      corner[i] = true;
      window[i] = h;
      xe[i] = p.x1 - h;
      xs[i + 1] = q.x0 + h;
    } else {
      window[i] = std::min(smoothing, 0.25 * gap);
    }
  }

  std::vector<Knot> knots;
  auto push = [&knots](double x, double y, double s) {
    if (!knots.empty() && x <= knots.back().x + kTol) {
      if (std::fabs(y - knots.back().y) > 1e-12 * std::max(1.0, std::fabs(y)) ||
          std::fabs(s - knots.back().slope) > 1e-12 * std::max(1.0, std::fabs(s)))
        throw BuildError(fmt("conflicting knot data at x=%.17g", x));
      return;
    }
    knots.push_back({x, y, s});
  };
  for (std::size_t i = 0; i < n; ++i) {
    const Piece& p = pieces[i];
    push(xs[i], p.at(xs[i]), p.slope);
    if (xe[i] > xs[i] + kTol) push(xe[i], p.at(xe[i]), p.slope);
    if (i + 1 == n || corner[i]) continue;
    const Piece& q = pieces[i + 1];
    const double e = p.x1;
    const double b = q.x0;
    const double h = window[i];
    if (b - e <= kTol || h <= 0) continue;
    const double ve = p.at(e);
    const double vb = q.y0;
    const double m = (vb - q.slope * h - (ve + p.slope * h)) / (b - e - 2 * h);
    if (orientation * m < 0)
      throw BuildError(fmt("monotonicity violated on [%.17g, %.17g]: splice middle slope %.17g has the wrong sign",
                           e, b, m));
    push(e + 2 * h, ve + p.slope * h + m * h, m);
    push(b - 2 * h, vb - q.slope * h - m * h, m);
  }
  return knots;
}

namespace {

Piece shifted(const Piece& p, double k, int degree) {
  return {p.x0 + k, p.x1 + k, p.y0 + k * degree, p.slope};
}

bool collinear(const Piece& p, const Piece& q) {
  return near(p.slope, q.slope, std::fabs(p.slope)) && near(p.at(q.x0), q.y0, std::fabs(q.y0));
}

}  // namespace

CircleMap build_from_spec(const MapSpec& spec) {
  const int d = spec.degree;
  if (d == 0) throw BuildError("degree must be nonzero");
  if (spec.smoothing_width < 0) throw BuildError("smoothing_width must be >= 0");
  const int o = d > 0 ? 1 : -1;

  std::optional<double> outer_slope;
  std::vector<Piece> pieces;
  auto anchored_value = [&](double x) -> std::optional<double> {
    for (const Anchor& a : spec.anchors) {
      const double k = std::round(a.x - x);
      if (std::fabs(a.x - x - k) <= 1e-12) return a.value - k * d;
    }
    return std::nullopt;
  };
  if (spec.linear_outside) {
    const LinearOutside& lo = *spec.linear_outside;
    if (!(lo.hi > lo.lo) || lo.hi - lo.lo >= 1.0) throw BuildError("linear_outside needs lo < hi < lo + 1");
    const auto glo = anchored_value(lo.lo);
    const auto ghi = anchored_value(lo.hi);
    if (!glo || !ghi) throw BuildError("linear_outside endpoints need anchored values");
    const double m = (*glo + d - *ghi) / (lo.lo + 1.0 - lo.hi);
    const bool ok = lo.strict ? o * m > lo.slope_bound : o * m >= lo.slope_bound;
    if (!ok)
      throw BuildError(fmt(lo.strict ? "outer slope bound violated: slope %.17g is not > %.17g"
                                     : "outer slope bound violated: slope %.17g is not >= %.17g",
                           o * m, lo.slope_bound));
    outer_slope = m;
    pieces.push_back({lo.hi, lo.lo + 1.0, *ghi, m});
  }
  for (const Anchor& a : spec.anchors) {
    if (a.radius < 0) throw BuildError(fmt("negative anchor radius at x=%.17g", a.x));
    double s;
    if (a.slope) {
      s = *a.slope;
    } else {
      const bool at_end = spec.linear_outside && (std::fabs(circle_diff(a.x, spec.linear_outside->lo)) <= 1e-12 ||
                                                  std::fabs(circle_diff(a.x, spec.linear_outside->hi)) <= 1e-12);
      if (!at_end) throw BuildError(fmt("free slope at x=%.17g is only allowed at a linear_outside endpoint", a.x));
      s = *outer_slope;
    }
    if (o * s < 0) throw BuildError(fmt("monotonicity violated: prescribed slope %.17g at x=%.17g", s, a.x));
    pieces.push_back({a.x - a.radius, a.x + a.radius, a.value - s * a.radius, s});
  }
  if (pieces.empty()) throw BuildError("spec has no constraints; use CircleMap::affine");

  for (Piece& p : pieces) p = shifted(p, -std::floor(p.x0), d);
  std::sort(pieces.begin(), pieces.end(), [](const Piece& p, const Piece& q) { return p.x0 < q.x0; });

  auto merge_into = [&](Piece& p, const Piece& q) {
    if (q.x0 < p.x1 - kTol || (q.x0 <= p.x1 + kTol && near(p.slope, q.slope, std::fabs(p.slope)))) {
      if (!collinear(p, q))
        throw BuildError(fmt("C1 mismatch at x=%.17g: slope %.17g required on one side, %.17g on the other",
                             std::max(p.x0, q.x0), p.slope, q.slope));
      p.x1 = std::max(p.x1, q.x1);
      return true;
    }
    return false;
  };
  std::vector<Piece> merged;
  for (const Piece& q : pieces) {
    if (!merged.empty() && merge_into(merged.back(), q)) continue;
    merged.push_back(q);
  }
  while (merged.size() > 1) {
    Piece wrapped = shifted(merged.front(), 1.0, d);
    Piece last = merged.back();
    if (!merge_into(last, wrapped)) break;
    merged.pop_back();
    merged.front() = shifted(last, -1.0, d);
  }
  if (merged.size() == 1 && merged.front().x1 - merged.front().x0 >= 1.0 - kTol) {
    const Piece& p = merged.front();
    if (!near(p.slope, d, std::abs(d)))
      throw BuildError(fmt("affine map must have slope equal to the degree: got %.17g", p.slope));
    return CircleMap::affine(d, p.at(0.0));
  }
  for (std::size_t i = 0; i < merged.size(); ++i) {
    const Piece& p = merged[i];
    const Piece next = i + 1 < merged.size() ? merged[i + 1] : shifted(merged.front(), 1.0, d);
    if (p.x1 > next.x0 + kTol) throw BuildError(fmt("overlapping affine constraints at x=%.17g", next.x0));
  }

  // Splice two copies plus one piece so that the retained period starts at a
  // piece whose predecessor has been seen.
  std::vector<Piece> chain;
  for (int k = 0; k < 2; ++k)
    for (const Piece& p : merged) chain.push_back(shifted(p, k, d));
  chain.push_back(shifted(merged.front(), 2.0, d));
  const std::vector<Knot> all = splice_pieces(chain, spec.smoothing_width, o);

  const double target = merged.front().x0 + 1.0;
  std::size_t begin = 0;
  while (begin < all.size() && all[begin].x < target - 1e-12) ++begin;
  if (begin == all.size()) throw BuildError("internal: could not locate period start");
  const double start = all[begin].x;
  std::vector<Knot> period;
  for (std::size_t i = begin; i < all.size() && all[i].x <= start + 1.0 + 1e-12; ++i)
    period.push_back({all[i].x - 1.0, all[i].y - d, all[i].slope});
  if (std::fabs(period.back().x - start) > 1e-12)
    throw BuildError("internal: period end not found");

  // Pin every anchor centre as a knot so fixed points evaluate exactly.
  const double x0 = period.front().x;
  for (const Anchor& a : spec.anchors) {
    const double k = std::floor(a.x - x0);
    const double xr = a.x - k;
    const double yr = a.value - k * d;
    const double s = a.slope ? *a.slope : *outer_slope;
    auto it = std::lower_bound(period.begin(), period.end(), xr, [](const Knot& kn, double x) { return kn.x < x; });
    if (it != period.end() && std::fabs(it->x - xr) <= 1e-12) {
      it->x = xr;
      it->y = yr;
    } else if (it != period.begin() && std::fabs((it - 1)->x - xr) <= 1e-12) {
      (it - 1)->x = xr;
      (it - 1)->y = yr;
    } else if (it != period.begin() && it != period.end()) {
      period.insert(it, {xr, yr, s});
    }
  }
  period.back() = {period.front().x + 1.0, period.front().y + d, period.front().slope};
  CircleMap map(d, std::move(period));

  for (const Anchor& a : spec.anchors) {
    const double v = map.lift(a.x);
    if (std::fabs(v - a.value) > 1e-12 * std::max(1.0, std::fabs(a.value)))
      throw BuildError(fmt("anchor at x=%.17g not honoured: value %.17g, wanted %.17g", a.x, v, a.value));
    const double want = a.slope ? *a.slope : *outer_slope;
    const double s = map.deriv(a.x);
    if (std::fabs(s - want) > 1e-10 * std::max(1.0, std::fabs(want)))
      throw BuildError(fmt("anchor at x=%.17g not honoured: slope %.17g, wanted %.17g", a.x, s, want));
  }
  return map;
}

}  // namespace tph
