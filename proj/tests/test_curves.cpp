#include <algorithm>
#include <cmath>

#include "doctest.h"
#include "tph/curves.hpp"

using namespace tph;

namespace {

const double kA = 0.125;

bool disjoint(std::vector<Arc> arcs) {
  std::sort(arcs.begin(), arcs.end(), [](const Arc& p, const Arc& q) { return p.lo < q.lo; });
  for (std::size_t i = 0; i + 1 < arcs.size(); ++i)
    if (arcs[i].hi > arcs[i + 1].lo + 1e-12) return false;
  return arcs.empty() || arcs.back().hi <= arcs.front().lo + 1 + 1e-12;
}

}  // namespace

TEST_CASE("linear control: vertical segment") {
  const TorusEndo lin = build_linear(4, 3);
  const CurveSegment c = integrate_centre_curve(lin, {0.3, 0.0}, 0.5, 1e-3);
  REQUIRE_FALSE(c.truncated);
  for (const Vec2& p : c.pts) CHECK(std::fabs(p.x - 0.3) <= 1e-12);
  CHECK(arclength(c) == doctest::Approx(0.5).epsilon(1e-9));
  CHECK_THROWS(integrate_centre_curve(lin, {0.3, 0.0}, 0.5, 2e-3));
}

TEST_CASE("curve from (a, 0) stays on the boundary circle") {
  const TorusEndo f = build_concrete();
  const CurveSegment c = integrate_centre_curve(f, {kA, 0.0}, 0.5, 1e-3);
  for (const Vec2& p : c.pts) CHECK(std::fabs(p.x - kA) <= 1e-6);
}

TEST_CASE("curve from (a/2, 0) has negative slope throughout") {
  const TorusEndo f = build_concrete();
  const CurveSegment c = integrate_centre_curve(f, {kA / 2, 0.0}, 0.3, 1e-3);
  REQUIRE(c.pts.size() > 10);
  for (std::size_t i = 0; i + 1 < c.pts.size(); ++i) {
    const Vec2 d = c.pts[i + 1] - c.pts[i];
    CHECK(d.x * d.y < 0);
    // Consecutive points within twice the step.
    CHECK(norm(d) <= 2 * c.step);
  }
  CHECK(c.tangency_residual <= 1e-3);
  CHECK(tangency_residual(f, c) <= 1e-3);
}

TEST_CASE("backward iterates of J^c anchored at the origin") {
  const TorusEndo f = build_concrete();
  const CentreAnnulus& X = f.annuli()[0];
  // Centre curve from the origin into (0, a).
  const CurveSegment jc = integrate_centre_curve(f, {0.0, 0.0}, 0.05, 1e-4, {1.0, -1.0});
  double prev = jc.pts.back().x;
  CHECK(prev > 0);
  for (int n = 1; n <= 60; ++n) {
    const CurveSegment b = backward_curve(f, jc, n, &X);
    CHECK(norm(b.pts.front()) <= 1e-12);
    if (n % 10 == 0 || n == 1) {
      CHECK(b.pts.back().x >= prev);
      CHECK(b.pts.back().x <= kA);
      prev = b.pts.back().x;
    }
  }
  CHECK(kA - prev <= 1e-4);
}

TEST_CASE("bounded boxes") {
  const TorusEndo f = build_concrete();
  const BoundsCheck b = bounded_box_check(f, f.annuli()[0], 0.1, 40);
  CHECK(b.pass);
  CHECK(b.observed <= b.r);
  CHECK(b.r > b.r / 3 + b.C);
  CHECK(b.r > b.r0);

  // Without shear the y-dynamics are y / 3 per backward step.
  const TorusEndo f0 = build_unsheared(f);
  const BoundsCheck b0 = bounded_box_check(f0, f0.annuli()[0], 0.1, 40);
  CHECK(b0.observed <= 0.1 + 1e-9);
}

TEST_CASE("branching witness") {
  const std::vector<BranchingReport> c = branching_scan(build_concrete());
  CHECK(std::any_of(c.begin(), c.end(), [](const BranchingReport& r) { return r.pass; }));
  for (const BranchingReport& r : c) {
    if (!r.pass) continue;
    CHECK(r.angle >= 0.1);
    CHECK(r.boundary_verticality <= 1e-9);
    CHECK(r.endpoint_gap <= 1e-4);
    CHECK(r.bounds.pass);
  }
  const std::vector<BranchingReport> g = branching_scan(build_general(3, 4, 2));
  CHECK(std::any_of(g.begin(), g.end(), [](const BranchingReport& r) { return r.pass; }));
  for (const BranchingReport& r : branching_scan(build_linear(4, 3))) CHECK_FALSE(r.pass);
}

TEST_CASE("incoherence witness") {
  for (const TorusEndo& f : {build_general(3, 4, 2), build_general(2, 2, 0), build_general(3, 4, 0)}) {
    const IncoherenceReport r = incoherence_witness(f);
    CHECK(r.applicable);
    CHECK(r.pass);
    CHECK(r.sign_left * r.sign_right == -1);
    CHECK(r.min_abs_slope > 0);
    REQUIRE(r.distances.size() == 4);
    for (std::size_t k = 0; k < r.distances.size(); ++k) {
      CHECK((r.slope_left[k] > 0 ? 1 : -1) == r.sign_left);
      CHECK((r.slope_right[k] > 0 ? 1 : -1) == r.sign_right);
    }
  }
  CHECK_FALSE(incoherence_witness(build_concrete()).applicable);
}

TEST_CASE("two nearby leaves inside X stay together") {
  const TorusEndo f = build_concrete();
  const UniquenessReport u = annulus_uniqueness(f, f.annuli()[0]);
  CHECK(u.pass);
  CHECK(u.inside);
  CHECK(u.separation <= 1e-4);
  CHECK(u.tangency_residual <= 1e-3);
}

TEST_CASE("Hausdorff distance to a polyline") {
  const std::vector<Vec2> line{{0, 0}, {1, 0}};
  CHECK(hausdorff_from({{0.5, 0.2}, {0.1, -0.1}}, line) == doctest::Approx(0.2));
  CHECK(hausdorff_from({{2.0, 0.0}}, line) == doctest::Approx(1.0));
  CHECK(hausdorff_from({{0.3, 0.0}}, {{0.0, 0.0}}) == doctest::Approx(0.3));
}

TEST_CASE("preimage lamination") {
  const TorusEndo f = build_concrete();
  const std::vector<AnnulusFamily> levels = preimage_lamination(f.g(), Arc{-kA, kA}, 8);
  REQUIRE(levels.size() == 9);
  REQUIRE(levels[0].intervals.size() == 1);
  CHECK(levels[0].intervals[0].lo == -kA);

  REQUIRE(levels[1].intervals.size() == 4);
  int equal = 0;
  for (const Arc& a : levels[1].intervals)
    if (std::fabs(circle_diff(a.lo, -kA)) < 1e-12 && std::fabs(circle_diff(a.hi, kA)) < 1e-12) ++equal;
  CHECK(equal == 1);

  std::size_t count = 1;
  for (int n = 1; n <= 5; ++n) {
    count *= 4;
    CHECK(levels[n].intervals.size() == count);
    CHECK(disjoint(levels[n].intervals));
    // Each level-n interval maps into a level-(n - 1) interval.
    for (const Arc& a : levels[n].intervals) {
      const double lo = f.g().eval(a.lo), hi = f.g().eval(a.hi);
      bool inside = false;
      for (const Arc& p : levels[n - 1].intervals) {
        const double dl = circle_diff(lo, p.lo), dh = circle_diff(hi, p.hi);
        inside = inside || (dl >= -1e-10 && dh <= 1e-10 && dl <= p.length() + 1e-10);
      }
      CHECK(inside);
    }
  }
  CHECK(levels[8].max_gap <= 0.01);
  for (std::size_t n = 1; n < levels.size(); ++n) CHECK(levels[n].max_gap <= levels[n - 1].max_gap);
}

TEST_CASE("property: a child component is X contracted by the outer slope") {
  const TorusEndo f = build_concrete();
  const std::vector<AnnulusFamily> levels = preimage_lamination(f.g(), Arc{-kA, kA}, 1);
  const double s_out = f.g().deriv(0.5);
  for (const Arc& a : levels[1].intervals) {
    if (std::fabs(circle_diff(a.lo, -kA)) < 1e-12) continue;
    CHECK(a.length() / (2 * kA) == doctest::Approx(1 / s_out).epsilon(0.05));
  }
}

TEST_CASE("max_gap") {
  CHECK(max_gap({}) == 1.0);
  CHECK(max_gap({{0.0, 0.5}}) == doctest::Approx(0.5));
  CHECK(max_gap({{0.0, 0.25}, {0.5, 0.75}}) == doctest::Approx(0.25));
  CHECK(max_gap({{0.9, 1.2}, {0.3, 0.4}}) == doctest::Approx(0.5));
}
