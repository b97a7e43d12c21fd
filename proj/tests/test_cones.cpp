#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "tph/cones.hpp"
#include "tph/kernels.hpp"
#include "tph/regions.hpp"

using namespace tph;

namespace {

constexpr double kPi = std::numbers::pi;

// Direction angle test, independent of the quadratic form.
bool between(const Cone& c, Vec2 u) {
  const double t1 = std::atan2(c.b1.y, c.b1.x);
  const double w = width(c);
  const double t = mod_pi(std::atan2(u.y, u.x) - t1);
  return t < w;
}

double boundary_error(const Cone& p, const Cone& q) {
  return std::max(line_angle(p.b1, q.b1), line_angle(p.b2, q.b2));
}

}  // namespace

TEST_CASE("C_eps membership") {
  const Cone c = cone_eps(0.1, 1);
  CHECK(cone_contains(c, {1.0, 1.0}).side == Side::inside);
  CHECK(std::fabs(cone_contains(c, {1.0, -0.1}).margin) <= 1e-14);
  CHECK(cone_contains(c, {1.0, -0.1}).side == Side::boundary);
  const ConeTest out = cone_contains(c, {-1.0, 1.0});
  CHECK(out.side == Side::outside);
  CHECK(out.margin < 0);
  CHECK_THROWS_AS(cone_contains(c, {0.0, 0.0}), ConeError);
}

TEST_CASE("make_cone rejects degenerate widths") {
  CHECK_THROWS_AS(make_cone({1, 0}, {1, 0}), ConeError);
  CHECK_THROWS_AS(make_cone({1, 0}, {-1, 0}), ConeError);
  CHECK(width(make_cone({1, 0}, {0, 1})) == doctest::Approx(kPi / 2));
}

TEST_CASE("map_cone") {
  const Cone c = cone_eps(0.05, 1);
  CHECK(boundary_error(map_cone(Mat2::identity(), c), c) <= 1e-15);
  // Df on Lambda.
  const Cone img = map_cone({0.5, 0.0, 4.0, 3.0}, c);
  CHECK(containment_margin(img, c) > 0);
  const Cone b = cone_delta(0.1);
  CHECK(containment_margin(map_cone(Mat2::diag(5, 3), b), b) > 0);
  CHECK_THROWS_AS(map_cone({1, 2, 2, 4}, c), ConeError);
}

TEST_CASE("property: form sign agrees with the angular test") {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> ang(0.0, 2 * kPi), w(0.05, kPi - 0.05);
  for (int k = 0; k < 10000; ++k) {
    const double t = ang(rng);
    const Cone c = make_cone(direction(t), direction(t + w(rng)));
    const Vec2 u = direction(ang(rng));
    const ConeTest r = cone_contains(c, u, 1e-12);
    if (r.side == Side::boundary) continue;
    CHECK((r.side == Side::inside) == between(c, u));
    // The exclusion margin agrees in sign.
    CHECK((exclusion_margin(c, u) < 0) == between(c, u));
  }
}

TEST_CASE("property: map_cone composes") {
  std::mt19937_64 rng(37);
  std::uniform_real_distribution<double> e(-3.0, 3.0), ang(0.0, kPi);
  for (int k = 0; k < 2000; ++k) {
    const Mat2 m1{e(rng), e(rng), e(rng), e(rng)}, m2{e(rng), e(rng), e(rng), e(rng)};
    if (std::fabs(det(m1)) < 0.1 || std::fabs(det(m2)) < 0.1) continue;
    const double t = ang(rng);
    const Cone c = make_cone(direction(t), direction(t + 0.7));
    CHECK(boundary_error(map_cone(m2 * m1, c), map_cone(m2, map_cone(m1, c))) <= 1e-10);
  }
}

TEST_CASE("quadratic form round trip") {
  for (const Cone& c : {cone_eps(0.25, 1), cone_eps(0.25, -1), cone_delta(0.01)}) {
    const auto back = to_cone(to_form(c));
    REQUIRE(back.has_value());
    CHECK(std::fabs(width(*back) - width(c)) <= 1e-12);
    CHECK(line_angle(cone_axis(*back), cone_axis(c)) <= 1e-12);
  }
  CHECK_FALSE(to_cone({1.0, 0.0, 1.0}).has_value());
}

TEST_CASE("blend endpoints and midpoint") {
  const Cone p = cone_delta(0.01), q = cone_eps(0.25, 1);
  CHECK(boundary_error(blend(p, q, 0.0), p) == 0.0);
  CHECK(boundary_error(blend(p, q, 1.0), q) == 0.0);
  const Cone m = blend(p, q, 0.5);
  CHECK(containment_margin(p, m) > 0);
  CHECK(containment_margin(m, q) > 0);
}

TEST_CASE("find_epsilon on the concrete build") {
  const TorusEndo f = build_concrete();
  const EpsilonResult r = find_epsilon(f);
  CHECK(r.eps > 0);
  CHECK(r.margin > 0);
  CHECK(r.growth > 1 + 1e-3);
  // Direct certification at the returned eps over a circle sweep of the core.
  const CentreAnnulus& A = f.annuli()[0];
  const Cone c = cone_eps(r.eps, shear_sign(f, A));
  for (int i = 0; i < 256; ++i) {
    const double x = A.centre + A.core_radius * (2.0 * (i + 0.5) / 256 - 1);
    CHECK(containment_margin(map_cone(f.step_derivative({x, 0.3}), c), c) > 0);
  }
  // Growth witness on Lambda: phi'(0)^2 + g'(0)^2 > 1.
  const Mat2 d = f.derivative({0.0, 0.0});
  CHECK(d.c * d.c + d.a * d.a == doctest::Approx(16.25));
}

TEST_CASE("find_epsilon fails without shear") {
  CHECK_THROWS_AS(find_epsilon(build_unsheared(build_concrete())), ConeError);
}

TEST_CASE("pulled-back cones on V") {
  const TorusEndo f = build_concrete();
  const double eps = find_epsilon(f).eps;
  const Regions regions(f);
  const DeltaResult d = find_delta(f, regions, eps);
  const UnstableCones cones(f, eps, d.delta);
  REQUIRE_FALSE(regions.strips().empty());
  const StripV& v = regions.strips()[0];
  for (int i = 0; i < 1000; ++i) {
    const double x = v.lo + (v.hi - v.lo) * (i + 0.5) / 1000;
    const Cone cn = cones.cn(0, {x, 0.3});
    CHECK(containment_margin(cone_delta(d.delta), cn) > 0);
  }
  // N = 0 at the core gives C_eps itself.
  const CentreAnnulus& A = f.annuli()[0];
  const Cone core = pullback_cone(f, {0, A.centre - A.core_radius / 2, A.centre + A.core_radius / 2, 0, 0, 0}, eps,
                                  shear_sign(f, A), {A.centre, 0.3});
  CHECK(boundary_error(core, cone_eps(eps, shear_sign(f, A))) <= 1e-12);
}

TEST_CASE("property: C^u coincides with B_delta off V and with C^N on F(V)") {
  const TorusEndo f = build_concrete();
  const double eps = find_epsilon(f).eps;
  const Regions regions(f);
  const UnstableCones cones(f, eps, find_delta(f, regions, eps).delta);
  std::mt19937_64 rng(41);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  int off_v = 0, on_image = 0;
  for (int k = 0; k < 4000; ++k) {
    const Vec2 p{u(rng), u(rng)};
    const Cone c = cones.at(p);
    if (!regions.in_V(p.x)) {
      CHECK(boundary_error(c, cone_delta(cones.delta())) <= 1e-10);
      ++off_v;
    } else if (regions.in_image(p.x)) {
      CHECK(boundary_error(c, cones.cn(regions.strip_of(p.x), p)) <= 1e-10);
      ++on_image;
    }
  }
  CHECK(off_v > 0);
  CHECK(on_image > 0);
}

TEST_CASE("grid certification") {
  const TorusEndo f = build_concrete();
  const double eps = find_epsilon(f).eps;
  const Regions regions(f);
  const UnstableCones cones(f, eps, find_delta(f, regions, eps).delta);
  const InvarianceReport r = certify_invariance(f, cones.field(), 128, Exec::parallel);
  CHECK(r.pass);
  CHECK(r.min_margin > 0);

  // The unsheared map has a diagonal derivative off X and keeps the same field.
  const TorusEndo f0 = build_unsheared(f);
  const ConeField horizontal{"B", [&](Vec2) { return cone_delta(cones.delta()); }};
  CHECK(certify_invariance(f0, horizontal, 64, Exec::serial, [&](Vec2 p) { return f0.in_UK(p.x); }).pass);

  // C_eps everywhere fails on U_K.
  const ConeField wrong{"C_eps", [&](Vec2) { return cone_eps(eps, 1); }};
  const InvarianceReport w = certify_invariance(f, wrong, 128, Exec::parallel, [&](Vec2 p) { return f.in_UK(p.x); });
  CHECK_FALSE(w.pass);
  CHECK(w.min_margin < 0);
}

TEST_CASE("property: refining the grid keeps a pass") {
  const TorusEndo f = build_concrete();
  const double eps = find_epsilon(f).eps;
  const Regions regions(f);
  const UnstableCones cones(f, eps, find_delta(f, regions, eps).delta);
  const InvarianceReport coarse = certify_invariance(f, cones.field(), 64, Exec::parallel);
  const InvarianceReport fine = certify_invariance(f, cones.field(), 128, Exec::parallel);
  if (coarse.pass) CHECK(fine.pass);
}

TEST_CASE("expansion") {
  const TorusEndo lin = build_linear(4, 3);
  const ConeField horizontal{"B", [](Vec2) { return cone_delta(0.1); }};
  const ExpansionReport r = certify_expansion(lin, horizontal, 5, 32, Exec::serial);
  CHECK(r.k == 1);
  CHECK(r.growth >= 3);

  const TorusEndo f = build_concrete();
  const double eps = find_epsilon(f).eps;
  const Regions regions(f);
  const UnstableCones cones(f, eps, find_delta(f, regions, eps).delta);
  const ExpansionReport e = certify_expansion(f, cones.field(), 20, 64, Exec::parallel);
  CHECK(e.pass);
  CHECK(e.k >= 1);
  CHECK(e.k <= 20);
  CHECK(e.growth >= 1.05);
}
