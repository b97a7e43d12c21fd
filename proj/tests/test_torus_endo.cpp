#include <algorithm>
#include <cmath>
#include <random>

#include "doctest.h"
#include "tph/torus_endo.hpp"

using namespace tph;

namespace {

const double kA = 0.125;

double max_entry_diff(const Mat2& m, const Mat2& n) {
  return max_abs_entry({m.a - n.a, m.b - n.b, m.c - n.c, m.d - n.d});
}

// Centered differences of the plane lift.
Mat2 fd_derivative(const TorusEndo& f, Vec2 p, double h = 1e-6) {
  const Vec2 dx = (1.0 / (2 * h)) * (f.apply_lift(p + Vec2{h, 0}) - f.apply_lift(p - Vec2{h, 0}));
  const Vec2 dy = (1.0 / (2 * h)) * (f.apply_lift(p + Vec2{0, h}) - f.apply_lift(p - Vec2{0, h}));
  return {dx.x, dy.x, dx.y, dy.y};
}

}  // namespace

TEST_CASE("concrete linearisation and invariant circles") {
  const TorusEndo f = build_concrete();
  CHECK(f.B() == IntMat2{4, 0, 2, 3});
  for (double y : {0.0, 0.2, 0.71}) {
    const Vec2 p = f.apply_lift({0.0, y});
    CHECK(p.x == doctest::Approx(0.0).epsilon(1e-15));
    CHECK(p.y == doctest::Approx(3 * y).epsilon(1e-14));
    const Vec2 q = f.apply_lift({kA, y});
    CHECK(std::fabs(q.x - kA) <= 1e-12);
    CHECK(q.y == doctest::Approx(3 * y + 1).epsilon(1e-12));
    CHECK(std::fabs(f.apply_lift({-kA, y}).x + kA) <= 1e-12);
  }
}

TEST_CASE("general linearisations") {
  CHECK(build_general(3, 4, 2).B() == IntMat2{4, 0, 2, 3});
  CHECK(build_general(2, 2, 0).B() == IntMat2{2, 0, 0, 2});
  CHECK(build_general(3, 4, 0).B() == IntMat2{4, 0, 0, 3});
  CHECK(build_general(3, -3, 0).B() == IntMat2{-3, 0, 0, 3});
  CHECK(build_general(3, -3, 0).period() == 2);
  CHECK(build_linear(4, 3).B() == IntMat2{4, 0, 0, 3});
}

TEST_CASE("negative-mu build centres I on the period-two orbit of x -> -3x") {
  // Exhaustive search over denominators dividing mu^2 - 1 = 8.
  std::vector<double> orbit;
  for (int k = 0; k < 8; ++k) {
    const double x = k / 8.0;
    const double gx = wrap01(-3 * x);
    if (std::fabs(gx - x) > 1e-12 && std::fabs(wrap01(-3 * gx) - x) < 1e-12) orbit.push_back(x);
  }
  REQUIRE(orbit.size() >= 2);
  CHECK(std::find(orbit.begin(), orbit.end(), 0.125) != orbit.end());
  CHECK(std::find(orbit.begin(), orbit.end(), 0.625) != orbit.end());
  const TorusEndo f = build_general(3, -3, 0);
  CHECK(std::fabs(circle_diff(f.info().centre, 0.125)) < 1e-12);
}

TEST_CASE("unsupported builds") {
  CHECK_THROWS_AS(build_general(3, -2, 0), BuildError);
  CHECK_THROWS_AS(build_general(3, 4, -1), BuildError);
  CHECK_THROWS_AS(build_general(1, 4, 0), BuildError);
  CHECK_THROWS_AS(build_general(3, 1, 0), BuildError);
}

TEST_CASE("derivative at Lambda and on K") {
  const TorusEndo f = build_concrete();
  const Mat2 d0 = f.derivative({0.0, 0.4});
  CHECK(d0.a == doctest::Approx(0.5));
  CHECK(d0.b == 0.0);
  CHECK(d0.c == doctest::Approx(4.0));
  CHECK(d0.d == 3.0);
  const Mat2 dk = f.derivative({0.5, 0.4});
  CHECK(dk.a == doctest::Approx(5.0));
  CHECK(dk.c == doctest::Approx(0.0));
  CHECK(dk.d == 3.0);
}

TEST_CASE("unsheared build is (g(x), 3y)") {
  const TorusEndo f = build_concrete();
  const TorusEndo f0 = build_unsheared(f);
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int k = 0; k < 200; ++k) {
    const Vec2 p{u(rng), u(rng)};
    const Vec2 q = f0.apply(p);
    CHECK(std::fabs(circle_diff(q.x, f.g().eval(p.x))) <= 1e-15);
    CHECK(std::fabs(circle_diff(q.y, 3 * p.y)) <= 1e-14);
    const Mat2 di = f0.dinverse(q, 0);
    const Vec2 pre = f0.local_inverse(q, 0);
    CHECK(di.b == 0.0);
    CHECK(di.c == doctest::Approx(0.0));
    CHECK(di.a == doctest::Approx(1.0 / f.g().deriv(pre.x)));
    CHECK(di.d == doctest::Approx(1.0 / 3));
  }
}

TEST_CASE("property: lift equivariance and distance to the linear map") {
  for (const TorusEndo& f : {build_concrete(), build_general(3, 4, 2), build_general(3, -3, 0)}) {
    const IntMat2& B = f.B();
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    std::uniform_int_distribution<int> n(-3, 3);
    for (int k = 0; k < 10000; ++k) {
      const Vec2 p{u(rng), u(rng)};
      const Vec2 lin{B.a * p.x + B.b * p.y, B.c * p.x + B.d * p.y};
      CHECK(norm(f.apply_lift(p) - lin) <= f.dist_to_linear());
      if (k < 500) {
        const int i = n(rng), j = n(rng);
        const Vec2 d = f.apply_lift(p + Vec2{double(i), double(j)}) - f.apply_lift(p);
        CHECK(d.x == doctest::Approx(double(B.a * i + B.b * j)).epsilon(1e-12));
        CHECK(d.y == doctest::Approx(double(B.c * i + B.d * j)).epsilon(1e-12));
      }
    }
  }
}

TEST_CASE("property: winding matrix equals B") {
  for (const TorusEndo& f : {build_concrete(), build_general(2, 2, 0), build_general(3, 4, 2),
                             build_general(3, -3, 0), build_linear(4, 3)}) {
    const Vec2 p{0.137, 0.291};
    const Vec2 ex = f.apply_lift(p + Vec2{1, 0}) - f.apply_lift(p);
    const Vec2 ey = f.apply_lift(p + Vec2{0, 1}) - f.apply_lift(p);
    CHECK(IntMat2{std::lround(ex.x), std::lround(ey.x), std::lround(ex.y), std::lround(ey.y)} == f.B());
  }
}

TEST_CASE("property: derivative matches finite differences") {
  for (const TorusEndo& f : {build_concrete(), build_general(3, 4, 2)}) {
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int k = 0; k < 1000; ++k) {
      const Vec2 p{u(rng), u(rng)};
      CHECK(max_entry_diff(f.derivative(p), fd_derivative(f, p)) <= 1e-5);
    }
  }
}

TEST_CASE("property: local inverse branches") {
  const TorusEndo f = build_concrete();
  std::mt19937_64 rng(19);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int k = 0; k < 1000; ++k) {
    const Vec2 q{u(rng), u(rng)};
    for (int b = 0; b < 4; ++b) {
      const Vec2 p = f.local_inverse(q, b);
      const Vec2 back = f.apply(p);
      CHECK(std::fabs(circle_diff(back.x, q.x)) <= 1e-12);
      CHECK(std::fabs(circle_diff(back.y, q.y)) <= 1e-12);
      CHECK(max_entry_diff(f.derivative(p) * f.dinverse(q, b), Mat2::identity()) <= 1e-10);
    }
  }
  CHECK_THROWS_AS(f.local_inverse({0.1, 0.1}, 4), std::out_of_range);
  CHECK_THROWS_AS(f.local_inverse({0.1, 0.1}, -1), std::out_of_range);
}

TEST_CASE("inverse derivative keeps the open fourth quadrant on X") {
  const TorusEndo f = build_concrete();
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> u(-kA, kA), v(0.0, 1.0);
  for (int k = 0; k < 1000; ++k) {
    const Vec2 p{u(rng), v(rng)};
    const Mat2 di = inverse(f.derivative(p));
    const Vec2 w = di * Vec2{v(rng) + 1e-3, -v(rng) - 1e-3};
    CHECK(w.x > 0);
    CHECK(w.y < 0);
  }
}

TEST_CASE("preimage of K lies in K") {
  const TorusEndo f = build_concrete();
  // K projects to [a, 1 - a]; its preimage is K minus the three non-X preimage arcs.
  const std::vector<Arc> pre_x = f.g().preimage_interval({-kA, kA});
  for (double x = 0.0; x < 1.0; x += 1.0 / 4096) {
    const bool in_k = f.annulus_of(x) < 0;
    const bool image_in_k = f.annulus_of(f.g().eval(x)) < 0;
    if (!in_k) {
      // X maps into X.
      CHECK_FALSE(image_in_k);
      continue;
    }
    bool in_child = false;
    for (const Arc& a : pre_x) {
      const double d = x - a.lo - std::floor(x - a.lo);
      in_child = in_child || (d > 0 && d < a.length());
    }
    CHECK(image_in_k == !in_child);
  }
}
