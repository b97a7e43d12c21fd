#include <cmath>
#include <random>

#include "doctest.h"
#include "tph/centre_field.hpp"
#include "tph/cones.hpp"
#include "tph/curves.hpp"
#include "tph/kernels.hpp"
#include "tph/regions.hpp"

using namespace tph;

namespace {

const double kA = 0.125;

// Inverse iteration: (D f^n)^-1 applied to a random vector, one inverse
// factor at a time, lines up with the least-expanded direction of D f^n.
Vec2 power_oracle(const TorusEndo& f, Vec2 p, int n, std::uint64_t seed) {
  std::vector<Mat2> chain;
  Vec2 q = p;
  for (int k = 0; k < n; ++k) {
    chain.push_back(f.derivative(q));
    q = f.apply(q);
  }
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> z;
  Vec2 v = normalized({z(rng), z(rng)});
  for (int k = n - 1; k >= 0; --k) v = normalized(inverse(chain[k]) * v);
  return v;
}

double slope(Vec2 d) { return d.y / d.x; }

}  // namespace

TEST_CASE("svd2 against the eigen-decomposition of M^T M") {
  std::mt19937_64 rng(43);
  std::uniform_real_distribution<double> e(-4.0, 4.0);
  for (int k = 0; k < 2000; ++k) {
    const Mat2 m{e(rng), e(rng), e(rng), e(rng)};
    const Svd2 s = svd2(m);
    const double tr = m.a * m.a + m.b * m.b + m.c * m.c + m.d * m.d;
    const double dt = det(m) * det(m);
    const double disc = std::sqrt(std::max(0.0, tr * tr / 4 - dt));
    CHECK(s.s_max * s.s_max == doctest::Approx(tr / 2 + disc).epsilon(1e-9));
    CHECK(s.s_min * s.s_min == doctest::Approx(tr / 2 - disc).scale(tr).epsilon(1e-9));
    CHECK(norm(m * s.v_max) == doctest::Approx(s.s_max).epsilon(1e-9));
    CHECK(std::fabs(dot(s.v_max, s.v_min)) <= 1e-12);
  }
}

TEST_CASE("linear control: vertical at depth one") {
  const TorusEndo lin = build_linear(4, 3);
  for (Vec2 p : {Vec2{0.1, 0.2}, Vec2{0.7, 0.9}}) {
    const CentreSample s = centre_direction(lin, p, 1);
    CHECK(std::fabs(s.direction.x) <= 1e-15);
    CHECK(invariance_check(lin, p, 10) <= 1e-12);
    CHECK(classify(s) == SlopeClass::vertical);
  }
  CHECK_THROWS_AS(centre_direction(lin, {0.1, 0.1}, 0), std::invalid_argument);
}

TEST_CASE("boundary circle of X is vertical") {
  const TorusEndo f = build_concrete();
  for (double x : {kA, -kA}) {
    const CentreSample s = boundary_direction(f, {wrap01(x), 0.5});
    CHECK(std::fabs(s.direction.x) <= 1e-9);
  }
  const Mat2 d = f.derivative({kA, 0.5});
  CHECK(std::fabs(d.c) <= 1e-12);
}

TEST_CASE("negative slope at (-a/2, 0.3), cross-checked by inverse power iteration") {
  const TorusEndo f = build_concrete();
  const Vec2 p{-kA / 2, 0.3};
  const CentreSample s = centre_direction(f, p, 30);
  REQUIRE_FALSE(s.undetermined);
  CHECK(slope(s.direction) < 0);
  const Vec2 o = power_oracle(f, p, 30, 47);
  CHECK(slope(o) < 0);
  CHECK(line_angle(o, s.direction) <= 1e-8);
}

TEST_CASE("property: Df-invariance residual at depth 40") {
  const TorusEndo f = build_concrete();
  std::mt19937_64 rng(53);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  int determined = 0;
  for (int k = 0; k < 1000; ++k) {
    const Vec2 p{u(rng), u(rng)};
    bool undetermined = false;
    const double r = invariance_check(f, p, 40, &undetermined);
    if (undetermined) continue;
    ++determined;
    CHECK(r <= 1e-6);
  }
  CHECK(determined > 900);
}

TEST_CASE("property: depths n and n + 5 agree away from the boundary circles") {
  const TorusEndo f = build_concrete();
  std::mt19937_64 rng(59);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  auto near_boundary = [&](Vec2 p) {
    Vec2 q = p;
    for (int k = 0; k < 60; ++k) {
      for (double b : {kA, -kA})
        if (std::fabs(circle_diff(q.x, b)) < 1e-3) return true;
      q = f.apply(q);
    }
    return false;
  };
  int tested = 0;
  for (int k = 0; k < 1000; ++k) {
    const Vec2 p{u(rng), u(rng)};
    if (near_boundary(p)) continue;
    const CentreSample a = centre_direction(f, p, 60);
    const CentreSample b = centre_direction(f, p, 65);
    if (a.undetermined || b.undetermined) continue;
    ++tested;
    CHECK(line_angle(a.direction, b.direction) <= 1e-6);
  }
  CHECK(tested > 500);
}

TEST_CASE("residual decays geometrically inside X") {
  const TorusEndo f = build_concrete();
  const Vec2 p{-kA / 3, 0.6};
  // Fit log residual against n over 10..40.
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int m = 0;
  for (int n = 10; n <= 40; n += 2) {
    const double r = centre_direction(f, p, n).residual;
    if (r <= 0) continue;
    const double y = std::log(r);
    sx += n;
    sy += y;
    sxx += double(n) * n;
    sxy += n * y;
    ++m;
  }
  REQUIRE(m >= 5);
  const double rate = (m * sxy - sx * sy) / (m * sxx - sx * sx);
  CHECK(std::exp(rate) < 1.0);
}

TEST_CASE("property: E^c is strictly outside C^u") {
  const TorusEndo f = build_concrete();
  const double eps = find_epsilon(f).eps;
  const Regions regions(f);
  const UnstableCones cones(f, eps, find_delta(f, regions, eps).delta);
  std::mt19937_64 rng(61);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int k = 0; k < 1000; ++k) {
    const Vec2 p{u(rng), u(rng)};
    const CentreSample s = centre_direction_adaptive(f, p);
    if (s.undetermined) continue;
    CHECK(cone_contains(cones.at(p), s.direction).margin < 0);
  }
}

TEST_CASE("slope classes") {
  const TorusEndo f = build_concrete();
  const int n = 64;
  const std::vector<SlopeClass> grid = slope_grid(f, n, Exec::parallel);
  REQUIRE(grid.size() == std::size_t(n) * n);
  int neg = 0;
  for (int i = 0; i < n; ++i) {
    const double x = (i + 0.5) / n;
    const double d = std::fabs(circle_diff(x, 0.0));
    if (d >= kA || d < 1e-9) continue;
    for (int j = 0; j < n; ++j) {
      const SlopeClass c = grid[std::size_t(i) * n + j];
      if (c == SlopeClass::undetermined) continue;
      CHECK(c == SlopeClass::neg);
      ++neg;
    }
  }
  CHECK(neg > 0);

  // Opposite signs on the two annuli of the general build; X1 is the negative one here.
  const TorusEndo g = build_general(3, 4, 2);
  const std::vector<SlopeClass> gg = slope_grid(g, n, Exec::parallel);
  for (int annulus = 0; annulus < 2; ++annulus) {
    const CentreAnnulus& A = g.annuli()[annulus];
    const SlopeClass want = annulus == 0 ? SlopeClass::neg : SlopeClass::pos;
    int seen = 0;
    for (int i = 0; i < n; ++i) {
      const double x = (i + 0.5) / n;
      if (g.annulus_of(x) != annulus || std::fabs(circle_diff(x, A.centre)) < 1e-9) continue;
      for (int j = 0; j < n; ++j) {
        const SlopeClass c = gg[std::size_t(i) * n + j];
        if (c == SlopeClass::undetermined) continue;
        CHECK(c == want);
        ++seen;
      }
    }
    CHECK(seen > 0);
  }
}

TEST_CASE("to_string of slope classes") {
  CHECK(to_string(SlopeClass::neg) == "neg");
  CHECK(to_string(SlopeClass::pos) == "pos");
  CHECK(to_string(SlopeClass::vertical) == "vertical");
  CHECK(to_string(SlopeClass::undetermined) == "undetermined");
}
