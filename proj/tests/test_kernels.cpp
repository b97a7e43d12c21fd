#include <cmath>

#include "doctest.h"
#include "tph/kernels.hpp"
#include "tph/regions.hpp"

using namespace tph;

namespace {

UnstableCones concrete_cones(const TorusEndo& f) {
  const double eps = find_epsilon(f).eps;
  const Regions regions(f);
  return UnstableCones(f, eps, find_delta(f, regions, eps).delta);
}

}  // namespace

TEST_CASE("serial and parallel invariance reports agree") {
  const TorusEndo f = build_concrete();
  const UnstableCones cones = concrete_cones(f);
  const InvarianceReport s = certify_invariance(f, cones.field(), 96, Exec::serial);
  const InvarianceReport p = certify_invariance(f, cones.field(), 96, Exec::parallel);
  CHECK(s.pass == p.pass);
  CHECK(s.min_margin == p.min_margin);
  CHECK(s.min_adjusted_margin == p.min_adjusted_margin);
  CHECK(s.lipschitz == p.lipschitz);
  CHECK(s.failing_count == p.failing_count);
  CHECK(s.worst.x == p.worst.x);
  CHECK(s.worst.y == p.worst.y);
}

TEST_CASE("failing cells are listed for a wrong field") {
  const TorusEndo f = build_concrete();
  const double eps = find_epsilon(f).eps;
  const ConeField wrong{"C_eps", [&](Vec2) { return cone_eps(eps, 1); }};
  const InvarianceReport r = certify_invariance(f, wrong, 64, Exec::parallel);
  CHECK_FALSE(r.pass);
  CHECK(r.failing_count > 0);
  REQUIRE_FALSE(r.failing.empty());
  for (const FailCell& c : r.failing) {
    CHECK(c.p.x == doctest::Approx((c.i + 0.5) / 64));
    CHECK(c.p.y == doctest::Approx((c.j + 0.5) / 64));
  }
  const InvarianceReport s = certify_invariance(f, wrong, 64, Exec::serial);
  CHECK(s.failing_count == r.failing_count);
  REQUIRE(s.failing.size() == r.failing.size());
  for (std::size_t k = 0; k < s.failing.size(); ++k) {
    CHECK(s.failing[k].i == r.failing[k].i);
    CHECK(s.failing[k].j == r.failing[k].j);
  }
}

TEST_CASE("global bound is below the sampled minimum") {
  const TorusEndo f = build_concrete();
  const UnstableCones cones = concrete_cones(f);
  const InvarianceReport r = certify_invariance(f, cones.field(), 64, Exec::parallel);
  CHECK(r.global_bound <= r.min_margin);
  CHECK(r.min_adjusted_margin <= r.min_margin);
  CHECK(r.lipschitz >= 0);
}

TEST_CASE("serial and parallel expansion agree") {
  const TorusEndo f = build_concrete();
  const UnstableCones cones = concrete_cones(f);
  const ExpansionReport s = certify_expansion(f, cones.field(), 20, 48, Exec::serial);
  const ExpansionReport p = certify_expansion(f, cones.field(), 20, 48, Exec::parallel);
  CHECK(s.k == p.k);
  CHECK(s.m == p.m);
  CHECK(s.min_growth == p.min_growth);
  CHECK_THROWS_AS(certify_expansion(f, cones.field(), 0, 8, Exec::serial), std::invalid_argument);
}

TEST_CASE("slope grid layout and determinism") {
  const TorusEndo f = build_concrete();
  const int n = 16;
  const std::vector<SlopeClass> s = slope_grid(f, n, Exec::serial);
  const std::vector<SlopeClass> p = slope_grid(f, n, Exec::parallel);
  CHECK(s == p);
  // Index i * n + j is the cell at x = (i + 0.5) / n.
  for (int i = 0; i < n; i += 5)
    for (int j = 0; j < n; j += 3) {
      const CentreSample c = centre_direction_adaptive(f, {(i + 0.5) / n, (j + 0.5) / n});
      CHECK(classify(c) == s[std::size_t(i) * n + j]);
    }
}

TEST_CASE("sample_field matches pointwise estimates") {
  const TorusEndo f = build_general(3, 4, 2);
  const std::vector<Vec2> pts{{0.1, 0.2}, {0.9, 0.4}, {0.5, 0.5}};
  const std::vector<CentreSample> s = sample_field(f, pts, Exec::parallel);
  REQUIRE(s.size() == pts.size());
  for (std::size_t k = 0; k < pts.size(); ++k) {
    const CentreSample c = centre_direction_adaptive(f, pts[k]);
    CHECK(s[k].direction.x == c.direction.x);
    CHECK(s[k].direction.y == c.direction.y);
    CHECK(s[k].n_used == c.n_used);
  }
}
