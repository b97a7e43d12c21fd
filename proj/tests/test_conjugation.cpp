#include <algorithm>
#include <random>

#include "doctest.h"
#include "tph/conjugation.hpp"

using namespace tph;

namespace {

IntMat2 elementary(int which, std::int64_t k) {
  return which == 0 ? IntMat2{1, k, 0, 1} : IntMat2{1, 0, k, 1};
}

bool lower_triangular(const IntMat2& m) { return m.b == 0; }

}  // namespace

TEST_CASE("worked conjugation of [[5,2],[2,2]]") {
  const IntMat2 A{5, 2, 2, 2};
  const ConjugationResult r = conjugate_to_triangular(A);
  CHECK(r.P == IntMat2{1, -2, 0, 1});
  CHECK(r.B == IntMat2{1, 0, 2, 6});
  // P A P^-1 = B, checked as P A = B P.
  CHECK(r.P * A == r.B * r.P);
  CHECK(std::abs(r.P.det()) == 1);
}

TEST_CASE("already triangular input keeps P = I") {
  for (const IntMat2& A : {IntMat2{4, 0, 2, 3}, IntMat2{2, 0, 0, 2}, IntMat2{-3, 0, 0, 3}}) {
    const ConjugationResult r = conjugate_to_triangular(A);
    CHECK(r.P == IntMat2::identity());
    CHECK(r.B == A);
  }
}

TEST_CASE("eigenvector is primitive and sent to (0, 1)") {
  const IntMat2 A{5, 2, 2, 2};
  const ConjugationResult r = conjugate_to_triangular(A);
  const auto [g, x, y] = extended_gcd(r.v[0], r.v[1]);
  CHECK(g == 1);
  CHECK(r.P.a * r.v[0] + r.P.b * r.v[1] == 0);
  CHECK(r.P.c * r.v[0] + r.P.d * r.v[1] == 1);
  CHECK(x * r.v[0] + y * r.v[1] == 1);
}

TEST_CASE("non-integer eigenvalues are rejected") {
  CHECK_THROWS_AS(conjugate_to_triangular({1, 1, 1, 0}), ConjugationError);
  CHECK_THROWS_AS(conjugate_to_triangular({0, -1, 1, 0}), ConjugationError);
}

TEST_CASE("extended gcd") {
  for (auto [p, q] : {std::pair<std::int64_t, std::int64_t>{240, 46}, {-7, 3}, {0, 5}, {12, 0}, {-4, -6}}) {
    const auto [g, x, y] = extended_gcd(p, q);
    CHECK(g >= 0);
    CHECK(x * p + y * q == g);
    if (g != 0) {
      CHECK(p % g == 0);
      CHECK(q % g == 0);
    }
  }
}

TEST_CASE("property: randomized round trips") {
  std::mt19937_64 rng(2024);
  std::uniform_int_distribution<int> eig(-6, 6), off(-5, 5), pick(0, 1), step(-3, 3), len(1, 6);
  for (int trial = 0; trial < 300; ++trial) {
    std::int64_t mu = 0, lambda = 0;
    while (mu == 0) mu = eig(rng);
    while (lambda == 0) lambda = eig(rng);
    const IntMat2 B0{mu, 0, off(rng), lambda};
    IntMat2 P0 = IntMat2::identity();
    for (int k = len(rng); k > 0; --k) P0 = elementary(pick(rng), step(rng)) * P0;
    const IntMat2 A = unimodular_inverse(P0) * B0 * P0;
    const ConjugationResult r = conjugate_to_triangular(A);
    CHECK(lower_triangular(r.B));
    CHECK(r.P * A == r.B * r.P);
    CHECK(std::abs(r.P.det()) == 1);
    std::array<std::int64_t, 2> want{mu, lambda}, got{r.B.a, r.B.d};
    std::sort(want.begin(), want.end());
    std::sort(got.begin(), got.end());
    CHECK(want == got);
  }
}

TEST_CASE("unimodular inverse") {
  const IntMat2 m{2, 1, 1, 1};
  CHECK(m * unimodular_inverse(m) == IntMat2::identity());
  CHECK_THROWS(unimodular_inverse({2, 0, 0, 1}));
}
