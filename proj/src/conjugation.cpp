#include "tph/conjugation.hpp"

#include <cmath>
#include <cstdlib>
#include <numeric>

namespace tph {

namespace {

std::int64_t mul(std::int64_t x, std::int64_t y) {
  std::int64_t r;
  if (__builtin_mul_overflow(x, y, &r)) throw ConjugationError("integer overflow");
  return r;
}

std::int64_t add(std::int64_t x, std::int64_t y) {
  std::int64_t r;
  if (__builtin_add_overflow(x, y, &r)) throw ConjugationError("integer overflow");
  return r;
}

std::int64_t sub(std::int64_t x, std::int64_t y) {
  std::int64_t r;
  if (__builtin_sub_overflow(x, y, &r)) throw ConjugationError("integer overflow");
  return r;
}

// Exact floor(sqrt(n)) for n >= 0.
std::int64_t isqrt(std::int64_t n) {
  auto r = static_cast<std::int64_t>(std::sqrt(static_cast<long double>(n)));
  while (r > 0 && r * r > n) --r;
  while ((r + 1) * (r + 1) <= n) ++r;
  return r;
}

}  // namespace

std::int64_t IntMat2::det() const { return sub(mul(a, d), mul(b, c)); }
std::int64_t IntMat2::trace() const { return add(a, d); }

IntMat2 operator*(const IntMat2& m, const IntMat2& n) {
  return {add(mul(m.a, n.a), mul(m.b, n.c)), add(mul(m.a, n.b), mul(m.b, n.d)),
          add(mul(m.c, n.a), mul(m.d, n.c)), add(mul(m.c, n.b), mul(m.d, n.d))};
}

IntMat2 unimodular_inverse(const IntMat2& m) {
  const std::int64_t dt = m.det();
  if (dt != 1 && dt != -1) throw ConjugationError("matrix is not unimodular");
  return {m.d * dt, -m.b * dt, -m.c * dt, m.a * dt};
}

std::string to_string(const IntMat2& m) {
  return "[[" + std::to_string(m.a) + "," + std::to_string(m.b) + "],[" + std::to_string(m.c) + "," +
         std::to_string(m.d) + "]]";
}

std::array<std::int64_t, 3> extended_gcd(std::int64_t p, std::int64_t q) {
  std::int64_t r0 = p, r1 = q, s0 = 1, s1 = 0, t0 = 0, t1 = 1;
  while (r1 != 0) {
    const std::int64_t k = r0 / r1;
    std::int64_t tmp = sub(r0, mul(k, r1));
    r0 = r1;
    r1 = tmp;
    tmp = sub(s0, mul(k, s1));
    s0 = s1;
    s1 = tmp;
    tmp = sub(t0, mul(k, t1));
    t0 = t1;
    t1 = tmp;
  }
  if (r0 < 0) return {-r0, -s0, -t0};
  return {r0, s0, t0};
}

ConjugationResult conjugate_to_triangular(const IntMat2& A) {
  if (A.b == 0) return {IntMat2::identity(), A, {0, 1}};

  const std::int64_t T = A.trace();
  const std::int64_t disc = sub(mul(T, T), mul(4, A.det()));
  if (disc < 0) throw ConjugationError("eigenvalues are not real: discriminant " + std::to_string(disc));
  const std::int64_t s = isqrt(disc);
  if (s * s != disc)
    throw ConjugationError("eigenvalues are irrational: discriminant " + std::to_string(disc) +
                           " is not a perfect square");
  if ((T + s) % 2 != 0) throw ConjugationError("eigenvalues are not integers");
  const std::int64_t lambda = (T + s) / 2;

  // (A - lambda) v = 0 from the first row; b != 0 keeps v nonzero.
  std::int64_t p = A.b;
  std::int64_t q = sub(lambda, A.a);
  const std::int64_t g = std::gcd(p, q);
  p /= g;
  q /= g;
  if (p < 0 || (p == 0 && q < 0)) {
    p = -p;
    q = -q;
  }
  const auto [one, x, y] = extended_gcd(p, q);
  if (one != 1) throw ConjugationError("eigenvector is not primitive");
  const IntMat2 P{q, -p, x, y};
  const IntMat2 B = P * A * unimodular_inverse(P);
  if (B.b != 0 || B.d != lambda) throw ConjugationError("internal: conjugate is not lower triangular");
  return {P, B, {p, q}};
}

}  // namespace tph
