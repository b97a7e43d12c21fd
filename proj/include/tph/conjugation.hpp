#pragma once

#include <array>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace tph {

struct IntMat2 {
  std::int64_t a = 1, b = 0;
  std::int64_t c = 0, d = 1;

  bool operator==(const IntMat2&) const = default;
  static IntMat2 identity() { return {}; }
  std::int64_t det() const;
  std::int64_t trace() const;
};

IntMat2 operator*(const IntMat2& m, const IntMat2& n);
// For |det m| = 1 only.
IntMat2 unimodular_inverse(const IntMat2& m);
std::string to_string(const IntMat2& m);

class ConjugationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ConjugationResult {
  IntMat2 P;
  IntMat2 B;  // [[mu, 0], [t, lambda]]
  std::array<std::int64_t, 2> v;
};

// Integer P with |det P| = 1 and P A P^-1 lower triangular. The larger
// eigenvalue goes bottom-right.
ConjugationResult conjugate_to_triangular(const IntMat2& A);

// Returns (g, x, y) with g = gcd(p, q) >= 0 and x p + y q = g.
std::array<std::int64_t, 3> extended_gcd(std::int64_t p, std::int64_t q);

}  // namespace tph
