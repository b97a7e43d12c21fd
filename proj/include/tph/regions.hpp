#pragma once

#include <vector>

#include "tph/torus_endo.hpp"

namespace tph {

// Strip V_i = (lo, hi) x S^1 inside annulus i, with F(V_i) = (image_lo, image_hi)
// compactly inside it and F^N(V_i) inside the attracting core.
struct StripV {
  int annulus = -1;
  double lo = 0.0;
  double hi = 0.0;
  double image_lo = 0.0;
  double image_hi = 0.0;
  int N = 0;
};

class Regions {
 public:
  explicit Regions(const TorusEndo& f);

  const std::vector<StripV>& strips() const { return strips_; }
  // Index into strips() of the strip containing x (mod 1), or -1.
  int strip_of(double x) const;
  bool in_V(double x) const { return strip_of(x) >= 0; }
  bool in_image(double x) const;
  // Piecewise-linear ramp: 0 off V, 1 on F(V).
  double alpha(double x) const;
  // Largest N over strips.
  int N() const;

  // For annulus strips: F(V) together with U_K covers the circle.
  bool covers() const;

 private:
  const TorusEndo* f_;
  std::vector<StripV> strips_;
};

// First n with F^n(x) in the core of A, iterating the strip lift; -1 if none by n_max.
int iterations_to_core(const TorusEndo& f, const CentreAnnulus& A, double x, int n_max = 400);

}  // namespace tph
