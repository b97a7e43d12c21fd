#include "tph/regions.hpp"

#include <algorithm>
#include <cmath>

namespace tph {

namespace {

// Offset of x above lo, reduced into [0, 1).
double offset(double x, double lo) { return x - lo - std::floor(x - lo); }

}  // namespace

int iterations_to_core(const TorusEndo& f, const CentreAnnulus& A, double x, int n_max) {
  for (int n = 0; n <= n_max; ++n) {
    if (std::fabs(x - A.centre) < A.core_radius) return n;
    x = f.step_x_lift(x) - A.lift_shift;
  }
  return -1;
}

Regions::Regions(const TorusEndo& f) : f_(&f) {
  const auto& annuli = f.annuli();
  for (std::size_t i = 0; i < annuli.size(); ++i) {
    const CentreAnnulus& A = annuli[i];
    StripV v;
    v.annulus = int(i);
    v.lo = A.lo + A.edge_radius / (2 * A.edge_slope_lo);
    v.hi = A.hi - A.edge_radius / (2 * A.edge_slope_hi);
    v.image_lo = f.step_x_lift(v.lo) - A.lift_shift;
    v.image_hi = f.step_x_lift(v.hi) - A.lift_shift;
    if (!(v.lo < v.image_lo && v.image_hi < v.hi))
      throw BuildError("strip image is not compactly inside the strip for annulus " + A.name);
    const int n_lo = iterations_to_core(f, A, v.lo);
    const int n_hi = iterations_to_core(f, A, v.hi);
    if (n_lo < 0 || n_hi < 0) throw BuildError("strip does not reach the core of annulus " + A.name);
    v.N = std::max(n_lo, n_hi);
    strips_.push_back(v);
  }
}

int Regions::strip_of(double x) const {
  for (std::size_t i = 0; i < strips_.size(); ++i) {
    const double d = offset(x, strips_[i].lo);
    if (d > 0.0 && d < strips_[i].hi - strips_[i].lo) return int(i);
  }
  return -1;
}

bool Regions::in_image(double x) const {
  for (const StripV& v : strips_) {
    const double d = offset(x, v.image_lo);
    if (d >= 0.0 && d <= v.image_hi - v.image_lo) return true;
  }
  return false;
}

double Regions::alpha(double x) const {
  const int i = strip_of(x);
  if (i < 0) return 0.0;
  const StripV& v = strips_[i];
  const double d = offset(x, v.lo);
  const double lo_ramp = v.image_lo - v.lo;
  const double hi_ramp = v.hi - v.image_hi;
  const double e = v.hi - v.lo - d;
  if (d < lo_ramp) return d / lo_ramp;
  if (e < hi_ramp) return e / hi_ramp;
  return 1.0;
}

int Regions::N() const {
  int n = 0;
  for (const StripV& v : strips_) n = std::max(n, v.N);
  return n;
}

bool Regions::covers() const {
  // The complement of U_K is the union of the open annulus interiors
  // (lo + edge, hi - edge); each must sit inside its strip's image.
  for (const StripV& v : strips_) {
    const CentreAnnulus& A = f_->annuli()[v.annulus];
    if (!(v.image_lo < A.lo + A.edge_radius && v.image_hi > A.hi - A.edge_radius)) return false;
  }
  return true;
}

}  // namespace tph
