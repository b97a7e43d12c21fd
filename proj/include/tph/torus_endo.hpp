#pragma once

#include <string>
#include <vector>

#include "tph/circle_map.hpp"
#include "tph/conjugation.hpp"
#include "tph/geometry.hpp"

namespace tph {

enum class BuildKind { concrete, general, linear, unsheared, loaded };

std::string to_string(BuildKind kind);
BuildKind build_kind_from_string(const std::string& s);

// Shape constants for the annulus templates, relative to an annulus
// half-width H. Defaults reproduce the concrete example.
struct DesignParams {
  double a = 0.125;                 // concrete example only
  double kappa = 0.5;               // (g^period)' at the attracting circles
  double band_slope = 0.1;          // slow band just inside each boundary neighbourhood
  double core_frac = 1.0 / 8;       // affine radius around attractors
  double smooth_frac = 1.0 / 128;   // splice half-width
  double plateau_frac = 1.0 / 3;    // shear is constant beyond this distance from the centre
  double shear_slope_per_rise = 2;  // shear'(centre) / rise
};

// An open annulus (lo, hi) x S^1 invariant under f^period, with one
// attracting circle at `centre`. Lift coordinates.
struct CentreAnnulus {
  std::string name;
  double lo = 0.0;
  double hi = 0.0;
  double centre = 0.0;
  double core_radius = 0.0;  // D f^period constant for |x - centre| < core_radius
  double edge_radius = 0.0;  // D f^period = diag(s, lambda^period) within edge_radius of lo, hi
  double edge_slope_lo = 0.0;
  double edge_slope_hi = 0.0;
  int lift_shift = 0;        // f^period lift minus (lift_shift, 0) maps (lo, hi) x R to itself

  double half_width() const { return 0.5 * (hi - lo); }
  bool contains(double x) const;  // x taken mod 1
};

struct BuildInfo {
  BuildKind kind = BuildKind::concrete;
  int lambda = 3;
  int mu = 4;
  int t = 2;
  double a = 0.125;
  double rho = 0.0;     // outer slope of g in the negative-mu build
  double centre = 0.0;  // centre of the period-two interval I
  DesignParams design;
  std::vector<std::string> notes;
};

class TorusEndo {
 public:
  TorusEndo(CircleMap g, int lambda, std::vector<CircleMap> shears, int period, std::vector<CentreAnnulus> annuli,
            BuildInfo info);

  const CircleMap& g() const { return g_; }
  int lambda() const { return lambda_; }
  const std::vector<CircleMap>& shears() const { return shears_; }
  int period() const { return period_; }
  const IntMat2& B() const { return B_; }
  double dist_to_linear() const { return dist_to_linear_; }
  const std::vector<CentreAnnulus>& annuli() const { return annuli_; }
  const BuildInfo& info() const { return info_; }

  double shear_lift(double x) const;
  double shear_deriv(double x) const;

  Vec2 apply(Vec2 p) const;
  Vec2 apply_lift(Vec2 p) const;
  Mat2 derivative(Vec2 p) const;
  // Inverse of the plane lift (a diffeomorphism of R^2).
  Vec2 inverse_lift(Vec2 p) const;

  // branch indexes the ascending x-preimages; y_branch the |lambda| y-solutions.
  Vec2 local_inverse(Vec2 q, int branch, int y_branch = 0) const;
  Mat2 dinverse(Vec2 q, int branch) const;

  // f^period and its derivative: the map all certification targets.
  Vec2 step(Vec2 p) const;
  Mat2 step_derivative(Vec2 p) const;
  double step_x_lift(double x) const;
  double step_x_deriv(double x) const;
  // Lift of f^period fixing the strip over annulus A, and its inverse.
  Vec2 step_lift_in(const CentreAnnulus& A, Vec2 p) const;
  Vec2 step_inverse_in(const CentreAnnulus& A, Vec2 p) const;

  // Index of the annulus containing x (mod 1), or -1.
  int annulus_of(double x) const;
  bool in_core(double x) const;
  // Within edge_radius of an annulus boundary, or outside every annulus.
  bool in_UK(double x) const;

 private:
  double compute_dist_to_linear() const;

  CircleMap g_;
  int lambda_;
  std::vector<CircleMap> shears_;
  int period_;
  IntMat2 B_;
  double dist_to_linear_ = 0.0;
  std::vector<CentreAnnulus> annuli_;
  BuildInfo info_;
};

TorusEndo build_concrete(const DesignParams& design = {});
TorusEndo build_general(int lambda, int mu, int t, const DesignParams& design = {});
TorusEndo build_linear(int mu, int lambda);
// Same g, annuli and metadata with every shear removed.
TorusEndo build_unsheared(const TorusEndo& f);

// Annulus parameter a of the two-annulus build for mu > 0.
double general_a(int lambda, int mu);

// sup over an x-grid of |F(x, 0) - M (x, 0)| plus a Lipschitz slack, for the
// lift F = lift_of(x) (which must depend on x only through y = 0 data).
double lift_distance(const TorusEndo& f, const CentreAnnulus* annulus, int grid = 512);

}  // namespace tph
