#pragma once

#include <string>
#include <vector>

#include "tph/centre_field.hpp"
#include "tph/circle_map.hpp"
#include "tph/torus_endo.hpp"

namespace tph {

// Polyline in lift coordinates.
struct CurveSegment {
  std::vector<Vec2> pts;
  double step = 0.0;
  double tangency_residual = 0.0;  // max angle between chords and E^c at chord midpoints
  bool truncated = false;
};

double arclength(const CurveSegment& c);

// RK4 along the E^c line field; orientation follows `hint` at the start and
// the previous tangent afterwards.
CurveSegment integrate_centre_curve(const TorusEndo& f, Vec2 p0, double length, double step,
                                    Vec2 hint = {0.0, 1.0}, const DepthPolicy& policy = {});

// Re-sampled E^c against every chord.
double tangency_residual(const TorusEndo& f, const CurveSegment& c, const DepthPolicy& policy = {});

// Pointwise n-fold inverse of the lift fixing the strip over A (plain plane
// lift when A is null).
CurveSegment backward_curve(const TorusEndo& f, const CurveSegment& seg, int n, const CentreAnnulus* A);

struct BoundsCheck {
  double r0 = 0.0;
  double C = 0.0;
  double lambda = 0.0;  // |lambda|^period
  double r = 0.0;
  double observed = 0.0;
  int n_max = 0;
  bool pass = false;
};

// Samples of (lo, hi) x [-r0, r0] iterated backward n_max times by the strip lift.
BoundsCheck bounded_box_check(const TorusEndo& f, const CentreAnnulus& A, double r0, int n_max,
                              int samples = 64);

struct BranchingOptions {
  double jc_length = 0.05;
  double step = 1e-4;
  int n_back = 60;
  double neighbourhood = 1e-4;
  double angle_threshold = 0.1;
  double endpoint_tol = 1e-4;
  double r0 = 0.1;
  int side = 1;              // +1: toward hi, -1: toward lo
  double sagitta = 1e-8;     // refinement tolerance for the backward levels
  int angle_samples = 256;   // E^c evaluations near q
};

struct BranchingReport {
  std::string annulus;
  int side = 1;
  Vec2 anchor;
  double boundary_x = 0.0;
  std::vector<double> free_x;  // free endpoint x after n = 0..n_back steps
  bool anchor_fixed = false;
  bool monotone = false;
  double endpoint_gap = 0.0;  // |free_x.back() - boundary_x|
  double nesting_error = 0.0;
  BoundsCheck bounds;
  double boundary_verticality = 0.0;  // max |E^c_x| on the boundary line near q
  Vec2 q;
  double angle = 0.0;  // max angle between E^c on B near q and the boundary line
  int near_points = 0;
  bool pass = false;
  std::string reason;
};

BranchingReport branching_witness(const TorusEndo& f, int annulus = 0, const BranchingOptions& opt = {});
// Every annulus and both sides.
std::vector<BranchingReport> branching_scan(const TorusEndo& f, BranchingOptions opt = {});

struct IncoherenceReport {
  bool applicable = false;
  double circle = 0.0;
  std::vector<double> distances;
  std::vector<double> slope_left, slope_right;  // dy/dx of E^c
  int sign_left = 0, sign_right = 0;
  double min_abs_slope = 0.0;
  bool pass = false;
  std::string reason;
};

// Shared boundary of the first two annuli (x = 0, or the centre of I).
IncoherenceReport incoherence_witness(const TorusEndo& f, const DepthPolicy& policy = {});

// Two leaves of the annulus started `offset` apart, each followed without
// leaving it. The start is placed on one leaf so that `length` of it lies
// ahead inside the annulus; leaves shorter than that are compared over 95%
// of their length.
struct UniquenessReport {
  Vec2 start;
  double leaf_length = 0.0;  // boundary-to-boundary arclength of the leaf through the start
  double length_used = 0.0;
  double separation = 0.0;   // symmetric Hausdorff distance of the two curves
  double tangency_residual = 0.0;
  bool inside = false;
  bool pass = false;
  std::string reason;
};

UniquenessReport annulus_uniqueness(const TorusEndo& f, const CentreAnnulus& A, double length = 1.0,
                                    double step = 1e-4, double offset = 1e-6);

// E^c at a point of a boundary circle. The orbit's x is snapped back onto the
// nearest annulus boundary each step, since those circles are repelling.
CentreSample boundary_direction(const TorusEndo& f, Vec2 p, int n = 128);

// One-sided Hausdorff distance from a to the polyline b.
double hausdorff_from(const std::vector<Vec2>& a, const std::vector<Vec2>& b);

struct AnnulusFamily {
  int level = 0;
  std::vector<Arc> intervals;
  double max_gap = 1.0;  // of the union over levels 0..level
};

std::vector<AnnulusFamily> preimage_lamination(const CircleMap& g, const Arc& X, int n_levels);
// Level 0 given by several disjoint arcs.
std::vector<AnnulusFamily> preimage_lamination(const CircleMap& g, const std::vector<Arc>& level0, int n_levels);

// Largest gap on the circle left by a family of arcs.
double max_gap(std::vector<Arc> arcs);

}  // namespace tph
