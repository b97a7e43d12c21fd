#pragma once

#include <string>
#include <vector>

#include "tph/geometry.hpp"
#include "tph/torus_endo.hpp"

namespace tph {

struct CentreSample {
  Vec2 p;
  Vec2 direction{0.0, 1.0};  // unit, sign irrelevant
  int n_used = 0;
  double residual = 0.0;  // angle between depth n-1 and depth n estimates
  double ratio = 0.0;     // singular-value ratio of the depth-n product
  bool undetermined = false;
};

struct Svd2 {
  double s_max = 0.0, s_min = 0.0;
  Vec2 v_max, v_min;  // right singular directions
};

// Closed form; no iteration.
Svd2 svd2(const Mat2& m);

// Least-expanded right singular direction of D_p f^n (single f-steps).
CentreSample centre_direction(const TorusEndo& f, Vec2 p, int n);

// As centre_direction, but the first orbit.size() points are taken from
// `orbit` instead of being iterated forward.
CentreSample centre_direction_along(const TorusEndo& f, const std::vector<Vec2>& orbit, int n);

struct DepthPolicy {
  int n_min = 64;
  int n_max = 1024;
  double tol = 1e-8;
};

// Doubles n from n_min until the residual drops below tol or n_max is reached.
CentreSample centre_direction_adaptive(const TorusEndo& f, Vec2 p, const DepthPolicy& policy = {});

// Angle between Df_p E^c(p) and E^c(f(p)), both at depth n.
double invariance_check(const TorusEndo& f, Vec2 p, int n, bool* undetermined = nullptr);

enum class SlopeClass { neg, pos, vertical, undetermined };

std::string to_string(SlopeClass c);
SlopeClass classify(const CentreSample& s, double vertical_tol = 1e-6);

}  // namespace tph
