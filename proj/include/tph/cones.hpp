#pragma once

#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "tph/geometry.hpp"
#include "tph/regions.hpp"
#include "tph/torus_endo.hpp"

namespace tph {

class ConeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Closed convex cone of lines: directions swept counterclockwise from b1 to b2.
struct Cone {
  Vec2 b1{1.0, 0.0};
  Vec2 b2{0.0, 1.0};
};

Cone make_cone(Vec2 b1, Vec2 b2);  // normalizes; throws unless 0 < width < pi
double width(const Cone& c);
Vec2 cone_axis(const Cone& c);

// Q(u) = q11 u_x^2 + 2 q12 u_x u_y + q22 u_y^2.
struct QuadForm {
  double q11 = 0.0, q12 = 0.0, q22 = 0.0;
  double operator()(Vec2 u) const { return q11 * u.x * u.x + 2 * q12 * u.x * u.y + q22 * u.y * u.y; }
};

QuadForm to_form(const Cone& c);
// Nonnegative set of an indefinite form; nullopt when the form is degenerate or definite.
std::optional<Cone> to_cone(const QuadForm& q);

enum class Side { inside, boundary, outside };

struct ConeTest {
  Side side;
  double margin;  // Q(u / |u|)
};

ConeTest cone_contains(const Cone& c, Vec2 u, double tol = 1e-14);
// Angle from the line of u to the cone: positive outside, negative inside.
double exclusion_margin(const Cone& c, Vec2 u);
// Angular margin: positive iff inner lies in the interior of outer.
double containment_margin(const Cone& inner, const Cone& outer);
Cone map_cone(const Mat2& m, const Cone& c);

// Cone around the first (shear_sign > 0) or fourth quadrant.
Cone cone_eps(double eps, int shear_sign);
// Horizontal cone bounded by the slopes -delta and +delta.
Cone cone_delta(double delta);
Cone blend(const Cone& p, const Cone& q, double alpha);

struct ConeField {
  std::string name;
  std::function<Cone(Vec2)> at;
};

// Sign of the lower-left entry of DF on the core of annulus A.
int shear_sign(const TorusEndo& f, const CentreAnnulus& A);

struct EpsilonResult {
  double eps = 0.0;
  double margin = 0.0;  // min angular margin at eps on the cores
  double growth = 0.0;  // min |DF u| / |u| over C_eps on the cores
  int tried = 0;
};

// Largest eps in {2^-1, ..., 2^-20} passing on every core; throws ConeError if none.
EpsilonResult find_epsilon(const TorusEndo& f, int samples = 256);

// C^N on strip v: boundaries of C_eps at F^N(p) pulled back by exact inverse derivatives.
Cone pullback_cone(const TorusEndo& f, const StripV& v, double eps, int sign, Vec2 p);

struct DeltaResult {
  double delta = 0.0;
  double invariance_margin = 0.0;   // B_delta into B_delta on U_K
  double containment_margin = 0.0;  // B_delta inside C^N on V and U_K
  double entry_margin = 0.0;        // DF B_delta inside C^N at F(p) in V
  int passing = 0;                  // number of sweep values that pass
};

DeltaResult find_delta(const TorusEndo& f, const Regions& regions, double eps, int samples = 2048);

// The glued field: B_delta off V, C^N on F(V), the quadratic-form blend between.
class UnstableCones {
 public:
  UnstableCones(const TorusEndo& f, double eps, double delta);

  const TorusEndo& endo() const { return *f_; }
  const Regions& regions() const { return regions_; }
  double eps() const { return eps_; }
  double delta() const { return delta_; }

  Cone at(Vec2 p) const;
  Cone cn(int strip, Vec2 p) const;
  ConeField field() const;

 private:
  const TorusEndo* f_;
  Regions regions_;
  double eps_;
  double delta_;
  std::vector<int> signs_;
};

}  // namespace tph
