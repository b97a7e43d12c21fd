#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace tph {

class BuildError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Knot {
  double x;      // lift coordinate
  double y;      // lift value
  double slope;  // derivative, shared by both sides
};

// Closed arc [lo, hi] in lift coordinates, 0 < hi - lo < 1.
struct Arc {
  double lo = 0.0;
  double hi = 0.0;
  double length() const { return hi - lo; }
  double mid() const { return 0.5 * (lo + hi); }
};

// Monotone C^1 circle map of nonzero degree d, stored as a piecewise cubic
// Hermite lift G over one period [x0, x0 + 1] with G(x + 1) = G(x) + d.
// Degree < 0 gives an orientation-reversing (non-increasing) lift.
class CircleMap {
 public:
  CircleMap() = default;
  // The last knot must sit at knots.front().x + 1 with value front + degree
  // and the same slope. Throws BuildError on violations.
  CircleMap(int degree, std::vector<Knot> knots);

  static CircleMap affine(int degree, double value_at_zero = 0.0);

  double lift(double x) const;
  double eval(double x) const;
  double deriv(double x) const;

  int degree() const { return degree_; }
  int orientation() const { return degree_ > 0 ? 1 : -1; }
  double period_start() const { return knots_.front().x; }
  const std::vector<Knot>& knots() const { return knots_; }

  // Maximal intervals of the base period on which the lift is affine.
  std::vector<Arc> linear_pieces() const;
  double max_abs_deriv() const;
  double min_abs_deriv() const;
  bool strictly_monotone() const;

  // Inverse of the lift as a bijection of the real line.
  double lift_inverse(double y) const;
  // |degree| points in [0, 1), ascending.
  std::vector<double> preimages(double y) const;
  // Components of the full preimage, ordered by their lower endpoint in [0, 1).
  std::vector<Arc> preimage_interval(const Arc& arc) const;

  std::string to_table() const;
  static CircleMap from_table(std::string_view text);

 private:
  std::size_t locate(double xr) const;
  double reduce(double x, double& shift) const;
  void require_invertible() const;

  int degree_ = 1;
  bool invertible_ = false;
  std::vector<Knot> knots_;
};

// One affine constraint: the lift passes through (x, value) with the given
// slope on [x - radius, x + radius]. A missing slope is only allowed at an
// endpoint of linear_outside, where it takes the outer slope.
struct Anchor {
  double x = 0.0;
  double value = 0.0;
  std::optional<double> slope;
  double radius = 0.0;
};

inline Anchor fixed_point(double x, std::optional<double> slope, double radius) {
  return {x, x, slope, radius};
}

// The lift is affine on the arc [hi, lo + 1] between anchored endpoints.
struct LinearOutside {
  double lo = 0.0;
  double hi = 0.0;
  double slope_bound = 0.0;
  bool strict = false;
};

struct MapSpec {
  int degree = 1;
  std::vector<Anchor> anchors;
  std::optional<LinearOutside> linear_outside;
  double smoothing_width = 0.0;
};

struct Piece {
  double x0, x1;  // lift interval
  double y0;      // value at x0
  double slope;
  double at(double x) const { return y0 + slope * (x - x0); }
};

CircleMap build_from_spec(const MapSpec& spec);

// Knots for a non-periodic monotone splice of ascending affine pieces,
// covering [pieces.front().x0, pieces.back().x1].
std::vector<Knot> splice_pieces(const std::vector<Piece>& pieces, double smoothing,
                                int orientation);

double hermite_value(const Knot& k0, const Knot& k1, double x);
double hermite_slope(const Knot& k0, const Knot& k1, double x);

}  // namespace tph
