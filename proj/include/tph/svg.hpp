#pragma once

#include <string>
#include <vector>

#include "tph/cones.hpp"
#include "tph/geometry.hpp"
#include "tph/torus_endo.hpp"

namespace tph {

// Minimal SVG canvas over a data window [x0, x1] x [y0, y1].
class SvgCanvas {
 public:
  SvgCanvas(double x0, double x1, double y0, double y1, int width = 640, int height = 640);

  void axes(const std::string& xlabel, const std::string& ylabel, int ticks = 4);
  void polyline(const std::vector<Vec2>& pts, const std::string& colour, double stroke = 1.2);
  void line(Vec2 a, Vec2 b, const std::string& colour, double stroke = 1.0, bool dashed = false);
  void polygon(const std::vector<Vec2>& pts, const std::string& fill, double opacity);
  void text(Vec2 at, const std::string& s, int size = 14);
  void title(const std::string& s);
  std::string str() const;

 private:
  double px(double x) const;
  double py(double y) const;

  double x0_, x1_, y0_, y1_;
  int w_, h_;
  int margin_ = 56;
  std::string body_;
};

// Graphs of g (mod 1) and the summed shear over one circuit.
std::string figure_maps(const TorusEndo& f);
// C_eps at a core point with its image under the derivative there.
std::string figure_cone_eps(const TorusEndo& f, double eps);
// B_delta and its image under the diagonal derivative on K.
std::string figure_cone_delta(const TorusEndo& f, double delta);
// Centre curves seeded along y = 1/2, drawn on the unit square.
std::string figure_centre_curves(const TorusEndo& f, int seeds = 24, double length = 0.6, double step = 1e-3);

}  // namespace tph
