#include "tph/svg.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

#include "tph/curves.hpp"

namespace tph {

namespace {

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '<') out += "&lt;";
    else if (c == '>') out += "&gt;";
    else if (c == '&') out += "&amp;";
    else out += c;
  }
  return out;
}

// Split a lifted path wherever its torus image jumps across a seam.
std::vector<std::vector<Vec2>> torus_pieces(const std::vector<Vec2>& pts) {
  std::vector<std::vector<Vec2>> out;
  std::vector<Vec2> cur;
  Vec2 prev{};
  for (const Vec2& p : pts) {
    const Vec2 w = wrap(p);
    if (!cur.empty() && (std::fabs(w.x - prev.x) > 0.5 || std::fabs(w.y - prev.y) > 0.5)) {
      out.push_back(std::move(cur));
      cur.clear();
    }
    cur.push_back(w);
    prev = w;
  }
  if (cur.size() > 1) out.push_back(std::move(cur));
  return out;
}

std::vector<Vec2> wedge(const Cone& c, double r) {
  std::vector<Vec2> pts{{0.0, 0.0}};
  const double t0 = std::atan2(c.b1.y, c.b1.x);
  const double w = width(c);
  for (int k = 0; k <= 32; ++k) pts.push_back(r * direction(t0 + w * k / 32));
  return pts;
}

void both_sheets(SvgCanvas& s, const Cone& c, double r, const std::string& fill, double op) {
  s.polygon(wedge(c, r), fill, op);
  s.polygon(wedge({-c.b1, -c.b2}, r), fill, op);
}

}  // namespace

SvgCanvas::SvgCanvas(double x0, double x1, double y0, double y1, int width, int height)
    : x0_(x0), x1_(x1), y0_(y0), y1_(y1), w_(width), h_(height) {}

double SvgCanvas::px(double x) const { return margin_ + (x - x0_) / (x1_ - x0_) * (w_ - 2 * margin_); }
double SvgCanvas::py(double y) const { return h_ - margin_ - (y - y0_) / (y1_ - y0_) * (h_ - 2 * margin_); }

void SvgCanvas::axes(const std::string& xlabel, const std::string& ylabel, int ticks) {
  std::ostringstream os;
  os << "<rect x='" << num(px(x0_)) << "' y='" << num(py(y1_)) << "' width='" << num(px(x1_) - px(x0_))
     << "' height='" << num(py(y0_) - py(y1_)) << "' fill='none' stroke='black'/>\n";
  for (int k = 0; k <= ticks; ++k) {
    const double x = x0_ + (x1_ - x0_) * k / ticks;
    const double y = y0_ + (y1_ - y0_) * k / ticks;
    char lx[32], ly[32];
    std::snprintf(lx, sizeof lx, "%.3g", x);
    std::snprintf(ly, sizeof ly, "%.3g", y);
    os << "<text x='" << num(px(x)) << "' y='" << num(py(y0_) + 18) << "' font-size='11' text-anchor='middle'>" << lx
       << "</text>\n";
    os << "<text x='" << num(px(x0_) - 6) << "' y='" << num(py(y) + 4) << "' font-size='11' text-anchor='end'>" << ly
       << "</text>\n";
  }
  os << "<text x='" << num(0.5 * w_) << "' y='" << num(h_ - 12.0) << "' font-size='13' text-anchor='middle'>"
     << escape(xlabel) << "</text>\n";
  os << "<text x='16' y='" << num(0.5 * h_) << "' font-size='13' text-anchor='middle' transform='rotate(-90 16 "
     << num(0.5 * h_) << ")'>" << escape(ylabel) << "</text>\n";
  body_ += os.str();
}

void SvgCanvas::polyline(const std::vector<Vec2>& pts, const std::string& colour, double stroke) {
  if (pts.size() < 2) return;
  std::ostringstream os;
  os << "<polyline fill='none' stroke='" << colour << "' stroke-width='" << stroke << "' points='";
  for (const Vec2& p : pts) os << num(px(p.x)) << ',' << num(py(p.y)) << ' ';
  os << "'/>\n";
  body_ += os.str();
}

void SvgCanvas::line(Vec2 a, Vec2 b, const std::string& colour, double stroke, bool dashed) {
  std::ostringstream os;
  os << "<line x1='" << num(px(a.x)) << "' y1='" << num(py(a.y)) << "' x2='" << num(px(b.x)) << "' y2='"
     << num(py(b.y)) << "' stroke='" << colour << "' stroke-width='" << stroke << "'"
     << (dashed ? " stroke-dasharray='5,4'" : "") << "/>\n";
  body_ += os.str();
}

void SvgCanvas::polygon(const std::vector<Vec2>& pts, const std::string& fill, double opacity) {
  std::ostringstream os;
  os << "<polygon fill='" << fill << "' fill-opacity='" << opacity << "' stroke='" << fill << "' points='";
  for (const Vec2& p : pts) os << num(px(p.x)) << ',' << num(py(p.y)) << ' ';
  os << "'/>\n";
  body_ += os.str();
}

void SvgCanvas::text(Vec2 at, const std::string& s, int size) {
  body_ += "<text x='" + num(px(at.x)) + "' y='" + num(py(at.y)) + "' font-size='" + std::to_string(size) + "'>" +
           escape(s) + "</text>\n";
}

void SvgCanvas::title(const std::string& s) {
  body_ += "<text x='" + num(0.5 * w_) + "' y='24' font-size='16' text-anchor='middle'>" + escape(s) + "</text>\n";
}

std::string SvgCanvas::str() const {
  std::ostringstream os;
  os << "<svg xmlns='http://www.w3.org/2000/svg' width='" << w_ << "' height='" << h_ << "' viewBox='0 0 " << w_
     << ' ' << h_ << "'>\n<rect width='100%' height='100%' fill='white'/>\n"
     << body_ << "</svg>\n";
  return os.str();
}

std::string figure_maps(const TorusEndo& f) {
  constexpr int n = 2000;
  std::vector<Vec2> g, s;
  double smin = 0, smax = 0;
  for (int i = 0; i <= n; ++i) {
    const double x = -0.5 + double(i) / n;
    g.push_back({x, f.g().lift(x)});
    const double v = f.shear_lift(x);
    s.push_back({x, v});
    smin = std::min(smin, v);
    smax = std::max(smax, v);
  }
  // g drawn mod 1 on [-1/2, 1/2).
  std::vector<std::vector<Vec2>> gp;
  std::vector<Vec2> cur;
  double prev = 0;
  for (const Vec2& p : g) {
    const double y = p.y - std::floor(p.y + 0.5);
    if (!cur.empty() && std::fabs(y - prev) > 0.5) {
      gp.push_back(cur);
      cur.clear();
    }
    cur.push_back({p.x, y});
    prev = y;
  }
  gp.push_back(cur);

  const int w = 1100;
  SvgCanvas left(-0.5, 0.5, -0.5, 0.5, w / 2, 520);
  left.title("g on the circle");
  left.axes("x", "g(x) mod 1");
  left.line({-0.5, -0.5}, {0.5, 0.5}, "#999", 0.8, true);
  for (const auto& piece : gp) left.polyline(piece, "#1f4e9c", 1.4);
  const double pad = 0.1 * (smax - smin + 1e-9);
  SvgCanvas right(-0.5, 0.5, smin - pad, smax + pad, w / 2, 520);
  right.title("shear lift");
  right.axes("x", "shear(x)");
  right.polyline(s, "#b03a2e", 1.4);
  for (const CentreAnnulus& A : f.annuli()) {
    const double lo = A.lo - std::floor(A.lo + 0.5), hi = A.hi - std::floor(A.hi + 0.5);
    for (SvgCanvas* c : {&left, &right}) {
      const double y0 = c == &left ? -0.5 : smin - pad, y1 = c == &left ? 0.5 : smax + pad;
      c->line({lo, y0}, {lo, y1}, "#2e7d32", 0.8, true);
      c->line({hi, y0}, {hi, y1}, "#2e7d32", 0.8, true);
    }
  }
  // Side by side in one document.
  std::string a = left.str(), b = right.str();
  std::ostringstream os;
  os << "<svg xmlns='http://www.w3.org/2000/svg' width='" << w << "' height='520'>\n"
     << "<g>" << a.substr(a.find('\n') + 1, a.rfind("</svg>") - a.find('\n') - 1) << "</g>\n"
     << "<g transform='translate(" << w / 2 << ",0)'>" << b.substr(b.find('\n') + 1, b.rfind("</svg>") - b.find('\n') - 1)
     << "</g>\n</svg>\n";
  return os.str();
}

std::string figure_cone_eps(const TorusEndo& f, double eps) {
  const CentreAnnulus& A = f.annuli().at(0);
  const int sign = shear_sign(f, A);
  const Cone c = cone_eps(eps, sign);
  const Mat2 m = f.step_derivative({A.centre, 0.0});
  const Cone img = map_cone(m, c);
  SvgCanvas s(-1.2, 1.2, -1.2, 1.2);
  s.title("C_eps at the attracting circle and its image");
  s.axes("u_x", "u_y");
  s.line({-1.2, 0}, {1.2, 0}, "#999", 0.6);
  s.line({0, -1.2}, {0, 1.2}, "#999", 0.6);
  both_sheets(s, c, 1.1, "#1f4e9c", 0.25);
  both_sheets(s, img, 1.0, "#b03a2e", 0.45);
  char buf[64];
  std::snprintf(buf, sizeof buf, "eps = %.4g", eps);
  s.text({-1.1, -1.1}, buf);
  return s.str();
}

std::string figure_cone_delta(const TorusEndo& f, double delta) {
  const Cone c = cone_delta(delta);
  double xk = 0.5;
  for (int i = 0; i < 256; ++i) {
    const double x = (i + 0.5) / 256;
    if (f.annulus_of(x) < 0) {
      xk = x;
      break;
    }
  }
  const Mat2 m = f.step_derivative({xk, 0.0});
  const Cone img = map_cone(m, c);
  SvgCanvas s(-1.2, 1.2, -1.2, 1.2);
  s.title("B_delta on K and its image");
  s.axes("u_x", "u_y");
  s.line({-1.2, 0}, {1.2, 0}, "#999", 0.6);
  s.line({0, -1.2}, {0, 1.2}, "#999", 0.6);
  both_sheets(s, c, 1.1, "#1f4e9c", 0.25);
  both_sheets(s, img, 1.0, "#b03a2e", 0.45);
  char buf[64];
  std::snprintf(buf, sizeof buf, "delta = %.4g", delta);
  s.text({-1.1, -1.1}, buf);
  return s.str();
}

std::string figure_centre_curves(const TorusEndo& f, int seeds, double length, double step) {
  SvgCanvas s(0.0, 1.0, 0.0, 1.0, 720, 720);
  s.title("centre curves");
  s.axes("x", "y");
  for (const CentreAnnulus& A : f.annuli()) {
    for (double b : {A.lo, A.hi}) {
      const double x = wrap01(b);
      s.line({x, 0.0}, {x, 1.0}, "#2e7d32", 1.6);
    }
  }
  for (int i = 0; i < seeds; ++i) {
    const Vec2 p0{(i + 0.5) / seeds, 0.5};
    for (double dir : {1.0, -1.0}) {
      const CurveSegment c = integrate_centre_curve(f, p0, 0.5 * length, step, {0.0, dir});
      for (const auto& piece : torus_pieces(c.pts)) s.polyline(piece, "#1f4e9c", 1.0);
    }
  }
  return s.str();
}

}  // namespace tph
