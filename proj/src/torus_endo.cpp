#include "tph/torus_endo.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace tph {

std::string to_string(BuildKind kind) {
  switch (kind) {
    case BuildKind::concrete: return "concrete";
    case BuildKind::general: return "general";
    case BuildKind::linear: return "linear";
    case BuildKind::unsheared: return "unsheared";
    case BuildKind::loaded: return "loaded";
  }
  return "unknown";
}

BuildKind build_kind_from_string(const std::string& s) {
  if (s == "concrete") return BuildKind::concrete;
  if (s == "general") return BuildKind::general;
  if (s == "linear") return BuildKind::linear;
  if (s == "unsheared") return BuildKind::unsheared;
  if (s == "loaded") return BuildKind::loaded;
  throw BuildError("unknown build kind '" + s + "'");
}

bool CentreAnnulus::contains(double x) const {
  const double d = x - lo - std::floor(x - lo);
  return d > 0.0 && d < hi - lo;
}

TorusEndo::TorusEndo(CircleMap g, int lambda, std::vector<CircleMap> shears, int period,
                     std::vector<CentreAnnulus> annuli, BuildInfo info)
    : g_(std::move(g)),
      lambda_(lambda),
      shears_(std::move(shears)),
      period_(period),
      annuli_(std::move(annuli)),
      info_(std::move(info)) {
  if (lambda_ == 0) throw BuildError("lambda must be nonzero");
  if (period_ < 1 || period_ > 2) throw BuildError("period must be 1 or 2");
  int t = 0;
  for (const CircleMap& s : shears_) t += s.degree();
  B_ = {g_.degree(), 0, t, lambda_};
  if (!(g_.min_abs_deriv() > 0.0)) throw BuildError("g is not a local diffeomorphism: g' vanishes somewhere");
  dist_to_linear_ = compute_dist_to_linear();
}

double TorusEndo::shear_lift(double x) const {
  double s = 0.0;
  for (const CircleMap& m : shears_) s += m.lift(x);
  return s;
}

double TorusEndo::shear_deriv(double x) const {
  double s = 0.0;
  for (const CircleMap& m : shears_) s += m.deriv(x);
  return s;
}

Vec2 TorusEndo::apply_lift(Vec2 p) const { return {g_.lift(p.x), lambda_ * p.y + shear_lift(p.x)}; }

Vec2 TorusEndo::apply(Vec2 p) const { return wrap(apply_lift(p)); }

Mat2 TorusEndo::derivative(Vec2 p) const { return {g_.deriv(p.x), 0.0, shear_deriv(p.x), double(lambda_)}; }

Vec2 TorusEndo::inverse_lift(Vec2 p) const {
  const double x = g_.lift_inverse(p.x);
  return {x, (p.y - shear_lift(x)) / lambda_};
}

Vec2 TorusEndo::local_inverse(Vec2 q, int branch, int y_branch) const {
  const int deg = std::abs(g_.degree());
  if (branch < 0 || branch >= deg)
    throw std::out_of_range("branch " + std::to_string(branch) + " outside [0, " + std::to_string(deg) + ")");
  if (y_branch < 0 || y_branch >= std::abs(lambda_))
    throw std::out_of_range("y_branch " + std::to_string(y_branch) + " outside [0, |lambda|)");
  const double x = g_.preimages(wrap01(q.x))[branch];
  const double y = (wrap01(q.y) - shear_lift(x) + y_branch) / lambda_;
  return {x, wrap01(y)};
}

Mat2 TorusEndo::dinverse(Vec2 q, int branch) const { return inverse(derivative(local_inverse(q, branch))); }

Vec2 TorusEndo::step(Vec2 p) const {
  for (int i = 0; i < period_; ++i) p = apply(p);
  return p;
}

Mat2 TorusEndo::step_derivative(Vec2 p) const {
  Mat2 m = derivative(p);
  for (int i = 1; i < period_; ++i) {
    p = apply(p);
    m = derivative(p) * m;
  }
  return m;
}

double TorusEndo::step_x_lift(double x) const {
  for (int i = 0; i < period_; ++i) x = g_.lift(x);
  return x;
}

double TorusEndo::step_x_deriv(double x) const {
  double d = 1.0;
  for (int i = 0; i < period_; ++i) {
    d *= g_.deriv(x);
    x = g_.lift(x);
  }
  return d;
}

Vec2 TorusEndo::step_lift_in(const CentreAnnulus& A, Vec2 p) const {
  for (int i = 0; i < period_; ++i) p = apply_lift(p);
  return {p.x - A.lift_shift, p.y};
}

Vec2 TorusEndo::step_inverse_in(const CentreAnnulus& A, Vec2 p) const {
  p.x += A.lift_shift;
  for (int i = 0; i < period_; ++i) p = inverse_lift(p);
  return p;
}

int TorusEndo::annulus_of(double x) const {
  for (std::size_t i = 0; i < annuli_.size(); ++i)
    if (annuli_[i].contains(x)) return int(i);
  return -1;
}

bool TorusEndo::in_core(double x) const {
  for (const CentreAnnulus& A : annuli_)
    if (std::fabs(circle_diff(x, A.centre)) < A.core_radius) return true;
  return false;
}

bool TorusEndo::in_UK(double x) const {
  for (const CentreAnnulus& A : annuli_) {
    const double d = x - A.lo - std::floor(x - A.lo);
    if (d > A.edge_radius && d < A.hi - A.lo - A.edge_radius) return false;
  }
  return true;
}

double TorusEndo::compute_dist_to_linear() const { return lift_distance(*this, nullptr); }

double lift_distance(const TorusEndo& f, const CentreAnnulus* annulus, int grid) {
  const int P = annulus ? f.period() : 1;
  const IntMat2& B = f.B();
  const IntMat2 M = P == 1 ? B : B * B;
  double sup = 0.0;
  for (int i = 0; i < grid; ++i) {
    const double x = double(i) / grid;
    const Vec2 q = annulus ? f.step_lift_in(*annulus, {x, 0.0}) : f.apply_lift({x, 0.0});
    sup = std::max(sup, std::hypot(q.x - M.a * x, q.y - M.c * x));
  }
  double mg = f.g().max_abs_deriv();
  double ms = 0.0;
  for (const CircleMap& s : f.shears()) ms += s.max_abs_deriv();
  const double lam = std::fabs(double(f.lambda()));
  double lip;
  if (P == 1)
    lip = mg + std::fabs(double(M.a)) + ms + std::fabs(double(M.c));
  else
    lip = mg * mg + std::fabs(double(M.a)) + lam * ms + ms * mg + std::fabs(double(M.c));
  return sup + 0.5 * lip / grid;
}

namespace {

// Anchors for g on one annulus (L, R): attracting fixed point at the centre,
// repelling fixed points at L and R with a slow band just inside each.
void g_annulus_anchors(std::vector<Anchor>& out, double L, double R, double sL, double sR, bool free_L,
                       bool free_R, const DesignParams& d) {
  const double H = 0.5 * (R - L);
  const double c = 0.5 * (L + R);
  const double h = d.smooth_frac * H;
  const double bs = d.band_slope;
  out.push_back(fixed_point(c, d.kappa, d.core_frac * H));

  const double rbR = H / (2 * sR);
  out.push_back(fixed_point(R, free_R ? std::nullopt : std::optional<double>(sR), rbR));
  {
    const double lo = R - sR * rbR;
    const double hi = R - rbR - 4 * h;
    const double v_hi = R - sR * rbR - 2 * h * (sR + bs);
    out.push_back({0.5 * (lo + hi), v_hi - bs * 0.5 * (hi - lo), bs, 0.5 * (hi - lo)});
  }
  const double rbL = H / (2 * sL);
  out.push_back(fixed_point(L, free_L ? std::nullopt : std::optional<double>(sL), rbL));
  {
    const double lo = L + rbL + 4 * h;
    const double hi = L + sL * rbL;
    const double v_lo = L + sL * rbL + 2 * h * (sL + bs);
    out.push_back({0.5 * (lo + hi), v_lo + bs * 0.5 * (hi - lo), bs, 0.5 * (hi - lo)});
  }
}

// Shear of total rise J across the annulus centred at c with half-width H,
// taking the value base on the far side of the rise.
MapSpec shear_spec(double c, double H, int J, double base, const DesignParams& d) {
  MapSpec s;
  s.degree = J;
  s.smoothing_width = d.smooth_frac * H;
  s.anchors.push_back({c, base + 0.5 * J, d.shear_slope_per_rise * J, d.core_frac * H});
  s.anchors.push_back({c + 0.5, base + J, 0.0, 0.5 - d.plateau_frac * H});
  return s;
}

CentreAnnulus make_annulus(std::string name, double lo, double hi, double centre, double core, double edge,
                           double slope_lo, double slope_hi) {
  CentreAnnulus A;
  A.name = std::move(name);
  const double shift = std::floor(centre);
  A.lo = lo - shift;
  A.hi = hi - shift;
  A.centre = centre - shift;
  A.core_radius = core;
  A.edge_radius = edge;
  A.edge_slope_lo = slope_lo;
  A.edge_slope_hi = slope_hi;
  return A;
}

void set_lift_shifts(const TorusEndo& f, std::vector<CentreAnnulus>& annuli) {
  for (CentreAnnulus& A : annuli) A.lift_shift = int(std::lround(f.step_x_lift(A.centre) - A.centre));
}

std::vector<Piece> anchors_to_pieces(const std::vector<Anchor>& anchors) {
  std::vector<Piece> pieces;
  for (const Anchor& a : anchors) {
    const double s = *a.slope;
    pieces.push_back({a.x - a.radius, a.x + a.radius, a.value - s * a.radius, s});
  }
  std::sort(pieces.begin(), pieces.end(), [](const Piece& p, const Piece& q) { return p.x0 < q.x0; });
  std::vector<Piece> merged;
  for (const Piece& q : pieces) {
    if (!merged.empty() && q.x0 <= merged.back().x1 + 1e-13) {
      Piece& p = merged.back();
      if (std::fabs(p.slope - q.slope) > 1e-12 || std::fabs(p.at(q.x0) - q.y0) > 1e-12)
        throw BuildError("overlapping affine constraints in the period-two template");
      p.x1 = std::max(p.x1, q.x1);
      continue;
    }
    merged.push_back(q);
  }
  return merged;
}

}  // namespace

TorusEndo build_concrete(const DesignParams& design) {
  const double a = design.a;
  if (!(a > 0 && a < 0.25)) throw BuildError("concrete build needs 0 < a < 1/4");
  const double s_out = (4 - 2 * a) / (1 - 2 * a);
  const double H = a;

  MapSpec gs;
  gs.degree = 4;
  gs.smoothing_width = design.smooth_frac * H;
  gs.linear_outside = LinearOutside{-a, a, 4.0, false};
  g_annulus_anchors(gs.anchors, -a, a, s_out, s_out, true, true, design);
  CircleMap g = build_from_spec(gs);
  CircleMap phi = build_from_spec(shear_spec(0.0, H, 2, -1.0, design));

  std::vector<CentreAnnulus> annuli{
      make_annulus("X", -a, a, 0.0, design.core_frac * H, H / (2 * s_out), s_out, s_out)};
  BuildInfo info;
  info.kind = BuildKind::concrete;
  info.lambda = 3;
  info.mu = 4;
  info.t = 2;
  info.a = a;
  info.design = design;
  info.notes = {"g'(0) = kappa, g' = outer slope on a neighbourhood of +-a",
                "phi'(0) = shear_slope_per_rise * 2, phi constant beyond plateau_frac * a from 0",
                "slow band of slope band_slope inside each boundary neighbourhood"};
  TorusEndo f(g, 3, {phi}, 1, annuli, info);
  set_lift_shifts(f, annuli);
  return TorusEndo(std::move(g), 3, {std::move(phi)}, 1, annuli, info);
}

double general_a(int lambda, int mu) {
  const double T = 1.5 * std::abs(lambda);
  if (2.0 * mu - 1.0 >= T) return 0.125;
  return (T - mu) / (4 * (T - 1));
}

namespace {

TorusEndo build_general_positive(int lambda, int mu, int t, const DesignParams& design) {
  const double a = general_a(lambda, mu);
  const double s_out = (mu - 4 * a) / (1 - 4 * a);
  const double H = a;

  MapSpec gs;
  gs.degree = mu;
  gs.smoothing_width = design.smooth_frac * H;
  gs.linear_outside = LinearOutside{-2 * a, 2 * a, double(std::abs(lambda)), true};
  g_annulus_anchors(gs.anchors, -2 * a, 0.0, s_out, s_out, true, false, design);
  g_annulus_anchors(gs.anchors, 0.0, 2 * a, s_out, s_out, false, true, design);
  CircleMap g = build_from_spec(gs);
  CircleMap phi = build_from_spec(shear_spec(-a, H, t + 1, 0.0, design));
  CircleMap psi = build_from_spec(shear_spec(a, H, -1, 0.0, design));

  const int period = lambda > 0 ? 1 : 2;
  const double edge = H / (2 * s_out) / (period == 2 ? s_out : 1.0);
  const double se = period == 2 ? s_out * s_out : s_out;
  std::vector<CentreAnnulus> annuli{make_annulus("X1", -2 * a, 0.0, -a, design.core_frac * H, edge, se, se),
                                    make_annulus("X2", 0.0, 2 * a, a, design.core_frac * H, edge, se, se)};
  BuildInfo info;
  info.kind = BuildKind::general;
  info.lambda = lambda;
  info.mu = mu;
  info.t = t;
  info.a = a;
  info.design = design;
  info.notes = {"fixed points 0, +-a, +-2a; attracting at +-a",
                "phi rises t+1 across (-2a, 0); psi falls 1 across (0, 2a) with psi(0)=0, psi(a)=-1/2, psi(2a)=-1"};
  if (period == 2) info.notes.push_back("lambda < 0: certification targets f^2");
  TorusEndo f(std::move(g), lambda, {std::move(phi), std::move(psi)}, period, annuli, info);
  set_lift_shifts(f, annuli);
  return TorusEndo(f.g(), lambda, f.shears(), period, annuli, info);
}

double negative_rho(int mu, double a) {
  const double m = std::abs(mu);
  return -(m + std::sqrt(m * m - 16 * a * (1 - 4 * a))) / (2 * (1 - 4 * a));
}

TorusEndo build_general_negative(int lambda, int mu, int t, const DesignParams& design) {
  const double lam = std::abs(lambda);
  double a = 1.0 / 16;
  while (std::fabs(negative_rho(mu, a)) < 1.4 * lam) {
    a += 1.0 / 64;
    if (a >= 0.2) throw BuildError("negative-mu build: cannot make |g'| exceed |lambda| outside I");
  }
  const double rho = negative_rho(mu, a);
  const double c = 1.0 / (double(mu) * mu - 1);
  const double u = 1.0 / std::fabs(1 + rho);
  if (!(u > 0 && u + 4 * a / std::fabs(rho) < 1 - 4 * a)) throw BuildError("negative-mu build: g(I) does not fit");
  const double P = c + 2 * a + u;
  const double H = a;
  const double s2 = rho * rho;

  // h = g^2 on I: five fixed points, attracting at c +- a.
  std::vector<Anchor> hs;
  g_annulus_anchors(hs, c - 2 * a, c, s2, s2, false, false, design);
  g_annulus_anchors(hs, c, c + 2 * a, s2, s2, false, false, design);
  std::vector<Piece> pieces = anchors_to_pieces(hs);
  pieces.front().y0 = pieces.front().at(c - 2 * a);
  pieces.front().x0 = c - 2 * a;
  pieces.back().x1 = c + 2 * a;
  const std::vector<Knot> hk = splice_pieces(pieces, design.smooth_frac * H, 1);

  // g = (g restricted to g(I))^-1 o h on I, affine with slope rho on J.
  std::vector<Knot> gk;
  for (const Knot& k : hk) gk.push_back({k.x, P + (k.y - (c + 2 * a)) / rho, k.slope / rho});
  gk.push_back({gk.front().x + 1.0, gk.front().y + mu, gk.front().slope});
  CircleMap g(mu, std::move(gk));

  CircleMap phi = build_from_spec(shear_spec(c - a, H, t + 1, 0.0, design));
  CircleMap psi = build_from_spec(shear_spec(c + a, H, -1, 0.0, design));

  const double core = design.core_frac * H;
  const double edge = H / (2 * s2);
  const double r = std::fabs(rho);
  std::vector<CentreAnnulus> annuli{
      make_annulus("I1", c - 2 * a, c, c - a, core, edge, s2, s2),
      make_annulus("I2", c, c + 2 * a, c + a, core, edge, s2, s2),
      make_annulus("gI1", g.lift(c), g.lift(c - 2 * a), g.lift(c - a), core / r, edge / r, s2, s2),
      make_annulus("gI2", g.lift(c + 2 * a), g.lift(c), g.lift(c + a), core / r, edge / r, s2, s2)};
  BuildInfo info;
  info.kind = BuildKind::general;
  info.lambda = lambda;
  info.mu = mu;
  info.t = t;
  info.a = a;
  info.rho = rho;
  info.centre = c;
  info.design = design;
  info.notes = {"period-two interval I centred at 1/(mu^2-1); g^2 on I has the five-fixed-point structure",
                "g affine with slope rho on the complement of I; certification targets f^2"};
  TorusEndo f(g, lambda, {phi, psi}, 2, annuli, info);
  set_lift_shifts(f, annuli);
  return TorusEndo(std::move(g), lambda, {std::move(phi), std::move(psi)}, 2, annuli, info);
}

}  // namespace

TorusEndo build_general(int lambda, int mu, int t, const DesignParams& design) {
  if (std::abs(lambda) <= 1 || std::abs(mu) <= 1)
    throw BuildError("non-expanding linearisation: need |lambda| > 1 and |mu| > 1");
  if (t < 0) throw BuildError("t < 0 is not supported");
  if (mu == -2)
    throw BuildError("mu = -2 is not supported: x -> -2x has no point of exact period two on the circle");
  if (mu > 0) return build_general_positive(lambda, mu, t, design);
  return build_general_negative(lambda, mu, t, design);
}

TorusEndo build_linear(int mu, int lambda) {
  BuildInfo info;
  info.kind = BuildKind::linear;
  info.lambda = lambda;
  info.mu = mu;
  info.t = 0;
  info.a = 0.0;
  return TorusEndo(CircleMap::affine(mu), lambda, {}, 1, {}, info);
}

TorusEndo build_unsheared(const TorusEndo& f) {
  BuildInfo info = f.info();
  info.kind = BuildKind::unsheared;
  info.t = 0;
  return TorusEndo(f.g(), f.lambda(), {}, f.period(), f.annuli(), info);
}

}  // namespace tph
