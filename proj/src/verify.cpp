#include "tph/verify.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <memory>
#include <optional>
#include <random>
#include <sstream>

#include "tph/centre_field.hpp"
#include "tph/cones.hpp"
#include "tph/conjugation.hpp"
#include "tph/curves.hpp"
#include "tph/regions.hpp"

namespace tph {

using nlohmann::json;

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::pass: return "PASS";
    case Verdict::fail: return "FAIL";
    case Verdict::undetermined: return "UNDETERMINED";
    case Verdict::not_applicable: return "NOT-APPLICABLE";
  }
  return "UNDETERMINED";
}

const std::vector<CheckInfo>& registry() {
  static const std::vector<CheckInfo> r{
      {"linearisation", "lift winds by the integer matrix B and stays within C of B"},
      {"general-construction", "general family: prescribed fixed points, slopes and shear windings"},
      {"conjugation", "integer conjugation of A to lower-triangular form"},
      {"cone-eps", "C_eps around each attracting circle maps inside itself and is expanded"},
      {"cone-delta", "B_delta around the horizontal maps inside the glued field on U_K"},
      {"horizontal-neighbourhood", "the pulled-back cone C^N contains the horizontal on V"},
      {"compatibility", "B_delta lies inside C^N where both are used"},
      {"glued-invariance", "the blended field C^u maps into its own interior"},
      {"partial-hyperbolicity", "some iterate expands every vector of C^u"},
      {"negative-slope", "E^c keeps one nonvertical slope sign on each annulus"},
      {"vertical-on-k", "E^c is vertical along orbits that stay in K"},
      {"centre-estimator", "the E^c estimate is Df-invariant and lies outside C^u"},
      {"invariant-annulus", "boundary circles are tangent to E^c; E^c is uniquely integrable inside"},
      {"boxes", "backward iterates of boxes stay vertically bounded"},
      {"branching", "two centre curves through one boundary point at a definite angle"},
      {"incoherence", "centre curves approach the shared circle with opposite slopes"},
      {"density", "preimages of the centre annuli are dense"},
      {"twice-identity", "an example homotopic to twice the identity"},
  };
  return r;
}

namespace {

json vec(Vec2 p) { return json::array({p.x, p.y}); }
json finite(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

bool is_general(const TorusEndo& f) { return f.info().kind == BuildKind::general; }

// Annuli i, j with A_i.hi == A_j.lo on the circle.
std::optional<std::pair<int, int>> shared_circle(const TorusEndo& f) {
  const auto& an = f.annuli();
  for (std::size_t i = 0; i < an.size(); ++i)
    for (std::size_t j = 0; j < an.size(); ++j)
      if (i != j && std::fabs(circle_diff(an[i].hi, an[j].lo)) < 1e-12) return std::make_pair(int(i), int(j));
  return std::nullopt;
}

// Shared state threaded through the checks in dependency order.
struct Context {
  const TorusEndo& f;
  const VerifyConfig& cfg;
  std::optional<EpsilonResult> eps;
  std::optional<DeltaResult> delta;
  std::unique_ptr<UnstableCones> cones;
  std::optional<InvarianceReport> invariance;
  std::optional<ExpansionReport> expansion;
  std::optional<IncoherenceReport> incoherence;
};

CertReport timed(const std::string& id, const std::function<void(CertReport&)>& body) {
  CertReport r;
  r.id = id;
  const auto t0 = std::chrono::steady_clock::now();
  try {
    body(r);
  } catch (const std::exception& e) {
    r.verdict = Verdict::fail;
    r.reason = e.what();
  }
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return r;
}

void require_field(const Context& c, CertReport& r) {
  if (!c.cones) {
    r.verdict = Verdict::undetermined;
    r.reason = "no cone field: cone-eps or cone-delta did not produce parameters";
  }
}

void check_linearisation(Context& c, CertReport& r) {
  const TorusEndo& f = c.f;
  const IntMat2& B = f.B();
  const Vec2 p{0.3, 0.7};
  const Vec2 e1 = f.apply_lift({p.x + 1, p.y}) - f.apply_lift(p);
  const Vec2 e2 = f.apply_lift({p.x, p.y + 1}) - f.apply_lift(p);
  const double wind_err = std::max({std::fabs(e1.x - B.a), std::fabs(e1.y - B.c), std::fabs(e2.x - B.b),
                                    std::fabs(e2.y - B.d)});
  std::mt19937_64 rng(c.cfg.seed);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  double worst = 0.0;
  for (int i = 0; i < 10000; ++i) {
    const Vec2 q{u(rng), u(rng)};
    const Vec2 fq = f.apply_lift(q);
    const Vec2 lin{B.a * q.x + B.b * q.y, B.c * q.x + B.d * q.y};
    worst = std::max(worst, norm(fq - lin));
  }
  const double min_g = f.g().min_abs_deriv();
  r.margins = {{"winding_error", wind_err},
               {"max_distance_sampled", worst},
               {"dist_to_linear", f.dist_to_linear()},
               {"min_abs_g_prime", min_g}};
  r.params = {{"B", json::array({{B.a, B.b}, {B.c, B.d}})}, {"samples", 10000}};
  const bool ok = wind_err < 1e-9 && worst <= f.dist_to_linear() && min_g > 0;
  r.verdict = ok ? Verdict::pass : Verdict::fail;
  if (!ok) {
    r.reason = wind_err >= 1e-9 ? "winding matrix differs from B" : "sampled distance exceeds dist_to_linear";
    r.witness = {{"B", r.params["B"]}};
  }
}

void check_general_construction(Context& c, CertReport& r) {
  const TorusEndo& f = c.f;
  const BuildInfo& in = f.info();
  if (!is_general(f)) {
    r.verdict = Verdict::not_applicable;
    r.reason = "not a general-family build";
    return;
  }
  const CircleMap& g = f.g();
  std::vector<std::string> failures;
  const IntMat2 want{in.mu, 0, in.t, in.lambda};
  if (!(f.B() == want)) failures.push_back("B differs from [[mu, 0], [t, lambda]]");
  double fix_err = 0.0, min_outer = INFINITY, attract = 0.0;
  json fixed = json::array();
  if (f.period() == 1 || in.mu > 0) {
    const double a = in.a;
    for (double x : {0.0, a, 2 * a, -a, -2 * a}) {
      fix_err = std::max(fix_err, std::fabs(circle_diff(g.eval(x), x)));
      fixed.push_back(x);
    }
    attract = std::max(g.deriv(a), g.deriv(-a));
    if (!(attract < 1)) failures.push_back("g'(+-a) >= 1");
    for (int i = 0; i < 4096; ++i) {
      const double x = 2 * a + (1 - 4 * a) * (i + 0.5) / 4096;
      min_outer = std::min(min_outer, std::fabs(g.deriv(x)));
    }
  } else {
    const double cc = in.centre, a = in.a;
    auto g2 = [&](double x) { return g.eval(g.eval(x)); };
    for (double x : {cc, cc + a, cc + 2 * a, cc - a, cc - 2 * a}) {
      fix_err = std::max(fix_err, std::fabs(circle_diff(g2(x), x)));
      fixed.push_back(x);
    }
    if (std::fabs(circle_diff(g.eval(cc), cc)) < 1e-6) failures.push_back("centre of I is fixed, not period two");
    attract = std::fabs(g.deriv(g.eval(cc + a)) * g.deriv(cc + a));
    if (!(attract < 1)) failures.push_back("(g^2)'(c +- a) >= 1");
    for (int i = 0; i < 4096; ++i) {
      const double x = cc + 2 * a + (1 - 4 * a) * (i + 0.5) / 4096;
      min_outer = std::min(min_outer, std::fabs(g.deriv(x)));
    }
  }
  if (fix_err > 1e-12) failures.push_back("prescribed fixed points moved");
  if (!(min_outer > std::abs(in.lambda))) failures.push_back("|g'| <= |lambda| outside the annuli");
  int wind = 0;
  json windings = json::array();
  for (const CircleMap& s : f.shears()) {
    wind += s.degree();
    windings.push_back(s.degree());
  }
  if (wind != in.t) failures.push_back("shear windings do not sum to t");
  r.margins = {{"fixed_point_error", fix_err}, {"attracting_slope", attract}, {"min_outer_slope", min_outer}};
  r.params = {{"lambda", in.lambda}, {"mu", in.mu}, {"t", in.t}, {"a", in.a}, {"period", f.period()},
              {"fixed_points", fixed}, {"shear_windings", windings}};
  if (in.rho != 0.0) r.params["rho"] = in.rho;
  r.verdict = failures.empty() ? Verdict::pass : Verdict::fail;
  if (!failures.empty()) {
    r.reason = failures.front();
    r.witness = {{"failures", failures}};
  }
}

void check_cone_eps(Context& c, CertReport& r) {
  if (c.f.annuli().empty()) {
    r.verdict = Verdict::not_applicable;
    r.reason = "no attracting circle";
    return;
  }
  const EpsilonResult e = find_epsilon(c.f);
  c.eps = e;
  r.margins = {{"margin", e.margin}, {"growth", e.growth}};
  r.params = {{"eps", e.eps}, {"sweep_steps", e.tried}, {"core_samples", 256}};
  r.verdict = Verdict::pass;
}

void check_cone_delta(Context& c, CertReport& r) {
  if (!c.f.annuli().empty() && !c.eps) {
    r.verdict = Verdict::undetermined;
    r.reason = "needs eps";
    return;
  }
  const Regions regions(c.f);
  const double eps = c.eps ? c.eps->eps : 0.5;
  const DeltaResult d = find_delta(c.f, regions, eps);
  c.delta = d;
  c.cones = std::make_unique<UnstableCones>(c.f, eps, d.delta);
  r.margins = {{"invariance_margin", d.invariance_margin}, {"containment_margin", finite(d.containment_margin)},
               {"entry_margin", finite(d.entry_margin)}};
  r.params = {{"delta", d.delta}, {"passing_sweep_values", d.passing}, {"samples", 2048}, {"N", regions.N()},
              {"covers", regions.covers()}};
  json strips = json::array();
  for (const StripV& v : regions.strips())
    strips.push_back({{"annulus", c.f.annuli()[v.annulus].name}, {"V", {v.lo, v.hi}},
                      {"F(V)", {v.image_lo, v.image_hi}}, {"N", v.N}});
  r.params["strips"] = strips;
  r.verdict = regions.covers() ? Verdict::pass : Verdict::fail;
  if (!regions.covers()) r.reason = "F(V) and U_K do not cover the circle";
}

void check_horizontal(Context& c, CertReport& r) {
  if (c.f.annuli().empty()) {
    r.verdict = Verdict::not_applicable;
    r.reason = "no strip V";
    return;
  }
  require_field(c, r);
  if (!c.cones) return;
  const TorusEndo& f = c.f;
  const Regions& regions = c.cones->regions();
  double margin = INFINITY;
  Vec2 worst;
  int sign_failures = 0, pattern_absent = 0;
  int samples = 0;
  for (std::size_t s = 0; s < regions.strips().size(); ++s) {
    const StripV& v = regions.strips()[s];
    const CentreAnnulus& A = f.annuli()[v.annulus];
    const int sg = shear_sign(f, A);
    const int n = 1000;
    for (int i = 0; i < n; ++i) {
      const double x = v.lo + (v.hi - v.lo) * (i + 0.5) / n;
      const Cone cn = c.cones->cn(int(s), {x, 0.0});
      const double m = -exclusion_margin(cn, {1.0, 0.0});
      ++samples;
      if (m < margin) {
        margin = m;
        worst = {x, 0.0};
      }
      // Exact inverse chain applied to a boundary-quadrant vector.
      std::vector<Mat2> chain;
      double xx = x;
      for (int k = 0; k < v.N; ++k) {
        chain.push_back(f.step_derivative({xx, 0.0}));
        xx = f.step_x_lift(xx) - A.lift_shift;
      }
      // The quadrant argument needs positive diagonals and a lower-left entry
      // of the shear's sign; negative lambda breaks it for f^2.
      const bool pattern = std::all_of(chain.begin(), chain.end(),
                                       [&](const Mat2& m) { return m.a > 0 && m.d > 0 && sg * m.c >= 0; });
      if (!pattern) {
        ++pattern_absent;
        continue;
      }
      Vec2 u{1.0, -double(sg)};
      bool kept = true;
      for (int k = v.N - 1; k >= 0; --k) {
        u = inverse(chain[k]) * u;
        if (!(u.x > 0 && sg * u.y < 0)) kept = false;
      }
      if (!kept) ++sign_failures;
    }
  }
  r.margins = {{"min_horizontal_margin", margin},
               {"sign_failures", sign_failures},
               {"sign_pattern_absent", pattern_absent}};
  r.params = {{"samples", samples}};
  r.verdict = margin > 0 && sign_failures == 0 ? Verdict::pass : Verdict::fail;
  if (r.verdict == Verdict::fail) {
    r.reason = margin <= 0 ? "C^N misses the horizontal" : "inverse chain left the boundary quadrant";
    r.witness = {{"point", vec(worst)}};
  }
}

void check_compatibility(Context& c, CertReport& r) {
  if (c.f.annuli().empty()) {
    r.verdict = Verdict::not_applicable;
    r.reason = "no strip V";
    return;
  }
  require_field(c, r);
  if (!c.cones) return;
  const TorusEndo& f = c.f;
  const UnstableCones& cu = *c.cones;
  const Regions& regions = cu.regions();
  const Cone bd = cone_delta(cu.delta());
  double blend_inner = INFINITY, blend_outer = INFINITY, coincide_b = 0.0, coincide_cn = 0.0;
  int overlap = 0;
  for (int i = 0; i < 4096; ++i) {
    const double x = (i + 0.5) / 4096;
    const int s = regions.strip_of(x);
    const Cone here = cu.at({x, 0.0});
    if (s < 0) {
      coincide_b = std::max({coincide_b, norm(here.b1 - bd.b1), norm(here.b2 - bd.b2)});
      continue;
    }
    const Cone cn = cu.cn(s, {x, 0.0});
    if (regions.in_image(x)) coincide_cn = std::max({coincide_cn, norm(here.b1 - cn.b1), norm(here.b2 - cn.b2)});
    if (f.in_UK(x)) {
      ++overlap;
      const Cone half = blend(bd, cn, 0.5);
      blend_inner = std::min(blend_inner, containment_margin(bd, half));
      blend_outer = std::min(blend_outer, containment_margin(half, cn));
    }
  }
  const DeltaResult& d = *c.delta;
  r.margins = {{"containment_margin", finite(d.containment_margin)},
               {"entry_margin", finite(d.entry_margin)},
               {"half_blend_contains_B_delta", finite(blend_inner)},
               {"half_blend_inside_CN", finite(blend_outer)},
               {"coincidence_B_delta_off_V", coincide_b},
               {"coincidence_CN_on_FV", coincide_cn}};
  r.params = {{"overlap_samples", overlap}, {"samples", 4096}};
  const bool ok = d.containment_margin > 0 && d.entry_margin > 0 && blend_inner > 0 && blend_outer > 0 &&
                  coincide_b <= 1e-10 && coincide_cn <= 1e-10;
  r.verdict = ok ? Verdict::pass : Verdict::fail;
  if (!ok) r.reason = "B_delta, the blend and C^N are not nested on V and U_K";
}

json invariance_json(const InvarianceReport& inv) {
  json cells = json::array();
  for (const FailCell& fc : inv.failing) cells.push_back({{"i", fc.i}, {"j", fc.j}, {"p", vec(fc.p)}, {"margin", finite(fc.margin)}});
  return {{"min_margin", finite(inv.min_margin)},
          {"min_cell_bound", finite(inv.min_adjusted_margin)},
          {"lipschitz", finite(inv.lipschitz)},
          {"global_lipschitz_bound", finite(inv.global_bound)},
          {"failing_count", inv.failing_count},
          {"worst", vec(inv.worst)},
          {"failing_cells", cells}};
}

void check_glued_invariance(Context& c, CertReport& r) {
  require_field(c, r);
  if (!c.cones) return;
  const InvarianceReport inv = certify_invariance(c.f, c.cones->field(), c.cfg.grid, c.cfg.exec);
  c.invariance = inv;
  r.margins = invariance_json(inv);
  r.params = {{"grid", c.cfg.grid}, {"eps", c.cones->eps()}, {"delta", c.cones->delta()}};
  // Control: C_eps everywhere must fail on U_K.
  if (c.eps && !c.f.annuli().empty()) {
    const int sg = shear_sign(c.f, c.f.annuli()[0]);
    const Cone ce = cone_eps(c.eps->eps, sg);
    const ConeField wrong{"C_eps everywhere", [ce](Vec2) { return ce; }};
    const TorusEndo& f = c.f;
    const InvarianceReport ctl =
        certify_invariance(f, wrong, 128, c.cfg.exec, [&f](Vec2 p) { return f.in_UK(p.x); });
    r.margins["control_eps_field_on_UK"] = {{"min_margin", finite(ctl.min_margin)}, {"fails", !ctl.pass}};
  }
  r.verdict = inv.pass ? Verdict::pass : Verdict::fail;
  if (!inv.pass) {
    r.reason = "cells with non-positive interpolated margin";
    r.witness = r.margins["failing_cells"];
  }
}

void check_expansion(Context& c, CertReport& r) {
  require_field(c, r);
  if (!c.cones) return;
  const ExpansionReport ex = certify_expansion(c.f, c.cones->field(), c.cfg.k_max, c.cfg.expansion_grid, c.cfg.exec);
  c.expansion = ex;
  r.margins = {{"k", ex.k}, {"growth", ex.growth}, {"min_growth_by_k", ex.min_growth}, {"m", ex.m}};
  r.params = {{"k_max", c.cfg.k_max}, {"grid", c.cfg.expansion_grid}, {"threshold", 1.05}, {"orbit_length", 100}};
  r.verdict = ex.pass ? Verdict::pass : Verdict::fail;
  if (!ex.pass) r.reason = "no k <= k_max reaches growth 1.05";
}

void check_negative_slope(Context& c, CertReport& r) {
  const TorusEndo& f = c.f;
  if (f.annuli().empty()) {
    r.verdict = Verdict::not_applicable;
    r.reason = "no centre annulus";
    return;
  }
  const int n = c.cfg.slope_grid;
  const std::vector<SlopeClass> grid = slope_grid(f, n, c.cfg.exec);
  const std::size_t na = f.annuli().size();
  std::vector<std::array<int, 4>> counts(na, {0, 0, 0, 0});
  for (int i = 0; i < n; ++i) {
    const double x = (i + 0.5) / n;
    const int a = f.annulus_of(x);
    if (a < 0) continue;
    for (int j = 0; j < n; ++j) ++counts[a][int(grid[std::size_t(i) * n + j])];
  }
  json per = json::array();
  std::vector<int> sign(na, 0);
  bool ok = true;
  for (std::size_t a = 0; a < na; ++a) {
    const auto& k = counts[a];
    per.push_back({{"annulus", f.annuli()[a].name},
                   {"neg", k[0]},
                   {"pos", k[1]},
                   {"vertical", k[2]},
                   {"undetermined", k[3]}});
    if (k[0] > 0 && k[1] == 0 && k[2] == 0) sign[a] = -1;
    else if (k[1] > 0 && k[0] == 0 && k[2] == 0) sign[a] = 1;
    else ok = false;
  }
  if (f.info().kind == BuildKind::concrete && sign[0] != -1) ok = false;
  if (auto sc = shared_circle(f)) {
    if (sign[sc->first] == 0 || sign[sc->first] != -sign[sc->second]) ok = false;
  }
  r.margins = {{"per_annulus", per}};
  r.params = {{"grid", n}, {"vertical_tol", 1e-6}};
  r.verdict = ok ? Verdict::pass : Verdict::fail;
  if (!ok) r.reason = "determined cells in an annulus do not share one nonvertical sign";
}

void check_vertical_on_k(Context& c, CertReport& r) {
  const TorusEndo& f = c.f;
  const int n = c.cfg.slope_grid;
  // Sample K-orbits backward and keep them: iterating forward would
  // amplify rounding by g' each step and drift into the annuli.
  std::mt19937_64 rng(c.cfg.seed + 29);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  constexpr int kSteps = 50;
  const int depth = 64 + kSteps;
  std::vector<CentreSample> s;
  int rejected = 0;
  for (int i = 0; i < n; ++i) {
    std::vector<double> xs{u(rng)};
    while (f.annulus_of(xs[0]) >= 0) xs[0] = u(rng);
    for (int k = 0; k < kSteps; ++k) {
      std::vector<double> pre;
      for (double z : f.g().preimages(xs.back()))
        if (f.annulus_of(z) < 0) pre.push_back(z);
      if (pre.empty()) break;
      xs.push_back(pre[std::size_t(u(rng) * pre.size()) % pre.size()]);
    }
    if (int(xs.size()) != kSteps + 1) {
      ++rejected;
      continue;
    }
    std::reverse(xs.begin(), xs.end());
    std::vector<CentreSample> row(n);
    for (int j = 0; j < n; ++j) {
      std::vector<Vec2> orbit{{xs[0], (j + 0.5) / n}};
      for (int k = 1; k <= kSteps; ++k) orbit.push_back({xs[k], wrap01(f.apply(orbit.back()).y)});
      row[j] = centre_direction_along(f, orbit, depth);
    }
    s.insert(s.end(), row.begin(), row.end());
  }
  int vertical = 0, undetermined = 0;
  double worst = 0.0;
  Vec2 bad{NAN, NAN};
  for (const CentreSample& cs : s) {
    const SlopeClass k = classify(cs);
    if (k == SlopeClass::vertical) ++vertical;
    else if (k == SlopeClass::undetermined) ++undetermined;
    else if (std::isnan(bad.x)) bad = cs.p;
    if (!cs.undetermined) worst = std::max(worst, std::fabs(cs.direction.x));
  }
  const int cells = int(s.size());
  r.margins = {{"samples", cells}, {"vertical", vertical}, {"undetermined", undetermined},
               {"max_abs_dx", worst}, {"orbits_without_K_preimage", rejected}};
  r.params = {{"orbits", n}, {"points_per_orbit", n}, {"orbit_length", kSteps}, {"depth", depth}, {"vertical_tol", 1e-6},
              {"seed", c.cfg.seed + 29}};
  const bool ok = cells > 0 && vertical + undetermined == cells;
  r.verdict = ok ? Verdict::pass : (cells == 0 ? Verdict::undetermined : Verdict::fail);
  if (cells == 0) r.reason = "no 50-step orbit in K found";
  else if (!ok) {
    r.reason = "nonvertical E^c on a K-orbit";
    r.witness = {{"point", vec(bad)}};
  }
}

void check_centre_estimator(Context& c, CertReport& r) {
  const TorusEndo& f = c.f;
  std::mt19937_64 rng(c.cfg.seed + 17);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double worst = 0.0;
  Vec2 worst_p;
  int undetermined = 0, outside_failures = 0, compared = 0;
  double worst_exclusion = INFINITY;
  for (int i = 0; i < c.cfg.centre_samples; ++i) {
    const Vec2 p{u(rng), u(rng)};
    bool und = false;
    const double res = invariance_check(f, p, c.cfg.centre_depth, &und);
    if (und) {
      ++undetermined;
      continue;
    }
    if (res > worst) {
      worst = res;
      worst_p = p;
    }
    if (c.cones) {
      const CentreSample s = centre_direction_adaptive(f, p);
      if (s.undetermined) continue;
      ++compared;
      const double m = exclusion_margin(c.cones->at(p), s.direction);
      worst_exclusion = std::min(worst_exclusion, m);
      if (!(m > 0)) ++outside_failures;
    }
  }
  r.margins = {{"max_invariance_residual", worst},
               {"undetermined", undetermined},
               {"complementarity_samples", compared},
               {"min_exclusion_angle", finite(worst_exclusion)},
               {"complementarity_failures", outside_failures}};
  r.params = {{"samples", c.cfg.centre_samples}, {"depth", c.cfg.centre_depth}, {"seed", c.cfg.seed + 17}};
  const bool ok = worst <= 1e-6 && outside_failures == 0;
  r.verdict = ok ? Verdict::pass : Verdict::fail;
  if (!ok) {
    r.reason = worst > 1e-6 ? "invariance residual above 1e-6" : "E^c inside C^u";
    r.witness = {{"point", vec(worst_p)}};
  }
  if (ok && !c.cones) r.reason = "complementarity skipped: no cone field";
}

void check_invariant_annulus(Context& c, CertReport& r) {
  const TorusEndo& f = c.f;
  if (f.annuli().empty()) {
    r.verdict = Verdict::not_applicable;
    r.reason = "no centre annulus";
    return;
  }
  double vert = 0.0;
  Vec2 worst;
  for (const CentreAnnulus& A : f.annuli())
    for (double b : {A.lo, A.hi})
      for (int j = 0; j < 256; ++j) {
        const Vec2 p{wrap01(b), (j + 0.5) / 256};
        const CentreSample s = boundary_direction(f, p);
        if (std::fabs(s.direction.x) > vert) {
          vert = std::fabs(s.direction.x);
          worst = p;
        }
      }
  const CentreAnnulus& A = f.annuli()[0];
  const UniquenessReport u = annulus_uniqueness(f, A, c.cfg.curve_length, c.cfg.step);
  r.margins = {{"boundary_max_abs_dx", vert},
               {"leaf_length_inside", u.leaf_length},
               {"length_compared", u.length_used},
               {"curve_separation", u.separation},
               {"tangency_residual", u.tangency_residual},
               {"stayed_inside", u.inside}};
  r.params = {{"points_per_circle", 256}, {"annulus", A.name}, {"start", vec(u.start)}, {"offset", 1e-6},
              {"length", c.cfg.curve_length}, {"step", c.cfg.step}};
  const bool ok = vert <= 1e-9 && u.pass;
  r.verdict = ok ? Verdict::pass : Verdict::fail;
  if (!ok) {
    r.reason = vert > 1e-9 ? "boundary circle not tangent to E^c" : u.reason;
    r.witness = {{"point", vec(vert > 1e-9 ? worst : u.start)}};
  }
}

void check_boxes(Context& c, CertReport& r) {
  const TorusEndo& f = c.f;
  if (f.annuli().empty()) {
    r.verdict = Verdict::not_applicable;
    r.reason = "no centre annulus";
    return;
  }
  json per = json::array();
  bool ok = true;
  for (const CentreAnnulus& A : f.annuli()) {
    const BoundsCheck b = bounded_box_check(f, A, c.cfg.r0, c.cfg.box_steps);
    per.push_back({{"annulus", A.name}, {"C", b.C}, {"lambda", b.lambda}, {"r", b.r}, {"observed", b.observed},
                   {"pass", b.pass}});
    ok = ok && b.pass;
  }
  r.margins = {{"per_annulus", per}};
  r.params = {{"r0", c.cfg.r0}, {"n_max", c.cfg.box_steps}, {"samples", 64}, {"slack", 0.01}};
  r.verdict = ok ? Verdict::pass : Verdict::fail;
  if (!ok) r.reason = "observed extent exceeds r";
}

json branching_json(const BranchingReport& b) {
  return {{"annulus", b.annulus},          {"side", b.side},
          {"anchor", vec(b.anchor)},       {"boundary_x", b.boundary_x},
          {"free_x_final", b.free_x.empty() ? 0.0 : b.free_x.back()},
          {"endpoint_gap", b.endpoint_gap}, {"monotone", b.monotone},
          {"anchor_fixed", b.anchor_fixed}, {"nesting_error", b.nesting_error},
          {"bounds_observed", b.bounds.observed}, {"bounds_r", b.bounds.r},
          {"boundary_verticality", b.boundary_verticality}, {"q", vec(b.q)},
          {"angle", b.angle},              {"near_points", b.near_points},
          {"pass", b.pass},                {"reason", b.reason}};
}

void check_branching(Context& c, CertReport& r) {
  BranchingOptions opt;
  opt.step = c.cfg.step;
  opt.r0 = c.cfg.r0;
  const std::vector<BranchingReport> all = branching_scan(c.f, opt);
  json per = json::array();
  const BranchingReport* best = nullptr;
  for (const BranchingReport& b : all) {
    per.push_back(branching_json(b));
    // Prefer a passing boundary, then the widest angle.
    if (!best || (b.pass && !best->pass) || (b.pass == best->pass && b.angle > best->angle)) best = &b;
  }
  r.margins = {{"boundaries", per}};
  r.params = {{"jc_length", opt.jc_length}, {"step", opt.step}, {"n_back", opt.n_back},
              {"neighbourhood", opt.neighbourhood}, {"angle_threshold", opt.angle_threshold},
              {"endpoint_tol", opt.endpoint_tol}};
  r.verdict = best && best->pass ? Verdict::pass : Verdict::fail;
  if (best) r.witness = branching_json(*best);
  if (r.verdict == Verdict::fail) r.reason = best ? best->reason : "no boundary examined";
}

void check_incoherence(Context& c, CertReport& r) {
  const IncoherenceReport ic = incoherence_witness(c.f);
  c.incoherence = ic;
  if (!ic.applicable) {
    r.verdict = Verdict::not_applicable;
    r.reason = ic.reason;
    return;
  }
  r.margins = {{"circle", ic.circle},          {"distances", ic.distances},
               {"slope_left", ic.slope_left},  {"slope_right", ic.slope_right},
               {"sign_left", ic.sign_left},    {"sign_right", ic.sign_right},
               {"min_abs_slope", ic.min_abs_slope}};
  r.params = {{"y", 0.5}, {"period", c.f.period()}};
  r.verdict = ic.pass ? Verdict::pass : Verdict::fail;
  r.reason = ic.reason;
}

void check_density(Context& c, CertReport& r) {
  const TorusEndo& f = c.f;
  if (f.annuli().empty()) {
    r.verdict = Verdict::not_applicable;
    r.reason = "no centre annulus";
    return;
  }
  std::vector<Arc> level0;
  for (const CentreAnnulus& A : f.annuli()) level0.push_back({A.lo, A.hi});
  const auto levels = preimage_lamination(f.g(), level0, c.cfg.n_levels);
  const auto& l1 = levels.size() > 1 ? levels[1].intervals : levels[0].intervals;
  const std::size_t want = std::size_t(std::abs(f.g().degree())) * level0.size();
  // Every level-0 arc reappears in level 1.
  int matched = 0;
  for (const Arc& a : level0)
    for (const Arc& b : l1)
      if (std::fabs(circle_diff(a.lo, b.lo)) < 1e-12 && std::fabs((a.hi - a.lo) - (b.hi - b.lo)) < 1e-12) {
        ++matched;
        break;
      }
  bool disjoint = true;
  for (const AnnulusFamily& fam : levels) {
    std::vector<Arc> iv = fam.intervals;
    for (Arc& a : iv) {
      const double s = std::floor(a.lo);
      a.lo -= s;
      a.hi -= s;
    }
    std::sort(iv.begin(), iv.end(), [](const Arc& a, const Arc& b) { return a.lo < b.lo; });
    for (std::size_t i = 0; i + 1 < iv.size(); ++i)
      if (iv[i].hi > iv[i + 1].lo + 1e-12) disjoint = false;
    if (iv.size() > 1 && iv.back().hi > iv.front().lo + 1 + 1e-12) disjoint = false;
  }
  json gaps = json::array(), counts = json::array();
  for (const AnnulusFamily& fam : levels) {
    gaps.push_back(fam.max_gap);
    counts.push_back(fam.intervals.size());
  }
  const double gap = levels.back().max_gap;
  r.margins = {{"max_gap", gap}, {"max_gap_by_level", gaps}, {"count_by_level", counts},
               {"level1_matches_level0", matched}, {"disjoint", disjoint}};
  r.params = {{"n_levels", c.cfg.n_levels}, {"gap_threshold", 0.01}};
  const bool ok = gap <= 0.01 && l1.size() == want && matched == int(level0.size()) && disjoint;
  r.verdict = ok ? Verdict::pass : Verdict::fail;
  if (!ok) {
    if (gap > 0.01) r.reason = "max gap above 0.01";
    else if (l1.size() != want) r.reason = "level-1 component count is not |deg g| per annulus";
    else if (matched != int(level0.size())) r.reason = "level 1 does not contain the annuli";
    else r.reason = "components overlap";
  }
}

void check_twice_identity(Context& c, CertReport& r) {
  const IntMat2 twice{2, 0, 0, 2};
  if (!(c.f.B() == twice)) {
    r.verdict = Verdict::not_applicable;
    r.reason = "linearisation is not twice the identity";
    return;
  }
  const bool ph = c.invariance && c.invariance->pass && c.expansion && c.expansion->pass;
  const bool inc = c.incoherence && c.incoherence->pass;
  r.margins = {{"partially_hyperbolic", ph}, {"incoherence_witness", inc}};
  r.params = {{"B", json::array({{2, 0}, {0, 2}})}};
  r.verdict = ph && inc ? Verdict::pass : Verdict::fail;
  if (r.verdict != Verdict::pass) r.reason = ph ? "incoherence witness failed" : "cone certification failed";
}

}  // namespace

CertReport check_conjugation(int trials, std::uint64_t seed) {
  return timed("conjugation", [&](CertReport& r) {
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<int> eig(-6, 6), off(-5, 5), steps(1, 6), kind(0, 3), amount(-3, 3);
    int ok = 0;
    json witness;
    for (int i = 0; i < trials; ++i) {
      int mu = 0, lam = 0;
      while (std::abs(mu) < 1) mu = eig(rng);
      while (std::abs(lam) < 1) lam = eig(rng);
      const IntMat2 B0{mu, 0, off(rng), lam};
      // Random SL(2, Z) element as a product of elementary matrices.
      IntMat2 P0 = IntMat2::identity();
      for (int k = steps(rng); k > 0; --k) {
        const int t = amount(rng);
        const IntMat2 e = kind(rng) % 2 ? IntMat2{1, t, 0, 1} : IntMat2{1, 0, t, 1};
        P0 = e * P0;
      }
      const IntMat2 A = unimodular_inverse(P0) * B0 * P0;
      const ConjugationResult res = conjugate_to_triangular(A);
      const bool tri = res.B.b == 0;
      const bool exact = res.P * A == res.B * res.P;
      const bool unimod = std::llabs(res.P.det()) == 1;
      std::array<std::int64_t, 2> d0{B0.a, B0.d}, d1{res.B.a, res.B.d};
      std::sort(d0.begin(), d0.end());
      std::sort(d1.begin(), d1.end());
      if (tri && exact && unimod && d0 == d1) ++ok;
      else if (witness.is_null()) witness = {{"A", to_string(A)}, {"P", to_string(res.P)}, {"B", to_string(res.B)}};
    }
    r.margins = {{"round_trips_ok", ok}};
    r.params = {{"trials", trials}, {"seed", seed}};
    r.verdict = ok == trials ? Verdict::pass : Verdict::fail;
    if (ok != trials) {
      r.reason = "round trip failed";
      r.witness = witness;
    }
  });
}

std::vector<CertReport> run_all(const TorusEndo& f, const VerifyConfig& cfg) {
  if (cfg.grid < 2 || cfg.expansion_grid < 2 || cfg.slope_grid < 2) throw std::invalid_argument("grids must be >= 2");
  if (cfg.k_max < 1) throw std::invalid_argument("k_max must be >= 1");
  if (cfg.n_levels < 0 || cfg.box_steps < 1 || !(cfg.r0 > 0) || !(cfg.step > 0 && cfg.step <= 1e-3))
    throw std::invalid_argument("invalid verification parameters");
  Context c{f, cfg, {}, {}, {}, {}, {}, {}};
  using Fn = void (*)(Context&, CertReport&);
  const std::vector<std::pair<std::string, Fn>> steps{
      {"linearisation", check_linearisation},
      {"general-construction", check_general_construction},
      {"conjugation", nullptr},
      {"cone-eps", check_cone_eps},
      {"cone-delta", check_cone_delta},
      {"horizontal-neighbourhood", check_horizontal},
      {"compatibility", check_compatibility},
      {"glued-invariance", check_glued_invariance},
      {"partial-hyperbolicity", check_expansion},
      {"negative-slope", check_negative_slope},
      {"vertical-on-k", check_vertical_on_k},
      {"centre-estimator", check_centre_estimator},
      {"invariant-annulus", check_invariant_annulus},
      {"boxes", check_boxes},
      {"branching", check_branching},
      {"incoherence", check_incoherence},
      {"density", check_density},
      {"twice-identity", check_twice_identity},
  };
  std::vector<CertReport> out;
  for (const auto& [id, fn] : steps) {
    if (!fn) {
      out.push_back(check_conjugation(cfg.conjugation_trials, cfg.seed));
      continue;
    }
    out.push_back(timed(id, [&](CertReport& r) { fn(c, r); }));
  }
  return out;
}

json report_json(const TorusEndo& f, const VerifyConfig& cfg, const std::vector<CertReport>& reports) {
  const BuildInfo& in = f.info();
  const DesignParams& d = in.design;
  json build = {{"kind", to_string(in.kind)},
                {"lambda", f.lambda()},
                {"mu", in.mu},
                {"t", in.t},
                {"a", in.a},
                {"period", f.period()},
                {"B", json::array({{f.B().a, f.B().b}, {f.B().c, f.B().d}})},
                {"dist_to_linear", f.dist_to_linear()}};
  json annuli = json::array();
  for (const CentreAnnulus& A : f.annuli())
    annuli.push_back({{"name", A.name}, {"lo", A.lo}, {"hi", A.hi}, {"centre", A.centre}, {"core", A.core_radius},
                      {"edge", A.edge_radius}});
  build["annuli"] = annuli;
  json design = {{"kappa", d.kappa},
                 {"band_slope", d.band_slope},
                 {"core_frac", d.core_frac},
                 {"smooth_frac", d.smooth_frac},
                 {"plateau_frac", d.plateau_frac},
                 {"shear_slope_per_rise", d.shear_slope_per_rise},
                 {"notes", in.notes},
                 {"psi_convention", "psi(0)=0, psi(a)=-1/2, psi(2a)=-1, psi' supported in (0, 2a)"},
                 {"depth_policy", {{"n_min", 64}, {"n_max", 1024}, {"tol", 1e-8}}}};
  json config = {{"grid", cfg.grid},          {"expansion_grid", cfg.expansion_grid},
                 {"k_max", cfg.k_max},        {"slope_grid", cfg.slope_grid},
                 {"centre_samples", cfg.centre_samples}, {"centre_depth", cfg.centre_depth},
                 {"n_levels", cfg.n_levels},  {"n_max", cfg.box_steps},
                 {"r0", cfg.r0},              {"length", cfg.curve_length},
                 {"step", cfg.step},          {"seed", cfg.seed},
                 {"exec", cfg.exec == Exec::parallel ? "parallel" : "serial"}};
  json checks = json::array();
  for (const CertReport& r : reports) {
    std::string anchor;
    for (const CheckInfo& ci : registry())
      if (ci.id == r.id) anchor = ci.anchor;
    checks.push_back({{"id", r.id},
                      {"anchor", anchor},
                      {"verdict", to_string(r.verdict)},
                      {"reason", r.reason},
                      {"margins", r.margins},
                      {"params", r.params},
                      {"witness", r.witness},
                      {"seconds", r.seconds}});
  }
  return {{"build", build},
          {"design", design},
          {"config", config},
          {"checks", checks},
          {"any_fail", any_fail(reports)}};
}

std::string summary_table(const std::vector<CertReport>& reports) {
  std::ostringstream os;
  char buf[256];
  std::snprintf(buf, sizeof buf, "%-26s %-15s %8s  %s\n", "check", "verdict", "seconds", "note");
  os << buf;
  for (const CertReport& r : reports) {
    std::snprintf(buf, sizeof buf, "%-26s %-15s %8.2f  %s\n", r.id.c_str(), to_string(r.verdict).c_str(), r.seconds,
                  r.reason.c_str());
    os << buf;
  }
  return os.str();
}

bool any_fail(const std::vector<CertReport>& reports) {
  return std::any_of(reports.begin(), reports.end(), [](const CertReport& r) { return r.verdict == Verdict::fail; });
}

}  // namespace tph
