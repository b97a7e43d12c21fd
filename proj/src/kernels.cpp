#include "tph/kernels.hpp"

#include <algorithm>
#include <cmath>

namespace tph {

namespace {

constexpr std::size_t kMaxListed = 32;

Vec2 cell_centre(int i, int j, int n) { return {(i + 0.5) / n, (j + 0.5) / n}; }

double cell_margin(const TorusEndo& f, const ConeField& field, Vec2 p) {
  try {
    const Cone img = map_cone(f.step_derivative(p), field.at(p));
    return containment_margin(img, field.at(f.step(p)));
  } catch (const ConeError&) {
    return -INFINITY;
  }
}

}  // namespace

InvarianceReport certify_invariance(const TorusEndo& f, const ConeField& field, int n, Exec exec,
                                    const std::function<bool(Vec2)>& restrict_to) {
  const std::size_t N = std::size_t(n) * n;
  std::vector<double> margin(N, INFINITY);
  std::vector<char> active(N, 1);

  auto fill = [&](std::int64_t idx) {
    const int i = int(idx / n), j = int(idx % n);
    const Vec2 p = cell_centre(i, j, n);
    if (restrict_to && !restrict_to(p)) {
      active[idx] = 0;
      return;
    }
    margin[idx] = cell_margin(f, field, p);
  };
  if (exec == Exec::parallel) {
#pragma omp parallel for schedule(dynamic, 256)
    for (std::int64_t idx = 0; idx < std::int64_t(N); ++idx) fill(idx);
  } else {
    for (std::int64_t idx = 0; idx < std::int64_t(N); ++idx) fill(idx);
  }

  // Cell lower bound: bilinear interpolation to the edge midpoints and
  // corners, periodic in both directions.
  std::vector<double> adjusted(N, INFINITY);
  double max_jump = 0.0;
  auto at = [&](int i, int j) {
    const std::size_t k = std::size_t((i + n) % n) * n + std::size_t((j + n) % n);
    return active[k] ? margin[k] : INFINITY;
  };
  auto adjust = [&](std::int64_t idx, double& jump_out) {
    if (!active[idx]) return;
    const int i = int(idx / n), j = int(idx % n);
    const double m = margin[idx];
    double lo = m;
    double jump = 0.0;
    for (int di = -1; di <= 1; di += 2) {
      for (int dj = -1; dj <= 1; dj += 2) {
        const double mx = at(i + di, j), my = at(i, j + dj), mxy = at(i + di, j + dj);
        if (std::isfinite(mx)) lo = std::min(lo, 0.5 * (m + mx));
        if (std::isfinite(my)) lo = std::min(lo, 0.5 * (m + my));
        if (std::isfinite(mx) && std::isfinite(my) && std::isfinite(mxy)) lo = std::min(lo, 0.25 * (m + mx + my + mxy));
      }
    }
    for (const double q : {at(i + 1, j), at(i - 1, j), at(i, j + 1), at(i, j - 1)})
      if (std::isfinite(q)) jump = std::max(jump, std::fabs(q - m));
    if (!std::isfinite(m)) lo = -INFINITY;
    adjusted[idx] = lo;
    jump_out = std::max(jump_out, jump);
  };
  if (exec == Exec::parallel) {
#pragma omp parallel for schedule(static) reduction(max : max_jump)
    for (std::int64_t idx = 0; idx < std::int64_t(N); ++idx) adjust(idx, max_jump);
  } else {
    for (std::int64_t idx = 0; idx < std::int64_t(N); ++idx) adjust(idx, max_jump);
  }

  InvarianceReport r;
  r.n = n;
  r.lipschitz = max_jump * n;
  for (std::size_t idx = 0; idx < N; ++idx) {
    if (!active[idx]) continue;
    const int i = int(idx / n), j = int(idx % n);
    if (margin[idx] < r.min_margin) {
      r.min_margin = margin[idx];
      r.worst = cell_centre(i, j, n);
    }
    r.min_adjusted_margin = std::min(r.min_adjusted_margin, adjusted[idx]);
    if (!(adjusted[idx] > 0)) {
      ++r.failing_count;
      if (r.failing.size() < kMaxListed) r.failing.push_back({i, j, cell_centre(i, j, n), margin[idx]});
    }
  }
  r.global_bound = r.min_margin - r.lipschitz * std::sqrt(0.5) / n;
  r.pass = r.failing_count == 0 && r.min_adjusted_margin > 0;
  return r;
}

ExpansionReport certify_expansion(const TorusEndo& f, const ConeField& field, int k_max, int n, Exec exec,
                                  double threshold, int orbit_length) {
  if (k_max < 1) throw std::invalid_argument("k_max must be at least 1");
  const std::int64_t N = std::int64_t(n) * n;

  auto cell = [&](std::int64_t idx, std::vector<double>& mins, int& m) {
    const Vec2 p0 = cell_centre(int(idx / n), int(idx % n), n);
    const Cone c = field.at(p0);
    const double t0 = std::atan2(c.b1.y, c.b1.x);
    const double w = width(c);
    Vec2 u[5];
    for (int j = 0; j < 5; ++j) u[j] = direction(t0 + w * j / 4.0);
    Vec2 p = p0;
    for (int k = 0; k < k_max; ++k) {
      const Mat2 d = f.step_derivative(p);
      double g = INFINITY;
      for (Vec2& v : u) {
        v = d * v;
        g = std::min(g, norm(v));
      }
      mins[k] = std::min(mins[k], g);
      p = f.step(p);
    }
    int outside = 0;
    p = p0;
    for (int s = 0; s < orbit_length; ++s) {
      if (!f.in_core(p.x) && !f.in_UK(p.x)) ++outside;
      p = f.step(p);
    }
    m = std::max(m, outside);
  };

  std::vector<double> mins(k_max, INFINITY);
  int m = 0;
  if (exec == Exec::parallel) {
#pragma omp parallel
    {
      std::vector<double> local(k_max, INFINITY);
      int lm = 0;
#pragma omp for schedule(dynamic, 256) nowait
      for (std::int64_t idx = 0; idx < N; ++idx) cell(idx, local, lm);
#pragma omp critical
      {
        for (int k = 0; k < k_max; ++k) mins[k] = std::min(mins[k], local[k]);
        m = std::max(m, lm);
      }
    }
  } else {
    for (std::int64_t idx = 0; idx < N; ++idx) cell(idx, mins, m);
  }

  ExpansionReport r;
  r.min_growth = mins;
  r.m = m;
  for (int k = 0; k < k_max; ++k) {
    if (mins[k] >= threshold) {
      r.k = k + 1;
      r.growth = mins[k];
      break;
    }
  }
  r.pass = r.k > 0;
  return r;
}

std::vector<SlopeClass> slope_grid(const TorusEndo& f, int n, Exec exec, const DepthPolicy& policy) {
  const std::int64_t N = std::int64_t(n) * n;
  std::vector<SlopeClass> out(N);
  auto cell = [&](std::int64_t idx) {
    out[idx] = classify(centre_direction_adaptive(f, cell_centre(int(idx / n), int(idx % n), n), policy));
  };
  if (exec == Exec::parallel) {
#pragma omp parallel for schedule(dynamic, 64)
    for (std::int64_t idx = 0; idx < N; ++idx) cell(idx);
  } else {
    for (std::int64_t idx = 0; idx < N; ++idx) cell(idx);
  }
  return out;
}

std::vector<CentreSample> sample_field(const TorusEndo& f, const std::vector<Vec2>& pts, Exec exec,
                                       const DepthPolicy& policy) {
  std::vector<CentreSample> out(pts.size());
  const std::int64_t N = std::int64_t(pts.size());
  if (exec == Exec::parallel) {
#pragma omp parallel for schedule(dynamic, 16)
    for (std::int64_t i = 0; i < N; ++i) out[i] = centre_direction_adaptive(f, pts[i], policy);
  } else {
    for (std::int64_t i = 0; i < N; ++i) out[i] = centre_direction_adaptive(f, pts[i], policy);
  }
  return out;
}

}  // namespace tph
