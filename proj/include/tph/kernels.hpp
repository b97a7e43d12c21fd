#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "tph/centre_field.hpp"
#include "tph/cones.hpp"
#include "tph/torus_endo.hpp"

namespace tph {

enum class Exec { serial, parallel };

struct FailCell {
  int i = 0, j = 0;
  Vec2 p;
  double margin = 0.0;
};

struct InvarianceReport {
  int n = 0;
  double min_margin = INFINITY;           // sampled
  double min_adjusted_margin = INFINITY;  // per-cell interpolated lower bound
  double lipschitz = 0.0;                 // max neighbour margin difference / cell width
  double global_bound = -INFINITY;        // min_margin - lipschitz * half cell diagonal
  Vec2 worst;
  std::int64_t failing_count = 0;
  std::vector<FailCell> failing;  // first few, row-major order
  bool pass = false;
};

// Margin of DF_p C(p) inside C(F(p)) at cell centres ((i + 0.5) / n, (j + 0.5) / n).
// A cell fails when the bilinear interpolant of the margins through its
// neighbours is not positive anywhere on the cell.
InvarianceReport certify_invariance(const TorusEndo& f, const ConeField& field, int n, Exec exec,
                                    const std::function<bool(Vec2)>& restrict_to = nullptr);

struct ExpansionReport {
  int k = -1;  // smallest k with min growth >= threshold, -1 if none
  double growth = 0.0;
  std::vector<double> min_growth;  // index k - 1
  int m = 0;                       // max count of orbit points outside U_Lambda u U_K
  bool pass = false;
};

ExpansionReport certify_expansion(const TorusEndo& f, const ConeField& field, int k_max, int n, Exec exec,
                                  double threshold = 1.05, int orbit_length = 100);

// Slope classes at cell centres ((i + 0.5) / n, (j + 0.5) / n), index i * n + j; adaptive depth.
std::vector<SlopeClass> slope_grid(const TorusEndo& f, int n, Exec exec, const DepthPolicy& policy = {});

// Centre samples for a list of points.
std::vector<CentreSample> sample_field(const TorusEndo& f, const std::vector<Vec2>& pts, Exec exec,
                                       const DepthPolicy& policy = {});

}  // namespace tph
