#include "ssp/metrics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

namespace ssp {

double feasibility_norm(const ProblemInstance& p, const Vector& x) {
  double acc = 0.0;
  for (int j = 0; j < p.num_constraints(); ++j) {
    const double v = std::max(0.0, p.h_value(j, x));
    acc += v * v;
  }
  return std::sqrt(acc);
}

DistanceEstimate distance_to_feasible(const ProblemInstance& p, const Vector& x, double tol,
                                      long max_iterations) {
  if (!(tol > 0.0)) throw InputError("distance_to_feasible: tol must be > 0");
  if (max_iterations <= 0) max_iterations = 200 * (p.num_constraints() + 1) + 2000;

  DistanceEstimate est;
  Vector y = p.project(x);
  est.value = (y - x).norm();

  for (long it = 0; it < max_iterations; ++it) {
    double h_max = 0.0;
    int j_star = -1;
    for (int j = 0; j < p.num_constraints(); ++j) {
      const double hv = p.h_value(j, y);
      if (hv > h_max) {
        h_max = hv;
        j_star = j;
      }
    }
    if (h_max <= tol) {
      est.iterations = it;
      return est;
    }
    const Vector g = p.h_subgrad(j_star, y);
    const double sq = g.squaredNorm();
    if (!(sq > 0.0)) {
      throw ContractError("distance_to_feasible: violated constraint with zero subgradient");
    }
    Vector next = p.project(y - (h_max / sq) * g);
    est.value += (next - y).norm();
    y = std::move(next);
  }
  est.converged = false;
  est.iterations = max_iterations;
  return est;
}

namespace {

// Largest constraint Lipschitz bound, used to scale the feasibility slack of
// grid nodes to the grid spacing.
double max_constraint_lipschitz(const ProblemInstance& p) {
  double m = 1.0;
  for (const auto& h : p.h_components()) m = std::max(m, constraint_subgrad_bound(h));
  return m;
}

}  // namespace

GridResult grid_min(const ProblemInstance& p, const Vector& center, double radius,
                    double resolution) {
  const int n = p.dim();
  if (n > 3) throw ConfigError("grid_min supports n <= 3 only");
  if (!(radius > 0.0) || !(resolution > 0.0)) throw InputError("grid_min: bad radius/resolution");

  const int points_per_axis = 17;  // per refinement stage
  const double lip = max_constraint_lipschitz(p);

  // Coarse stages only steer the zoom (their feasibility slack is large);
  // the returned minimizer comes from the finest stage alone.
  GridResult stage_best;
  Vector c = center;
  double r = radius;
  while (true) {
    const double spacing = 2.0 * r / (points_per_axis - 1);
    const double slack = lip * spacing;  // one-cell feasibility tolerance
    std::array<int, 3> steps = {1, 1, 1};
    for (int d = 0; d < n; ++d) steps[d] = points_per_axis;

    stage_best = GridResult{};
    stage_best.value = std::numeric_limits<double>::infinity();
    Vector pt(n);
    for (int i0 = 0; i0 < steps[0]; ++i0) {
      if (n >= 1) pt[0] = c[0] - r + i0 * spacing;
      for (int i1 = 0; i1 < steps[1]; ++i1) {
        if (n >= 2) pt[1] = c[1] - r + i1 * spacing;
        for (int i2 = 0; i2 < steps[2]; ++i2) {
          if (n >= 3) pt[2] = c[2] - r + i2 * spacing;
          if (!p.domain().contains(pt, slack)) continue;
          if (p.max_constraint_violation(pt) > slack) continue;
          const double val = p.objective(pt);
          if (val < stage_best.value) {
            stage_best.value = val;
            stage_best.x = pt;
            stage_best.found_feasible = true;
          }
        }
      }
    }
    if (!stage_best.found_feasible) {
      throw ContractError("grid_min: no feasible grid node found; enlarge the search box");
    }
    if (spacing <= resolution) break;
    c = stage_best.x;
    r = 4.0 * spacing;  // refine around the incumbent, overlapping the old cells
  }
  return stage_best;
}

}  // namespace ssp
