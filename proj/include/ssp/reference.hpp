#pragma once

#include <optional>
#include <string>

#include "ssp/metrics.hpp"
#include "ssp/problem.hpp"

namespace ssp {

struct ReferenceSolution {
  Vector x_ref;
  double F_ref = 0.0;
  double feasibility_norm_ref = 0.0;
  std::string method;
  long iterations = 0;
  std::string instance_hash;  // filled when cached / loaded
};

struct ReferenceOptions {
  long max_iterations = 400000;
  bool cross_check = true;     // grid-search verification when n <= 3
  std::optional<Vector> x0;
};

// Deterministic reference solver standing in for an external convex solver:
// the full-batch limit of the subgradient-projection iteration (all objective
// components, argmax over all constraints, beta = 1), driven by a constant
// stepsize sized from the true smoothness of the f-part and halved whenever
// the best polished value stops improving. The returned point is polished to
// feasibility_norm <= 1e-6. For n <= 3 the value is cross-checked against a
// zooming grid search at resolution 1e-3; disagreement above 1e-2 throws.
ReferenceSolution reference_solve(const ProblemInstance& p, double tol,
                                  const ReferenceOptions& opt = {});

// Signed gap F(x) - F_ref (negative values are possible for infeasible x and
// are reported as-is). Throws when the reference belongs to another instance.
double optimality_gap(const ProblemInstance& p, const Vector& x, const ReferenceSolution& ref);

// Disk-cached variant: looks up <cache_dir>/<instance-hash>.json before
// solving, writes the solution back on a miss.
ReferenceSolution load_or_solve_reference(const ProblemInstance& p, double tol,
                                          const std::string& cache_dir,
                                          const ReferenceOptions& opt = {});

}  // namespace ssp
