#pragma once

#include "ssp/problem.hpp"

namespace ssp {

// || ( (h_j(x))_+ )_j ||_2
double feasibility_norm(const ProblemInstance& p, const Vector& x);

struct DistanceEstimate {
  double value = 0.0;   // path length of the feasibility loop (upper bound on dist)
  bool converged = true;
  long iterations = 0;
};

// Upper bound on dist(x, X) obtained by running the deterministic full-batch
// Polyak feasibility loop (beta = 1 on the argmax of all constraints,
// interleaved with projection onto Y) until the worst violation is <= tol,
// and returning the cumulative distance traveled. Exact for a single affine
// constraint.
DistanceEstimate distance_to_feasible(const ProblemInstance& p, const Vector& x, double tol,
                                      long max_iterations = 0 /* 0: automatic budget */);

struct GridResult {
  Vector x;
  double value = 0.0;
  bool found_feasible = false;
};

// Zooming grid search for min F over the feasible set, intended for n <= 3
// cross-checks. Starts from a symmetric box around `center` with half-width
// `radius` and refines until the spacing is at most `resolution`. Nodes are
// accepted when every constraint violation is below a slack proportional to
// the current spacing.
GridResult grid_min(const ProblemInstance& p, const Vector& center, double radius,
                    double resolution);

}  // namespace ssp
