#pragma once

#include <cstdint>
#include <optional>

#include "ssp/problem.hpp"

namespace ssp {

// Constrained Lasso benchmark family:
//   min 1/N ( 0.5||Ax - b||^2 + ||Dx||_1 )
//   s.t. Cx + d >= 0,  c_i'x + d_i >= ||Q_i^{-1/2} x||  (i = 1..m_soc)
// rewritten internally as h_j(x) <= 0. Matrices are dense with standard
// normal entries scaled by the *_scale fields; D and Q_i are diagonal with
// positive entries; the offsets d, d_i are drawn positive so that x = 0 is
// strictly feasible on every generated instance.
struct ConstrainedLassoSpec {
  int N = 0;
  int n = 0;
  int m_lin = 0;
  int m_soc = 0;
  std::uint64_t seed = 0;
  double A_scale = 1.0;
  double b_scale = 1.0;
  double delta_scale = 1.0;  // diagonal of D: delta_scale * (|N(0,1)| + 0.1)
  double C_scale = 1.0;
  double d_scale = 1.0;      // linear offsets: d_scale * (|N(0,1)| + 1)
  double q_scale = 1.0;      // diagonal of Q_i: q_scale * (|N(0,1)| + 0.1)
  double c_scale = 1.0;
  double d_soc_scale = 1.0;  // SOC offsets: d_soc_scale * (|N(0,1)| + 1)
};

ProblemInstance make_constrained_lasso(const ConstrainedLassoSpec& spec);

// Robust (sparse) SVM over the packed variable x = (w, d, u) in R^{n+1+m}:
//   min lambda/2 ||w||^2 + delta sum_i u_i + ||w||_1
//   s.t. u >= 0 (folded into Y),
//        y_i (w'z_i + d) >= 1 - u_i,
//        y_i (w'z_i + d) >= ||S_i w|| - u_i,
// where S_i = Q_i^{-1/2} is the diagonal cone scale. Data is either supplied
// explicitly or generated from the seed as two balanced Gaussian clusters.
struct RobustSvmSpec {
  int m = 0;  // training points
  int n = 0;  // feature dimension
  double lambda = 1.0;
  double delta = 1.0;
  std::uint64_t seed = 0;
  double separation = 2.0;  // cluster mean offset along the all-ones direction
  double data_scale = 1.0;
  double cone_scale = 0.0;  // > 0: uniform S_i = cone_scale * I; 0: random positive diagonals
  std::optional<Matrix> data;              // m x n rows z_i
  std::optional<std::vector<int>> labels;  // +-1, balanced
};

ProblemInstance make_robust_svm(const RobustSvmSpec& spec);

}  // namespace ssp
