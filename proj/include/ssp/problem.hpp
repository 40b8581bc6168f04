#pragma once

#include <memory>
#include <variant>
#include <vector>

#include "ssp/simple_set.hpp"
#include "ssp/types.hpp"

namespace ssp {

// Deterministic constants of the problem model:
//   (1/N) sum_i ||grad F_i(x)||^2 <= B_sq + L (F(x) - F*)   on Y,
//   F mu-strongly convex on Y (mu = 0 means plain convexity),
//   ||grad h_j(x)|| <= B_j on Y,
//   dist^{2q}(y, X) <= c_bar (max_j h_j(y))_+^2 on Y.
struct ProblemConstants {
  double B_sq = 0.0;
  double L = 0.0;
  double mu = 0.0;
  std::vector<double> B_j;
  double c_bar = 1.0;
  double q = 1.0;
  // Set when the smooth-mode estimate had to drop the diameter-dependent
  // terms because Y is unbounded; B_sq is then incomplete by construction.
  bool diameter_term_omitted = false;

  double max_B_j() const;
  void validate() const;  // throws ConfigError on sign violations
};

// --- objective components ------------------------------------------------
// f_i(x) = 0.5 (a'x - b)^2
struct QuadResidualF {
  Vector a;
  double b = 0.0;
};

// f_i(x) = a'x
struct LinearF {
  Vector a;
};

// SVM-style smooth part over a packed variable x = (w, d, u):
// f_i(x) = lambda/2 ||w||^2 + m_delta * x[u_coord].
struct SvmSmoothF {
  double lambda = 0.0;
  double m_delta = 0.0;
  int w_dim = 0;
  int u_coord = 0;
};

using FComponent = std::variant<QuadResidualF, LinearF, SvmSmoothF>;

// g_i(x) = sum_t coeffs[t] |x[coords[t]]|  (nonnegative coeffs; may be empty).
// Diagonal weighted l1 terms are the only prox-registered family; anything
// else is rejected as an unsupported oracle at construction time.
struct L1Component {
  std::vector<int> coords;
  std::vector<double> coeffs;
};

// --- functional constraints (internal convention: h_j(x) <= 0) ------------
// h_j(x) = c'x + d
struct AffineH {
  Vector c;
  double d = 0.0;
};

// h_j(x) = ||diag(scale) x|| + c'x + d
struct SocH {
  Vector scale;
  Vector c;
  double d = 0.0;
};

using HComponent = std::variant<AffineH, SocH>;

// The constrained finite-sum model
//   min_{x in Y}  F(x) = (1/N) sum_i (f_i(x) + g_i(x))   s.t.  h_j(x) <= 0.
class ProblemInstance {
 public:
  ProblemInstance(std::vector<FComponent> f, std::vector<L1Component> g,
                  std::vector<HComponent> h, SimpleSet domain);

  int dim() const { return n_; }
  int num_components() const { return static_cast<int>(f_.size()); }
  int num_constraints() const { return static_cast<int>(h_.size()); }

  // -- objective oracles --
  double f_value(int i, const Vector& x) const;
  // acc += coeff * grad f_i(x)
  void add_f_subgrad(int i, const Vector& x, double coeff, Vector& acc) const;
  Vector f_subgrad(int i, const Vector& x) const;
  double g_value(int i, const Vector& x) const;
  double component_value(int i, const Vector& x) const { return f_value(i, x) + g_value(i, x); }

  // F(x) = (1/N) sum_i (f_i + g_i)
  double objective(const Vector& x) const;

  // (1/N) sum_{i in S} zeta^i grad f_i(x); empty batch gives the zero vector.
  Vector minibatch_f_subgrad(const Vector& x, const std::vector<int>& indices,
                             const std::vector<double>& weights) const;

  // argmin_u 0.5||u - x||^2 + alpha (1/N) sum_{i in S} zeta^i g_i(u)
  // (coordinate-wise soft threshold; closed form for the l1 family).
  Vector minibatch_g_prox(const Vector& x, double alpha, const std::vector<int>& indices,
                          const std::vector<double>& weights) const;

  // -- constraint oracles --
  double h_value(int j, const Vector& x) const;
  // A genuine element of the subdifferential of h_j at x (valid everywhere
  // for the supported kinds). The declared fallback s_h only matters to
  // callers when h_j(x) <= 0, where the Polyak step is a no-op anyway.
  Vector h_subgrad(int j, const Vector& x) const;
  double max_constraint_violation(const Vector& x) const;

  // -- simple set --
  const SimpleSet& domain() const { return domain_; }
  Vector project(Vector x) const { return domain_.project(std::move(x)); }

  const Vector& fallback_subgrad() const { return s_h_; }
  void set_fallback_subgrad(Vector s);

  const ProblemConstants& constants() const { return constants_; }
  ProblemConstants& constants() { return constants_; }

  // component access (estimation, serialization, tests)
  const std::vector<FComponent>& f_components() const { return f_; }
  const std::vector<L1Component>& g_components() const { return g_; }
  const std::vector<HComponent>& h_components() const { return h_; }

 private:
  int n_ = 0;
  std::vector<FComponent> f_;
  std::vector<L1Component> g_;
  std::vector<HComponent> h_;
  SimpleSet domain_;
  Vector s_h_;
  ProblemConstants constants_;
};

// Spec-level operation aliases.
inline double eval_objective(const ProblemInstance& p, const Vector& x) { return p.objective(x); }
inline double eval_constraint(const ProblemInstance& p, int j, const Vector& x) { return p.h_value(j, x); }
inline Vector subgrad_constraint(const ProblemInstance& p, int j, const Vector& x) { return p.h_subgrad(j, x); }
inline Vector project_Y(const ProblemInstance& p, Vector x) { return p.project(std::move(x)); }

enum class ConstantsMode { nonsmooth, smooth };

// Estimates B_sq, L, mu and the per-constraint bounds B_j from the instance
// structure. x_ref stands in for the (unavailable) optimal set when the
// smooth-mode formula needs gradients at an optimum. c_bar and q are copied
// from the instance's configured constants (they have no generic recipe).
ProblemConstants estimate_constants(const ProblemInstance& p, const Vector& x_ref,
                                    ConstantsMode mode);

// Closed-form subgradient bound on Y for one constraint (affine: ||c||;
// SOC: max(scale) + ||c||).
double constraint_subgrad_bound(const HComponent& h);

}  // namespace ssp
