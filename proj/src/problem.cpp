#include "ssp/problem.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace ssp {

double ProblemConstants::max_B_j() const {
  double m = 0.0;
  for (double b : B_j) m = std::max(m, b);
  return m;
}

void ProblemConstants::validate() const {
  if (!(B_sq >= 0.0)) throw ConfigError("B_sq must be >= 0");
  if (!(L >= 0.0)) throw ConfigError("L must be >= 0");
  if (!(mu >= 0.0)) throw ConfigError("mu must be >= 0");
  if (!(c_bar > 0.0)) throw ConfigError("c_bar must be > 0");
  if (!(q >= 1.0)) throw ConfigError("q must be >= 1");
  for (double b : B_j) {
    if (!(b > 0.0)) throw ConfigError("every B_j must be > 0");
  }
}

namespace {

int component_dim(const FComponent& f) {
  if (const auto* q = std::get_if<QuadResidualF>(&f)) return static_cast<int>(q->a.size());
  if (const auto* l = std::get_if<LinearF>(&f)) return static_cast<int>(l->a.size());
  return -1;  // SvmSmoothF: any packed dimension
}

int component_dim(const HComponent& h) {
  if (const auto* a = std::get_if<AffineH>(&h)) return static_cast<int>(a->c.size());
  const auto& s = std::get<SocH>(h);
  return static_cast<int>(s.c.size());
}

double soft_threshold(double x, double t) {
  if (x > t) return x - t;
  if (x < -t) return x + t;
  return 0.0;
}

}  // namespace

ProblemInstance::ProblemInstance(std::vector<FComponent> f, std::vector<L1Component> g,
                                 std::vector<HComponent> h, SimpleSet domain)
    : n_(domain.dim()),
      f_(std::move(f)),
      g_(std::move(g)),
      h_(std::move(h)),
      domain_(std::move(domain)) {
  if (f_.empty()) throw ConfigError("problem needs at least one objective component");
  if (g_.size() != f_.size()) {
    throw ConfigError("f and g component counts must match (use empty g_i for zero terms)");
  }
  for (const auto& fc : f_) {
    const int d = component_dim(fc);
    if (d >= 0 && d != n_) throw ConfigError("objective component dimension mismatch");
  }
  for (const auto& gc : g_) {
    if (gc.coords.size() != gc.coeffs.size()) throw ConfigError("g component coords/coeffs mismatch");
    for (std::size_t t = 0; t < gc.coords.size(); ++t) {
      if (gc.coords[t] < 0 || gc.coords[t] >= n_) throw ConfigError("g component coordinate out of range");
      if (!(gc.coeffs[t] >= 0.0)) throw ConfigError("g component coefficients must be >= 0");
    }
  }
  for (const auto& hc : h_) {
    if (component_dim(hc) != n_) throw ConfigError("constraint dimension mismatch");
    if (const auto* s = std::get_if<SocH>(&hc)) {
      if (s->scale.size() != s->c.size()) throw ConfigError("SOC scale/c dimension mismatch");
    }
  }
  s_h_ = Vector::Zero(n_);
  if (n_ > 0) s_h_[0] = 1.0;  // default fallback: first standard basis vector
}

void ProblemInstance::set_fallback_subgrad(Vector s) {
  require_dim(s, n_, "set_fallback_subgrad");
  if (s.isZero(0.0)) throw InputError("fallback subgradient s_h must be nonzero");
  s_h_ = std::move(s);
}

double ProblemInstance::f_value(int i, const Vector& x) const {
  require_dim(x, n_, "f_value");
  const FComponent& fc = f_.at(i);
  if (const auto* q = std::get_if<QuadResidualF>(&fc)) {
    const double r = q->a.dot(x) - q->b;
    return 0.5 * r * r;
  }
  if (const auto* l = std::get_if<LinearF>(&fc)) return l->a.dot(x);
  const auto& s = std::get<SvmSmoothF>(fc);
  return 0.5 * s.lambda * x.head(s.w_dim).squaredNorm() + s.m_delta * x[s.u_coord];
}

void ProblemInstance::add_f_subgrad(int i, const Vector& x, double coeff, Vector& acc) const {
  const FComponent& fc = f_.at(i);
  if (const auto* q = std::get_if<QuadResidualF>(&fc)) {
    acc.noalias() += (coeff * (q->a.dot(x) - q->b)) * q->a;
    return;
  }
  if (const auto* l = std::get_if<LinearF>(&fc)) {
    acc.noalias() += coeff * l->a;
    return;
  }
  const auto& s = std::get<SvmSmoothF>(fc);
  acc.head(s.w_dim) += (coeff * s.lambda) * x.head(s.w_dim);
  acc[s.u_coord] += coeff * s.m_delta;
}

Vector ProblemInstance::f_subgrad(int i, const Vector& x) const {
  require_dim(x, n_, "f_subgrad");
  Vector g = Vector::Zero(n_);
  add_f_subgrad(i, x, 1.0, g);
  return g;
}

double ProblemInstance::g_value(int i, const Vector& x) const {
  require_dim(x, n_, "g_value");
  const L1Component& gc = g_.at(i);
  double v = 0.0;
  for (std::size_t t = 0; t < gc.coords.size(); ++t) v += gc.coeffs[t] * std::abs(x[gc.coords[t]]);
  return v;
}

double ProblemInstance::objective(const Vector& x) const {
  require_dim(x, n_, "objective");
  double sum = 0.0;
  for (int i = 0; i < num_components(); ++i) sum += f_value(i, x) + g_value(i, x);
  return sum / static_cast<double>(num_components());
}

Vector ProblemInstance::minibatch_f_subgrad(const Vector& x, const std::vector<int>& indices,
                                            const std::vector<double>& weights) const {
  require_dim(x, n_, "minibatch_f_subgrad");
  if (indices.size() != weights.size()) throw InputError("minibatch_f_subgrad: index/weight size mismatch");
  Vector g = Vector::Zero(n_);
  const double invN = 1.0 / static_cast<double>(num_components());
  for (std::size_t t = 0; t < indices.size(); ++t) {
    const int i = indices[t];
    if (i < 0 || i >= num_components()) throw InputError("minibatch_f_subgrad: index out of range");
    if (!(weights[t] >= 0.0)) throw InputError("minibatch_f_subgrad: weights must be nonnegative");
    add_f_subgrad(i, x, weights[t] * invN, g);
  }
  return g;
}

Vector ProblemInstance::minibatch_g_prox(const Vector& x, double alpha, const std::vector<int>& indices,
                                         const std::vector<double>& weights) const {
  require_dim(x, n_, "minibatch_g_prox");
  if (indices.size() != weights.size()) throw InputError("minibatch_g_prox: index/weight size mismatch");
  if (alpha < 0.0) throw InputError("minibatch_g_prox: alpha must be >= 0");
  // Accumulate the per-coordinate threshold (alpha/N) sum_i zeta^i * coeff_ik.
  Vector thresh = Vector::Zero(n_);
  const double scale = alpha / static_cast<double>(num_components());
  bool any = false;
  for (std::size_t t = 0; t < indices.size(); ++t) {
    const int i = indices[t];
    if (i < 0 || i >= num_components()) throw InputError("minibatch_g_prox: index out of range");
    const L1Component& gc = g_.at(i);
    for (std::size_t u = 0; u < gc.coords.size(); ++u) {
      thresh[gc.coords[u]] += scale * weights[t] * gc.coeffs[u];
      any = true;
    }
  }
  if (!any) return x;
  Vector out(n_);
  for (Eigen::Index k = 0; k < n_; ++k) out[k] = soft_threshold(x[k], thresh[k]);
  return out;
}

double ProblemInstance::h_value(int j, const Vector& x) const {
  require_dim(x, n_, "h_value");
  const HComponent& hc = h_.at(j);
  if (const auto* a = std::get_if<AffineH>(&hc)) return a->c.dot(x) + a->d;
  const auto& s = std::get<SocH>(hc);
  return (s.scale.array() * x.array()).matrix().norm() + s.c.dot(x) + s.d;
}

Vector ProblemInstance::h_subgrad(int j, const Vector& x) const {
  require_dim(x, n_, "h_subgrad");
  const HComponent& hc = h_.at(j);
  if (const auto* a = std::get_if<AffineH>(&hc)) return a->c;
  const auto& s = std::get<SocH>(hc);
  const Vector sx = (s.scale.array() * x.array()).matrix();
  const double nrm = sx.norm();
  if (nrm == 0.0) return s.c;  // 0 is in the subdifferential of ||diag(scale) .|| at 0
  return (s.scale.array() * sx.array() / nrm).matrix() + s.c;
}

double ProblemInstance::max_constraint_violation(const Vector& x) const {
  double m = -std::numeric_limits<double>::infinity();
  for (int j = 0; j < num_constraints(); ++j) m = std::max(m, h_value(j, x));
  return m;
}

double constraint_subgrad_bound(const HComponent& h) {
  if (const auto* a = std::get_if<AffineH>(&h)) return a->c.norm();
  const auto& s = std::get<SocH>(h);
  return s.scale.cwiseAbs().maxCoeff() + s.c.norm();
}

}  // namespace ssp
