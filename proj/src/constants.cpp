#include <algorithm>
#include <cmath>

#include "ssp/problem.hpp"

namespace ssp {

namespace {

double l2_norm(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

// sup_{x in Y} || x[begin .. begin+len) ||
double sup_coord_range_norm(const SimpleSet& set, int begin, int len) {
  switch (set.kind()) {
    case SimpleSet::Kind::whole_space:
      throw ConfigError("coordinate range norm is unbounded on the whole space");
    case SimpleSet::Kind::box: {
      double s = 0.0;
      for (int k = begin; k < begin + len; ++k) {
        const double m = std::max(std::abs(set.lower()[k]), std::abs(set.upper()[k]));
        if (!std::isfinite(m)) throw ConfigError("coordinate range norm is unbounded on this box");
        s += m * m;
      }
      return std::sqrt(s);
    }
    case SimpleSet::Kind::ball:
      return set.center().segment(begin, len).norm() + set.radius();
  }
  return 0.0;
}

// sup_{x in Y} ||grad f_i(x)||  (nonsmooth mode); throws when undefined.
double f_subgrad_bound(const FComponent& f, const SimpleSet& set) {
  if (const auto* q = std::get_if<QuadResidualF>(&f)) {
    return set.sup_abs_affine(q->a, q->b) * q->a.norm();
  }
  if (const auto* l = std::get_if<LinearF>(&f)) return l->a.norm();
  const auto& s = std::get<SvmSmoothF>(f);
  double w_part = 0.0;
  if (s.lambda != 0.0) w_part = s.lambda * sup_coord_range_norm(set, 0, s.w_dim);
  return std::sqrt(w_part * w_part + s.m_delta * s.m_delta);
}

double f_lipschitz(const FComponent& f) {
  if (const auto* q = std::get_if<QuadResidualF>(&f)) return q->a.squaredNorm();
  if (std::get_if<LinearF>(&f)) return 0.0;
  return std::get<SvmSmoothF>(f).lambda;
}

// Canonical (minimal-norm) subgradient of g_i at x.
void add_g_subgrad(const L1Component& g, const Vector& x, double coeff, Vector& acc) {
  for (std::size_t t = 0; t < g.coords.size(); ++t) {
    const double xi = x[g.coords[t]];
    if (xi > 0.0) acc[g.coords[t]] += coeff * g.coeffs[t];
    else if (xi < 0.0) acc[g.coords[t]] -= coeff * g.coeffs[t];
  }
}

double estimate_mu(const ProblemInstance& p) {
  const int n = p.dim();
  Matrix H = Matrix::Zero(n, n);
  bool any_curvature = false;
  for (const auto& fc : p.f_components()) {
    if (const auto* q = std::get_if<QuadResidualF>(&fc)) {
      H.selfadjointView<Eigen::Lower>().rankUpdate(q->a, 1.0);
      any_curvature = true;
    } else if (const auto* s = std::get_if<SvmSmoothF>(&fc)) {
      for (int k = 0; k < s->w_dim; ++k) H(k, k) += s->lambda;
      if (s->lambda > 0.0) any_curvature = true;
    }
  }
  if (!any_curvature) return 0.0;
  H /= static_cast<double>(p.num_components());
  H = H.selfadjointView<Eigen::Lower>();
  Eigen::SelfAdjointEigenSolver<Matrix> es(H, Eigen::EigenvaluesOnly);
  const double lo = es.eigenvalues().minCoeff();
  const double hi = es.eigenvalues().maxCoeff();
  if (lo <= std::max(0.0, 1e-10 * hi)) return 0.0;
  return lo;
}

}  // namespace

ProblemConstants estimate_constants(const ProblemInstance& p, const Vector& x_ref,
                                    ConstantsMode mode) {
  require_dim(x_ref, p.dim(), "estimate_constants");
  const int N = p.num_components();
  ProblemConstants out;
  out.c_bar = p.constants().c_bar;
  out.q = p.constants().q;

  std::vector<double> g_bounds(N);
  for (int i = 0; i < N; ++i) g_bounds[i] = l2_norm(p.g_components()[i].coeffs);

  if (mode == ConstantsMode::nonsmooth) {
    out.L = 0.0;
    double acc = 0.0;
    for (int i = 0; i < N; ++i) {
      double bf;
      try {
        bf = f_subgrad_bound(p.f_components()[i], p.domain());
      } catch (const ConfigError& e) {
        throw ConfigError(std::string("nonsmooth constant estimation failed: ") + e.what());
      }
      acc += bf * bf + g_bounds[i] * g_bounds[i];
    }
    out.B_sq = 2.0 * acc / static_cast<double>(N);
  } else {
    double max_L = 0.0;
    for (const auto& fc : p.f_components()) max_L = std::max(max_L, f_lipschitz(fc));
    out.L = 4.0 * max_L;

    double grad_sq_sum = 0.0;
    Vector full_grad = Vector::Zero(p.dim());
    const double invN = 1.0 / static_cast<double>(N);
    for (int i = 0; i < N; ++i) {
      Vector gi = p.f_subgrad(i, x_ref);
      grad_sq_sum += gi.squaredNorm();
      full_grad.noalias() += invN * gi;
      add_g_subgrad(p.g_components()[i], x_ref, invN, full_grad);
    }
    out.B_sq = 4.0 * invN * grad_sq_sum;
    if (p.domain().bounded()) {
      const double B_g = *std::max_element(g_bounds.begin(), g_bounds.end());
      out.B_sq += 4.0 * B_g * B_g + 4.0 * p.domain().diameter() * max_L * full_grad.norm();
    } else {
      out.diameter_term_omitted = true;
    }
  }

  out.B_j.resize(p.num_constraints());
  for (int j = 0; j < p.num_constraints(); ++j) {
    out.B_j[j] = constraint_subgrad_bound(p.h_components()[j]);
  }

  out.mu = estimate_mu(p);
  out.validate();
  return out;
}

}  // namespace ssp
