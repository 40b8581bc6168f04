#include "ssp/generators.hpp"

#include <cmath>
#include <limits>

#include "ssp/rng.hpp"

namespace ssp {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

Vector draw_normal_vector(Rng& rng, int n, double scale) {
  Vector v(n);
  for (int i = 0; i < n; ++i) v[i] = scale * rng.next_normal();
  return v;
}

void fill_constraint_bounds(ProblemInstance& p) {
  auto& bj = p.constants().B_j;
  bj.resize(p.num_constraints());
  for (int j = 0; j < p.num_constraints(); ++j) {
    bj[j] = constraint_subgrad_bound(p.h_components()[j]);
  }
}

}  // namespace

ProblemInstance make_constrained_lasso(const ConstrainedLassoSpec& spec) {
  if (spec.N <= 0 || spec.n <= 0) throw ConfigError("constrained_lasso: N and n must be positive");
  if (spec.m_lin < 0 || spec.m_soc < 0) throw ConfigError("constrained_lasso: negative constraint count");

  Rng rng(spec.seed, /*stream=*/0x1a550);

  // Draw order is part of the determinism contract: A rows, b, D, C rows, d,
  // then per-SOC (q diagonal, c_i, d_i).
  std::vector<FComponent> f;
  f.reserve(spec.N);
  std::vector<Vector> a_rows(spec.N);
  for (int i = 0; i < spec.N; ++i) a_rows[i] = draw_normal_vector(rng, spec.n, spec.A_scale);
  for (int i = 0; i < spec.N; ++i) {
    f.push_back(QuadResidualF{a_rows[i], spec.b_scale * rng.next_normal()});
  }

  std::vector<L1Component> g(spec.N);
  const int n_diag = std::min(spec.N, spec.n);
  for (int i = 0; i < n_diag; ++i) {
    const double dii = spec.delta_scale * (std::abs(rng.next_normal()) + 0.1);
    g[i].coords = {i};
    g[i].coeffs = {dii};
  }

  std::vector<HComponent> h;
  h.reserve(spec.m_lin + spec.m_soc);
  for (int j = 0; j < spec.m_lin; ++j) {
    Vector row = draw_normal_vector(rng, spec.n, spec.C_scale);
    h.push_back(AffineH{-row, 0.0});  // offset drawn below, after all rows
  }
  for (int j = 0; j < spec.m_lin; ++j) {
    const double dj = spec.d_scale * (std::abs(rng.next_normal()) + 1.0);
    std::get<AffineH>(h[j]).d = -dj;  // h = -(c'x + d), d > 0 => h(0) < 0
  }
  for (int j = 0; j < spec.m_soc; ++j) {
    Vector scale(spec.n);
    for (int k = 0; k < spec.n; ++k) {
      const double qk = spec.q_scale * (std::abs(rng.next_normal()) + 0.1);
      scale[k] = 1.0 / std::sqrt(qk);
    }
    Vector ci = draw_normal_vector(rng, spec.n, spec.c_scale);
    const double di = spec.d_soc_scale * (std::abs(rng.next_normal()) + 1.0);
    h.push_back(SocH{std::move(scale), -ci, -di});  // h = ||Q^{-1/2}x|| - c'x - d
  }

  ProblemInstance p(std::move(f), std::move(g), std::move(h),
                    SimpleSet::whole_space(spec.n));
  fill_constraint_bounds(p);
  return p;
}

ProblemInstance make_robust_svm(const RobustSvmSpec& spec) {
  if (spec.m <= 0 || spec.n <= 0) throw ConfigError("robust_svm: m and n must be positive");
  const int m = spec.m, n = spec.n;
  const int dim = n + 1 + m;  // (w, d, u)

  std::vector<int> labels;
  if (spec.labels) {
    labels = *spec.labels;
    if (static_cast<int>(labels.size()) != m) throw ConfigError("robust_svm: labels size mismatch");
    for (int y : labels) {
      if (y != 1 && y != -1) throw ConfigError("robust_svm: labels must be +-1");
    }
  } else {
    labels.resize(m);
    for (int i = 0; i < m; ++i) labels[i] = (i < (m + 1) / 2) ? 1 : -1;
  }

  Rng rng(spec.seed, /*stream=*/0x57a0);
  Matrix z(m, n);
  if (spec.data) {
    if (spec.data->rows() != m || spec.data->cols() != n) throw ConfigError("robust_svm: data size mismatch");
    z = *spec.data;
  } else {
    const double shift = spec.separation / std::sqrt(static_cast<double>(n));
    for (int i = 0; i < m; ++i) {
      for (int k = 0; k < n; ++k) {
        z(i, k) = labels[i] * shift + spec.data_scale * rng.next_normal();
      }
    }
  }

  std::vector<FComponent> f;
  std::vector<L1Component> g(m);
  f.reserve(m);
  std::vector<int> w_coords(n);
  std::vector<double> w_coeffs(n, 1.0);
  for (int k = 0; k < n; ++k) w_coords[k] = k;
  for (int i = 0; i < m; ++i) {
    f.push_back(SvmSmoothF{spec.lambda, static_cast<double>(m) * spec.delta, n, n + 1 + i});
    g[i].coords = w_coords;
    g[i].coeffs = w_coeffs;
  }

  std::vector<HComponent> h;
  h.reserve(2 * m);
  auto margin_normal = [&](int i) {
    Vector c = Vector::Zero(dim);
    c.head(n) = -static_cast<double>(labels[i]) * z.row(i).transpose();
    c[n] = -static_cast<double>(labels[i]);
    c[n + 1 + i] = -1.0;
    return c;
  };
  for (int i = 0; i < m; ++i) {
    h.push_back(AffineH{margin_normal(i), 1.0});  // 1 - u_i - y_i(w'z_i + d) <= 0
  }
  for (int i = 0; i < m; ++i) {
    Vector scale = Vector::Zero(dim);
    if (spec.cone_scale > 0.0) {
      scale.head(n).setConstant(spec.cone_scale);
    } else {
      for (int k = 0; k < n; ++k) scale[k] = std::abs(rng.next_normal()) + 0.1;
    }
    h.push_back(SocH{std::move(scale), margin_normal(i), 0.0});
  }

  Vector lo = Vector::Constant(dim, -kInf);
  Vector hi = Vector::Constant(dim, kInf);
  lo.tail(m).setZero();  // u >= 0 lives in Y
  ProblemInstance p(std::move(f), std::move(g), std::move(h), SimpleSet::box(lo, hi));
  fill_constraint_bounds(p);
  return p;
}

}  // namespace ssp
