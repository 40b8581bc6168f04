#pragma once

// Shared fixtures and independent oracles for the test suites. Everything in
// here is deliberately simple-minded (enumeration, grids, finite differences)
// so it can serve as a cross-check on the library implementation.

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

#include "ssp/generators.hpp"
#include "ssp/problem.hpp"
#include "ssp/rng.hpp"

namespace ssp_test {

using ssp::AffineH;
using ssp::FComponent;
using ssp::HComponent;
using ssp::L1Component;
using ssp::LinearF;
using ssp::ProblemInstance;
using ssp::QuadResidualF;
using ssp::SimpleSet;
using ssp::SocH;
using ssp::Vector;

// 1-D: min 0.5 x^2 s.t. 1 - x <= 0. Optimum x* = 1, F* = 0.5.
inline ProblemInstance tiny_1d() {
  Vector a(1), c(1);
  a << 1.0;
  c << -1.0;
  return ProblemInstance({QuadResidualF{a, 0.0}}, {L1Component{}}, {AffineH{c, 1.0}},
                         SimpleSet::whole_space(1));
}

// 1-D, N = 2, m = 2: F(x) = 0.5 (x^2 + 1), X = [1, inf), X* = {1}, F* = 1,
// mu = 1 exactly, and the polyhedral growth condition holds with c_bar = 1,
// q = 1 (dist(y, X) = (1 - y)_+ = (max_j h_j(y))_+).
inline ProblemInstance tiny_two_component() {
  Vector a(1), c(1);
  a << 1.0;
  c << -1.0;
  std::vector<FComponent> f = {QuadResidualF{a, 1.0}, QuadResidualF{a, -1.0}};
  std::vector<L1Component> g(2);
  std::vector<HComponent> h = {AffineH{c, 1.0}, AffineH{c, 0.5}};
  ProblemInstance p(std::move(f), std::move(g), std::move(h), SimpleSet::whole_space(1));
  p.constants().c_bar = 1.0;
  p.constants().q = 1.0;
  return p;
}

// --- independent oracles ---------------------------------------------------

// Brute-force 1-D minimizer of fn over [lo, hi] at the given resolution.
inline double grid_min_1d(const std::function<double(double)>& fn, double lo, double hi,
                          double resolution) {
  double best_x = lo, best = fn(lo);
  for (double x = lo; x <= hi; x += resolution) {
    const double v = fn(x);
    if (v < best) {
      best = v;
      best_x = x;
    }
  }
  return best_x;
}

// Central finite difference of fn at x along unit direction dir.
inline double central_diff(const std::function<double(const Vector&)>& fn, const Vector& x,
                           const Vector& dir, double eps = 1e-6) {
  return (fn(x + eps * dir) - fn(x - eps * dir)) / (2.0 * eps);
}

// All subsets of {0..n-1} of cardinality tau.
inline void enumerate_subsets(int n, int tau, std::vector<std::vector<int>>& out) {
  std::vector<int> cur;
  std::function<void(int)> rec = [&](int start) {
    if (static_cast<int>(cur.size()) == tau) {
      out.push_back(cur);
      return;
    }
    for (int i = start; i < n; ++i) {
      cur.push_back(i);
      rec(i + 1);
      cur.pop_back();
    }
  };
  rec(0);
}

// E[||zeta||^2] = sum_S p_S sum_{i in S} 1/p_i^2 for tau-nice sampling,
// by direct enumeration.
inline double nice_second_moment_enumerated(int n, int tau) {
  std::vector<std::vector<int>> subsets;
  enumerate_subsets(n, tau, subsets);
  const double p_i = static_cast<double>(tau) / n;
  const double p_S = 1.0 / static_cast<double>(subsets.size());
  double acc = 0.0;
  for (const auto& s : subsets) {
    double inner = 0.0;
    for (std::size_t t = 0; t < s.size(); ++t) inner += 1.0 / (p_i * p_i);
    acc += p_S * inner;
  }
  return acc;
}

struct MeanSe {
  double mean = 0.0;
  double se = 0.0;
};

inline MeanSe mean_se(const std::vector<double>& xs) {
  MeanSe r;
  if (xs.empty()) return r;
  for (double x : xs) r.mean += x;
  r.mean /= static_cast<double>(xs.size());
  double var = 0.0;
  for (double x : xs) var += (x - r.mean) * (x - r.mean);
  var /= std::max<std::size_t>(1, xs.size() - 1);
  r.se = std::sqrt(var / static_cast<double>(xs.size()));
  return r;
}

inline double median(std::vector<double> xs) {
  std::sort(xs.begin(), xs.end());
  const std::size_t n = xs.size();
  return n % 2 ? xs[n / 2] : 0.5 * (xs[n / 2 - 1] + xs[n / 2]);
}

inline Vector random_vector(ssp::Rng& rng, int n, double scale = 1.0) {
  Vector v(n);
  for (int i = 0; i < n; ++i) v[i] = scale * rng.next_normal();
  return v;
}

}  // namespace ssp_test
