#include "ssp/simple_set.hpp"

#include <cmath>
#include <limits>

namespace ssp {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

SimpleSet SimpleSet::whole_space(int n) {
  SimpleSet s;
  s.kind_ = Kind::whole_space;
  s.n_ = n;
  return s;
}

SimpleSet SimpleSet::box(Vector lo, Vector hi) {
  if (lo.size() != hi.size()) throw InputError("box: lo/hi dimension mismatch");
  for (Eigen::Index i = 0; i < lo.size(); ++i) {
    if (!(lo[i] <= hi[i])) throw InputError("box: lo > hi at coordinate " + std::to_string(i));
  }
  SimpleSet s;
  s.kind_ = Kind::box;
  s.n_ = lo.size();
  s.lo_ = std::move(lo);
  s.hi_ = std::move(hi);
  return s;
}

SimpleSet SimpleSet::ball(Vector center, double radius) {
  if (!(radius >= 0.0) || !std::isfinite(radius)) throw InputError("ball: radius must be finite and >= 0");
  SimpleSet s;
  s.kind_ = Kind::ball;
  s.n_ = center.size();
  s.center_ = std::move(center);
  s.radius_ = radius;
  return s;
}

Vector SimpleSet::project(Vector x) const {
  require_dim(x, n_, "SimpleSet::project");
  switch (kind_) {
    case Kind::whole_space:
      return x;
    case Kind::box:
      return x.cwiseMax(lo_).cwiseMin(hi_);
    case Kind::ball: {
      const Vector d = x - center_;
      const double nrm = d.norm();
      if (nrm <= radius_) return x;
      return center_ + (radius_ / nrm) * d;
    }
  }
  return x;
}

bool SimpleSet::contains(const Vector& x, double tol) const {
  require_dim(x, n_, "SimpleSet::contains");
  switch (kind_) {
    case Kind::whole_space:
      return true;
    case Kind::box:
      return (x.array() >= lo_.array() - tol).all() && (x.array() <= hi_.array() + tol).all();
    case Kind::ball:
      return (x - center_).norm() <= radius_ + tol;
  }
  return true;
}

bool SimpleSet::bounded() const {
  switch (kind_) {
    case Kind::whole_space:
      return n_ == 0;
    case Kind::box:
      return lo_.allFinite() && hi_.allFinite();
    case Kind::ball:
      return true;
  }
  return false;
}

double SimpleSet::diameter() const {
  if (!bounded()) throw ConfigError("diameter of an unbounded set is undefined");
  switch (kind_) {
    case Kind::whole_space:
      return 0.0;
    case Kind::box:
      return (hi_ - lo_).norm();
    case Kind::ball:
      return 2.0 * radius_;
  }
  return 0.0;
}

double SimpleSet::sup_abs_affine(const Vector& a, double b) const {
  require_dim(a, n_, "SimpleSet::sup_abs_affine");
  switch (kind_) {
    case Kind::whole_space: {
      if (a.isZero(0.0)) return std::abs(b);
      throw ConfigError("affine form is unbounded on the whole space");
    }
    case Kind::box: {
      // Interval arithmetic on a'x over [lo, hi].
      double hi_val = -b, lo_val = -b;
      for (Eigen::Index i = 0; i < n_; ++i) {
        if (a[i] == 0.0) continue;
        const double p = a[i] * lo_[i], q = a[i] * hi_[i];
        if (!std::isfinite(p) || !std::isfinite(q)) {
          throw ConfigError("affine form is unbounded on this box");
        }
        hi_val += std::max(p, q);
        lo_val += std::min(p, q);
      }
      return std::max(std::abs(hi_val), std::abs(lo_val));
    }
    case Kind::ball:
      return std::abs(a.dot(center_) - b) + radius_ * a.norm();
  }
  return kInf;
}

}  // namespace ssp
