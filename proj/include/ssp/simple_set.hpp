#pragma once

#include "ssp/types.hpp"

namespace ssp {

// The "simple" set Y: a convex set with a cheap exact Euclidean projection.
// Supported kinds: the whole space, an axis-aligned box (entries may be
// infinite) and a Euclidean ball.
class SimpleSet {
 public:
  enum class Kind { whole_space, box, ball };

  static SimpleSet whole_space(int n);
  static SimpleSet box(Vector lo, Vector hi);
  static SimpleSet ball(Vector center, double radius);

  Kind kind() const { return kind_; }
  int dim() const { return static_cast<int>(n_); }

  Vector project(Vector x) const;
  bool contains(const Vector& x, double tol = 0.0) const;

  bool bounded() const;
  double diameter() const;  // throws ConfigError if unbounded

  // sup_{x in Y} |a'x - b|; throws ConfigError when the set is unbounded in a
  // direction where a is nonzero.
  double sup_abs_affine(const Vector& a, double b) const;

  const Vector& lower() const { return lo_; }
  const Vector& upper() const { return hi_; }
  const Vector& center() const { return center_; }
  double radius() const { return radius_; }

 private:
  SimpleSet() = default;

  Kind kind_ = Kind::whole_space;
  Eigen::Index n_ = 0;
  Vector lo_, hi_;      // box
  Vector center_;       // ball
  double radius_ = 0.0; // ball
};

}  // namespace ssp
