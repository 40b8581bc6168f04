#include "ssp/stepsize.hpp"

#include <algorithm>
#include <cmath>

namespace ssp {

OpenInterval admissible_alpha0_interval(double L_scaled) {
  if (!(L_scaled >= 0.0)) throw ConfigError("L_scaled must be >= 0");
  if (L_scaled == 0.0) return {0.0, 0.5};
  const double root = std::sqrt(std::max(0.0, 1.0 - L_scaled));
  return {0.0, (1.0 - root) / L_scaled};
}

OptimalAlpha0 optimal_alpha0(double R0, double B_scaled, double L_scaled, double delta) {
  if (!(R0 > 0.0)) throw ConfigError("R0 must be > 0");
  if (!(B_scaled > 0.0)) throw ConfigError("B_scaled must be > 0");
  if (!(delta > 0.0 && delta < 0.5)) throw ConfigError("delta must lie in (0, 1/2)");
  const double cap = std::min(0.5, admissible_alpha0_interval(L_scaled).hi) - delta;
  if (!(cap > 0.0)) {
    throw ConfigError("optimal_alpha0: delta leaves no admissible stepsize (delta too large)");
  }
  const double ratio = R0 / B_scaled;
  OptimalAlpha0 out;
  if (ratio <= cap) {
    out.alpha0 = ratio;
    out.which = Alpha0Case::ratio_binds;
  } else {
    out.alpha0 = cap;
    out.which = Alpha0Case::interval_binds;
  }
  return out;
}

double c_constant(double beta, double c, double Bh) {
  if (!(beta > 0.0 && beta < 2.0)) throw ConfigError("beta must lie in (0, 2)");
  if (!(c > 0.0)) throw ConfigError("c must be > 0");
  if (!(Bh > 0.0)) throw ConfigError("Bh must be > 0");
  return beta * (2.0 - beta) / (c * Bh * Bh);
}

StepsizeSchedule StepsizeSchedule::convex_decay(double alpha0, double gamma, double L_scaled,
                                                bool b_zero_asserted) {
  const OpenInterval iv = admissible_alpha0_interval(L_scaled);
  if (!iv.contains(alpha0)) {
    throw ConfigError("alpha0 = " + std::to_string(alpha0) +
                      " is outside the admissible interval (0, " + std::to_string(iv.hi) + ")");
  }
  const double gamma_lo = b_zero_asserted ? 0.0 : 0.5;
  if (!(gamma >= gamma_lo && gamma < 1.0)) {
    throw ConfigError(b_zero_asserted ? "gamma must lie in [0, 1) when B = 0 is asserted"
                                      : "gamma must lie in [1/2, 1); values below 1/2 require "
                                        "asserting B = 0");
  }
  StepsizeSchedule s;
  s.mode_ = Mode::convex_decay;
  s.alpha0_ = alpha0;
  s.gamma_ = gamma;
  s.L_ = L_scaled;
  return s;
}

StepsizeSchedule StepsizeSchedule::switching(double L_scaled, double mu) {
  if (!(L_scaled > 0.0)) throw ConfigError("switching schedule requires L_scaled > 0");
  if (!(mu > 0.0)) throw ConfigError("switching schedule requires mu > 0");
  StepsizeSchedule s;
  s.mode_ = Mode::switching;
  s.L_ = L_scaled;
  s.mu_ = mu;
  s.k0_ = static_cast<long>(std::floor(8.0 * L_scaled / mu - 1.0));
  if (s.k0_ < 0) s.k0_ = 0;
  s.alpha0_ = 1.0 / L_scaled;
  return s;
}

double StepsizeSchedule::alpha_at(long k) const {
  if (k < 0) throw InputError("alpha_at: k must be >= 0");
  if (mode_ == Mode::convex_decay) {
    return alpha0_ / std::pow(static_cast<double>(k + 1), gamma_);
  }
  return std::min(1.0 / L_, 8.0 / (mu_ * static_cast<double>(k + 1)));
}

double StepsizeSchedule::convex_weight_at(long k) const {
  const double a = alpha_at(k);
  return a * (2.0 - a * L_);
}

}  // namespace ssp
