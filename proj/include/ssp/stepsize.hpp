#pragma once

#include "ssp/types.hpp"

namespace ssp {

// Open interval (lo, hi).
struct OpenInterval {
  double lo = 0.0;
  double hi = 0.0;
  bool contains(double x) const { return x > lo && x < hi; }
};

// Admissible initial stepsizes, i.e. the alpha with
// 0 < alpha <= alpha (2 - alpha L_scaled) < 1:
//   (0, 1/2)                                  if L_scaled = 0,
//   (0, (1 - sqrt((1 - L_scaled)_+)) / L_scaled)  if L_scaled > 0.
OpenInterval admissible_alpha0_interval(double L_scaled);

enum class Alpha0Case {
  ratio_binds,    // Case 1: alpha0* = R0 / cal_B
  interval_binds  // Case 2: alpha0* = min(1/2, interval bound) - delta
};

struct OptimalAlpha0 {
  double alpha0 = 0.0;
  Alpha0Case which = Alpha0Case::ratio_binds;
};

// alpha0* = min( R0/B_scaled, min(1/2, interval bound) - delta ), tagged with
// which side binds (ties resolve to Case 1).
OptimalAlpha0 optimal_alpha0(double R0, double B_scaled, double L_scaled, double delta);

// C := beta (2 - beta) / (c * Bh^2)
double c_constant(double beta, double c, double Bh);

// Produces the stepsize sequence alpha_k.
//   convex_decay: alpha_k = alpha0 / (k+1)^gamma, gamma in [1/2, 1)
//                 (gamma in [0, 1/2) allowed only when the caller asserts B = 0),
//   switching:    alpha_k = min(1/L_scaled, 8 / (mu (k+1))),
//                 constant until k0 = floor(8 L_scaled / mu - 1).
class StepsizeSchedule {
 public:
  enum class Mode { convex_decay, switching };

  // Placeholder; real schedules come from the named constructors.
  StepsizeSchedule() = default;

  static StepsizeSchedule convex_decay(double alpha0, double gamma, double L_scaled,
                                       bool b_zero_asserted = false);
  static StepsizeSchedule switching(double L_scaled, double mu);

  double alpha_at(long k) const;
  // Weight of iterate x_k in the convex-mode average: alpha_k (2 - alpha_k L).
  double convex_weight_at(long k) const;

  Mode mode() const { return mode_; }
  double alpha0() const { return alpha0_; }
  double gamma() const { return gamma_; }
  double L_scaled() const { return L_; }
  double mu() const { return mu_; }
  long k0() const { return k0_; }

 private:
  Mode mode_ = Mode::convex_decay;
  double alpha0_ = 0.0;
  double gamma_ = 0.5;
  double L_ = 0.0;
  double mu_ = 0.0;
  long k0_ = 0;
};

}  // namespace ssp
