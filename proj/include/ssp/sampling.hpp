#pragma once

#include <string>
#include <vector>

#include "ssp/problem.hpp"
#include "ssp/rng.hpp"
#include "ssp/types.hpp"

namespace ssp {

// Which sampling vector the law produces for a realized subset S:
//   inverse_probability: zeta^i = 1_{i in S} / p_i  (objective side, E[zeta^i] = 1)
//   indicator:           xi^j   = 1_{j in S}        (constraint side, E[xi^j] = p_j)
enum class WeightRule { inverse_probability, indicator };

struct SampleRealization {
  std::vector<int> indices;      // sorted ascending
  std::vector<double> weights;   // aligned with indices
};

// A probability law over index subsets of {0, ..., universe-1}.
class SamplingLaw {
 public:
  enum class Kind { partition, nice, custom };

  // A default-constructed law is an empty placeholder; build real laws with
  // the named constructors below.
  SamplingLaw() = default;

  // Uniform choice among contiguous equal-size blocks (tau must divide universe).
  static SamplingLaw partition(int universe, int tau, WeightRule rule);
  static SamplingLaw partition_blocks(int universe, std::vector<std::vector<int>> blocks,
                                      WeightRule rule);
  // Uniform over all subsets of cardinality tau.
  static SamplingLaw nice(int universe, int tau, WeightRule rule);
  // Explicit subset list with probabilities (must sum to 1, every index covered).
  static SamplingLaw custom(int universe, std::vector<std::vector<int>> subsets,
                            std::vector<double> probs, WeightRule rule);

  SampleRealization draw(Rng& rng) const;

  Kind kind() const { return kind_; }
  WeightRule rule() const { return rule_; }
  int universe() const { return universe_; }
  int batch() const { return tau_; }           // partition/nice; 0 for custom
  double mean_batch() const;                   // expected |S|
  double marginal(int i) const;                // p_i
  const std::vector<std::vector<int>>& blocks() const { return subsets_; }

  // E[||zeta||^2] = sum_S p_S sum_{i in S} 1/p_i^2 under the
  // inverse-probability weighting. Exact for partition/nice and for custom
  // laws with at most max_exact_subsets subsets; Monte-Carlo otherwise.
  struct SecondMoment {
    double value = 0.0;
    bool estimated = false;
    double std_error = 0.0;
  };
  SecondMoment expected_weight_sq_norm(int max_exact_subsets = 20,
                                       int mc_trials = 100000) const;

 private:
  void validate_marginals() const;

  Kind kind_ = Kind::nice;
  WeightRule rule_ = WeightRule::inverse_probability;
  int universe_ = 0;
  int tau_ = 0;
  std::vector<std::vector<int>> subsets_;  // partition blocks or custom subsets
  std::vector<double> probs_;              // per-subset (partition/custom)
  std::vector<double> marginal_;           // p_i
};

// Constants of the stochastic reformulation for a given pair of laws:
//   cal_B^2 = (E||zeta||^2/N) B^2,  cal_L likewise,  cal_B_h = max_j B_j,
//   c = c_bar / min_j E[xi^j],  C = beta(2-beta) / (c cal_B_h^2).
// Partition and nice laws collapse to the closed forms (N/tau1) B^2 etc.
struct ScaledConstants {
  double B_sq = 0.0;
  double L = 0.0;
  double B_h = 0.0;
  double c = 0.0;
  double C_beta = 0.0;
  bool estimated = false;    // second moment came from Monte-Carlo
  double std_error = 0.0;
};

ScaledConstants scaled_constants(const SamplingLaw& objective_law,
                                 const SamplingLaw& constraint_law,
                                 const ProblemConstants& base, double beta);

// Empirical check of the sampling-vector moments: E[zeta^i] = 1 (objective
// side) or E[xi^j] = p_j with xi^j <= 1 (constraint side).
struct UnbiasednessReport {
  std::vector<double> mean;
  std::vector<double> std_error;
  std::vector<double> target;
  double max_weight = 0.0;
  std::vector<int> flagged;  // indices where |mean - target| > 3 se
  bool ok = true;
};

UnbiasednessReport check_unbiasedness(const SamplingLaw& law, int trials,
                                      std::uint64_t seed = 0x5eedu);

}  // namespace ssp
