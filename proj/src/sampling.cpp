#include "ssp/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace ssp {

namespace {

// Robert Floyd's algorithm: uniform random subset of size tau from [0, n).
std::vector<int> floyd_subset(Rng& rng, int n, int tau) {
  std::vector<int> out;
  out.reserve(tau);
  for (int j = n - tau; j < n; ++j) {
    const int candidate = static_cast<int>(rng.uniform_below(static_cast<std::uint64_t>(j) + 1));
    if (std::find(out.begin(), out.end(), candidate) == out.end()) {
      out.push_back(candidate);
    } else {
      out.push_back(j);
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

void SamplingLaw::validate_marginals() const {
  for (int i = 0; i < universe_; ++i) {
    if (!(marginal_[i] > 0.0)) {
      throw ConfigError("sampling law is not proper: index " + std::to_string(i) +
                        " has zero marginal probability");
    }
  }
}

SamplingLaw SamplingLaw::partition(int universe, int tau, WeightRule rule) {
  if (universe <= 0 || tau <= 0 || universe % tau != 0) {
    throw ConfigError("partition sampling requires tau | universe (got " +
                      std::to_string(tau) + " of " + std::to_string(universe) + ")");
  }
  std::vector<std::vector<int>> blocks(universe / tau);
  for (int b = 0; b < universe / tau; ++b) {
    blocks[b].resize(tau);
    std::iota(blocks[b].begin(), blocks[b].end(), b * tau);
  }
  return partition_blocks(universe, std::move(blocks), rule);
}

SamplingLaw SamplingLaw::partition_blocks(int universe, std::vector<std::vector<int>> blocks,
                                          WeightRule rule) {
  if (blocks.empty()) throw ConfigError("partition sampling needs at least one block");
  const std::size_t tau = blocks[0].size();
  std::vector<int> seen(universe, 0);
  for (auto& b : blocks) {
    if (b.size() != tau) throw ConfigError("partition blocks must have equal cardinality");
    std::sort(b.begin(), b.end());
    for (int i : b) {
      if (i < 0 || i >= universe) throw ConfigError("partition block index out of range");
      if (seen[i]++) throw ConfigError("partition blocks must be disjoint");
    }
  }
  for (int i = 0; i < universe; ++i) {
    if (!seen[i]) throw ConfigError("partition blocks must cover the universe");
  }
  SamplingLaw law;
  law.kind_ = Kind::partition;
  law.rule_ = rule;
  law.universe_ = universe;
  law.tau_ = static_cast<int>(tau);
  law.probs_.assign(blocks.size(), 1.0 / static_cast<double>(blocks.size()));
  law.subsets_ = std::move(blocks);
  law.marginal_.assign(universe, 1.0 / static_cast<double>(law.subsets_.size()));
  law.validate_marginals();
  return law;
}

SamplingLaw SamplingLaw::nice(int universe, int tau, WeightRule rule) {
  if (universe <= 0 || tau <= 0 || tau > universe) {
    throw ConfigError("nice sampling requires 1 <= tau <= universe");
  }
  SamplingLaw law;
  law.kind_ = Kind::nice;
  law.rule_ = rule;
  law.universe_ = universe;
  law.tau_ = tau;
  law.marginal_.assign(universe, static_cast<double>(tau) / static_cast<double>(universe));
  law.validate_marginals();
  return law;
}

SamplingLaw SamplingLaw::custom(int universe, std::vector<std::vector<int>> subsets,
                                std::vector<double> probs, WeightRule rule) {
  if (subsets.empty() || subsets.size() != probs.size()) {
    throw ConfigError("custom sampling needs matching nonempty subset/probability lists");
  }
  double total = 0.0;
  for (double p : probs) {
    if (!(p >= 0.0)) throw ConfigError("custom sampling probabilities must be >= 0");
    total += p;
  }
  if (std::abs(total - 1.0) > 1e-12) throw ConfigError("custom sampling probabilities must sum to 1");
  SamplingLaw law;
  law.kind_ = Kind::custom;
  law.rule_ = rule;
  law.universe_ = universe;
  law.tau_ = 0;
  law.marginal_.assign(universe, 0.0);
  for (std::size_t s = 0; s < subsets.size(); ++s) {
    auto& sub = subsets[s];
    std::sort(sub.begin(), sub.end());
    if (std::adjacent_find(sub.begin(), sub.end()) != sub.end()) {
      throw ConfigError("custom sampling subset has duplicate indices");
    }
    for (int i : sub) {
      if (i < 0 || i >= universe) throw ConfigError("custom sampling index out of range");
      law.marginal_[i] += probs[s];
    }
  }
  law.subsets_ = std::move(subsets);
  law.probs_ = std::move(probs);
  law.validate_marginals();
  return law;
}

SampleRealization SamplingLaw::draw(Rng& rng) const {
  SampleRealization r;
  switch (kind_) {
    case Kind::partition: {
      const std::size_t b = rng.uniform_below(subsets_.size());
      r.indices = subsets_[b];
      break;
    }
    case Kind::nice: {
      r.indices = floyd_subset(rng, universe_, tau_);
      break;
    }
    case Kind::custom: {
      const double u = rng.next_double();
      double acc = 0.0;
      std::size_t pick = probs_.size() - 1;
      for (std::size_t s = 0; s < probs_.size(); ++s) {
        acc += probs_[s];
        if (u < acc) {
          pick = s;
          break;
        }
      }
      r.indices = subsets_[pick];
      break;
    }
  }
  r.weights.resize(r.indices.size());
  for (std::size_t t = 0; t < r.indices.size(); ++t) {
    r.weights[t] = rule_ == WeightRule::indicator ? 1.0 : 1.0 / marginal_[r.indices[t]];
  }
  return r;
}

double SamplingLaw::marginal(int i) const {
  if (i < 0 || i >= universe_) throw InputError("marginal: index out of range");
  return marginal_[i];
}

double SamplingLaw::mean_batch() const {
  if (kind_ != Kind::custom) return static_cast<double>(tau_);
  double m = 0.0;
  for (std::size_t s = 0; s < subsets_.size(); ++s) m += probs_[s] * static_cast<double>(subsets_[s].size());
  return m;
}

SamplingLaw::SecondMoment SamplingLaw::expected_weight_sq_norm(int max_exact_subsets,
                                                               int mc_trials) const {
  SecondMoment out;
  if (kind_ != Kind::custom) {
    // Every realized subset has tau indices of marginal tau/universe, so
    // ||zeta||^2 = tau (universe/tau)^2 = universe^2/tau surely.
    const double u = static_cast<double>(universe_), t = static_cast<double>(tau_);
    out.value = u * u / t;
    return out;
  }
  if (static_cast<int>(subsets_.size()) <= max_exact_subsets) {
    double acc = 0.0;
    for (std::size_t s = 0; s < subsets_.size(); ++s) {
      double inner = 0.0;
      for (int i : subsets_[s]) inner += 1.0 / (marginal_[i] * marginal_[i]);
      acc += probs_[s] * inner;
    }
    out.value = acc;
    return out;
  }
  // Monte-Carlo estimate, reported with its standard error.
  Rng rng(0xe57u, 0);
  double sum = 0.0, sumsq = 0.0;
  for (int t = 0; t < mc_trials; ++t) {
    SampleRealization r = draw(rng);
    double v = 0.0;
    for (int i : r.indices) v += 1.0 / (marginal_[i] * marginal_[i]);
    sum += v;
    sumsq += v * v;
  }
  const double mean = sum / mc_trials;
  const double var = std::max(0.0, sumsq / mc_trials - mean * mean);
  out.value = mean;
  out.estimated = true;
  out.std_error = std::sqrt(var / mc_trials);
  return out;
}

ScaledConstants scaled_constants(const SamplingLaw& objective_law,
                                 const SamplingLaw& constraint_law,
                                 const ProblemConstants& base, double beta) {
  if (!(beta > 0.0 && beta < 2.0)) throw ConfigError("beta must lie in (0, 2)");
  if (objective_law.rule() != WeightRule::inverse_probability) {
    throw ConfigError("objective law must use inverse-probability weights");
  }
  if (constraint_law.rule() != WeightRule::indicator) {
    throw ConfigError("constraint law must use indicator weights");
  }
  ScaledConstants out;
  const double N = static_cast<double>(objective_law.universe());
  if (objective_law.kind() == SamplingLaw::Kind::custom) {
    const auto sm = objective_law.expected_weight_sq_norm();
    out.B_sq = sm.value / N * base.B_sq;
    out.L = sm.value / N * base.L;
    out.estimated = sm.estimated;
    out.std_error = sm.std_error / N * std::max(base.B_sq, base.L);
  } else {
    const double factor = N / static_cast<double>(objective_law.batch());
    out.B_sq = factor * base.B_sq;
    out.L = factor * base.L;
  }
  out.B_h = base.max_B_j();  // xi_bar = 1 for indicator weights
  if (constraint_law.kind() == SamplingLaw::Kind::custom) {
    double min_marginal = 1.0;
    for (int j = 0; j < constraint_law.universe(); ++j) {
      min_marginal = std::min(min_marginal, constraint_law.marginal(j));
    }
    out.c = base.c_bar / min_marginal;
  } else {
    // closed form: min_j E[xi^j] = tau2/m exactly for partition/nice laws
    out.c = base.c_bar * static_cast<double>(constraint_law.universe()) /
            static_cast<double>(constraint_law.batch());
  }
  out.C_beta = out.B_h > 0.0 ? beta * (2.0 - beta) / (out.c * out.B_h * out.B_h) : 0.0;
  return out;
}

UnbiasednessReport check_unbiasedness(const SamplingLaw& law, int trials, std::uint64_t seed) {
  if (trials < 10000) throw InputError("check_unbiasedness needs at least 10^4 trials");
  Rng rng(seed, 0xc4ec);
  const int n = law.universe();
  std::vector<double> sum(n, 0.0), sumsq(n, 0.0);
  UnbiasednessReport rep;
  for (int t = 0; t < trials; ++t) {
    SampleRealization r = law.draw(rng);
    for (std::size_t u = 0; u < r.indices.size(); ++u) {
      sum[r.indices[u]] += r.weights[u];
      sumsq[r.indices[u]] += r.weights[u] * r.weights[u];
      rep.max_weight = std::max(rep.max_weight, r.weights[u]);
    }
  }
  rep.mean.resize(n);
  rep.std_error.resize(n);
  rep.target.resize(n);
  for (int i = 0; i < n; ++i) {
    rep.mean[i] = sum[i] / trials;
    const double var = std::max(0.0, sumsq[i] / trials - rep.mean[i] * rep.mean[i]);
    rep.std_error[i] = std::sqrt(var / trials);
    rep.target[i] = law.rule() == WeightRule::indicator ? law.marginal(i) : 1.0;
    // The 1e-12 floor covers exact zero-variance laws (e.g. tau = universe).
    if (std::abs(rep.mean[i] - rep.target[i]) > 3.0 * rep.std_error[i] + 1e-12) {
      rep.flagged.push_back(i);
      rep.ok = false;
    }
  }
  if (law.rule() == WeightRule::indicator && rep.max_weight > 1.0) rep.ok = false;
  return rep;
}

}  // namespace ssp
