#pragma once

#include <functional>
#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "ssp/problem.hpp"
#include "ssp/sampling.hpp"
#include "ssp/stepsize.hpp"

namespace ssp {

enum class AveragingMode { convex, strongly_convex };

// Running weighted average: numerator vector + weight sum, no trajectory kept.
class AverageAccumulator {
 public:
  void reset(Eigen::Index n) {
    num_ = Vector::Zero(n);
    wsum_ = 0.0;
    count_ = 0;
  }
  void add(const Vector& x, double w) {
    num_.noalias() += w * x;
    wsum_ += w;
    ++count_;
  }
  bool empty() const { return count_ == 0; }
  double weight_sum() const { return wsum_; }
  long count() const { return count_; }
  Vector value() const {
    if (empty() || !(wsum_ > 0.0)) throw InputError("average requested before any iterate was accumulated");
    return num_ / wsum_;
  }

 private:
  Vector num_;
  double wsum_ = 0.0;
  long count_ = 0;
};

// x_hat_k = sum_{t=1}^{k} alpha_t (2 - alpha_t L) x_t / S_k
Vector average_convex(const AverageAccumulator& acc);
// x_hat_k = sum_{t=k0+1}^{k} (t+1)^2 x_t / S_k
Vector average_strongly_convex(const AverageAccumulator& acc, long k0);

// Weight given to iterate x_t when it enters the running average.
struct AveragingRule {
  AveragingMode mode = AveragingMode::convex;
  const StepsizeSchedule* schedule = nullptr;

  double weight_for(long t) const {
    if (mode == AveragingMode::convex) {
      return t >= 1 ? schedule->convex_weight_at(t) : 0.0;
    }
    const long k0 = schedule->k0();
    if (t < k0 + 1) return 0.0;
    const double tp = static_cast<double>(t + 1);
    return tp * tp;
  }
};

struct SolverState {
  Vector x, u, v, z;
  long k = 0;
  Rng rng_obj, rng_con;
  SampleRealization last_obj, last_con;
  AverageAccumulator avg;

  void init(const ProblemInstance& p, const Vector& x0, std::uint64_t seed);

  // scratch buffers reused across steps
  Vector grad, hgrad;
};

// Everything a per-iteration observer may need; references stay valid only
// during the callback.
struct StepRecord {
  long k = 0;  // step index: consumed x_k, produced x_{k+1}
  double alpha = 0.0;
  double beta = 0.0;
  const Vector& x_before;
  const Vector& u;
  const Vector& v;
  const Vector& z;
  const Vector& x_after;
  double h_sampled;       // max_{j in S'} h_j(v_k); -inf when the batch is empty
  int j_star;             // argmax constraint, -1 if none
  const Vector* h_grad;   // subgradient used by the Polyak step, null if none
  const SampleRealization& obj_sample;
  const SampleRealization& con_sample;
};

using StepObserver = std::function<void(const StepRecord&)>;

// One iteration of the mini-batch stochastic subgradient projection method:
//   draw zeta_k, xi_k;  u_k = prox_{alpha_k g(.,zeta_k)}(x_k - alpha_k grad f(x_k, zeta_k));
//   v_k = proj_Y(u_k);  Polyak step on the most violated sampled constraint;
//   x_{k+1} = proj_Y(z_k).
void ssp_step(SolverState& st, const ProblemInstance& p, const SamplingLaw& obj_law,
              const SamplingLaw& con_law, double alpha_k, double beta,
              const AveragingRule* avg_rule = nullptr, const StepObserver* obs = nullptr);

enum class Termination { criteria_met, budget_exhausted, diverged };

std::string to_string(Termination t);

struct RunLogRecord {
  long epoch = 0;
  long iteration = 0;
  double f_gap = std::numeric_limits<double>::quiet_NaN();
  double feasibility_norm = 0.0;
  double dist_estimate = std::numeric_limits<double>::quiet_NaN();
  double alpha = 0.0;
  double wall_time_ms = 0.0;
};

struct RunLog {
  std::vector<RunLogRecord> records;
};

struct RunConfig {
  std::shared_ptr<const ProblemInstance> problem;
  SamplingLaw objective_law;
  SamplingLaw constraint_law;
  StepsizeSchedule schedule;
  double beta = 1.0;
  AveragingMode averaging = AveragingMode::convex;
  long max_epochs = 1000;
  double tol_feasibility = 1e-2;
  double tol_gap = 1e-2;
  std::uint64_t seed = 0;
  int log_every = 1;  // epochs between log records
  std::optional<double> F_ref;     // needed for the optimality-gap criterion
  std::optional<Vector> x0;        // default: proj_Y(0)
  bool stop_on_last_iterate = false;  // evaluate criteria on x_k instead of x_hat_k
  bool log_dist_estimate = true;
  bool timing = false;  // record real wall time (off keeps logs byte-reproducible)

  long epoch_length() const;
};

struct RunResult {
  Vector x_average;   // averaged iterate (last iterate before averaging starts)
  Vector x_last;
  RunLog log;
  Termination reason = Termination::budget_exhausted;
  long epochs = 0;
  long iterations = 0;
  long epoch_length = 0;
  double final_gap = std::numeric_limits<double>::quiet_NaN();
  double final_feasibility = 0.0;
  double wall_time_ms = 0.0;
};

RunResult run(const RunConfig& cfg, const StepObserver* obs = nullptr);

// Per-iteration certificate for the sure descent inequality
//   ||x_{k+1} - y||^2 <= ||v_k - y||^2 - beta(2-beta) (h(v_k, xi_k))_+^2 / Bh^2,
// valid for every y in Y with h_j(y) <= 0 for all j.
class FeasibleDescentMonitor {
 public:
  FeasibleDescentMonitor(const ProblemInstance& p, Vector y, double Bh, double tol = 1e-9);

  void observe(const StepRecord& rec);
  StepObserver observer() {
    return [this](const StepRecord& r) { observe(r); };
  }

  struct Entry {
    long k;
    double lhs, rhs, slack;
  };
  const std::vector<Entry>& entries() const { return entries_; }
  long violations() const { return violations_; }
  double worst_violation() const { return worst_; }

 private:
  Vector y_;
  double Bh_;
  double tol_;
  std::vector<Entry> entries_;
  long violations_ = 0;
  double worst_ = 0.0;
};

// Tracks the linearized residual of the Polyak feasibility step,
// h + <grad h, z - v> - (1-beta) h, which is identically zero in exact
// arithmetic whenever a step is taken.
class PolyakResidualMonitor {
 public:
  void observe(const StepRecord& rec);
  StepObserver observer() {
    return [this](const StepRecord& r) { observe(r); };
  }
  double max_abs_residual() const { return max_abs_; }
  long steps_seen() const { return steps_; }

 private:
  double max_abs_ = 0.0;
  long steps_ = 0;
};

}  // namespace ssp
