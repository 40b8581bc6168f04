#include "ssp/solver.hpp"

#include <chrono>
#include <cmath>

#include "ssp/metrics.hpp"

namespace ssp {

namespace {
constexpr double kNegInf = -std::numeric_limits<double>::infinity();
}

Vector average_convex(const AverageAccumulator& acc) {
  return acc.value();
}

Vector average_strongly_convex(const AverageAccumulator& acc, long k0) {
  if (acc.empty()) {
    throw InputError("strongly convex average undefined before iteration k0 + 1 = " +
                     std::to_string(k0 + 1));
  }
  return acc.value();
}

void SolverState::init(const ProblemInstance& p, const Vector& x0, std::uint64_t seed) {
  require_dim(x0, p.dim(), "SolverState::init");
  x = p.project(x0);
  u = v = z = x;
  k = 0;
  rng_obj = Rng(seed, /*stream=*/0);
  rng_con = Rng(seed, /*stream=*/1);
  avg.reset(p.dim());
  grad = Vector::Zero(p.dim());
}

void ssp_step(SolverState& st, const ProblemInstance& p, const SamplingLaw& obj_law,
              const SamplingLaw& con_law, double alpha_k, double beta,
              const AveragingRule* avg_rule, const StepObserver* obs) {
  if (!(alpha_k > 0.0)) throw InputError("ssp_step: alpha_k must be > 0");
  if (!(beta > 0.0 && beta < 2.0)) throw ConfigError("ssp_step: beta must lie in (0, 2)");

  st.last_obj = obj_law.draw(st.rng_obj);
  const bool constrained = p.num_constraints() > 0;
  if (constrained) {
    st.last_con = con_law.draw(st.rng_con);
  } else {
    st.last_con.indices.clear();
    st.last_con.weights.clear();
  }

  // Objective: mini-batch proximal subgradient step, then projection onto Y.
  st.grad = p.minibatch_f_subgrad(st.x, st.last_obj.indices, st.last_obj.weights);
  st.u = p.minibatch_g_prox(st.x - alpha_k * st.grad, alpha_k, st.last_obj.indices,
                            st.last_obj.weights);
  st.v = p.project(st.u);

  // Feasibility: Polyak step on the most violated sampled constraint.
  double h_max = kNegInf;
  int j_star = -1;
  for (int j : st.last_con.indices) {
    const double hv = p.h_value(j, st.v);
    if (hv > h_max) {  // strict: ties resolve to the lowest index
      h_max = hv;
      j_star = j;
    }
  }
  const Vector* used_grad = nullptr;
  if (j_star >= 0 && h_max > 0.0) {
    st.hgrad = p.h_subgrad(j_star, st.v);
    const double sq = st.hgrad.squaredNorm();
    if (!(sq > 0.0)) {
      throw ContractError("constraint " + std::to_string(j_star) +
                          " is violated but returned a zero subgradient");
    }
    st.z = st.v - (beta * h_max / sq) * st.hgrad;
    used_grad = &st.hgrad;
  } else {
    st.z = st.v;  // (h)_+ = 0: no step, regardless of the fallback s_h
  }
  Vector x_next = p.project(st.z);

  const long step_index = st.k;
  st.k += 1;
  if (avg_rule != nullptr) {
    const double w = avg_rule->weight_for(st.k);
    if (w > 0.0) st.avg.add(x_next, w);
  }
  if (obs != nullptr && *obs) {
    const StepRecord rec{step_index, alpha_k,     beta,       st.x,        st.u,
                         st.v,       st.z,        x_next,     h_max,       j_star,
                         used_grad,  st.last_obj, st.last_con};
    (*obs)(rec);
  }
  st.x = std::move(x_next);
}

std::string to_string(Termination t) {
  switch (t) {
    case Termination::criteria_met:
      return "criteria_met";
    case Termination::budget_exhausted:
      return "budget";
    case Termination::diverged:
      return "diverged";
  }
  return "unknown";
}

long RunConfig::epoch_length() const {
  if (!problem) throw ConfigError("run config has no problem instance");
  const double N = static_cast<double>(problem->num_components());
  const double t1 = objective_law.mean_batch();
  double len = std::ceil(N / t1);
  if (problem->num_constraints() > 0) {
    const double m = static_cast<double>(problem->num_constraints());
    const double t2 = constraint_law.mean_batch();
    len = std::max(len, std::ceil(m / t2));
  }
  return static_cast<long>(len);
}

RunResult run(const RunConfig& cfg, const StepObserver* obs) {
  if (!cfg.problem) throw ConfigError("run config has no problem instance");
  const ProblemInstance& p = *cfg.problem;
  if (!(cfg.tol_feasibility > 0.0) || !(cfg.tol_gap > 0.0)) {
    throw ConfigError("stopping tolerances must be > 0");
  }
  if (!(cfg.beta > 0.0 && cfg.beta < 2.0)) throw ConfigError("beta must lie in (0, 2)");
  if (cfg.max_epochs < 0) throw ConfigError("max_epochs must be >= 0");
  if (cfg.log_every < 1) throw ConfigError("log_every must be >= 1");
  if (cfg.objective_law.universe() != p.num_components()) {
    throw ConfigError("objective law universe does not match the number of components");
  }
  if (p.num_constraints() > 0 && cfg.constraint_law.universe() != p.num_constraints()) {
    throw ConfigError("constraint law universe does not match the number of constraints");
  }

  const long epoch_len = cfg.epoch_length();
  const AveragingRule rule{cfg.averaging, &cfg.schedule};

  SolverState st;
  const Vector x0 = cfg.x0 ? *cfg.x0 : Vector(Vector::Zero(p.dim()));
  st.init(p, x0, cfg.seed);

  RunResult res;
  res.epoch_length = epoch_len;
  res.x_last = st.x;
  res.x_average = st.x;

  const auto t_start = std::chrono::steady_clock::now();
  auto elapsed_ms = [&]() {
    if (!cfg.timing) return 0.0;
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t_start)
        .count();
  };

  // Criteria are evaluated on the averaged iterate (falling back to the last
  // iterate until averaging has started, or always when configured so).
  auto eval_point = [&]() -> Vector {
    if (cfg.stop_on_last_iterate || st.avg.empty()) return st.x;
    return st.avg.value();
  };

  auto log_state = [&](long epoch) {
    const Vector xe = eval_point();
    RunLogRecord rec;
    rec.epoch = epoch;
    rec.iteration = st.k;
    rec.feasibility_norm = feasibility_norm(p, xe);
    if (cfg.F_ref) rec.f_gap = p.objective(xe) - *cfg.F_ref;
    if (cfg.log_dist_estimate) {
      rec.dist_estimate =
          distance_to_feasible(p, xe, std::min(1e-8, cfg.tol_feasibility * 1e-2)).value;
    }
    rec.alpha = cfg.schedule.alpha_at(st.k);
    rec.wall_time_ms = elapsed_ms();
    res.log.records.push_back(rec);
    return rec;
  };

  const double feas0 = feasibility_norm(p, st.x);
  const double divergence_guard = 1e6 * std::max(feas0, 1.0);
  log_state(0);

  res.reason = Termination::budget_exhausted;
  for (long epoch = 1; epoch <= cfg.max_epochs; ++epoch) {
    for (long it = 0; it < epoch_len; ++it) {
      ssp_step(st, p, cfg.objective_law, cfg.constraint_law, cfg.schedule.alpha_at(st.k),
               cfg.beta, &rule, obs);
    }
    res.epochs = epoch;
    res.iterations = st.k;

    const Vector xe = eval_point();
    const double feas = feasibility_norm(p, xe);
    const double gap = cfg.F_ref ? p.objective(xe) - *cfg.F_ref
                                 : std::numeric_limits<double>::quiet_NaN();
    if (epoch % cfg.log_every == 0 || epoch == cfg.max_epochs) {
      RunLogRecord rec;
      rec.epoch = epoch;
      rec.iteration = st.k;
      rec.feasibility_norm = feas;
      rec.f_gap = gap;
      if (cfg.log_dist_estimate) {
        rec.dist_estimate =
            distance_to_feasible(p, xe, std::min(1e-8, cfg.tol_feasibility * 1e-2)).value;
      }
      rec.alpha = cfg.schedule.alpha_at(st.k);
      rec.wall_time_ms = elapsed_ms();
      res.log.records.push_back(rec);
    }

    if (feas > divergence_guard) {
      res.reason = Termination::diverged;
      break;
    }
    if (feas <= cfg.tol_feasibility && cfg.F_ref && gap <= cfg.tol_gap) {
      res.reason = Termination::criteria_met;
      break;
    }
  }

  const Vector xe = eval_point();
  res.x_last = st.x;
  res.x_average = xe;
  res.final_feasibility = feasibility_norm(p, xe);
  if (cfg.F_ref) res.final_gap = p.objective(xe) - *cfg.F_ref;
  res.wall_time_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t_start)
          .count();
  return res;
}

FeasibleDescentMonitor::FeasibleDescentMonitor(const ProblemInstance& p, Vector y, double Bh,
                                               double tol)
    : y_(std::move(y)), Bh_(Bh), tol_(tol) {
  require_dim(y_, p.dim(), "FeasibleDescentMonitor");
  if (!(Bh > 0.0)) throw InputError("FeasibleDescentMonitor: Bh must be > 0");
  if (!p.domain().contains(y_, 1e-12)) {
    throw InputError("FeasibleDescentMonitor: y must lie in Y");
  }
  for (int j = 0; j < p.num_constraints(); ++j) {
    if (p.h_value(j, y_) > 0.0) {
      throw InputError("FeasibleDescentMonitor: y violates constraint " + std::to_string(j));
    }
  }
}

void FeasibleDescentMonitor::observe(const StepRecord& rec) {
  const double hplus = std::max(rec.h_sampled, 0.0);
  const double lhs = (rec.x_after - y_).squaredNorm();
  const double rhs = (rec.v - y_).squaredNorm() -
                     rec.beta * (2.0 - rec.beta) * hplus * hplus / (Bh_ * Bh_);
  const double slack = rhs - lhs;
  entries_.push_back({rec.k, lhs, rhs, slack});
  if (slack < -tol_) {
    ++violations_;
    worst_ = std::max(worst_, -slack);
  }
}

void PolyakResidualMonitor::observe(const StepRecord& rec) {
  if (rec.h_grad == nullptr || !(rec.h_sampled > 0.0)) return;
  const double linearized = rec.h_sampled + rec.h_grad->dot(rec.z - rec.v);
  const double residual = linearized - (1.0 - rec.beta) * rec.h_sampled;
  max_abs_ = std::max(max_abs_, std::abs(residual));
  ++steps_;
}

}  // namespace ssp
