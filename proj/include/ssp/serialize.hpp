#pragma once

#include <json.hpp>
#include <string>

#include "ssp/generators.hpp"
#include "ssp/problem.hpp"
#include "ssp/reference.hpp"
#include "ssp/sampling.hpp"
#include "ssp/solver.hpp"

namespace ssp {

using nlohmann::json;

// Doubles are printed with 17 significant digits so every numeric cell
// round-trips exactly through text.
std::string fmt17(double v);

json simple_set_to_json(const SimpleSet& s);
SimpleSet simple_set_from_json(const json& j);

json instance_to_json(const ProblemInstance& p);
ProblemInstance instance_from_json(const json& j);

json constants_to_json(const ProblemConstants& c);
ProblemConstants constants_from_json(const json& j);

// Accepts either a full instance document or a generator spec
// ({"generator": "constrained_lasso" | "robust_svm", ...}).
ProblemInstance problem_from_json(const json& j);

ConstrainedLassoSpec lasso_spec_from_json(const json& j);
RobustSvmSpec svm_spec_from_json(const json& j);

// Law block: {"kind": "nice"|"partition"|"custom", "tau": t,
//             "blocks": [[...]], "subsets": [[...]], "probs": [...]}
SamplingLaw law_from_json(const json& j, int universe, WeightRule rule);

json reference_to_json(const ReferenceSolution& r);
ReferenceSolution reference_from_json(const json& j);

// FNV-1a over the canonical instance serialization.
std::string instance_hash(const ProblemInstance& p);

// RunLog CSV: epoch,iteration,F_gap,feasibility_norm,dist_estimate,alpha_k,wall_time_ms
std::string runlog_to_csv(const RunLog& log);

json run_result_to_json(const RunResult& r);

}  // namespace ssp
