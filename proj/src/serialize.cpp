#include "ssp/serialize.hpp"

#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <limits>

namespace ssp {

namespace {

json vec_to_json(const Vector& v) {
  json a = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

Vector vec_from_json(const json& j) {
  Vector v(j.size());
  Eigen::Index i = 0;
  for (const auto& x : j) v[i++] = x.get<double>();
  return v;
}

double get_or(const json& j, const char* key, double dflt) {
  return j.contains(key) ? j.at(key).get<double>() : dflt;
}

}  // namespace

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

json simple_set_to_json(const SimpleSet& s) {
  switch (s.kind()) {
    case SimpleSet::Kind::whole_space:
      return {{"kind", "whole_space"}, {"n", s.dim()}};
    case SimpleSet::Kind::box: {
      // +-inf encoded as null for JSON portability
      json lo = json::array(), hi = json::array();
      for (int i = 0; i < s.dim(); ++i) {
        lo.push_back(std::isfinite(s.lower()[i]) ? json(s.lower()[i]) : json(nullptr));
        hi.push_back(std::isfinite(s.upper()[i]) ? json(s.upper()[i]) : json(nullptr));
      }
      return {{"kind", "box"}, {"lo", lo}, {"hi", hi}};
    }
    case SimpleSet::Kind::ball:
      return {{"kind", "ball"}, {"center", vec_to_json(s.center())}, {"radius", s.radius()}};
  }
  throw ConfigError("unknown simple set kind");
}

SimpleSet simple_set_from_json(const json& j) {
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "whole_space") return SimpleSet::whole_space(j.at("n").get<int>());
  if (kind == "box") {
    const auto& jlo = j.at("lo");
    const auto& jhi = j.at("hi");
    Vector lo(jlo.size()), hi(jhi.size());
    for (std::size_t i = 0; i < jlo.size(); ++i) {
      lo[i] = jlo[i].is_null() ? -std::numeric_limits<double>::infinity() : jlo[i].get<double>();
      hi[i] = jhi[i].is_null() ? std::numeric_limits<double>::infinity() : jhi[i].get<double>();
    }
    return SimpleSet::box(std::move(lo), std::move(hi));
  }
  if (kind == "ball") {
    return SimpleSet::ball(vec_from_json(j.at("center")), j.at("radius").get<double>());
  }
  throw ConfigError("unknown simple set kind: " + kind);
}

json constants_to_json(const ProblemConstants& c) {
  json j;
  j["B_sq"] = c.B_sq;
  j["L"] = c.L;
  j["mu"] = c.mu;
  j["B_j"] = c.B_j;
  j["c_bar"] = c.c_bar;
  j["q"] = c.q;
  j["diameter_term_omitted"] = c.diameter_term_omitted;
  return j;
}

ProblemConstants constants_from_json(const json& j) {
  ProblemConstants c;
  c.B_sq = get_or(j, "B_sq", 0.0);
  c.L = get_or(j, "L", 0.0);
  c.mu = get_or(j, "mu", 0.0);
  if (j.contains("B_j")) c.B_j = j.at("B_j").get<std::vector<double>>();
  c.c_bar = get_or(j, "c_bar", 1.0);
  c.q = get_or(j, "q", 1.0);
  if (j.contains("diameter_term_omitted")) {
    c.diameter_term_omitted = j.at("diameter_term_omitted").get<bool>();
  }
  return c;
}

json instance_to_json(const ProblemInstance& p) {
  json j;
  j["format"] = "ssp-instance-v1";
  j["n"] = p.dim();
  j["N"] = p.num_components();
  j["m"] = p.num_constraints();

  json jf = json::array();
  for (const auto& fc : p.f_components()) {
    if (const auto* q = std::get_if<QuadResidualF>(&fc)) {
      jf.push_back({{"kind", "quad_residual"}, {"a", vec_to_json(q->a)}, {"b", q->b}});
    } else if (const auto* l = std::get_if<LinearF>(&fc)) {
      jf.push_back({{"kind", "linear"}, {"a", vec_to_json(l->a)}});
    } else {
      const auto& s = std::get<SvmSmoothF>(fc);
      jf.push_back({{"kind", "svm_smooth"},
                    {"lambda", s.lambda},
                    {"m_delta", s.m_delta},
                    {"w_dim", s.w_dim},
                    {"u_coord", s.u_coord}});
    }
  }
  j["f"] = std::move(jf);

  json jg = json::array();
  for (const auto& gc : p.g_components()) {
    jg.push_back({{"coords", gc.coords}, {"coeffs", gc.coeffs}});
  }
  j["g"] = std::move(jg);

  json jh = json::array();
  for (const auto& hc : p.h_components()) {
    if (const auto* a = std::get_if<AffineH>(&hc)) {
      jh.push_back({{"kind", "affine"}, {"c", vec_to_json(a->c)}, {"d", a->d}});
    } else {
      const auto& s = std::get<SocH>(hc);
      jh.push_back({{"kind", "soc"},
                    {"scale", vec_to_json(s.scale)},
                    {"c", vec_to_json(s.c)},
                    {"d", s.d}});
    }
  }
  j["h"] = std::move(jh);

  j["domain"] = simple_set_to_json(p.domain());
  j["s_h"] = vec_to_json(p.fallback_subgrad());
  j["constants"] = constants_to_json(p.constants());
  return j;
}

ProblemInstance instance_from_json(const json& j) {
  std::vector<FComponent> f;
  for (const auto& jf : j.at("f")) {
    const std::string kind = jf.at("kind").get<std::string>();
    if (kind == "quad_residual") {
      f.push_back(QuadResidualF{vec_from_json(jf.at("a")), jf.at("b").get<double>()});
    } else if (kind == "linear") {
      f.push_back(LinearF{vec_from_json(jf.at("a"))});
    } else if (kind == "svm_smooth") {
      f.push_back(SvmSmoothF{jf.at("lambda").get<double>(), jf.at("m_delta").get<double>(),
                             jf.at("w_dim").get<int>(), jf.at("u_coord").get<int>()});
    } else {
      throw ConfigError("unknown objective component kind: " + kind);
    }
  }
  std::vector<L1Component> g;
  for (const auto& jg : j.at("g")) {
    g.push_back(L1Component{jg.at("coords").get<std::vector<int>>(),
                            jg.at("coeffs").get<std::vector<double>>()});
  }
  std::vector<HComponent> h;
  for (const auto& jh : j.at("h")) {
    const std::string kind = jh.at("kind").get<std::string>();
    if (kind == "affine") {
      h.push_back(AffineH{vec_from_json(jh.at("c")), jh.at("d").get<double>()});
    } else if (kind == "soc") {
      h.push_back(SocH{vec_from_json(jh.at("scale")), vec_from_json(jh.at("c")),
                       jh.at("d").get<double>()});
    } else {
      throw ConfigError("unknown constraint kind: " + kind);
    }
  }
  ProblemInstance p(std::move(f), std::move(g), std::move(h),
                    simple_set_from_json(j.at("domain")));
  if (j.contains("s_h")) p.set_fallback_subgrad(vec_from_json(j.at("s_h")));
  if (j.contains("constants")) p.constants() = constants_from_json(j.at("constants"));
  return p;
}

ConstrainedLassoSpec lasso_spec_from_json(const json& j) {
  ConstrainedLassoSpec s;
  s.N = j.at("N").get<int>();
  s.n = j.at("n").get<int>();
  s.m_lin = j.at("m_lin").get<int>();
  s.m_soc = j.at("m_soc").get<int>();
  s.seed = j.value("seed", 0ull);
  if (j.contains("scale")) {
    const json& sc = j.at("scale");
    s.A_scale = get_or(sc, "A", 1.0);
    s.b_scale = get_or(sc, "b", 1.0);
    s.delta_scale = get_or(sc, "delta", 1.0);
    s.C_scale = get_or(sc, "C", 1.0);
    s.d_scale = get_or(sc, "d", 1.0);
    s.q_scale = get_or(sc, "q", 1.0);
    s.c_scale = get_or(sc, "c", 1.0);
    s.d_soc_scale = get_or(sc, "d_soc", 1.0);
  }
  return s;
}

RobustSvmSpec svm_spec_from_json(const json& j) {
  RobustSvmSpec s;
  s.m = j.at("m").get<int>();
  s.n = j.at("n").get<int>();
  s.lambda = get_or(j, "lambda", 1.0);
  s.delta = get_or(j, "delta", 1.0);
  s.seed = j.value("seed", 0ull);
  s.separation = get_or(j, "separation", 2.0);
  s.data_scale = get_or(j, "data_scale", 1.0);
  s.cone_scale = get_or(j, "cone_scale", 0.0);
  if (j.contains("data")) {
    const auto& rows = j.at("data");
    Matrix z(rows.size(), s.n);
    for (std::size_t i = 0; i < rows.size(); ++i) {
      const Vector r = vec_from_json(rows[i]);
      if (r.size() != s.n) throw ConfigError("robust_svm: data row dimension mismatch");
      z.row(i) = r.transpose();
    }
    s.data = std::move(z);
  }
  if (j.contains("labels")) s.labels = j.at("labels").get<std::vector<int>>();
  return s;
}

ProblemInstance problem_from_json(const json& j) {
  if (j.contains("generator")) {
    const std::string gen = j.at("generator").get<std::string>();
    if (gen == "constrained_lasso") return make_constrained_lasso(lasso_spec_from_json(j));
    if (gen == "robust_svm") return make_robust_svm(svm_spec_from_json(j));
    throw ConfigError("unknown generator: " + gen);
  }
  if (!j.contains("f")) {
    throw ConfigError("instance document needs either a \"generator\" tag or the full "
                      "f/g/h/domain blocks");
  }
  return instance_from_json(j);
}

SamplingLaw law_from_json(const json& j, int universe, WeightRule rule) {
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "nice") return SamplingLaw::nice(universe, j.at("tau").get<int>(), rule);
  if (kind == "partition") {
    if (j.contains("blocks")) {
      return SamplingLaw::partition_blocks(universe, j.at("blocks").get<std::vector<std::vector<int>>>(),
                                           rule);
    }
    return SamplingLaw::partition(universe, j.at("tau").get<int>(), rule);
  }
  if (kind == "custom") {
    return SamplingLaw::custom(universe, j.at("subsets").get<std::vector<std::vector<int>>>(),
                               j.at("probs").get<std::vector<double>>(), rule);
  }
  throw ConfigError("unknown sampling law kind: " + kind);
}

json reference_to_json(const ReferenceSolution& r) {
  json j;
  j["x_ref"] = vec_to_json(r.x_ref);
  j["F_ref"] = r.F_ref;
  j["feasibility_norm_ref"] = r.feasibility_norm_ref;
  j["method"] = r.method;
  j["iterations"] = r.iterations;
  j["instance_hash"] = r.instance_hash;
  return j;
}

ReferenceSolution reference_from_json(const json& j) {
  ReferenceSolution r;
  r.x_ref = vec_from_json(j.at("x_ref"));
  r.F_ref = j.at("F_ref").get<double>();
  r.feasibility_norm_ref = j.at("feasibility_norm_ref").get<double>();
  r.method = j.value("method", std::string());
  r.iterations = j.value("iterations", 0l);
  r.instance_hash = j.value("instance_hash", std::string());
  return r;
}

std::string instance_hash(const ProblemInstance& p) {
  const std::string dump = instance_to_json(p).dump();
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : dump) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  char buf[20];
  std::snprintf(buf, sizeof(buf), "%016" PRIx64, h);
  return buf;
}

std::string runlog_to_csv(const RunLog& log) {
  std::string out = "epoch,iteration,F_gap,feasibility_norm,dist_estimate,alpha_k,wall_time_ms\n";
  for (const auto& r : log.records) {
    out += std::to_string(r.epoch);
    out += ',';
    out += std::to_string(r.iteration);
    out += ',';
    out += fmt17(r.f_gap);
    out += ',';
    out += fmt17(r.feasibility_norm);
    out += ',';
    out += fmt17(r.dist_estimate);
    out += ',';
    out += fmt17(r.alpha);
    out += ',';
    out += fmt17(r.wall_time_ms);
    out += '\n';
  }
  return out;
}

json run_result_to_json(const RunResult& r) {
  json j;
  j["termination"] = to_string(r.reason);
  j["epochs"] = r.epochs;
  j["iterations"] = r.iterations;
  j["epoch_length"] = r.epoch_length;
  j["final_gap"] = r.final_gap;
  j["final_feasibility"] = r.final_feasibility;
  j["wall_time_ms"] = r.wall_time_ms;
  j["x_average"] = vec_to_json(r.x_average);
  j["x_last"] = vec_to_json(r.x_last);
  return j;
}

}  // namespace ssp
