#include "ssp/bench.hpp"

#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include "ssp/stepsize.hpp"

namespace ssp {

namespace fs = std::filesystem;

namespace {

std::string location(const std::string& text, std::size_t byte) {
  std::size_t line = 1, col = 1;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return std::to_string(line) + ":" + std::to_string(col);
}

json instance_block(const json& doc) {
  if (!doc.contains("instance")) throw ConfigError("instance: missing");
  const json& inst = doc.at("instance");
  if (inst.is_string()) return parse_json_file(inst.get<std::string>());
  return inst;
}

struct ConstantsSpec {
  std::string mode = "explicit";
  ProblemConstants explicit_values;
  bool assert_B_zero = false;
};

ConstantsSpec constants_spec(const json& doc) {
  ConstantsSpec spec;
  if (!doc.contains("constants")) return spec;
  const json& c = doc.at("constants");
  spec.mode = c.value("mode", std::string("explicit"));
  if (spec.mode == "explicit") spec.explicit_values = constants_from_json(c);
  if (c.contains("c_bar")) spec.explicit_values.c_bar = c.at("c_bar").get<double>();
  if (c.contains("q")) spec.explicit_values.q = c.at("q").get<double>();
  spec.assert_B_zero = c.value("assert_B_zero", false);
  return spec;
}

ProblemConstants resolve_constants(ProblemInstance& p, const ConstantsSpec& spec,
                                   const std::optional<ReferenceSolution>& ref) {
  ProblemConstants base;
  if (spec.mode == "explicit") {
    base = spec.explicit_values;
    if (base.B_j.empty()) base.B_j = p.constants().B_j;
    if (base.B_j.empty()) {
      base.B_j.resize(p.num_constraints());
      for (int j = 0; j < p.num_constraints(); ++j) {
        base.B_j[j] = constraint_subgrad_bound(p.h_components()[j]);
      }
    }
  } else if (spec.mode == "nonsmooth" || spec.mode == "smooth") {
    p.constants().c_bar = spec.explicit_values.c_bar;
    p.constants().q = spec.explicit_values.q;
    Vector x_ref = Vector::Zero(p.dim());
    if (spec.mode == "smooth") {
      if (!ref) {
        throw ConfigError("constants.mode = smooth needs a reference solution (set reference: \"auto\")");
      }
      x_ref = ref->x_ref;
    }
    base = estimate_constants(p, x_ref,
                              spec.mode == "smooth" ? ConstantsMode::smooth
                                                    : ConstantsMode::nonsmooth);
  } else {
    throw ConfigError("constants.mode: unknown mode '" + spec.mode + "'");
  }
  base.validate();
  return base;
}

}  // namespace

json parse_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  const std::string text = ss.str();
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(path + ":" + location(text, e.byte) + ": " + e.what());
  }
}

void write_text_file(const std::string& path, const std::string& content) {
  const fs::path p(path);
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write " + path);
  out << content;
}

LoadedRun load_run_config(const json& doc, const CliOverrides& ov) {
  LoadedRun lr;
  lr.problem = std::make_shared<ProblemInstance>(problem_from_json(instance_block(doc)));
  ProblemInstance& p = *lr.problem;

  lr.out_dir = doc.value("out_dir", std::string("."));
  if (ov.out_dir) lr.out_dir = *ov.out_dir;

  RunConfig& cfg = lr.cfg;
  cfg.problem = lr.problem;
  cfg.seed = doc.value("seed", 0ull);
  if (ov.seed) cfg.seed = *ov.seed;
  cfg.max_epochs = doc.value("max_epochs", 1000l);
  if (ov.max_epochs) cfg.max_epochs = *ov.max_epochs;

  // beta may live at the top level or inside the schedule block
  cfg.beta = doc.value("beta", 1.0);
  if (doc.contains("schedule") && doc.at("schedule").contains("beta")) {
    cfg.beta = doc.at("schedule").at("beta").get<double>();
  }
  if (!(cfg.beta > 0.0 && cfg.beta < 2.0)) {
    throw ConfigError("beta: must lie in the open interval (0, 2), got " + std::to_string(cfg.beta));
  }

  if (!doc.contains("objective_law") || !doc.contains("constraint_law")) {
    throw ConfigError("objective_law / constraint_law: missing");
  }
  cfg.objective_law =
      law_from_json(doc.at("objective_law"), p.num_components(), WeightRule::inverse_probability);
  cfg.constraint_law = law_from_json(doc.at("constraint_law"),
                                     std::max(1, p.num_constraints()), WeightRule::indicator);

  if (doc.contains("x0")) {
    Vector x0(doc.at("x0").size());
    Eigen::Index i = 0;
    for (const auto& v : doc.at("x0")) x0[i++] = v.get<double>();
    cfg.x0 = std::move(x0);
  }

  // Reference solution (stands in for the external solver value F*).
  const json ref_block = doc.value("reference", json("auto"));
  if (ref_block.is_object() && ref_block.contains("F_ref")) {
    cfg.F_ref = ref_block.at("F_ref").get<double>();
  } else if (ref_block.is_string() && ref_block.get<std::string>() == "auto") {
    const double tol = doc.contains("stopping")
                           ? doc.at("stopping").value("gap_tol", 1e-2)
                           : 1e-2;
    lr.reference = load_or_solve_reference(p, tol, lr.out_dir + "/refcache");
    cfg.F_ref = lr.reference->F_ref;
  } else if (!(ref_block.is_string() && ref_block.get<std::string>() == "none")) {
    throw ConfigError("reference: expected \"auto\", \"none\" or {\"F_ref\": value}");
  }

  const ConstantsSpec cspec = constants_spec(doc);
  p.constants() = resolve_constants(p, cspec, lr.reference);

  const ScaledConstants sc =
      scaled_constants(cfg.objective_law, cfg.constraint_law, p.constants(), cfg.beta);

  if (!doc.contains("schedule")) throw ConfigError("schedule: missing");
  const json& js = doc.at("schedule");
  const std::string mode = js.value("mode", std::string("convex_decay"));
  if (mode == "convex_decay") {
    const double gamma = js.value("gamma", 0.5);
    double alpha0;
    if (js.contains("alpha0") && js.at("alpha0").is_string()) {
      if (js.at("alpha0").get<std::string>() != "auto") {
        throw ConfigError("schedule.alpha0: expected a number or \"auto\"");
      }
      double R0 = js.value("R0", 0.0);
      if (R0 <= 0.0) {
        if (!lr.reference) {
          throw ConfigError("schedule.alpha0 = auto needs reference: \"auto\" or an explicit R0");
        }
        const Vector x0 = cfg.x0 ? *cfg.x0 : p.project(Vector::Zero(p.dim()));
        R0 = (x0 - lr.reference->x_ref).norm();
        if (R0 <= 0.0) R0 = 1.0;
      }
      const double delta = js.value("delta", 0.01);
      alpha0 = optimal_alpha0(R0, std::sqrt(std::max(sc.B_sq, 1e-300)), sc.L, delta).alpha0;
    } else {
      if (!js.contains("alpha0")) throw ConfigError("schedule.alpha0: missing");
      alpha0 = js.at("alpha0").get<double>();
    }
    cfg.schedule = StepsizeSchedule::convex_decay(alpha0, gamma, sc.L, cspec.assert_B_zero);
    cfg.averaging = AveragingMode::convex;
  } else if (mode == "switching") {
    if (!(sc.L > 0.0)) throw ConfigError("schedule.mode = switching requires scaled L > 0");
    if (!(p.constants().mu > 0.0)) throw ConfigError("schedule.mode = switching requires mu > 0");
    cfg.schedule = StepsizeSchedule::switching(sc.L, p.constants().mu);
    cfg.averaging = AveragingMode::strongly_convex;
  } else {
    throw ConfigError("schedule.mode: unknown mode '" + mode + "'");
  }
  if (doc.contains("averaging")) {
    const std::string avg = doc.at("averaging").get<std::string>();
    if (avg == "convex") cfg.averaging = AveragingMode::convex;
    else if (avg == "strongly_convex") cfg.averaging = AveragingMode::strongly_convex;
    else throw ConfigError("averaging: unknown mode '" + avg + "'");
  }

  if (doc.contains("stopping")) {
    cfg.tol_feasibility = doc.at("stopping").value("feasibility_tol", 1e-2);
    cfg.tol_gap = doc.at("stopping").value("gap_tol", 1e-2);
  }
  if (doc.contains("logging")) {
    const json& lg = doc.at("logging");
    cfg.log_every = lg.value("every", 1);
    cfg.log_dist_estimate = lg.value("dist_estimate", true);
    cfg.timing = lg.value("timing", false);
    cfg.stop_on_last_iterate = lg.value("last_iterate_stop", false);
  }
  return lr;
}

ValidationReport validate_run_config(const json& doc) {
  ValidationReport rep;
  auto flag = [&](const std::string& s) { rep.flags.push_back(s); };
  auto info = [&](const std::string& s) { rep.info.push_back(s); };

  std::optional<ProblemInstance> p;
  try {
    p.emplace(problem_from_json(instance_block(doc)));
    info("instance: n=" + std::to_string(p->dim()) + " N=" + std::to_string(p->num_components()) +
         " m=" + std::to_string(p->num_constraints()));
  } catch (const std::exception& e) {
    flag(std::string("instance: ") + e.what());
    return rep;
  }

  double beta = doc.value("beta", 1.0);
  if (doc.contains("schedule") && doc.at("schedule").contains("beta")) {
    beta = doc.at("schedule").at("beta").get<double>();
  }
  if (!(beta > 0.0 && beta < 2.0)) {
    flag("beta = " + fmt17(beta) + " violates beta in (0, 2)");
  }

  std::optional<SamplingLaw> obj_law, con_law;
  try {
    obj_law = law_from_json(doc.at("objective_law"), p->num_components(),
                            WeightRule::inverse_probability);
  } catch (const std::exception& e) {
    flag(std::string("objective_law: ") + e.what());
  }
  try {
    con_law = law_from_json(doc.at("constraint_law"), std::max(1, p->num_constraints()),
                            WeightRule::indicator);
  } catch (const std::exception& e) {
    flag(std::string("constraint_law: ") + e.what());
  }

  std::optional<ScaledConstants> sc;
  if (obj_law && con_law && beta > 0.0 && beta < 2.0) {
    const ConstantsSpec cspec = constants_spec(doc);
    try {
      ProblemConstants base;
      if (cspec.mode == "smooth") {
        // validate is a dry run: approximate x_ref by the projected origin
        base = estimate_constants(*p, p->project(Vector::Zero(p->dim())), ConstantsMode::smooth);
        info("constants: smooth-mode estimate with x_ref ~ proj(0) (dry-run stand-in)");
      } else {
        base = resolve_constants(*p, cspec, std::nullopt);
      }
      sc = scaled_constants(*obj_law, *con_law, base, beta);
      info("scaled constants: B^2=" + fmt17(sc->B_sq) + " L=" + fmt17(sc->L) +
           " B_h=" + fmt17(sc->B_h) + " c=" + fmt17(sc->c) + " C=" + fmt17(sc->C_beta));
      const double N = p->num_components(), m = std::max(1, p->num_constraints());
      const long epoch_len = static_cast<long>(
          std::max(std::ceil(N / obj_law->mean_batch()), std::ceil(m / con_law->mean_batch())));
      info("epoch length: " + std::to_string(epoch_len) + " iterations");
    } catch (const std::exception& e) {
      flag(std::string("constants: ") + e.what());
    }
  }

  if (doc.contains("schedule") && sc) {
    const json& js = doc.at("schedule");
    const std::string mode = js.value("mode", std::string("convex_decay"));
    if (mode == "convex_decay") {
      const bool b_zero = constants_spec(doc).assert_B_zero;
      const double gamma = js.value("gamma", 0.5);
      if (!(gamma >= (b_zero ? 0.0 : 0.5) && gamma < 1.0)) {
        flag("schedule.gamma = " + fmt17(gamma) +
             (b_zero ? " outside [0, 1)" : " outside [1/2, 1) and B = 0 not asserted"));
      }
      const OpenInterval iv = admissible_alpha0_interval(sc->L);
      info("admissible alpha0 interval: (0, " + fmt17(iv.hi) + ")");
      if (js.contains("alpha0") && js.at("alpha0").is_number()) {
        const double a0 = js.at("alpha0").get<double>();
        if (!iv.contains(a0)) {
          flag("schedule.alpha0 = " + fmt17(a0) + " outside the admissible interval (0, " +
               fmt17(iv.hi) + ")");
        }
      }
    } else if (mode == "switching") {
      if (!(sc->L > 0.0)) flag("schedule.mode = switching requires scaled L > 0");
      const ConstantsSpec cspec = constants_spec(doc);
      const double mu = cspec.mode == "explicit" ? cspec.explicit_values.mu : p->constants().mu;
      if (!(mu > 0.0)) {
        flag("schedule.mode = switching requires mu > 0");
      } else if (sc->L > 0.0) {
        info("switching k0 = " + std::to_string(static_cast<long>(
                                     std::floor(8.0 * sc->L / mu - 1.0))));
      }
    } else {
      flag("schedule.mode: unknown mode '" + mode + "'");
    }
  } else if (!doc.contains("schedule")) {
    flag("schedule: missing");
  }
  return rep;
}

namespace {

void write_run_artifacts(const std::string& dir, const RunResult& res) {
  write_text_file(dir + "/runlog.csv", runlog_to_csv(res.log));
  write_text_file(dir + "/result.json", run_result_to_json(res).dump(2) + "\n");
  std::string plot = "epoch,F_gap,feasibility_norm\n";
  for (const auto& r : res.log.records) {
    plot += std::to_string(r.epoch) + "," + fmt17(r.f_gap) + "," + fmt17(r.feasibility_norm) + "\n";
  }
  write_text_file(dir + "/plot.csv", plot);
}

}  // namespace

int cmd_run(const std::string& config_path, const CliOverrides& ov, std::ostream& out) {
  LoadedRun lr;
  try {
    lr = load_run_config(parse_json_file(config_path), ov);
  } catch (const std::exception& e) {
    out << "error: " << e.what() << "\n";
    return 1;
  }
  const RunResult res = run(lr.cfg);
  write_run_artifacts(lr.out_dir, res);
  out << "termination: " << to_string(res.reason) << "\n"
      << "epochs: " << res.epochs << " (" << res.iterations << " iterations)\n"
      << "final gap: " << fmt17(res.final_gap) << "\n"
      << "final feasibility: " << fmt17(res.final_feasibility) << "\n"
      << "artifacts: " << lr.out_dir << "/runlog.csv, result.json, plot.csv\n";
  switch (res.reason) {
    case Termination::criteria_met:
      return 0;
    case Termination::budget_exhausted:
      return 2;
    case Termination::diverged:
      return 3;
  }
  return 2;
}

SweepResult run_sweep(const json& spec, const CliOverrides& ov) {
  SweepResult sr;
  auto problem = std::make_shared<ProblemInstance>(problem_from_json(instance_block(spec)));

  const std::string out_dir = ov.out_dir ? *ov.out_dir : spec.value("out_dir", std::string("."));
  const std::uint64_t base_seed = ov.seed ? *ov.seed : spec.value("base_seed", 0ull);
  const int replications = spec.value("replications", 1);
  if (replications < 1) throw ConfigError("replications must be >= 1");
  if (!spec.contains("pairs") || spec.at("pairs").empty()) throw ConfigError("pairs: missing");

  // Shared run-config skeleton; per-cell fields are patched in below.
  json run_doc = spec;
  run_doc.erase("pairs");
  run_doc.erase("replications");
  if (run_doc.contains("base_seed")) run_doc.erase("base_seed");
  run_doc["out_dir"] = out_dir;

  // Resolve the reference once, before workers start.
  const double gap_tol =
      spec.contains("stopping") ? spec.at("stopping").value("gap_tol", 1e-2) : 1e-2;
  const ReferenceSolution ref = load_or_solve_reference(*problem, gap_tol, out_dir + "/refcache");
  run_doc["reference"] = json{{"F_ref", ref.F_ref}};

  const std::string law_kind = spec.value("law_kind", std::string("nice"));

  struct CellSpec {
    int tau1, tau2, rep;
    double alpha0 = -1.0;
    std::uint64_t seed;
  };
  std::vector<CellSpec> cells;
  for (const auto& pr : spec.at("pairs")) {
    int t1, t2;
    double a0 = -1.0;
    if (pr.is_array()) {
      t1 = pr.at(0).get<int>();
      t2 = pr.at(1).get<int>();
      if (pr.size() > 2) a0 = pr.at(2).get<double>();
    } else {
      t1 = pr.at("tau1").get<int>();
      t2 = pr.at("tau2").get<int>();
      if (pr.contains("alpha0")) a0 = pr.at("alpha0").get<double>();
    }
    for (int r = 0; r < replications; ++r) {
      cells.push_back({t1, t2, r, a0, Rng::mix(base_seed, static_cast<std::uint64_t>(r))});
    }
  }

  sr.cells.resize(cells.size());
  std::atomic<std::size_t> next{0};
  const int threads = std::max(1, ov.threads);
  auto worker = [&]() {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= cells.size()) return;
      const CellSpec& cs = cells[i];
      SweepCell& cell = sr.cells[i];
      cell.tau1 = cs.tau1;
      cell.tau2 = cs.tau2;
      cell.replication = cs.rep;
      cell.seed = cs.seed;
      try {
        json doc = run_doc;
        doc["objective_law"] = {{"kind", law_kind}, {"tau", cs.tau1}};
        doc["constraint_law"] = {{"kind", law_kind}, {"tau", cs.tau2}};
        if (cs.alpha0 > 0.0) doc["schedule"]["alpha0"] = cs.alpha0;
        doc["seed"] = cs.seed;
        CliOverrides cell_ov;
        cell_ov.max_epochs = ov.max_epochs;
        LoadedRun lr = load_run_config(doc, cell_ov);
        cell.result = run(lr.cfg);
      } catch (const std::exception& e) {
        cell.failed = true;
        cell.failure = e.what();
      }
    }
  };
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }

  // Aggregate rows in pair order (deterministic merge by cell index).
  for (std::size_t i = 0; i < sr.cells.size(); i += replications) {
    SweepRow row;
    row.tau1 = sr.cells[i].tau1;
    row.tau2 = sr.cells[i].tau2;
    row.replications = replications;
    for (int r = 0; r < replications; ++r) {
      const SweepCell& c = sr.cells[i + r];
      if (c.failed) {
        ++row.failed;
        continue;
      }
      row.mean_epochs += static_cast<double>(c.result.epochs);
      row.mean_iterations += static_cast<double>(c.result.iterations);
      row.mean_wall_ms += c.result.wall_time_ms;
      if (c.result.reason == Termination::criteria_met) ++row.met;
      if (c.result.reason == Termination::diverged) ++row.diverged;
      sr.epoch_length_total += c.result.epochs * c.result.epoch_length;
    }
    const int ok = replications - row.failed;
    if (ok > 0) {
      row.mean_epochs /= ok;
      row.mean_iterations /= ok;
      row.mean_wall_ms /= ok;
    }
    sr.rows.push_back(row);
  }
  return sr;
}

int cmd_sweep(const std::string& spec_path, const CliOverrides& ov, std::ostream& out) {
  json spec;
  SweepResult sr;
  try {
    spec = parse_json_file(spec_path);
    sr = run_sweep(spec, ov);
  } catch (const std::exception& e) {
    out << "error: " << e.what() << "\n";
    return 1;
  }
  const std::string out_dir = ov.out_dir ? *ov.out_dir : spec.value("out_dir", std::string("."));

  std::string summary = "tau1,tau2,replications,met,diverged,failed,mean_epochs,mean_wall_ms\n";
  out << "tau1 x tau2 | mean epochs | mean wall ms | met\n";
  for (const auto& r : sr.rows) {
    summary += std::to_string(r.tau1) + "," + std::to_string(r.tau2) + "," +
               std::to_string(r.replications) + "," + std::to_string(r.met) + "," +
               std::to_string(r.diverged) + "," + std::to_string(r.failed) + "," +
               fmt17(r.mean_epochs) + "," + fmt17(r.mean_wall_ms) + "\n";
    out << "(" << r.tau1 << ", " << r.tau2 << ")  " << r.mean_epochs << "  " << r.mean_wall_ms
        << "  " << r.met << "/" << r.replications << (r.failed ? "  [failures]" : "") << "\n";
  }
  write_text_file(out_dir + "/sweep_summary.csv", summary);

  std::string curves = "tau1,tau2,replication,epoch,F_gap,feasibility_norm\n";
  for (const auto& c : sr.cells) {
    if (c.failed) continue;
    for (const auto& rec : c.result.log.records) {
      curves += std::to_string(c.tau1) + "," + std::to_string(c.tau2) + "," +
                std::to_string(c.replication) + "," + std::to_string(rec.epoch) + "," +
                fmt17(rec.f_gap) + "," + fmt17(rec.feasibility_norm) + "\n";
    }
    write_text_file(out_dir + "/runlog_t" + std::to_string(c.tau1) + "x" +
                        std::to_string(c.tau2) + "_r" + std::to_string(c.replication) + ".csv",
                    runlog_to_csv(c.result.log));
  }
  write_text_file(out_dir + "/sweep_curves.csv", curves);
  out << "artifacts: " << out_dir << "/sweep_summary.csv, sweep_curves.csv, runlog_*.csv\n";
  return 0;
}

int cmd_validate(const std::string& config_path, std::ostream& out) {
  ValidationReport rep;
  try {
    rep = validate_run_config(parse_json_file(config_path));
  } catch (const std::exception& e) {
    out << "error: " << e.what() << "\n";
    return 1;
  }
  for (const auto& s : rep.info) out << "ok: " << s << "\n";
  for (const auto& s : rep.flags) out << "FLAG: " << s << "\n";
  out << (rep.ok() ? "valid\n" : "invalid\n");
  return 0;
}

int cmd_make_instance(const std::string& spec_path, const CliOverrides& ov, std::ostream& out) {
  try {
    json spec = parse_json_file(spec_path);
    // accept a full run config too, unwrapping its instance block
    if (spec.contains("instance")) spec = instance_block(spec);
    const ProblemInstance p = problem_from_json(spec);
    const std::string dir = ov.out_dir ? *ov.out_dir : ".";
    const std::string path = dir + "/instance.json";
    write_text_file(path, instance_to_json(p).dump(2) + "\n");
    out << "wrote " << path << " (n=" << p.dim() << ", N=" << p.num_components()
        << ", m=" << p.num_constraints() << ", hash=" << instance_hash(p) << ")\n";
    return 0;
  } catch (const std::exception& e) {
    out << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace ssp
