#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "ssp/reference.hpp"
#include "ssp/serialize.hpp"
#include "ssp/solver.hpp"

namespace ssp {

struct CliOverrides {
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out_dir;
  std::optional<long> max_epochs;
  int threads = 1;
};

struct LoadedRun {
  std::shared_ptr<ProblemInstance> problem;
  RunConfig cfg;
  std::string out_dir = ".";
  std::optional<ReferenceSolution> reference;
};

// Builds a runnable configuration from a run-config document. Throws
// ConfigError with a json-pointer-style location on semantic errors.
LoadedRun load_run_config(const json& doc, const CliOverrides& ov = {});

struct ValidationReport {
  std::vector<std::string> flags;  // violations; empty means valid
  std::vector<std::string> info;   // constants, epoch length, intervals
  bool ok() const { return flags.empty(); }
};

// Dry-run check of a run-config document; never solves.
ValidationReport validate_run_config(const json& doc);

struct SweepCell {
  int tau1 = 0, tau2 = 0;
  int replication = 0;
  std::uint64_t seed = 0;
  RunResult result;
  bool failed = false;         // exception inside the run
  std::string failure;
};

struct SweepRow {
  int tau1 = 0, tau2 = 0;
  double mean_epochs = 0.0;
  double mean_iterations = 0.0;
  double mean_wall_ms = 0.0;
  int met = 0;        // replications that reached the criteria
  int diverged = 0;
  int failed = 0;
  int replications = 0;
};

struct SweepResult {
  std::vector<SweepCell> cells;
  std::vector<SweepRow> rows;
  long epoch_length_total = 0;  // accounting: sum over runs of epochs * epoch_len
};

SweepResult run_sweep(const json& spec, const CliOverrides& ov = {});

// CLI entry points; return process exit codes.
// run: 0 criteria met, 1 invalid config, 2 budget exhausted, 3 diverged.
int cmd_run(const std::string& config_path, const CliOverrides& ov, std::ostream& out);
int cmd_sweep(const std::string& spec_path, const CliOverrides& ov, std::ostream& out);
int cmd_validate(const std::string& config_path, std::ostream& out);
int cmd_make_instance(const std::string& spec_path, const CliOverrides& ov, std::ostream& out);

// Helpers shared with tests.
json parse_json_file(const std::string& path);  // line-anchored parse errors
void write_text_file(const std::string& path, const std::string& content);

}  // namespace ssp
