#pragma once

// Experiment drivers behind the command-line tool: flow runs with their
// verdicts, parameter sweeps, the pointwise identity suite and the semi-flat
// Legendre/duality check. Each driver computes first and writes artifacts
// separately so results can be inspected without touching the filesystem.

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "dal/config.hpp"
#include "dal/functionals.hpp"

namespace dal {

using Json = nlohmann::ordered_json;

struct RunOutcome {
  RunConfig config;
  Reduction reduction;
  MonitorSeries series;
  IntegrationResult result;
  std::vector<MonotoneVerdict> monotone;  // one per alpha, theorem of the flow
  BoundVerdict bound;
  std::vector<std::string> flag_names;
  std::vector<std::vector<int>> flags;  // flags[f][row]
  Json summary;
  int exit_code = 0;  // 1 if any verdict failed
};

RunOutcome execute_run(const RunConfig& cfg);
/// trajectory.csv and summary.json in `dir` (created if needed).
void write_run_artifacts(const RunOutcome& run, const std::filesystem::path& dir);

struct SweepOutcome {
  std::vector<std::string> values;
  std::vector<Json> summaries;
  std::vector<int> exit_codes;
  int exit_code = 0;  // worst run
};
/// Runs every value in its own directory out/run_<k>; at most `threads`
/// runs execute concurrently. Writes sweep_index.csv (and convergence.csv for
/// grid sweeps).
SweepOutcome run_sweep(const SweepConfig& cfg, const std::filesystem::path& out, unsigned threads);

struct AlgebraRow {
  std::string identity;
  int n = 0;
  int seeds = 0;
  int worst_seed = 0;
  double max_residual = 0.0;
  bool verified = true;  // false for logged-only lines
  bool pass = true;
};
struct AlgebraOutcome {
  std::vector<AlgebraRow> rows;
  double tolerance = 1e-10;
  std::optional<std::string> first_failure;  // "identity (n = k)"
  bool ok() const { return !first_failure.has_value(); }
};
/// Star formulas, the Lambda ladder, the flow rewrite and velocity formula for
/// every n; the quadratic torsion identity at n = 3; the C ladder for n >= 4.
AlgebraOutcome run_algebra_suite(const AlgebraConfig& cfg, const std::string& inject_sign_flip = "");
void write_algebra_report(const AlgebraOutcome& out, const std::filesystem::path& dir);

struct LegendreOutcome {
  std::vector<DualitySweep> sweeps;
  std::vector<int> involution_grids;
  std::vector<double> involution, inverse_hessian;
  double exponent_lo = 1.7, exponent_hi = 2.3;
  bool ok = true;
};
LegendreOutcome run_legendre_check(const LegendreConfig& cfg);
void write_legendre_report(const LegendreOutcome& out, const std::filesystem::path& dir);

/// Refuses a non-empty existing directory unless `overwrite`; creates it otherwise.
/// Throws ConfigError on refusal.
void prepare_out_dir(const std::filesystem::path& dir, bool overwrite);

/// Sweep parallelism: hardware threads, capped by DUAL_ANOMALY_LAB_THREADS.
unsigned sweep_threads();

}  // namespace dal
