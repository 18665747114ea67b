#ifndef ANISO_CORE_HARNESS_HPP
#define ANISO_CORE_HARNESS_HPP

#include "core/bounds.hpp"
#include "core/synth.hpp"
#include "core/types.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace aniso::harness {

enum class Mode { rate, compare, subset };

std::string mode_name(Mode mode);

/// Validation-based tuning of the schedule constants: a grid x grid log-spaced
/// factor grid (total span `span`) around the schedule, scored by clipped MSE
/// on a held-out validation fraction.
struct TuneSpec {
  bool enabled = false;
  double validation_fraction = 0.2;
  int grid = 5;
  double span = 10.0;
};

/// Pass/fail thresholds carried into report.json.
struct Thresholds {
  double slope_min = -0.75;
  double slope_max = -0.40;
  double subset_margin = 0.05;
  double subset_slope_min = -0.85;
  double subset_slope_max = -0.45;
};

struct ExperimentConfig {
  Mode mode = Mode::rate;
  synth::TargetSpec target;
  std::vector<long> n_grid;
  int replicates = 1;
  double noise_sd = 0.0;
  synth::NoiseKind noise = synth::NoiseKind::truncated_gaussian;
  std::optional<double> clip_bound;  // default: target.default_clip_bound()
  double c1 = 1.0;
  std::vector<double> c2;            // empty: all ones
  TuneSpec tune;
  long mc_samples = 10000;
  std::uint64_t seed = 1;
  std::vector<int> subset;           // 0-based active subset (subset mode)
  int workers = 1;                   // 0: hardware concurrency
  Thresholds thresholds;
};

/// Strict JSON parsers; unknown keys are rejected with std::invalid_argument.
ExperimentConfig parse_experiment_config(const std::string& json_text);
synth::TargetSpec parse_target_spec(const std::string& json_text);

struct SlopeFit {
  double slope;
  double intercept;
  double r_squared;
  double slope_stderr;
};

/// Ordinary least squares of log(risk) against log(n). Requires at least two
/// distinct n and strictly positive risks.
SlopeFit fit_loglog_slope(const std::vector<std::pair<double, double>>& points);

/// One (arm, n, replicate) cell of a sweep.
struct CellRow {
  std::string arm;
  long n = 0;
  int replicate = 0;
  double lambda = 0.0;
  Vector gamma;
  double risk = 0.0;
  double risk_se = 0.0;
  std::uint64_t seed = 0;  // dataset seed; with lambda/gamma this re-runs the row
  bool tuned_edge = false;
  std::string error;       // nonempty: the cell failed and is excluded from aggregates
};

struct Report {
  std::string json_text;  // contents of report.json
  bool pass = false;
  std::vector<CellRow> rows;
};

/// Runs the configured experiment, writing results.csv, slope.csv and
/// report.json under out_dir (created if needed). Identical configs and seeds
/// produce byte-identical outputs regardless of the worker count. A failing
/// cell is recorded and skipped, not fatal.
Report run_experiment(const ExperimentConfig& cfg, const std::string& out_dir);

}  // namespace aniso::harness

#endif
