#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "rqs/evolve.hpp"
#include "rqs/noise.hpp"
#include "rqs/problem.hpp"
#include "rqs/types.hpp"

namespace rqs {

enum class SweepMode {
  fixed_layers,      // success probability after L layers
  computation_time,  // L(delta) via greedy budget search
};

struct ExperimentConfig {
  std::vector<SearchInstance> instances;
  ScheduleSpec schedule = GroverScheduleSpec{};  // fixed_layers mode only
  std::vector<double> r_grid{0.0};
  std::vector<double> eps_grid{0.0};
  SweepMode mode = SweepMode::fixed_layers;
  double delta = 0.5;  // computation_time mode
  long layer_cap = 0;  // 0: ceil(10 sqrt(dim)) per instance
  NoiseMechanism mechanism = NoiseMechanism::none;
  WeightDistribution weight_distribution = WeightDistribution::normalized_uniform;
  int realizations = 20;
  std::uint64_t master_seed = 1;
  int threads = 0;  // 0: hardware concurrency
  EngineSettings engine;

  void validate() const;  // throws std::invalid_argument on bad configs
};

struct SummaryStatistics {
  double mean = 0.0;
  std::optional<double> standard_error;  // absent for n = 1
  int n = 0;
  double min = 0.0;
  double max = 0.0;
};

//! Exact mean, unbiased sample variance; rejects empty input.
SummaryStatistics aggregate(const std::vector<double>& samples);

enum class FitModel { linear, loglog };

struct ScalingFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
  FitModel model = FitModel::linear;
  std::string domain;
};

//! Ordinary least squares on (x, y) or (ln x, ln y). Needs >= 3 points and
//! non-degenerate x; the log-log model needs positive coordinates.
ScalingFit fit_scaling(const std::vector<std::pair<double, double>>& points, FitModel model);

struct ProbabilityRow {
  std::string point_key;  // instance descriptor, e.g. "N8" or "D100"
  double eps = 0.0;
  double r = 0.0;
  int realization = 0;
  std::uint64_t seed = 0;
  std::optional<double> p_success;  // absent for failed runs
  std::string error;                // failure diagnostic, empty on success
};

struct AggregateRow {
  std::string point_key;
  double eps = 0.0;
  double r = 0.0;
  SummaryStatistics stats;
};

struct ScalingRow {
  std::string point_key;
  Index dim = 0;
  double eps = 0.0;
  double r = 0.0;
  double delta = 0.0;
  std::optional<long> layers;
  double best_p = 0.0;
  std::string status;  // "ok", "not_reached" or "error:<what>"
};

struct SweepResult {
  std::vector<ProbabilityRow> rows;        // fixed_layers mode
  std::vector<AggregateRow> aggregates;    // fixed_layers mode
  std::vector<ScalingRow> scaling_rows;    // computation_time mode
  int failed_runs = 0;
};

//! Runs the cartesian sweep (instance x eps x r) x realizations. Per-run
//! seeds derive from (master seed, point index, realization index), so the
//! result is identical for any worker count; rows come back in canonical
//! order. Individual run failures are recorded without aborting the sweep.
SweepResult run_sweep(const ExperimentConfig& cfg);

}  // namespace rqs
