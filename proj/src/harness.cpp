#include "rqs/harness.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "rqs/parallel.hpp"
#include "rqs/rng.hpp"

namespace rqs {

void ExperimentConfig::validate() const {
  if (instances.empty()) throw std::invalid_argument("no instances configured");
  if (r_grid.empty()) throw std::invalid_argument("empty r grid");
  if (eps_grid.empty()) throw std::invalid_argument("empty eps grid");
  if (realizations < 1) throw std::invalid_argument("need at least one realization");
  if (mode == SweepMode::fixed_layers) {
    if (const auto* grover = std::get_if<GroverScheduleSpec>(&schedule)) {
      if (grover->layers < 2) throw std::invalid_argument("Grover schedule needs >= 2 layers");
    } else if (const auto* greedy = std::get_if<GreedyScheduleSpec>(&schedule)) {
      if (greedy->layers < 1) throw std::invalid_argument("greedy schedule needs >= 1 layer");
    } else if (std::get<ExplicitScheduleSpec>(schedule).coefficients.empty()) {
      throw std::invalid_argument("explicit schedule is empty");
    }
  } else {
    if (!(delta > 0.0 && delta < 1.0)) {
      throw std::invalid_argument("delta must lie strictly between 0 and 1");
    }
    bool greedy_mode_needs_deterministic = is_random(mechanism);
    for (double eps : eps_grid) {
      if (greedy_mode_needs_deterministic && eps != 0.0) {
        throw std::invalid_argument(
            "computation-time sweeps need a deterministic noise context");
      }
    }
  }
  for (const SearchInstance& inst : instances) {
    const bool qubit_mech = mechanism == NoiseMechanism::qubit_coherent ||
                            mechanism == NoiseMechanism::qubit_channel;
    const bool qudit_mech = mechanism == NoiseMechanism::qudit_coherent ||
                            mechanism == NoiseMechanism::qudit_channel;
    if (qubit_mech && inst.encoding() != Encoding::qubit) {
      throw std::invalid_argument("qubit mechanism on non-qubit instance " + inst.describe());
    }
    if (qudit_mech && inst.encoding() != Encoding::qudit) {
      throw std::invalid_argument("qudit mechanism on non-qudit instance " + inst.describe());
    }
  }
}

SummaryStatistics aggregate(const std::vector<double>& samples) {
  if (samples.empty()) throw std::invalid_argument("cannot aggregate an empty sample set");
  SummaryStatistics stats;
  stats.n = static_cast<int>(samples.size());
  stats.min = samples.front();
  stats.max = samples.front();
  double sum = 0.0;
  for (double v : samples) {
    sum += v;
    stats.min = std::min(stats.min, v);
    stats.max = std::max(stats.max, v);
  }
  stats.mean = sum / static_cast<double>(stats.n);
  if (stats.n > 1) {
    double ss = 0.0;
    for (double v : samples) ss += (v - stats.mean) * (v - stats.mean);
    const double variance = ss / static_cast<double>(stats.n - 1);
    stats.standard_error = std::sqrt(variance / static_cast<double>(stats.n));
  }
  return stats;
}

ScalingFit fit_scaling(const std::vector<std::pair<double, double>>& points, FitModel model) {
  if (points.size() < 3) throw std::invalid_argument("scaling fit needs at least 3 points");
  std::vector<double> xs, ys;
  xs.reserve(points.size());
  ys.reserve(points.size());
  for (const auto& [x, y] : points) {
    if (model == FitModel::loglog) {
      if (!(x > 0.0 && y > 0.0)) {
        throw std::invalid_argument("log-log fit needs strictly positive coordinates");
      }
      xs.push_back(std::log(x));
      ys.push_back(std::log(y));
    } else {
      xs.push_back(x);
      ys.push_back(y);
    }
  }
  const double n = static_cast<double>(xs.size());
  const double mean_x = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
  const double mean_y = std::accumulate(ys.begin(), ys.end(), 0.0) / n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (size_t i = 0; i < xs.size(); ++i) {
    sxx += (xs[i] - mean_x) * (xs[i] - mean_x);
    sxy += (xs[i] - mean_x) * (ys[i] - mean_y);
    syy += (ys[i] - mean_y) * (ys[i] - mean_y);
  }
  if (sxx <= 0.0) throw std::invalid_argument("scaling fit needs non-degenerate x values");

  ScalingFit fit;
  fit.model = model;
  fit.slope = sxy / sxx;
  fit.intercept = mean_y - fit.slope * mean_x;
  double ss_res = 0.0;
  for (size_t i = 0; i < xs.size(); ++i) {
    const double resid = ys[i] - (fit.intercept + fit.slope * xs[i]);
    ss_res += resid * resid;
  }
  fit.r_squared = (syy > 0.0) ? std::max(0.0, 1.0 - ss_res / syy) : 1.0;
  {
    std::ostringstream domain;
    domain << (model == FitModel::loglog ? "loglog" : "linear") << ":x=["
           << points.front().first << "," << points.back().first << "],n=" << points.size();
    fit.domain = domain.str();
  }
  return fit;
}

namespace {

struct SweepPoint {
  size_t instance_index;
  double eps;
  double r;
  size_t point_index;  // canonical enumeration index
};

std::vector<SweepPoint> enumerate_points(const ExperimentConfig& cfg) {
  std::vector<SweepPoint> points;
  points.reserve(cfg.instances.size() * cfg.eps_grid.size() * cfg.r_grid.size());
  size_t index = 0;
  for (size_t i = 0; i < cfg.instances.size(); ++i) {
    for (double eps : cfg.eps_grid) {
      for (double r : cfg.r_grid) {
        points.push_back({i, eps, r, index++});
      }
    }
  }
  return points;
}

long resolved_layer_cap(const ExperimentConfig& cfg, const SearchInstance& inst) {
  return cfg.layer_cap > 0 ? cfg.layer_cap : default_layer_cap(inst.dim());
}

}  // namespace

SweepResult run_sweep(const ExperimentConfig& cfg) {
  cfg.validate();
  const std::vector<SweepPoint> points = enumerate_points(cfg);
  SweepResult result;

  EngineSettings engine = cfg.engine;
  // Realization-level parallelism already saturates the workers; greedy
  // candidate parallelism stays off inside sweep workers.
  engine.threads = 1;

  if (cfg.mode == SweepMode::fixed_layers) {
    const int realizations = cfg.realizations;
    result.rows.resize(points.size() * static_cast<size_t>(realizations));
    parallel_for(result.rows.size(), cfg.threads, [&](size_t slot) {
      const SweepPoint& point = points[slot / realizations];
      const int realization = static_cast<int>(slot % realizations);
      const SearchInstance& inst = cfg.instances[point.instance_index];
      ProbabilityRow row;
      row.point_key = inst.describe();
      row.eps = point.eps;
      row.r = point.r;
      row.realization = realization;
      row.seed = derive_run_seed(cfg.master_seed, point.point_index,
                                 static_cast<std::uint64_t>(realization));
      try {
        NoiseSpec noise{cfg.mechanism, point.eps, cfg.weight_distribution};
        const RunTrace trace =
            run_schedule(inst, cfg.schedule, point.r, noise, row.seed, engine);
        row.p_success = trace.final_p;
      } catch (const std::exception& e) {
        row.error = e.what();
      }
      result.rows[slot] = std::move(row);
    });

    for (const SweepPoint& point : points) {
      std::vector<double> samples;
      samples.reserve(realizations);
      for (int k = 0; k < realizations; ++k) {
        const ProbabilityRow& row = result.rows[point.point_index * realizations + k];
        if (row.p_success.has_value()) {
          samples.push_back(*row.p_success);
        } else {
          ++result.failed_runs;
        }
      }
      if (!samples.empty()) {
        AggregateRow agg;
        agg.point_key = cfg.instances[point.instance_index].describe();
        agg.eps = point.eps;
        agg.r = point.r;
        agg.stats = aggregate(samples);
        result.aggregates.push_back(std::move(agg));
      }
    }
    return result;
  }

  // computation_time mode: one greedy budget search per point.
  result.scaling_rows.resize(points.size());
  parallel_for(points.size(), cfg.threads, [&](size_t slot) {
    const SweepPoint& point = points[slot];
    const SearchInstance& inst = cfg.instances[point.instance_index];
    ScalingRow row;
    row.point_key = inst.describe();
    row.dim = inst.dim();
    row.eps = point.eps;
    row.r = point.r;
    row.delta = cfg.delta;
    const std::uint64_t seed = derive_run_seed(cfg.master_seed, point.point_index, 0);
    try {
      NoiseSpec noise{cfg.mechanism, point.eps, cfg.weight_distribution};
      const ComputationTime ct = computation_time(inst, point.r, cfg.delta, noise,
                                                  resolved_layer_cap(cfg, inst), seed, engine);
      row.layers = ct.layers;
      row.best_p = ct.best_p;
      row.status = ct.reached() ? "ok" : "not_reached";
    } catch (const std::exception& e) {
      row.status = std::string("error:") + e.what();
    }
    result.scaling_rows[slot] = std::move(row);
  });
  for (const ScalingRow& row : result.scaling_rows) {
    if (row.status.rfind("error:", 0) == 0) ++result.failed_runs;
  }
  return result;
}

}  // namespace rqs
