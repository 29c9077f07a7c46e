#pragma once

#include <algorithm>
#include <stdexcept>
#include <vector>

#include "rqs/problem.hpp"

namespace rqs {

struct GridCandidate {
  double a = 0.0;
  double b = 0.0;
};

struct GridMaximum {
  double a = 0.0;
  double b = 0.0;
  double value = 0.0;
};

namespace detail {

inline std::vector<GridCandidate> grid_candidates(double center_a, double center_b, double width,
                                                  int points, bool constrain_sum) {
  std::vector<GridCandidate> out;
  const auto coord = [&](double center, int i) {
    const double lo = std::min(std::max(center - 0.5 * width, 0.0), 1.0 - width);
    return lo + width * static_cast<double>(i) / static_cast<double>(points - 1);
  };
  if (constrain_sum) {
    out.reserve(points);
    for (int i = 0; i < points; ++i) {
      const double t = coord(center_b, i);
      out.push_back({1.0 - t, t});
    }
    return out;
  }
  out.reserve(static_cast<size_t>(points) * points);
  for (int i = 0; i < points; ++i) {
    for (int j = 0; j < points; ++j) {
      out.push_back({coord(center_a, i), coord(center_b, j)});
    }
  }
  return out;
}

//! Largest value wins; candidates within tie_eps of it count as tied and the
//! lexicographically smallest (a, b) among them is selected. Independent of
//! the order in which values were computed.
inline GridMaximum select_maximum(const std::vector<GridCandidate>& candidates,
                                  const std::vector<double>& values, double tie_eps) {
  double vmax = values.front();
  for (double v : values) vmax = std::max(vmax, v);
  size_t pick = values.size();
  for (size_t i = 0; i < values.size(); ++i) {
    if (values[i] < vmax - tie_eps) continue;
    if (pick == values.size() || candidates[i].a < candidates[pick].a ||
        (candidates[i].a == candidates[pick].a && candidates[i].b < candidates[pick].b)) {
      pick = i;
    }
  }
  return {candidates[pick].a, candidates[pick].b, values[pick]};
}

}  // namespace detail

//! Two-stage deterministic maximizer over (A, B) in [0,1]^2: one uniform
//! pass, then refine_rounds passes on windows shrunk refine_shrink-fold
//! around the incumbent. The incumbent always stays in the candidate pool,
//! so the result never regresses between rounds.
//!
//! BatchEval: std::vector<double> operator()(const std::vector<GridCandidate>&).
//! Evaluations inside one batch may run in any order (or in parallel); the
//! selection rule makes the outcome schedule-independent.
template <typename BatchEval>
GridMaximum grid_maximize_batch(BatchEval&& evaluate, const GreedySettings& s) {
  if (s.grid_points < 3 || (s.refine_rounds > 0 && s.refine_points < 3)) {
    throw std::invalid_argument("grid maximizer needs at least 3 points per axis");
  }
  std::vector<GridCandidate> candidates =
      detail::grid_candidates(0.5, 0.5, 1.0, s.grid_points, s.constrain_sum);
  std::vector<double> values = evaluate(candidates);
  GridMaximum best = detail::select_maximum(candidates, values, s.tie_eps);

  double width = 1.0;
  for (int round = 0; round < s.refine_rounds; ++round) {
    width /= s.refine_shrink;
    candidates = detail::grid_candidates(best.a, best.b, width, s.refine_points, s.constrain_sum);
    candidates.push_back({best.a, best.b});
    values = evaluate(candidates);
    values.back() = best.value;  // incumbent keeps its already-computed value
    best = detail::select_maximum(candidates, values, s.tie_eps);
  }
  return best;
}

template <typename Objective>
GridMaximum grid_maximize(Objective&& objective, const GreedySettings& s) {
  return grid_maximize_batch(
      [&](const std::vector<GridCandidate>& candidates) {
        std::vector<double> values;
        values.reserve(candidates.size());
        for (const GridCandidate& c : candidates) values.push_back(objective(c.a, c.b));
        return values;
      },
      s);
}

}  // namespace rqs
