#pragma once

#include <optional>
#include <vector>

#include "rqs/problem.hpp"
#include "rqs/types.hpp"

namespace rqs {

//! State restricted to span{|psi_f>, |psi_f_perp>}; exact for the
//! noise-free dynamics at any system size.
struct TwoLevelState {
  Complex alpha{0.0, 0.0};  // amplitude on the target
  Complex beta{0.0, 0.0};   // amplitude on the orthogonal uniform state

  double p_success() const { return std::norm(alpha); }
  double norm_sq() const { return std::norm(alpha) + std::norm(beta); }

  static TwoLevelState initial(double p0) {
    return {Complex(std::sqrt(p0), 0.0), Complex(std::sqrt(1.0 - p0), 0.0)};
  }
};

//! Effective field of the layer Hamiltonian in the two-level basis:
//! H = h0 I + h (hhat . sigma).
struct FieldVector {
  double h0 = 0.0;
  double hx = 0.0;
  double hy = 0.0;
  double hz = 0.0;

  double magnitude() const { return std::sqrt(hx * hx + hy * hy + hz * hz); }
};

FieldVector field_components(const LayerCoefficients& coeffs, double p0, const TwoLevelState& s);

//! One layer of the closed-form unitary
//! e^{-i h0} (cos(h) I - i sin(h) hhat . sigma); the h -> 0 limit is the
//! pure phase e^{-i h0}.
TwoLevelState evolve_two_level(const TwoLevelState& s, const FieldVector& f);

struct TwoLevelGreedyStep {
  LayerCoefficients coefficients;  // maximizing (A, B) with the given r
  TwoLevelState next;
  double p_success = 0.0;
};

//! Locally optimal (A, B): maximizes the next layer's success probability
//! on the deterministic two-stage grid.
TwoLevelGreedyStep greedy_step(const TwoLevelState& s, double p0, double r,
                               const GreedySettings& settings = {});

//! Success probabilities after each layer of an explicit coefficient
//! sequence, starting from the uniform initial state.
std::vector<double> two_level_success_trace(double p0,
                                            const std::vector<LayerCoefficients>& coeffs);

struct TwoLevelGreedyRun {
  std::vector<LayerCoefficients> coefficients;
  std::vector<double> p_success;
  TwoLevelState final_state;
};

TwoLevelGreedyRun two_level_greedy_run(double p0, double r, long layers,
                                       const GreedySettings& settings = {});

//! Result of a computation-time measurement, L(delta).
struct ComputationTime {
  std::optional<long> layers;  // empty: threshold not reached within the cap
  double best_p = 0.0;

  bool reached() const { return layers.has_value(); }
};

inline long default_layer_cap(Index dim) {
  return static_cast<long>(std::ceil(10.0 * std::sqrt(static_cast<double>(dim))));
}

//! Smallest number of greedy layers with P_success > 1 - delta; exact for
//! the noise-free dynamics at every size.
ComputationTime computation_time_two_level(const SearchInstance& inst, double r, double delta,
                                           long layer_cap, const GreedySettings& settings = {});
//! P0 passed directly, for sizes beyond the instance caps (e.g. N = 24).
ComputationTime computation_time_two_level(double p0, double r, double delta, long layer_cap,
                                           const GreedySettings& settings = {});

}  // namespace rqs
