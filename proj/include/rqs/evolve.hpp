#pragma once

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "rqs/density.hpp"
#include "rqs/gridopt.hpp"
#include "rqs/noise.hpp"
#include "rqs/problem.hpp"
#include "rqs/twolevel.hpp"
#include "rqs/types.hpp"

namespace rqs {

//! Pure state vector on the coherent path, density matrix on the
//! incoherent path.
using QuantumStateRep = std::variant<ComplexVector, DensityRep>;

bool is_pure(const QuantumStateRep& state);
double success_probability(const QuantumStateRep& state, const SearchInstance& inst);

struct EngineSettings {
  double krylov_tol = 1e-10;       // layer application accuracy
  double greedy_eval_tol = 1e-13;  // candidate objective accuracy
  int krylov_max_dim = 64;
  double truncation_budget = 1e-8;  // factored density, per layer
  Index mixed_dense_cap = 512;      // dense density path up to this dim
  //! The weight-one Pauli channel populates the full spectrum within a few
  //! layers, so its runs stay dense up to this larger cap (N <= 12); the
  //! factored path above mixed_dense_cap is reserved for the shift channel,
  //! whose rank at most doubles per layer.
  Index pauli_channel_dense_cap = 4096;
  GreedySettings greedy;
  int threads = 1;  // parallel greedy candidate evaluation
};

//! Per-run noise realization: holds the channel weights drawn once per
//! realization and produces the per-layer coherent term, with
//! eps_l = strength / planned_layers.
class NoiseRealization {
 public:
  NoiseRealization(const NoiseSpec& spec, const SearchInstance& inst, std::uint64_t run_seed,
                   long planned_layers);

  const NoiseSpec& spec() const { return spec_; }
  double eps_layer() const { return eps_layer_; }
  bool enabled() const { return spec_.enabled(); }
  bool incoherent() const { return is_incoherent(spec_.mechanism); }
  //! False only for enabled random-qubit mechanisms, whose greedy
  //! objective would be ill-defined.
  bool deterministic() const { return !enabled() || !is_random(spec_.mechanism); }

  ExtraTerm coherent_term(long layer) const;
  DensityRep apply_channel(const DensityRep& rho) const;

 private:
  NoiseSpec spec_;
  std::uint64_t run_seed_ = 0;
  long planned_layers_ = 1;
  double eps_layer_ = 0.0;
  int sites_ = 0;  // qubit mechanisms
  PauliWeights weights_;
};

struct LayerRecord {
  long layer = 0;
  double a = 0.0;
  double b = 0.0;
  double r = 0.0;
  double p_success = 0.0;
  //! Norm/trace drift before renormalization plus truncated mass.
  double diagnostic = 0.0;
};

struct RunTrace {
  std::string instance;
  std::string schedule;
  std::string noise;
  std::uint64_t seed = 0;
  std::vector<LayerRecord> layers;
  double final_p = 0.0;
  double total_truncation_loss = 0.0;
};

struct LayerOutcome {
  QuantumStateRep state;
  double drift = 0.0;            // |norm - 1| or |trace - 1| before fixing
  double truncation_loss = 0.0;  // discarded spectral mass (factored path)
};

//! One layer: H is assembled from the *current* state (the reinforcement
//! feedback), the unitary is applied, and on the incoherent path the
//! channel follows.
LayerOutcome evolve_layer(const QuantumStateRep& state, const SearchInstance& inst,
                          const LayerCoefficients& coeffs, const NoiseRealization& noise,
                          long layer, const EngineSettings& settings = {});

//! Locally optimal (A, B) for the next layer, evaluated in the noisy
//! dynamics (deterministic noise contexts only).
GridMaximum locally_optimal_coefficients(const QuantumStateRep& state, const SearchInstance& inst,
                                         double r, const NoiseRealization& noise, long layer,
                                         const EngineSettings& settings = {});

//! Initial rho_0 = |psi_i><psi_i| in the representation the mechanism
//! needs (dense density up to mixed_dense_cap, else factored).
QuantumStateRep initial_state_rep(const SearchInstance& inst, const NoiseSpec& noise,
                                  const EngineSettings& settings = {});

RunTrace run_grover_annealing(const SearchInstance& inst, long layers, double r,
                              const NoiseSpec& noise, std::uint64_t run_seed,
                              const EngineSettings& settings = {});
RunTrace run_greedy(const SearchInstance& inst, long layers, double r, const NoiseSpec& noise,
                    std::uint64_t run_seed, const EngineSettings& settings = {});
RunTrace run_explicit(const SearchInstance& inst, const std::vector<LayerCoefficients>& coeffs,
                      const NoiseSpec& noise, std::uint64_t run_seed,
                      const EngineSettings& settings = {});
RunTrace run_schedule(const SearchInstance& inst, const ScheduleSpec& schedule, double r,
                      const NoiseSpec& noise, std::uint64_t run_seed,
                      const EngineSettings& settings = {});

//! Smallest layer budget L such that the greedy run with eps_l = eps/L
//! reaches P_success > 1 - delta at some layer l <= L. Searches budgets by
//! doubling plus bisection (or a linear scan when linear_scan is set).
//! With noise disabled this reduces to computation_time_two_level.
ComputationTime computation_time(const SearchInstance& inst, double r, double delta,
                                 const NoiseSpec& noise, long layer_cap, std::uint64_t run_seed,
                                 const EngineSettings& settings = {}, bool linear_scan = false);

//! True when the greedy run with the given budget crosses the threshold.
//! Exposed so the budget-monotonicity assumption behind the bisection can
//! be probed directly.
bool budget_succeeds(const SearchInstance& inst, double r, double delta, const NoiseSpec& noise,
                     long budget, std::uint64_t run_seed, const EngineSettings& settings = {});

}  // namespace rqs
