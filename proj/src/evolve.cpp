#include "rqs/evolve.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "rqs/parallel.hpp"

namespace rqs {

bool is_pure(const QuantumStateRep& state) {
  return std::holds_alternative<ComplexVector>(state);
}

double success_probability(const QuantumStateRep& state, const SearchInstance& inst) {
  if (const auto* psi = std::get_if<ComplexVector>(&state)) {
    return success_probability(*psi, inst);
  }
  return success_probability(std::get<DensityRep>(state), inst);
}

NoiseRealization::NoiseRealization(const NoiseSpec& spec, const SearchInstance& inst,
                                   std::uint64_t run_seed, long planned_layers)
    : spec_(spec), run_seed_(run_seed), planned_layers_(planned_layers) {
  if (planned_layers < 1) throw std::invalid_argument("a run needs at least one layer");
  if (spec.strength < 0.0) throw std::invalid_argument("noise strength must be non-negative");
  eps_layer_ = spec.strength / static_cast<double>(planned_layers);

  const bool qubit_mech = spec.mechanism == NoiseMechanism::qubit_coherent ||
                          spec.mechanism == NoiseMechanism::qubit_channel;
  const bool qudit_mech = spec.mechanism == NoiseMechanism::qudit_coherent ||
                          spec.mechanism == NoiseMechanism::qudit_channel;
  if (qubit_mech && inst.encoding() != Encoding::qubit) {
    throw std::invalid_argument("qubit noise mechanism on a non-qubit instance");
  }
  if (qudit_mech && inst.encoding() != Encoding::qudit) {
    throw std::invalid_argument("qudit noise mechanism on a non-qudit instance");
  }
  if (is_incoherent(spec.mechanism) && eps_layer_ > 1.0) {
    std::ostringstream msg;
    msg << "channel strength eps/L = " << eps_layer_ << " exceeds 1; increase the layer count";
    throw std::invalid_argument(msg.str());
  }
  if (qubit_mech) sites_ = inst.num_qubits();
  if (spec.mechanism == NoiseMechanism::qubit_channel && spec.enabled()) {
    weights_ = sample_pauli_weights(run_seed, sites_, spec.weight_distribution);
  }
}

ExtraTerm NoiseRealization::coherent_term(long layer) const {
  if (!enabled()) return std::monostate{};
  switch (spec_.mechanism) {
    case NoiseMechanism::qubit_coherent:
      return sample_qubit_coherent(run_seed_, layer, eps_layer_, sites_);
    case NoiseMechanism::qudit_coherent:
      return qudit_coherent(eps_layer_);
    default:
      return std::monostate{};
  }
}

DensityRep NoiseRealization::apply_channel(const DensityRep& rho) const {
  if (!enabled()) return rho;
  switch (spec_.mechanism) {
    case NoiseMechanism::qubit_channel:
      return apply_qubit_pauli_channel(rho, eps_layer_, weights_);
    case NoiseMechanism::qudit_channel:
      return apply_qudit_shift_channel(rho, eps_layer_);
    default:
      return rho;
  }
}

QuantumStateRep initial_state_rep(const SearchInstance& inst, const NoiseSpec& noise,
                                  const EngineSettings& settings) {
  if (!is_incoherent(noise.mechanism)) {
    return inst.initial_state();
  }
  Index dense_cap = settings.mixed_dense_cap;
  if (noise.mechanism == NoiseMechanism::qubit_channel) {
    dense_cap = std::max(dense_cap, settings.pauli_channel_dense_cap);
    if (inst.dim() > dense_cap) {
      std::ostringstream msg;
      msg << "Pauli-channel runs need a dense density matrix; dimension " << inst.dim()
          << " exceeds the cap " << dense_cap;
      throw std::invalid_argument(msg.str());
    }
  }
  if (inst.dim() <= dense_cap) {
    const ComplexVector psi = inst.initial_state();
    return DensityRep::from_dense(psi * psi.adjoint());
  }
  return DensityRep::pure(inst.initial_state());
}

namespace {

KrylovOptions layer_krylov(const EngineSettings& s) {
  return KrylovOptions{s.krylov_tol, s.krylov_max_dim};
}

LayerOutcome evolve_pure(const ComplexVector& psi, const SearchInstance& inst,
                         const LayerCoefficients& coeffs, const NoiseRealization& noise,
                         long layer, const EngineSettings& settings) {
  const StructuredHamiltonian h =
      assemble_hamiltonian(inst, coeffs, psi, noise.coherent_term(layer));
  ComplexVector next = krylov_exp_apply(h, psi, layer_krylov(settings));
  const double norm = next.norm();
  next /= norm;
  return {std::move(next), std::abs(norm - 1.0), 0.0};
}

LayerOutcome evolve_mixed_dense(const DensityRep& rho, const SearchInstance& inst,
                                const LayerCoefficients& coeffs, const NoiseRealization& noise,
                                long layer, const EngineSettings& /*unused*/) {
  const Index dim = inst.dim();
  const ComplexVector psi_i = inst.initial_state();
  const ComplexVector psi_f = inst.target_state();
  ComplexMatrix h = (coeffs.a + coeffs.b) * ComplexMatrix::Identity(dim, dim);
  h.noalias() -= coeffs.a * psi_i * psi_i.adjoint();
  h.noalias() -= coeffs.b * psi_f * psi_f.adjoint();
  if (coeffs.r != 0.0) h -= coeffs.r * rho.dense_matrix();
  const ExtraTerm extra = noise.coherent_term(layer);
  if (const auto* pauli = std::get_if<PauliSumTerm>(&extra)) {
    h += pauli->materialize(dim);
  } else if (const auto* circ = std::get_if<CirculantShiftTerm>(&extra)) {
    h += circ->materialize(dim);
  }
  const ComplexMatrix u = dense_unitary_exp(h, std::max<Index>(dim, 1024));
  DensityRep next = noise.apply_channel(conjugate_density(u, rho));
  const double drift = std::abs(next.trace() - 1.0);
  next.normalize_trace();
  return {std::move(next), drift, 0.0};
}

LayerOutcome evolve_mixed_factored(const DensityRep& rho, const SearchInstance& inst,
                                   const LayerCoefficients& coeffs, const NoiseRealization& noise,
                                   long layer, const EngineSettings& settings) {
  const StructuredHamiltonian h =
      assemble_hamiltonian(inst, coeffs, rho, noise.coherent_term(layer));
  const KrylovOptions opts = layer_krylov(settings);
  DensityRep rotated = conjugate_density(
      [&](const ComplexVector& v) { return krylov_exp_apply(h, v, opts); }, rho);
  DensityRep next = noise.apply_channel(rotated);
  double truncation_loss = 0.0;
  if (next.rank() > 1) {
    TruncationResult trunc = truncate_rank(next, settings.truncation_budget);
    truncation_loss = trunc.discarded;
    next = std::move(trunc.rep);
  }
  const double drift = std::abs(next.trace() - 1.0);
  next.normalize_trace();
  return {std::move(next), drift, truncation_loss};
}

}  // namespace

LayerOutcome evolve_layer(const QuantumStateRep& state, const SearchInstance& inst,
                          const LayerCoefficients& coeffs, const NoiseRealization& noise,
                          long layer, const EngineSettings& settings) {
  if (const auto* psi = std::get_if<ComplexVector>(&state)) {
    if (psi->size() != inst.dim()) throw std::invalid_argument("state dimension mismatch");
    return evolve_pure(*psi, inst, coeffs, noise, layer, settings);
  }
  const DensityRep& rho = std::get<DensityRep>(state);
  if (rho.dim() != inst.dim()) throw std::invalid_argument("state dimension mismatch");
  if (rho.is_dense()) return evolve_mixed_dense(rho, inst, coeffs, noise, layer, settings);
  return evolve_mixed_factored(rho, inst, coeffs, noise, layer, settings);
}

GridMaximum locally_optimal_coefficients(const QuantumStateRep& state, const SearchInstance& inst,
                                         double r, const NoiseRealization& noise, long layer,
                                         const EngineSettings& settings) {
  if (!noise.deterministic()) {
    throw std::invalid_argument(
        "locally optimal coefficients are undefined under random noise; "
        "use a deterministic mechanism or eps = 0");
  }
  const bool include_noise = noise.enabled() && !settings.greedy.noise_blind;
  const ExtraTerm extra = include_noise ? noise.coherent_term(layer) : ExtraTerm{};
  const KrylovOptions opts{settings.greedy_eval_tol, settings.krylov_max_dim};
  const Index target = inst.target_index();

  if (const auto* psi = std::get_if<ComplexVector>(&state)) {
    auto batch = [&](const std::vector<GridCandidate>& candidates) {
      std::vector<double> values(candidates.size());
      parallel_for(candidates.size(), settings.threads, [&](size_t i) {
        const StructuredHamiltonian h =
            assemble_hamiltonian(inst, {candidates[i].a, candidates[i].b, r}, *psi, extra);
        const ComplexVector next = krylov_exp_apply(h, *psi, opts);
        values[i] = std::norm(next[target]) / next.squaredNorm();
      });
      return values;
    };
    return grid_maximize_batch(batch, settings.greedy);
  }

  const DensityRep& rho = std::get<DensityRep>(state);
  // The rank-one expansion of rho is shared by every candidate; only the
  // scalar weights (A, B) change between them.
  const auto rho_terms = rho.rank_one_terms(1e-12);
  const bool with_channel = include_noise && noise.incoherent();
  ComplexVector probe_main = inst.target_state();
  ComplexVector probe_shift;
  if (with_channel) {
    if (noise.spec().mechanism != NoiseMechanism::qudit_channel) {
      throw std::logic_error("unexpected channel in greedy evaluation");
    }
    // <t| X U rho U^dag X^dag |t> probes rho through U^dag X^dag |t>.
    probe_shift = ComplexVector::Zero(inst.dim());
    probe_shift[(target + inst.dim() - 1) % inst.dim()] = 1.0;
  }
  const double eps_l = noise.eps_layer();

  auto batch = [&](const std::vector<GridCandidate>& candidates) {
    std::vector<double> values(candidates.size());
    parallel_for(candidates.size(), settings.threads, [&](size_t i) {
      const StructuredHamiltonian h =
          assemble_hamiltonian(inst, {candidates[i].a, candidates[i].b, r}, rho_terms, extra);
      const StructuredHamiltonian h_neg = h.negated();  // exp(+iH) probes
      const ComplexVector back_main = krylov_exp_apply(h_neg, probe_main, opts);
      double p = rho.expectation(back_main);
      if (with_channel) {
        const ComplexVector back_shift = krylov_exp_apply(h_neg, probe_shift, opts);
        p = (1.0 - eps_l) * p + eps_l * rho.expectation(back_shift);
      }
      values[i] = p;
    });
    return values;
  };
  return grid_maximize_batch(batch, settings.greedy);
}

namespace {

RunTrace run_with_coefficients(
    const SearchInstance& inst, long layers, const NoiseSpec& noise, std::uint64_t run_seed,
    const EngineSettings& settings, const std::string& schedule_desc,
    const std::function<LayerCoefficients(long, const QuantumStateRep&, const NoiseRealization&)>&
        coefficients_for) {
  if (layers < 1) throw std::invalid_argument("a run needs at least one layer");
  RunTrace trace;
  trace.instance = inst.describe();
  trace.schedule = schedule_desc;
  trace.noise = noise.describe();
  trace.seed = run_seed;
  trace.layers.reserve(layers);

  const NoiseRealization realization(noise, inst, run_seed, layers);
  QuantumStateRep state = initial_state_rep(inst, noise, settings);
  for (long l = 0; l < layers; ++l) {
    const LayerCoefficients coeffs = coefficients_for(l, state, realization);
    LayerOutcome outcome = evolve_layer(state, inst, coeffs, realization, l, settings);
    state = std::move(outcome.state);
    LayerRecord record;
    record.layer = l;
    record.a = coeffs.a;
    record.b = coeffs.b;
    record.r = coeffs.r;
    record.p_success = success_probability(state, inst);
    record.diagnostic = outcome.drift + outcome.truncation_loss;
    trace.total_truncation_loss += outcome.truncation_loss;
    trace.layers.push_back(record);
  }
  trace.final_p = trace.layers.back().p_success;
  return trace;
}

}  // namespace

RunTrace run_grover_annealing(const SearchInstance& inst, long layers, double r,
                              const NoiseSpec& noise, std::uint64_t run_seed,
                              const EngineSettings& settings) {
  if (layers < 2) throw std::invalid_argument("Grover annealing needs at least 2 layers");
  const GroverSchedule schedule(inst.p0(), layers);
  return run_with_coefficients(
      inst, layers, noise, run_seed, settings, describe(ScheduleSpec{GroverScheduleSpec{layers}}),
      [&](long l, const QuantumStateRep&, const NoiseRealization&) {
        return schedule.coefficients(l, r);
      });
}

RunTrace run_greedy(const SearchInstance& inst, long layers, double r, const NoiseSpec& noise,
                    std::uint64_t run_seed, const EngineSettings& settings) {
  return run_with_coefficients(
      inst, layers, noise, run_seed, settings,
      describe(ScheduleSpec{GreedyScheduleSpec{layers, settings.greedy}}),
      [&](long l, const QuantumStateRep& state, const NoiseRealization& realization) {
        const GridMaximum best =
            locally_optimal_coefficients(state, inst, r, realization, l, settings);
        return LayerCoefficients{best.a, best.b, r};
      });
}

RunTrace run_explicit(const SearchInstance& inst, const std::vector<LayerCoefficients>& coeffs,
                      const NoiseSpec& noise, std::uint64_t run_seed,
                      const EngineSettings& settings) {
  if (coeffs.empty()) throw std::invalid_argument("explicit schedule is empty");
  return run_with_coefficients(
      inst, static_cast<long>(coeffs.size()), noise, run_seed, settings,
      describe(ScheduleSpec{ExplicitScheduleSpec{coeffs}}),
      [&](long l, const QuantumStateRep&, const NoiseRealization&) { return coeffs[l]; });
}

RunTrace run_schedule(const SearchInstance& inst, const ScheduleSpec& schedule, double r,
                      const NoiseSpec& noise, std::uint64_t run_seed,
                      const EngineSettings& settings) {
  if (const auto* grover = std::get_if<GroverScheduleSpec>(&schedule)) {
    return run_grover_annealing(inst, grover->layers, r, noise, run_seed, settings);
  }
  if (const auto* greedy = std::get_if<GreedyScheduleSpec>(&schedule)) {
    EngineSettings adjusted = settings;
    adjusted.greedy = greedy->settings;
    return run_greedy(inst, greedy->layers, r, noise, run_seed, adjusted);
  }
  return run_explicit(inst, std::get<ExplicitScheduleSpec>(schedule).coefficients, noise, run_seed,
                      settings);
}

namespace {

//! Greedy run under budget semantics: eps_l = eps/budget, success when the
//! threshold is crossed at any layer l <= budget.
struct BudgetAttempt {
  bool success = false;
  double best_p = 0.0;
};

BudgetAttempt attempt_budget(const SearchInstance& inst, double r, double threshold,
                             const NoiseSpec& noise, long budget, std::uint64_t run_seed,
                             const EngineSettings& settings) {
  const NoiseRealization realization(noise, inst, run_seed, budget);
  QuantumStateRep state = initial_state_rep(inst, noise, settings);
  BudgetAttempt result;
  // P_success(0) is exactly P0; the materialized amplitudes round-trip
  // through a square root and must not decide the initial check.
  result.best_p = inst.p0();
  if (result.best_p > threshold) {
    result.success = true;
    return result;
  }
  for (long l = 0; l < budget; ++l) {
    const GridMaximum best = locally_optimal_coefficients(state, inst, r, realization, l, settings);
    LayerOutcome outcome =
        evolve_layer(state, inst, {best.a, best.b, r}, realization, l, settings);
    state = std::move(outcome.state);
    const double p = success_probability(state, inst);
    result.best_p = std::max(result.best_p, p);
    if (p > threshold) {
      result.success = true;
      return result;
    }
  }
  return result;
}

}  // namespace

bool budget_succeeds(const SearchInstance& inst, double r, double delta, const NoiseSpec& noise,
                     long budget, std::uint64_t run_seed, const EngineSettings& settings) {
  if (!(delta > 0.0 && delta < 1.0)) {
    throw std::invalid_argument("delta must lie strictly between 0 and 1");
  }
  return attempt_budget(inst, r, 1.0 - delta, noise, budget, run_seed, settings).success;
}

ComputationTime computation_time(const SearchInstance& inst, double r, double delta,
                                 const NoiseSpec& noise, long layer_cap, std::uint64_t run_seed,
                                 const EngineSettings& settings, bool linear_scan) {
  if (!(delta > 0.0 && delta < 1.0)) {
    throw std::invalid_argument("delta must lie strictly between 0 and 1");
  }
  if (layer_cap < 1) throw std::invalid_argument("layer cap must be at least 1");
  const double threshold = 1.0 - delta;
  if (inst.p0() > threshold) return {0, inst.p0()};

  // Without noise the budget does not enter the dynamics and the full-space
  // greedy run coincides with the exact two-level one.
  if (!noise.enabled()) {
    return computation_time_two_level(inst, r, delta, layer_cap, settings.greedy);
  }

  // Channels need eps_l = eps/L <= 1, so budgets below eps are invalid and
  // the search starts at the smallest admissible one.
  long min_budget = 1;
  if (is_incoherent(noise.mechanism)) {
    min_budget = std::max<long>(1, static_cast<long>(std::ceil(noise.strength)));
  }
  if (min_budget > layer_cap) {
    throw std::invalid_argument("layer cap is below the smallest admissible channel budget");
  }

  double best_p = 0.0;
  const auto attempt = [&](long budget) {
    const BudgetAttempt a = attempt_budget(inst, r, threshold, noise, budget, run_seed, settings);
    best_p = std::max(best_p, a.best_p);
    return a.success;
  };

  if (linear_scan) {
    for (long budget = min_budget; budget <= layer_cap; ++budget) {
      if (attempt(budget)) return {budget, best_p};
    }
    return {std::nullopt, best_p};
  }

  long known_fail = min_budget - 1;
  long first_success = -1;
  for (long budget = min_budget;; budget *= 2) {
    if (budget >= layer_cap) budget = layer_cap;
    if (attempt(budget)) {
      first_success = budget;
      break;
    }
    known_fail = budget;
    if (budget == layer_cap) break;
  }
  if (first_success < 0) return {std::nullopt, best_p};
  while (first_success - known_fail > 1) {
    const long mid = known_fail + (first_success - known_fail) / 2;
    if (attempt(mid)) {
      first_success = mid;
    } else {
      known_fail = mid;
    }
  }
  return {first_success, best_p};
}

}  // namespace rqs
