#include <doctest.h>

#include "rqs/evolve.hpp"

#include "rqs/io.hpp"
#include "test_support.hpp"

using namespace rqs;

namespace {

const NoiseSpec kNoNoise{};

//! Independent linear annealing reference: dense exponentials, no
//! reinforcement feedback branch at all.
std::vector<double> linear_annealing_oracle(const SearchInstance& inst,
                                            const std::vector<LayerCoefficients>& coeffs,
                                            const ExtraTerm& extra = {}) {
  ComplexVector psi = inst.initial_state();
  const ComplexVector psi_i = inst.initial_state();
  const ComplexVector psi_f = inst.target_state();
  std::vector<double> trace;
  for (const LayerCoefficients& c : coeffs) {
    ComplexMatrix h = (c.a + c.b) * ComplexMatrix::Identity(inst.dim(), inst.dim());
    h -= c.a * psi_i * psi_i.adjoint();
    h -= c.b * psi_f * psi_f.adjoint();
    if (const auto* circ = std::get_if<CirculantShiftTerm>(&extra)) {
      h += circ->materialize(inst.dim());
    }
    psi = test::oracle_unitary_exp(h) * psi;
    trace.push_back(std::norm(psi[inst.target_index()]));
  }
  return trace;
}

}  // namespace

TEST_CASE("a layer with all coefficients zero only adds a phase") {
  const SearchInstance inst = SearchInstance::qudit(6);
  const NoiseRealization none(kNoNoise, inst, 1, 1);
  const QuantumStateRep state = inst.initial_state();
  const LayerOutcome out = evolve_layer(state, inst, {0.0, 0.0, 0.0}, none, 0);
  CHECK(success_probability(out.state, inst) ==
        doctest::Approx(success_probability(state, inst)).epsilon(1e-12));
  const ComplexVector& before = std::get<ComplexVector>(state);
  const ComplexVector& after = std::get<ComplexVector>(out.state);
  // proportional up to a global phase
  const Complex ratio = after[0] / before[0];
  CHECK(std::abs(std::abs(ratio) - 1.0) < 1e-12);
  CHECK((after - ratio * before).norm() < 1e-10);
}

TEST_CASE("reinforced full-space run matches the two-level closed form") {
  const SearchInstance inst = SearchInstance::qubits(2);
  const long layers = 12;
  const double r = 1.0;
  const RunTrace full = run_grover_annealing(inst, layers, r, kNoNoise, 1);

  const GroverSchedule schedule(inst.p0(), layers);
  std::vector<LayerCoefficients> coeffs;
  for (long l = 0; l < layers; ++l) coeffs.push_back(schedule.coefficients(l, r));
  const std::vector<double> reference = two_level_success_trace(inst.p0(), coeffs);

  for (long l = 0; l < layers; ++l) {
    CHECK(full.layers[l].p_success == doctest::Approx(reference[l]).epsilon(1e-10));
  }
}

TEST_CASE("one shift-channel layer matches the dense matrix computation") {
  const SearchInstance inst = SearchInstance::qudit(8);
  NoiseSpec noise{NoiseMechanism::qudit_channel, 0.3};
  const NoiseRealization realization(noise, inst, 7, 1);  // eps_l = 0.3
  const ComplexVector psi = inst.initial_state();
  const QuantumStateRep state = DensityRep::from_dense(psi * psi.adjoint());
  const LayerCoefficients coeffs{0.7, 0.3, 1.2};
  const LayerOutcome out = evolve_layer(state, inst, coeffs, realization, 0);

  ComplexMatrix h = (coeffs.a + coeffs.b) * ComplexMatrix::Identity(8, 8);
  h -= coeffs.a * psi * psi.adjoint();
  ComplexVector target = inst.target_state();
  h -= coeffs.b * target * target.adjoint();
  h -= coeffs.r * psi * psi.adjoint();
  const ComplexMatrix u = test::oracle_unitary_exp(h);
  const ComplexMatrix expected =
      test::oracle_shift_channel(u * (psi * psi.adjoint()) * u.adjoint(), 0.3);
  CHECK((std::get<DensityRep>(out.state).materialize() - expected).norm() < 1e-10);
}

TEST_CASE("grover annealing matches the two-level oracle and its expected level") {
  const SearchInstance inst = SearchInstance::qubits(4);
  const long layers = 50;
  const RunTrace trace = run_grover_annealing(inst, layers, 0.0, kNoNoise, 9);

  const GroverSchedule schedule(inst.p0(), layers);
  std::vector<LayerCoefficients> coeffs;
  for (long l = 0; l < layers; ++l) coeffs.push_back(schedule.coefficients(l, 0.0));
  const std::vector<double> reference = two_level_success_trace(inst.p0(), coeffs);
  CHECK(std::abs(trace.final_p - reference.back()) < 1e-8);
  for (long l = 0; l < layers; ++l) {
    CHECK(std::abs(trace.layers[l].p_success - reference[l]) < 1e-8);
  }
}

TEST_CASE("noise-free N=8 annealing at L=50 lands on the frozen oracle value") {
  // Frozen from the closed-form two-level evolution; the full-space Krylov
  // path agrees to 1e-10. The schedule needs well over 50 layers at N = 8
  // before the final probability approaches 1 (0.99 needs about 100).
  const SearchInstance inst = SearchInstance::qubits(8);
  const RunTrace trace = run_grover_annealing(inst, 50, 0.0, kNoNoise, 1);
  CHECK(trace.final_p == doctest::Approx(0.85423128262842507).epsilon(1e-8));

  const GroverSchedule schedule(inst.p0(), 50);
  std::vector<LayerCoefficients> coeffs;
  for (long l = 0; l < 50; ++l) coeffs.push_back(schedule.coefficients(l, 0.0));
  CHECK(std::abs(trace.final_p - two_level_success_trace(inst.p0(), coeffs).back()) < 1e-8);
}

TEST_CASE("locally optimal coefficients reduce to the two-level greedy when noise-free") {
  for (const SearchInstance& inst : {SearchInstance::qubits(2), SearchInstance::qubits(4)}) {
    const long layers = 8;
    const double r = 1.3;
    const RunTrace full = run_greedy(inst, layers, r, kNoNoise, 5);
    const TwoLevelGreedyRun reference = two_level_greedy_run(inst.p0(), r, layers);
    for (long l = 0; l < layers; ++l) {
      CHECK(std::abs(full.layers[l].p_success - reference.p_success[l]) < 1e-8);
      CHECK(full.layers[l].a == doctest::Approx(reference.coefficients[l].a).epsilon(1e-9));
      CHECK(full.layers[l].b == doctest::Approx(reference.coefficients[l].b).epsilon(1e-9));
    }
  }
}

TEST_CASE("coarse greedy grid equals the maximum of its nine evaluations") {
  const SearchInstance inst = SearchInstance::qudit(6);
  EngineSettings settings;
  settings.greedy.grid_points = 3;
  settings.greedy.refine_rounds = 0;
  const NoiseRealization none(kNoNoise, inst, 1, 1);
  const QuantumStateRep state = inst.initial_state();
  const GridMaximum best = locally_optimal_coefficients(state, inst, 0.8, none, 0, settings);

  double expected = -1.0;
  const ComplexVector psi = inst.initial_state();
  for (double a : {0.0, 0.5, 1.0}) {
    for (double b : {0.0, 0.5, 1.0}) {
      const StructuredHamiltonian h = assemble_hamiltonian(inst, {a, b, 0.8}, psi);
      const ComplexVector next = test::oracle_unitary_exp(h.materialize()) * psi;
      expected = std::max(expected, std::norm(next[0]));
    }
  }
  CHECK(best.value == doctest::Approx(expected).epsilon(1e-10));
}

TEST_CASE("channel-aware greedy matches an exhaustive dense maximizer") {
  const SearchInstance inst = SearchInstance::qudit(16);
  Xoshiro256 rng(137);
  const DensityRep rho = test::random_factored_density(16, 2, rng);
  NoiseSpec noise{NoiseMechanism::qudit_channel, 0.1};
  const NoiseRealization realization(noise, inst, 3, 1);  // eps_l = 0.1
  const double r = 1.5;
  const GridMaximum best =
      locally_optimal_coefficients(QuantumStateRep(rho), inst, r, realization, 0, {});

  // exhaustive fine grid with dense evolution and the exact channel
  double exhaustive = -1.0;
  const ComplexMatrix rho_dense = rho.materialize();
  for (int i = 0; i <= 400; ++i) {
    for (int j = 0; j <= 400; ++j) {
      const double a = i / 400.0, b = j / 400.0;
      const StructuredHamiltonian h = assemble_hamiltonian(inst, {a, b, r}, rho.rank_one_terms());
      const ComplexMatrix u = test::oracle_unitary_exp(h.materialize());
      const ComplexMatrix after =
          test::oracle_shift_channel(u * rho_dense * u.adjoint(), 0.1);
      exhaustive = std::max(exhaustive, after(0, 0).real());
    }
  }
  CHECK(std::abs(best.value - exhaustive) < 1e-5);
}

TEST_CASE("computation time reduces to the two-level result without noise") {
  const SearchInstance inst = SearchInstance::qudit(64);
  for (NoiseMechanism mech : {NoiseMechanism::none, NoiseMechanism::qudit_coherent,
                              NoiseMechanism::qudit_channel}) {
    const NoiseSpec noise{mech, 0.0};
    const ComputationTime engine_ct = computation_time(inst, 1.0, 0.5, noise, 200, 1);
    const ComputationTime reference = computation_time_two_level(inst, 1.0, 0.5, 200);
    REQUIRE(engine_ct.reached());
    REQUIRE(reference.reached());
    CHECK(*engine_ct.layers == *reference.layers);
  }
}

TEST_CASE("computation time is zero when the threshold sits below the start") {
  const SearchInstance inst = SearchInstance::qudit(4);  // P0 = 0.25
  const ComputationTime ct = computation_time(inst, 0.0, 0.8, kNoNoise, 50, 1);
  REQUIRE(ct.reached());
  CHECK(*ct.layers == 0);
}

TEST_CASE("noisy computation time agrees between bisection and linear scan") {
  Xoshiro256 rng(139);
  for (int trial = 0; trial < 6; ++trial) {
    const SearchInstance inst = SearchInstance::qudit(10 + 6 * (trial % 3));
    const bool coherent = trial % 2 == 0;
    const NoiseSpec noise{
        coherent ? NoiseMechanism::qudit_coherent : NoiseMechanism::qudit_channel,
        0.5 + 2.0 * rng.uniform01()};
    const double r = 1.0 + rng.uniform01();
    const double delta = 0.3 + 0.3 * rng.uniform01();
    const ComputationTime fast = computation_time(inst, r, delta, noise, 120, 11);
    const ComputationTime slow = computation_time(inst, r, delta, noise, 120, 11, {}, true);
    REQUIRE(fast.reached() == slow.reached());
    if (fast.reached()) CHECK(*fast.layers == *slow.layers);
  }
}

TEST_CASE("budget success is monotone on random greedy configurations") {
  Xoshiro256 rng(149);
  int checked = 0;
  for (int trial = 0; trial < 20; ++trial) {
    const SearchInstance inst = SearchInstance::qudit(8 + 4 * (trial % 5));
    const bool coherent = trial % 2 == 0;
    const NoiseSpec noise{
        coherent ? NoiseMechanism::qudit_coherent : NoiseMechanism::qudit_channel,
        0.5 + 1.5 * rng.uniform01()};
    const double r = 0.8 + 1.4 * rng.uniform01();
    const double delta = 0.4 + 0.2 * rng.uniform01();
    const ComputationTime ct = computation_time(inst, r, delta, noise, 100, trial);
    if (!ct.reached()) continue;
    ++checked;
    CHECK(budget_succeeds(inst, r, delta, noise, *ct.layers, trial));
    CHECK(budget_succeeds(inst, r, delta, noise, *ct.layers + 1, trial));
    if (*ct.layers > 1 && static_cast<double>(*ct.layers - 1) >= noise.strength) {
      CHECK_FALSE(budget_succeeds(inst, r, delta, noise, *ct.layers - 1, trial));
    }
  }
  CHECK(checked >= 15);
}

TEST_CASE("global phase on the state leaves the trajectory invariant") {
  const SearchInstance inst = SearchInstance::qudit(12);
  const NoiseRealization none(kNoNoise, inst, 1, 4);
  QuantumStateRep plain = inst.initial_state();
  QuantumStateRep rotated =
      ComplexVector(std::exp(Complex(0.0, 1.234)) * inst.initial_state());
  for (long l = 0; l < 4; ++l) {
    const LayerCoefficients coeffs{0.6, 0.4, 1.1};
    plain = evolve_layer(plain, inst, coeffs, none, l).state;
    rotated = evolve_layer(rotated, inst, coeffs, none, l).state;
    CHECK(std::abs(success_probability(plain, inst) - success_probability(rotated, inst)) <
          1e-10);
  }
}

TEST_CASE("with r = 0 the pure path equals a feedback-free linear simulation") {
  const SearchInstance inst = SearchInstance::qudit(9);
  const long layers = 15;
  const GroverSchedule schedule(inst.p0(), layers);
  std::vector<LayerCoefficients> coeffs;
  for (long l = 0; l < layers; ++l) coeffs.push_back(schedule.coefficients(l, 0.0));

  SUBCASE("noise-free") {
    const RunTrace trace = run_explicit(inst, coeffs, kNoNoise, 1);
    const std::vector<double> oracle = linear_annealing_oracle(inst, coeffs);
    for (long l = 0; l < layers; ++l) {
      CHECK(std::abs(trace.layers[l].p_success - oracle[l]) < 1e-10);
    }
  }
  SUBCASE("with the deterministic coherent term") {
    const NoiseSpec noise{NoiseMechanism::qudit_coherent, 1.5};
    const RunTrace trace = run_explicit(inst, coeffs, noise, 1);
    const std::vector<double> oracle =
        linear_annealing_oracle(inst, coeffs, CirculantShiftTerm{1.5 / layers});
    for (long l = 0; l < layers; ++l) {
      CHECK(std::abs(trace.layers[l].p_success - oracle[l]) < 1e-10);
    }
  }
}

TEST_CASE("the mixed path with eps = 0 reproduces the pure trajectory") {
  const SearchInstance inst = SearchInstance::qudit(20);
  const long layers = 10;
  const double r = 1.2;
  const RunTrace pure = run_grover_annealing(inst, layers, r, kNoNoise, 1);
  const NoiseSpec idle_channel{NoiseMechanism::qudit_channel, 0.0};
  const RunTrace mixed = run_grover_annealing(inst, layers, r, idle_channel, 1);
  for (long l = 0; l < layers; ++l) {
    CHECK(std::abs(pure.layers[l].p_success - mixed.layers[l].p_success) < 1e-9);
  }
}

TEST_CASE("factored and dense mixed paths agree") {
  const SearchInstance inst = SearchInstance::qudit(24);
  const long layers = 8;
  const NoiseSpec noise{NoiseMechanism::qudit_channel, 1.2};
  const RunTrace dense = run_grover_annealing(inst, layers, 2.0, noise, 1);
  EngineSettings factored_settings;
  factored_settings.mixed_dense_cap = 4;  // force the factored representation
  const RunTrace factored = run_grover_annealing(inst, layers, 2.0, noise, 1, factored_settings);
  for (long l = 0; l < layers; ++l) {
    CHECK(std::abs(dense.layers[l].p_success - factored.layers[l].p_success) < 1e-7);
  }
}

TEST_CASE("identical configuration and seed reproduce the trace bit for bit") {
  const SearchInstance inst = SearchInstance::qubits(3);
  const NoiseSpec noise{NoiseMechanism::qubit_coherent, 2.0};
  const RunTrace a = run_grover_annealing(inst, 12, 1.0, noise, 42);
  const RunTrace b = run_grover_annealing(inst, 12, 1.0, noise, 42);
  REQUIRE(a.layers.size() == b.layers.size());
  for (size_t l = 0; l < a.layers.size(); ++l) {
    CHECK(a.layers[l].p_success == b.layers[l].p_success);  // exact equality
  }
  CHECK(trace_csv(a) == trace_csv(b));
  const RunTrace c = run_grover_annealing(inst, 12, 1.0, noise, 43);
  CHECK(trace_csv(a) != trace_csv(c));
}

TEST_CASE("greedy candidate parallelism does not change the selection") {
  const SearchInstance inst = SearchInstance::qudit(32);
  const NoiseSpec noise{NoiseMechanism::qudit_coherent, 2.0};
  const NoiseRealization realization(noise, inst, 5, 6);
  const QuantumStateRep state = inst.initial_state();
  EngineSettings serial;
  serial.threads = 1;
  EngineSettings parallel;
  parallel.threads = 4;
  const GridMaximum a = locally_optimal_coefficients(state, inst, 1.0, realization, 2, serial);
  const GridMaximum b = locally_optimal_coefficients(state, inst, 1.0, realization, 2, parallel);
  CHECK(a.a == b.a);
  CHECK(a.b == b.b);
  CHECK(a.value == b.value);
}

TEST_CASE("random qubit noise rejects the greedy objective") {
  const SearchInstance inst = SearchInstance::qubits(3);
  const NoiseSpec noise{NoiseMechanism::qubit_coherent, 1.0};
  const NoiseRealization realization(noise, inst, 1, 4);
  CHECK_THROWS_AS((void)locally_optimal_coefficients(QuantumStateRep(inst.initial_state()), inst,
                                                     1.0, realization, 0, {}),
                  std::invalid_argument);
}

TEST_CASE("configuration rejections") {
  const SearchInstance qud = SearchInstance::qudit(10);
  const SearchInstance qub = SearchInstance::qubits(3);
  SUBCASE("channel strength above one per layer") {
    const NoiseSpec noise{NoiseMechanism::qudit_channel, 20.0};
    CHECK_THROWS_AS((void)run_grover_annealing(qud, 10, 1.0, noise, 1), std::invalid_argument);
  }
  SUBCASE("mechanism and encoding must match") {
    const NoiseSpec qudit_noise{NoiseMechanism::qudit_coherent, 1.0};
    CHECK_THROWS_AS((void)run_grover_annealing(qub, 10, 1.0, qudit_noise, 1),
                    std::invalid_argument);
    const NoiseSpec qubit_noise{NoiseMechanism::qubit_coherent, 1.0};
    CHECK_THROWS_AS((void)run_grover_annealing(qud, 10, 1.0, qubit_noise, 1),
                    std::invalid_argument);
  }
  SUBCASE("krylov non-convergence propagates") {
    EngineSettings cramped;
    cramped.krylov_max_dim = 2;
    const NoiseSpec noise{NoiseMechanism::qubit_coherent, 40.0};
    CHECK_THROWS_AS((void)run_grover_annealing(qub, 2, 1.0, noise, 1, cramped),
                    ConvergenceError);
  }
}

TEST_CASE("mixed-path representation follows the channel structure") {
  // The shift channel stays low-rank, so large qudits go factored; the
  // weight-one Pauli channel fills the spectrum and must stay dense.
  const NoiseSpec shift{NoiseMechanism::qudit_channel, 1.0};
  const QuantumStateRep qudit_rep =
      initial_state_rep(SearchInstance::qudit(600), shift, {});
  CHECK_FALSE(std::get<DensityRep>(qudit_rep).is_dense());

  const NoiseSpec pauli{NoiseMechanism::qubit_channel, 1.0};
  const QuantumStateRep qubit_rep =
      initial_state_rep(SearchInstance::qubits(10), pauli, {});
  CHECK(std::get<DensityRep>(qubit_rep).is_dense());

  CHECK_THROWS_AS((void)initial_state_rep(SearchInstance::qubits(14), pauli, {}),
                  std::invalid_argument);
}

TEST_CASE("explicit schedules are covariant under target relabeling") {
  const SearchInstance inst0 = SearchInstance::qudit(12, 0);
  const SearchInstance inst5 = SearchInstance::qudit(12, 5);
  std::vector<LayerCoefficients> coeffs;
  const GroverSchedule schedule(inst0.p0(), 9);
  for (long l = 0; l < 9; ++l) coeffs.push_back(schedule.coefficients(l, 0.9));
  const RunTrace a = run_explicit(inst0, coeffs, kNoNoise, 1);
  const RunTrace b = run_explicit(inst5, coeffs, kNoNoise, 1);
  for (long l = 0; l < 9; ++l) {
    CHECK(a.layers[l].p_success == doctest::Approx(b.layers[l].p_success).epsilon(1e-11));
  }
}
