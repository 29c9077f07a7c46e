#include <doctest.h>

#include "rqs/noise.hpp"

#include "test_support.hpp"

using namespace rqs;

TEST_CASE("coherent qubit noise with zero strength is the zero operator") {
  const PauliSumTerm term = sample_qubit_coherent(5, 0, 0.0, 3);
  for (double c : term.coeff) CHECK(c == 0.0);
}

TEST_CASE("coherent qubit noise is Hermitian by construction") {
  const PauliSumTerm term = sample_qubit_coherent(5, 2, 0.3, 3);
  const ComplexMatrix m = term.materialize(8);
  CHECK(hermiticity_defect(m) < 1e-14);
}

TEST_CASE("coherent draws are fresh per layer and reproducible per seed") {
  const PauliSumTerm a0 = sample_qubit_coherent(42, 0, 0.2, 2);
  const PauliSumTerm a0_again = sample_qubit_coherent(42, 0, 0.2, 2);
  const PauliSumTerm a1 = sample_qubit_coherent(42, 1, 0.2, 2);
  const PauliSumTerm b0 = sample_qubit_coherent(43, 0, 0.2, 2);
  CHECK(a0.coeff == a0_again.coeff);  // bit-for-bit
  CHECK(a0.coeff != a1.coeff);
  CHECK(a0.coeff != b0.coeff);
}

TEST_CASE("coherent coefficient variance matches the requested strength") {
  const int sites = 3;
  const double eps_l = 0.7;
  const int draws = 100000;
  std::vector<double> sum(3 * sites, 0.0), sum_sq(3 * sites, 0.0);
  for (int d = 0; d < draws; ++d) {
    const PauliSumTerm term = sample_qubit_coherent(777, d, eps_l, sites);
    for (size_t i = 0; i < term.coeff.size(); ++i) {
      sum[i] += term.coeff[i];
      sum_sq[i] += term.coeff[i] * term.coeff[i];
    }
  }
  for (size_t i = 0; i < sum.size(); ++i) {
    const double mean = sum[i] / draws;
    const double variance = sum_sq[i] / draws - mean * mean;
    CHECK(std::abs(variance - eps_l * eps_l) < 0.03 * eps_l * eps_l);
  }
}

TEST_CASE("qudit coherent term is the symmetric shift") {
  SUBCASE("zero strength vanishes") {
    CHECK(qudit_coherent(0.0).materialize(5).norm() == 0.0);
  }
  SUBCASE("D = 2 doubles the off-diagonal since X = X^dag") {
    const ComplexMatrix m = qudit_coherent(0.3).materialize(2);
    CHECK(std::abs(m(1, 0) - Complex(0.6, 0.0)) < 1e-15);
    CHECK(std::abs(m(0, 1) - Complex(0.6, 0.0)) < 1e-15);
  }
  SUBCASE("matrix elements connect cyclic neighbours") {
    const ComplexMatrix m = qudit_coherent(0.25).materialize(6);
    for (Index d = 0; d < 6; ++d) {
      CHECK(std::abs(m((d + 1) % 6, d) - Complex(0.25, 0.0)) < 1e-15);
    }
    CHECK(std::abs(m(0, 5) - Complex(0.25, 0.0)) < 1e-15);
  }
}

TEST_CASE("qudit coherent spectrum is the circulant cosine band") {
  const Index levels = 12;
  const double eps_l = 0.4;
  const EigenDecomposition eig =
      hermitian_eigendecompose(qudit_coherent(eps_l).materialize(levels));
  RealVector expected(levels);
  for (Index k = 0; k < levels; ++k) {
    expected[k] = 2.0 * eps_l * std::cos(2.0 * M_PI * static_cast<double>(k) / levels);
  }
  std::sort(expected.data(), expected.data() + levels);
  CHECK((eig.eigenvalues - expected).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("normalize_weights turns equal draws into equal weights") {
  const std::vector<double> w = normalize_weights({0.37, 0.37, 0.37});
  for (double v : w) CHECK(v == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
  CHECK_THROWS_AS(normalize_weights({0.5, 0.0}), std::invalid_argument);
}

TEST_CASE("pauli weights sum to one for any seed") {
  for (std::uint64_t seed : {1ULL, 99ULL, 123456789ULL}) {
    for (WeightDistribution dist :
         {WeightDistribution::normalized_uniform, WeightDistribution::dirichlet}) {
      const PauliWeights w = sample_pauli_weights(seed, 4, dist);
      double sum = 0.0;
      for (double v : w.w) {
        CHECK(v > 0.0);
        sum += v;
      }
      CHECK(std::abs(sum - 1.0) < 1e-12);
    }
  }
}

TEST_CASE("pauli weight marginals match the normalized-uniform construction") {
  const int samples = 10000;
  std::vector<double> mean(6, 0.0);
  for (int s = 0; s < samples; ++s) {
    const PauliWeights w = sample_pauli_weights(1000 + s, 2);
    for (int i = 0; i < 6; ++i) mean[i] += w.w[i];
  }
  for (int i = 0; i < 6; ++i) {
    mean[i] /= samples;
    CHECK(std::abs(mean[i] - 1.0 / 6.0) < 0.05 / 6.0);
  }
}

TEST_CASE("pauli channel trivial and hand-checked cases") {
  SUBCASE("zero strength is the identity channel") {
    Xoshiro256 rng(107);
    const DensityRep rho = test::random_factored_density(4, 2, rng);
    const PauliWeights w = sample_pauli_weights(3, 2);
    const DensityRep out = apply_qubit_pauli_channel(rho, 0.0, w);
    CHECK((out.materialize() - rho.materialize()).norm() < 1e-14);
  }
  SUBCASE("pure x flip mixes the computational basis") {
    ComplexVector zero = ComplexVector::Zero(2);
    zero[0] = 1.0;
    PauliWeights w;
    w.sites = 1;
    w.w = {1.0, 0.0, 0.0};
    const DensityRep out = apply_qubit_pauli_channel(DensityRep::pure(zero), 0.5, w);
    CHECK(out.basis_overlap(0) == doctest::Approx(0.5));
    CHECK(out.basis_overlap(1) == doctest::Approx(0.5));
  }
  SUBCASE("strength outside [0,1] is rejected") {
    ComplexVector zero = ComplexVector::Zero(2);
    zero[0] = 1.0;
    const DensityRep rho = DensityRep::pure(zero);
    PauliWeights w;
    w.sites = 1;
    w.w = {1.0, 0.0, 0.0};
    CHECK_THROWS_AS((void)apply_qubit_pauli_channel(rho, -0.1, w), std::invalid_argument);
    CHECK_THROWS_AS((void)apply_qubit_pauli_channel(rho, 1.1, w), std::invalid_argument);
  }
}

TEST_CASE("pauli channel matches the dense Kraus oracle") {
  Xoshiro256 rng(109);
  const PauliWeights w = sample_pauli_weights(17, 3);
  for (int trial = 0; trial < 6; ++trial) {
    DensityRep rho = test::random_factored_density(8, 1 + trial % 3, rng);
    if (trial % 2 == 0) rho = DensityRep::from_dense(rho.materialize());
    const double eps = 0.1 + 0.8 * rng.uniform01();
    const DensityRep out = apply_qubit_pauli_channel(rho, eps, w);
    const ComplexMatrix expected = test::oracle_pauli_channel(rho.materialize(), eps, w);
    CHECK((out.materialize() - expected).norm() < 1e-10);
    CHECK(std::abs(out.trace() - 1.0) < 1e-10);
  }
}

TEST_CASE("shift channel trivial and hand-checked cases") {
  SUBCASE("full strength moves |0><0| to |1><1|") {
    ComplexVector zero = ComplexVector::Zero(5);
    zero[0] = 1.0;
    const DensityRep out = apply_qudit_shift_channel(DensityRep::pure(zero), 1.0);
    CHECK(out.basis_overlap(1) == doctest::Approx(1.0));
  }
  SUBCASE("rank at most doubles") {
    Xoshiro256 rng(113);
    const DensityRep rho = test::random_factored_density(16, 3, rng);
    const DensityRep out = apply_qudit_shift_channel(rho, 0.3);
    CHECK(out.rank() <= 6);
  }
  SUBCASE("strength outside [0,1] is rejected") {
    ComplexVector zero = ComplexVector::Zero(3);
    zero[0] = 1.0;
    CHECK_THROWS_AS((void)apply_qudit_shift_channel(DensityRep::pure(zero), 1.5),
                    std::invalid_argument);
  }
}

TEST_CASE("shift channel matches the dense oracle") {
  Xoshiro256 rng(127);
  for (int trial = 0; trial < 6; ++trial) {
    DensityRep rho = test::random_factored_density(32, 2, rng);
    if (trial % 2 == 0) rho = DensityRep::from_dense(rho.materialize());
    const double eps = rng.uniform01();
    const DensityRep out = apply_qudit_shift_channel(rho, eps);
    const ComplexMatrix expected = test::oracle_shift_channel(rho.materialize(), eps);
    CHECK((out.materialize() - expected).norm() < 1e-10);
    CHECK(std::abs(out.trace() - 1.0) < 1e-10);
  }
}

TEST_CASE("channels preserve positivity on random inputs") {
  Xoshiro256 rng(131);
  for (int trial = 0; trial < 30; ++trial) {
    const double eps = rng.uniform01();
    DensityRep out = [&] {
      if (trial % 2 == 0) {
        const DensityRep rho = test::random_factored_density(8, 1 + trial % 3, rng);
        return apply_qubit_pauli_channel(rho, eps, sample_pauli_weights(trial, 3));
      }
      const DensityRep rho = test::random_factored_density(11, 1 + trial % 3, rng);
      return apply_qudit_shift_channel(rho, eps);
    }();
    const EigenDecomposition eig = hermitian_eigendecompose(out.materialize());
    CHECK(eig.eigenvalues.minCoeff() > -1e-9);
  }
}

TEST_CASE("generalized Pauli operators satisfy their algebra") {
  const QuditPauliOps ops{5};
  const ComplexMatrix x = ops.x();
  const ComplexMatrix z = ops.z();
  CHECK((x * x.adjoint() - ComplexMatrix::Identity(5, 5)).norm() < 1e-14);
  ComplexMatrix x_pow = ComplexMatrix::Identity(5, 5);
  ComplexMatrix z_pow = ComplexMatrix::Identity(5, 5);
  for (int k = 0; k < 5; ++k) {
    x_pow = x * x_pow;
    z_pow = z * z_pow;
  }
  CHECK((x_pow - ComplexMatrix::Identity(5, 5)).norm() < 1e-13);
  CHECK((z_pow - ComplexMatrix::Identity(5, 5)).norm() < 1e-13);
  CHECK((ops.y() - x * z).norm() < 1e-14);
  // omega^D = 1
  CHECK(std::abs(std::pow(ops.omega(), 5) - Complex(1.0, 0.0)) < 1e-13);
  // shift application agrees with the dense matrix
  ComplexVector v(5);
  v << 1.0, 2.0, 3.0, 4.0, 5.0;
  ComplexVector shifted;
  QuditPauliOps::apply_shift(v, shifted);
  CHECK((shifted - x * v).norm() < 1e-14);
  ComplexVector back;
  QuditPauliOps::apply_shift_adj(shifted, back);
  CHECK((back - v).norm() < 1e-14);
}

TEST_CASE("noise mechanism names round-trip") {
  for (NoiseMechanism m :
       {NoiseMechanism::none, NoiseMechanism::qubit_coherent, NoiseMechanism::qudit_coherent,
        NoiseMechanism::qubit_channel, NoiseMechanism::qudit_channel}) {
    CHECK(noise_mechanism_from_string(to_string(m)) == m);
  }
  CHECK_THROWS_AS(noise_mechanism_from_string("bogus"), std::invalid_argument);
}
