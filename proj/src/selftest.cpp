#include "rqs/selftest.hpp"

#include <cmath>
#include <sstream>

#include "rqs/density.hpp"
#include "rqs/harness.hpp"
#include "rqs/io.hpp"
#include "rqs/noise.hpp"
#include "rqs/rng.hpp"
#include "rqs/spectral.hpp"

namespace rqs {

namespace {

ComplexVector random_unit_vector(Index dim, Xoshiro256& rng) {
  ComplexVector v(dim);
  for (Index i = 0; i < dim; ++i) v[i] = Complex(rng.normal(), rng.normal());
  return v / v.norm();
}

ComplexMatrix random_hermitian(Index dim, double scale, Xoshiro256& rng) {
  ComplexMatrix a(dim, dim);
  for (Index i = 0; i < dim; ++i) {
    for (Index j = 0; j < dim; ++j) a(i, j) = Complex(rng.normal(), rng.normal());
  }
  return scale * 0.5 * (a + a.adjoint());
}

DensityRep random_factored_density(Index dim, Index rank, Xoshiro256& rng) {
  ComplexMatrix block(dim, rank);
  for (Index k = 0; k < rank; ++k) block.col(k) = random_unit_vector(dim, rng);
  const Eigen::HouseholderQR<ComplexMatrix> qr(block);
  ComplexMatrix q = qr.householderQ() * ComplexMatrix::Identity(dim, rank);
  RealVector weights(rank);
  double sum = 0.0;
  for (Index k = 0; k < rank; ++k) {
    weights[k] = 1.0 - rng.uniform01();
    sum += weights[k];
  }
  weights /= sum;
  return DensityRep::from_factors(std::move(weights), std::move(q));
}

//! Random operator with the shapes the dynamics produces: identity part,
//! a few rank-one projector terms, optional sparse noise term.
StructuredHamiltonian random_structured(Index dim, Xoshiro256& rng) {
  StructuredHamiltonian h(dim, 4.0 * rng.uniform01() - 2.0);
  const int terms = 1 + static_cast<int>(rng.uniform01() * 3.0);
  for (int k = 0; k < terms; ++k) {
    h.add_rank_one(4.0 * rng.uniform01() - 2.0, random_unit_vector(dim, rng));
  }
  const double which = rng.uniform01();
  const bool power_of_two = (dim & (dim - 1)) == 0;
  if (which < 0.4 && power_of_two && dim >= 2) {
    int sites = 0;
    while ((Index{1} << sites) < dim) ++sites;
    PauliSumTerm pauli;
    pauli.sites = sites;
    pauli.coeff.resize(3 * static_cast<size_t>(sites));
    for (double& c : pauli.coeff) c = rng.normal(0.0, 0.1);
    h.set_extra(std::move(pauli));
  } else if (which < 0.7) {
    h.set_extra(CirculantShiftTerm{0.5 * rng.uniform01()});
  }
  return h;
}

struct WorstCase {
  double worst = 0.0;
  void update(double value) { worst = std::max(worst, value); }
};

std::string detail_line(double worst, double bound, int trials) {
  std::ostringstream out;
  out << "worst " << worst << " vs bound " << bound << " over " << trials << " trials";
  return out.str();
}

CheckResult check_unitarity(const SelftestOptions& opts) {
  Xoshiro256 rng(mix64(opts.seed ^ 0x01));
  WorstCase wc;  // per-dimension unitarity defect
  const Index dims[] = {2, 3, 4, 8, 16, 24};
  for (int t = 0; t < opts.trials; ++t) {
    const Index dim = dims[t % 6];
    const ComplexMatrix u = dense_unitary_exp(random_hermitian(dim, 2.0, rng));
    const double defect = (u.adjoint() * u - ComplexMatrix::Identity(dim, dim)).norm();
    wc.update(defect / static_cast<double>(dim));
  }
  return {"unitarity", wc.worst < 1e-10, detail_line(wc.worst, 1e-10, opts.trials)};
}

CheckResult check_conjugation(const SelftestOptions& opts) {
  Xoshiro256 rng(mix64(opts.seed ^ 0x02));
  WorstCase trace_err, eig_err, positivity;
  for (int t = 0; t < opts.trials; ++t) {
    const Index dim = 4 + 4 * (t % 6);
    const ComplexMatrix u = dense_unitary_exp(random_hermitian(dim, 1.5, rng));
    DensityRep rho = random_factored_density(dim, 1 + (t % 4), rng);
    if (t % 2 == 0) rho = DensityRep::from_dense(rho.materialize());
    const DensityRep out = conjugate_density(u, rho);
    trace_err.update(std::abs(out.trace() - rho.trace()));
    const EigenDecomposition before = hermitian_eigendecompose(rho.materialize());
    const EigenDecomposition after = hermitian_eigendecompose(out.materialize());
    eig_err.update((before.eigenvalues - after.eigenvalues).cwiseAbs().maxCoeff());
    positivity.update(std::max(0.0, -after.eigenvalues.minCoeff()));
  }
  const bool ok = trace_err.worst < 1e-9 && eig_err.worst < 1e-8 && positivity.worst < 1e-9;
  return {"conjugation_trace_positivity", ok,
          detail_line(std::max({trace_err.worst, eig_err.worst, positivity.worst}), 1e-8,
                      opts.trials)};
}

CheckResult check_channel_trace(const SelftestOptions& opts) {
  Xoshiro256 rng(mix64(opts.seed ^ 0x03));
  WorstCase wc;
  for (int t = 0; t < opts.trials; ++t) {
    const double eps = rng.uniform01();
    if (t % 2 == 0) {
      const int sites = 1 + (t % 3);
      const Index dim = Index{1} << sites;
      DensityRep rho = random_factored_density(dim, 1 + (t % 2), rng);
      if (t % 4 == 0) rho = DensityRep::from_dense(rho.materialize());
      const PauliWeights w = sample_pauli_weights(opts.seed + t, sites);
      const DensityRep out = apply_qubit_pauli_channel(rho, eps, w);
      wc.update(std::abs(out.trace() - rho.trace()));
    } else {
      const Index dim = 3 + (t % 14);
      DensityRep rho = random_factored_density(dim, 1 + (t % 3), rng);
      if (t % 4 == 1) rho = DensityRep::from_dense(rho.materialize());
      const DensityRep out = apply_qudit_shift_channel(rho, eps);
      wc.update(std::abs(out.trace() - rho.trace()));
    }
  }
  return {"channel_trace_preservation", wc.worst < 1e-10, detail_line(wc.worst, 1e-10, opts.trials)};
}

CheckResult check_channel_positivity(const SelftestOptions& opts) {
  Xoshiro256 rng(mix64(opts.seed ^ 0x04));
  WorstCase wc;
  for (int t = 0; t < opts.trials; ++t) {
    const double eps = rng.uniform01();
    DensityRep out = [&] {
      if (t % 2 == 0) {
        const int sites = 1 + (t % 3);
        const Index dim = Index{1} << sites;
        const DensityRep rho = random_factored_density(dim, 1 + (t % 2), rng);
        return apply_qubit_pauli_channel(rho, eps, sample_pauli_weights(opts.seed + t, sites));
      }
      const Index dim = 3 + (t % 14);
      const DensityRep rho = random_factored_density(dim, 1 + (t % 3), rng);
      return apply_qudit_shift_channel(rho, eps);
    }();
    const EigenDecomposition eig = hermitian_eigendecompose(out.materialize());
    wc.update(std::max(0.0, -eig.eigenvalues.minCoeff()));
  }
  return {"channel_positivity", wc.worst < 1e-9, detail_line(wc.worst, 1e-9, opts.trials)};
}

CheckResult check_krylov_vs_dense(const SelftestOptions& opts) {
  Xoshiro256 rng(mix64(opts.seed ^ 0x05));
  const double tols[] = {1e-6, 1e-8, 1e-10};
  WorstCase wc;  // error / tol ratio
  const Index dims[] = {2, 4, 8, 16, 32, 64, 100, 128, 200, 256};
  for (int t = 0; t < opts.krylov_trials; ++t) {
    const Index dim = dims[t % 10];
    const StructuredHamiltonian h = random_structured(dim, rng);
    const ComplexVector v = random_unit_vector(dim, rng);
    const double tol = tols[t % 3];
    const ComplexVector fast = krylov_exp_apply(h, v, tol);
    const ComplexVector exact = dense_unitary_exp(h.materialize()) * v;
    wc.update((fast - exact).norm() / tol);
  }
  return {"krylov_vs_dense", wc.worst < 1.0,
          detail_line(wc.worst, 1.0, opts.krylov_trials) + " (error/tol)"};
}

CheckResult check_seed_determinism(const SelftestOptions& opts) {
  ExperimentConfig cfg;
  cfg.instances = {SearchInstance::qubits(2)};
  cfg.schedule = GroverScheduleSpec{4};
  cfg.r_grid = {0.0, 1.0};
  cfg.eps_grid = {0.5};
  cfg.mechanism = NoiseMechanism::qubit_coherent;
  cfg.realizations = 3;
  cfg.master_seed = opts.seed;
  cfg.threads = 1;
  const SweepResult first = run_sweep(cfg);
  cfg.threads = 2;  // worker count must not matter
  const SweepResult second = run_sweep(cfg);
  const bool ok = sweep_csv(first.rows) == sweep_csv(second.rows) &&
                  aggregate_csv(first.aggregates) == aggregate_csv(second.aggregates);
  return {"seed_determinism", ok, ok ? "byte-identical reruns" : "rerun output differs"};
}

}  // namespace

std::vector<CheckResult> run_invariant_suite(const SelftestOptions& opts) {
  std::vector<CheckResult> results;
  results.push_back(check_unitarity(opts));
  results.push_back(check_conjugation(opts));
  results.push_back(check_channel_trace(opts));
  results.push_back(check_channel_positivity(opts));
  results.push_back(check_krylov_vs_dense(opts));
  results.push_back(check_seed_determinism(opts));
  return results;
}

}  // namespace rqs
