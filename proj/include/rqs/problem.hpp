#pragma once

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "rqs/density.hpp"
#include "rqs/spectral.hpp"
#include "rqs/types.hpp"

namespace rqs {

enum class Encoding { qubit, qudit };

inline constexpr int kMaxDenseQubits = 14;  // full-space paths
inline constexpr int kMaxQubits = 40;       // two-level analytic path
inline constexpr Index kMaxQuditLevels = 8192;
inline constexpr Index kDenseStateCap = Index{1} << kMaxDenseQubits;

//! One search problem: find the target basis state of an N-qubit register
//! (dim = 2^N) or of a single D-level system. The initial amplitude on the
//! target, P0 = 1/dim, is kept as the exact rational 1/dim.
class SearchInstance {
 public:
  static SearchInstance qubits(int n, Index target_index = 0);
  static SearchInstance qudit(Index levels, Index target_index = 0);

  Encoding encoding() const { return encoding_; }
  int num_qubits() const;  // qubit encoding only
  Index dim() const { return dim_; }
  Index target_index() const { return target_; }

  //! Exact rational P0 = p0_numerator() / p0_denominator() = 1/dim.
  std::int64_t p0_numerator() const { return 1; }
  std::int64_t p0_denominator() const { return static_cast<std::int64_t>(dim_); }
  double p0() const { return 1.0 / static_cast<double>(dim_); }

  //! Uniform superposition over all basis states; equals
  //! sqrt(P0)|target> + sqrt(1-P0)|target_perp>. Materialization requires
  //! dim <= kDenseStateCap; beyond that only the two-level path applies.
  ComplexVector initial_state() const;
  ComplexVector target_state() const;
  //! Uniform superposition over the non-target basis states.
  ComplexVector orthogonal_uniform_state() const;

  bool dense_path_available() const { return dim_ <= kDenseStateCap; }

  std::string describe() const;  // "N8" or "D100"

 private:
  SearchInstance(Encoding enc, int n, Index dim, Index target);

  Encoding encoding_;
  int n_qubits_;  // -1 for qudit
  Index dim_;
  Index target_;
};

//! Per-layer Hamiltonian weights: H = A H_i + B H_f - r rho (+ noise).
struct LayerCoefficients {
  double a = 0.0;
  double b = 0.0;
  double r = 0.0;
};

//! Closed-form optimal annealing profile for the noise-free search.
class GroverSchedule {
 public:
  GroverSchedule(double p0, long layers);

  double p0() const { return p0_; }
  long layers() const { return layers_; }
  double phi() const { return phi_; }

  //! t_l in [0, 1], strictly increasing in l; endpoints are exact.
  double time(long l) const;
  //! A = 1 - t_l, B = t_l with the given reinforcement strength.
  LayerCoefficients coefficients(long l, double r) const;

 private:
  double p0_;
  long layers_;
  double phi_;
};

//! Settings of the two-stage grid maximizer used for locally optimal
//! coefficients. Stage one samples grid_points^2 candidates over the
//! domain; each refinement round shrinks the window 4x around the
//! incumbent and samples refine_points^2 more.
struct GreedySettings {
  int grid_points = 21;
  int refine_points = 9;
  int refine_rounds = 3;
  double refine_shrink = 4.0;
  //! Candidates within tie_eps of the maximum count as tied; the
  //! lexicographically smallest (A, B) among them wins.
  double tie_eps = 1e-12;
  //! Constrains candidates to A + B = 1 (annealing-style magnitudes).
  bool constrain_sum = false;
  //! Evaluates candidates without the layer's deterministic noise.
  bool noise_blind = false;
};

struct GroverScheduleSpec {
  long layers = 2;
};
struct GreedyScheduleSpec {
  long layers = 0;  // 0 means run until a caller-supplied stop condition
  GreedySettings settings;
};
struct ExplicitScheduleSpec {
  std::vector<LayerCoefficients> coefficients;
};

using ScheduleSpec = std::variant<GroverScheduleSpec, GreedyScheduleSpec, ExplicitScheduleSpec>;

std::string describe(const ScheduleSpec& spec);

//! H = A(I - |psi_i><psi_i|) + B(I - |psi_f><psi_f|) - r rho + V.
//! The reinforcement term comes in through the spectral terms of rho, so
//! the assembled operator stays structured (identity + rank-ones + V).
StructuredHamiltonian assemble_hamiltonian(const SearchInstance& inst,
                                           const LayerCoefficients& coeffs,
                                           const DensityRep& rho, const ExtraTerm& noise = {});
//! Pure-state form, rho = |psi><psi|.
StructuredHamiltonian assemble_hamiltonian(const SearchInstance& inst,
                                           const LayerCoefficients& coeffs,
                                           const ComplexVector& psi, const ExtraTerm& noise = {});
//! Reinforcement given directly as spectral terms (weight, vector).
StructuredHamiltonian assemble_hamiltonian(
    const SearchInstance& inst, const LayerCoefficients& coeffs,
    const std::vector<std::pair<double, ComplexVector>>& rho_terms, const ExtraTerm& noise = {});

//! P_success = <target| rho |target> (pure: |<target|psi>|^2).
double success_probability(const ComplexVector& psi, const SearchInstance& inst);
double success_probability(const DensityRep& rho, const SearchInstance& inst);

}  // namespace rqs
