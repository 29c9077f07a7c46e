#pragma once

#include <functional>
#include <utility>
#include <vector>

#include "rqs/types.hpp"

namespace rqs {

//! Density matrix in one of two interchangeable forms: a dense dim x dim
//! matrix, or a factored spectral form sum_k p_k |phi_k><phi_k| with
//! orthonormal phi_k (stored as matrix columns, dominant weight first).
//! The factored form keeps large-D incoherent runs tractable; the dense
//! form doubles as the oracle in tests.
class DensityRep {
 public:
  DensityRep() = default;

  static DensityRep pure(ComplexVector psi);
  static DensityRep from_dense(ComplexMatrix rho);
  static DensityRep from_factors(RealVector weights, ComplexMatrix factors);

  bool is_dense() const { return dense_.size() > 0; }
  Index dim() const { return is_dense() ? dense_.rows() : factors_.rows(); }
  Index rank() const { return is_dense() ? dense_.rows() : factors_.cols(); }
  double trace() const;

  const ComplexMatrix& dense_matrix() const;
  const RealVector& weights() const;
  const ComplexMatrix& factors() const;

  ComplexMatrix materialize() const;

  //! <idx| rho |idx>
  double basis_overlap(Index idx) const;
  //! <psi| rho |psi>, real up to rounding
  double expectation(const ComplexVector& psi) const;

  //! Spectral rank-one terms (weight, vector); eigendecomposes dense input.
  //! Terms with weight <= drop_tol * trace are omitted.
  std::vector<std::pair<double, ComplexVector>> rank_one_terms(double drop_tol = 1e-14) const;

  //! Rescales so trace becomes exactly `target`. Returns the prior trace.
  double normalize_trace(double target = 1.0);

 private:
  ComplexMatrix dense_;    // dense form when non-empty
  RealVector weights_;     // factored form otherwise
  ComplexMatrix factors_;  // dim x rank, orthonormal columns
};

using VectorMap = std::function<ComplexVector(const ComplexVector&)>;

//! U rho U^dag with a dense unitary.
DensityRep conjugate_density(const ComplexMatrix& u, const DensityRep& rho);
//! U rho U^dag given only the action of U on vectors (e.g. a Krylov step).
DensityRep conjugate_density(const VectorMap& apply_u, const DensityRep& rho);

//! Compresses an unnormalized branch expansion sum_j q_j |chi_j><chi_j|
//! (chi_j arbitrary unit vectors, q_j >= 0) back to an orthonormal factored
//! form with the same trace. Eigenvalues <= drop_tol * trace are dropped.
DensityRep reorthonormalize_branches(const std::vector<std::pair<double, ComplexVector>>& branches,
                                     double drop_tol = 1e-14);

struct TruncationResult {
  DensityRep rep;
  double discarded = 0.0;  // eigenvalue mass removed before renormalization
};

//! Drops the smallest spectral weights, at most `budget` total mass, then
//! renormalizes the remainder to unit trace.
TruncationResult truncate_rank(const DensityRep& rho, double budget);

//! (1/2) || a - b ||_1 for Hermitian a, b.
double trace_distance(const ComplexMatrix& a, const ComplexMatrix& b);

}  // namespace rqs
