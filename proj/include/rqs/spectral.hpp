#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "rqs/types.hpp"

namespace rqs {

//! Thrown when the Lanczos propagator cannot reach the requested accuracy
//! within the allowed subspace dimension.
class ConvergenceError : public std::runtime_error {
 public:
  ConvergenceError(const std::string& what, double residual)
      : std::runtime_error(what), residual_(residual) {}
  double residual() const { return residual_; }

 private:
  double residual_;
};

//! Relative Frobenius asymmetry ||M - M^dag|| / max(1, ||M||).
double hermiticity_defect(const ComplexMatrix& m);

//! Throws std::invalid_argument carrying the defect norm if m is not
//! Hermitian within tol.
void require_hermitian(const ComplexMatrix& m, double tol = default_tolerances().hermiticity);

struct EigenDecomposition {
  RealVector eigenvalues;    // ascending
  ComplexMatrix eigenvectors;  // orthonormal columns
};

EigenDecomposition hermitian_eigendecompose(const ComplexMatrix& m,
                                            double tol = default_tolerances().hermiticity);

//! U = exp(-iH) through the eigendecomposition; exactly unitary up to the
//! orthogonality error of the eigenvector basis.
ComplexMatrix dense_unitary_exp(const ComplexMatrix& hermitian,
                                Index dense_cap = default_tolerances().dense_exp_cap);

enum class PauliAxis : int { x = 0, y = 1, z = 2 };

//! w = sigma_site^axis v on an n-qubit register (dim = 2^n).
void apply_single_pauli(const ComplexVector& in, ComplexVector& out, int site, PauliAxis axis);
ComplexVector apply_single_pauli(const ComplexVector& in, int site, PauliAxis axis);

//! Weight-one Pauli sum  sum_{i,mu} c_{i,mu} sigma_i^mu  on n qubits.
//! Coefficients are real, so the operator is Hermitian by construction.
struct PauliSumTerm {
  int sites = 0;
  std::vector<double> coeff;  // 3*sites entries, index = 3*site + axis

  double& at(int site, PauliAxis axis) { return coeff[3 * site + static_cast<int>(axis)]; }
  double at(int site, PauliAxis axis) const { return coeff[3 * site + static_cast<int>(axis)]; }

  void apply_add(const ComplexVector& in, ComplexVector& out) const;
  ComplexMatrix materialize(Index dim) const;
  double norm_bound() const;  // sum |c|, crude spectral bound
};

//! c (X + X^dag) on a D-level system, X the cyclic shift |d+1><d|.
struct CirculantShiftTerm {
  double coeff = 0.0;

  void apply_add(const ComplexVector& in, ComplexVector& out) const;
  ComplexMatrix materialize(Index dim) const;
  double norm_bound() const { return 2.0 * std::abs(coeff); }
};

using ExtraTerm = std::variant<std::monostate, PauliSumTerm, CirculantShiftTerm>;

//! Hermitian operator of the shape that appears throughout the search
//! dynamics: c*I + sum_k w_k |phi_k><phi_k| + optional sparse noise term.
//! Matrix-vector products cost O(dim * rank) instead of O(dim^2).
class StructuredHamiltonian {
 public:
  StructuredHamiltonian() = default;
  explicit StructuredHamiltonian(Index dim, double identity_coeff = 0.0)
      : dim_(dim), identity_(identity_coeff) {}

  Index dim() const { return dim_; }
  double identity_coeff() const { return identity_; }
  void set_identity_coeff(double c) { identity_ = c; }

  //! Adds weight * |phi><phi|. phi need not be normalized, but the search
  //! dynamics only ever passes unit vectors.
  void add_rank_one(double weight, ComplexVector phi);
  void set_extra(ExtraTerm extra) { extra_ = std::move(extra); }

  const std::vector<std::pair<double, ComplexVector>>& rank_one_terms() const { return rank_one_; }
  const ExtraTerm& extra() const { return extra_; }

  //! out = H in (out is overwritten). shift subtracts shift*I on the fly.
  void apply_into(const ComplexVector& in, ComplexVector& out, double shift = 0.0) const;
  ComplexVector apply(const ComplexVector& in) const;

  //! H with every term negated, for exp(+iH) = exp(-i(-H)).
  StructuredHamiltonian negated() const;

  ComplexMatrix materialize() const;

  //! Upper bound on the spectral radius, used by convergence heuristics.
  double norm_bound() const;

 private:
  Index dim_ = 0;
  double identity_ = 0.0;
  std::vector<std::pair<double, ComplexVector>> rank_one_;
  ExtraTerm extra_;
};

struct KrylovOptions {
  double tol = default_tolerances().krylov_default;  // in (0, 1e-4]
  int max_dim = 64;
};

//! result ~= exp(-iH) v for unit v, via a restart-free Hermitian Lanczos
//! recursion with full reorthogonalization. The identity part of H is
//! peeled off as a global phase before the iteration starts.
ComplexVector krylov_exp_apply(const StructuredHamiltonian& h, const ComplexVector& v,
                               const KrylovOptions& opts = {});
ComplexVector krylov_exp_apply(const StructuredHamiltonian& h, const ComplexVector& v, double tol);

}  // namespace rqs
