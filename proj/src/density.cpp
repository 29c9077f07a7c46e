#include "rqs/density.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "rqs/spectral.hpp"

namespace rqs {

DensityRep DensityRep::pure(ComplexVector psi) {
  const double norm = psi.norm();
  if (std::abs(norm - 1.0) > 1e-6) {
    std::ostringstream msg;
    msg << "pure state norm " << norm << " is not 1";
    throw std::invalid_argument(msg.str());
  }
  DensityRep rep;
  rep.weights_ = RealVector::Constant(1, 1.0);
  rep.factors_ = psi / norm;
  return rep;
}

DensityRep DensityRep::from_dense(ComplexMatrix rho) {
  require_hermitian(rho);
  const double tr = rho.trace().real();
  if (std::abs(tr - 1.0) > 1e-6) {
    std::ostringstream msg;
    msg << "density trace " << tr << " is not 1";
    throw std::invalid_argument(msg.str());
  }
  DensityRep rep;
  rep.dense_ = std::move(rho);
  return rep;
}

DensityRep DensityRep::from_factors(RealVector weights, ComplexMatrix factors) {
  if (weights.size() != factors.cols()) {
    throw std::invalid_argument("weight count does not match factor count");
  }
  if (weights.size() == 0) {
    throw std::invalid_argument("factored density needs at least one term");
  }
  for (Index k = 0; k < weights.size(); ++k) {
    if (!(weights[k] >= -1e-12)) {
      throw std::invalid_argument("factored density weights must be non-negative");
    }
  }
  const ComplexMatrix gram = factors.adjoint() * factors;
  const double ortho_defect =
      (gram - ComplexMatrix::Identity(gram.rows(), gram.cols())).norm();
  if (ortho_defect > 1e-8 * std::max<double>(1, factors.cols())) {
    std::ostringstream msg;
    msg << "factored density columns are not orthonormal (defect " << ortho_defect << ")";
    throw std::invalid_argument(msg.str());
  }
  DensityRep rep;
  rep.weights_ = std::move(weights);
  rep.factors_ = std::move(factors);
  return rep;
}

double DensityRep::trace() const {
  return is_dense() ? dense_.trace().real() : weights_.sum();
}

const ComplexMatrix& DensityRep::dense_matrix() const {
  if (!is_dense()) throw std::logic_error("density is factored, not dense");
  return dense_;
}

const RealVector& DensityRep::weights() const {
  if (is_dense()) throw std::logic_error("density is dense, not factored");
  return weights_;
}

const ComplexMatrix& DensityRep::factors() const {
  if (is_dense()) throw std::logic_error("density is dense, not factored");
  return factors_;
}

ComplexMatrix DensityRep::materialize() const {
  if (is_dense()) return dense_;
  ComplexMatrix m = ComplexMatrix::Zero(dim(), dim());
  for (Index k = 0; k < weights_.size(); ++k) {
    m.noalias() += weights_[k] * factors_.col(k) * factors_.col(k).adjoint();
  }
  return m;
}

double DensityRep::basis_overlap(Index idx) const {
  if (is_dense()) return dense_(idx, idx).real();
  double p = 0.0;
  for (Index k = 0; k < weights_.size(); ++k) {
    p += weights_[k] * std::norm(factors_(idx, k));
  }
  return p;
}

double DensityRep::expectation(const ComplexVector& psi) const {
  if (is_dense()) return std::real(Complex(psi.dot(dense_ * psi)));
  double p = 0.0;
  for (Index k = 0; k < weights_.size(); ++k) {
    p += weights_[k] * std::norm(Complex(factors_.col(k).dot(psi)));
  }
  return p;
}

std::vector<std::pair<double, ComplexVector>> DensityRep::rank_one_terms(double drop_tol) const {
  std::vector<std::pair<double, ComplexVector>> terms;
  if (is_dense()) {
    const EigenDecomposition eig = hermitian_eigendecompose(dense_);
    const double floor = drop_tol * std::max(trace(), 1e-300);
    for (Index k = eig.eigenvalues.size() - 1; k >= 0; --k) {  // dominant first
      if (eig.eigenvalues[k] > floor) {
        terms.emplace_back(eig.eigenvalues[k], eig.eigenvectors.col(k));
      }
    }
    return terms;
  }
  const double floor = drop_tol * std::max(trace(), 1e-300);
  for (Index k = 0; k < weights_.size(); ++k) {
    if (weights_[k] > floor) terms.emplace_back(weights_[k], factors_.col(k));
  }
  return terms;
}

double DensityRep::normalize_trace(double target) {
  const double tr = trace();
  if (!(tr > 0.0)) throw std::runtime_error("cannot normalize density with non-positive trace");
  const double scale = target / tr;
  if (is_dense()) {
    dense_ *= scale;
  } else {
    weights_ *= scale;
  }
  return tr;
}

DensityRep conjugate_density(const ComplexMatrix& u, const DensityRep& rho) {
  if (u.rows() != rho.dim() || u.cols() != rho.dim()) {
    throw std::invalid_argument("unitary dimension does not match density");
  }
  if (rho.is_dense()) {
    return DensityRep::from_dense(u * rho.dense_matrix() * u.adjoint());
  }
  ComplexMatrix factors = u * rho.factors();
  return DensityRep::from_factors(rho.weights(), std::move(factors));
}

DensityRep conjugate_density(const VectorMap& apply_u, const DensityRep& rho) {
  if (!rho.is_dense()) {
    ComplexMatrix factors(rho.dim(), rho.rank());
    for (Index k = 0; k < rho.rank(); ++k) {
      factors.col(k) = apply_u(rho.factors().col(k));
    }
    return DensityRep::from_factors(rho.weights(), std::move(factors));
  }
  const ComplexMatrix& dense = rho.dense_matrix();
  const Index dim = dense.rows();
  ComplexMatrix left(dim, dim);
  for (Index j = 0; j < dim; ++j) {
    ComplexVector col = dense.col(j);
    const double norm = col.norm();
    if (norm < 1e-300) {
      left.col(j).setZero();
    } else {
      left.col(j) = norm * apply_u(col / norm);
    }
  }
  // left = U rho; U rho U^dag = (U (U rho)^dag)^dag
  ComplexMatrix conj(dim, dim);
  const ComplexMatrix left_adj = left.adjoint();
  for (Index j = 0; j < dim; ++j) {
    ComplexVector col = left_adj.col(j);
    const double norm = col.norm();
    if (norm < 1e-300) {
      conj.col(j).setZero();
    } else {
      conj.col(j) = norm * apply_u(col / norm);
    }
  }
  // Symmetrize away the per-column application error before validation.
  const ComplexMatrix result = conj.adjoint();
  return DensityRep::from_dense(0.5 * (result + result.adjoint()));
}

DensityRep reorthonormalize_branches(
    const std::vector<std::pair<double, ComplexVector>>& branches, double drop_tol) {
  if (branches.empty()) throw std::invalid_argument("no branches to compress");
  const Index dim = branches.front().second.size();
  Index live = 0;
  for (const auto& [q, chi] : branches) {
    if (chi.size() != dim) throw std::invalid_argument("branch dimension mismatch");
    if (q > 0.0) ++live;
  }
  if (live == 0) throw std::invalid_argument("all branch weights vanish");

  ComplexMatrix c(dim, live);
  Index col = 0;
  for (const auto& [q, chi] : branches) {
    if (q > 0.0) c.col(col++) = std::sqrt(q) * chi;
  }
  // rho = C C^dag shares its nonzero spectrum with the small Gram matrix.
  const ComplexMatrix gram = c.adjoint() * c;
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(gram);
  const double total = gram.trace().real();
  const double floor = drop_tol * std::max(total, 1e-300);

  std::vector<Index> kept;
  for (Index k = solver.eigenvalues().size() - 1; k >= 0; --k) {
    if (solver.eigenvalues()[k] > floor) kept.push_back(k);
  }
  if (kept.empty()) kept.push_back(solver.eigenvalues().size() - 1);

  RealVector weights(static_cast<Index>(kept.size()));
  ComplexMatrix factors(dim, static_cast<Index>(kept.size()));
  for (size_t i = 0; i < kept.size(); ++i) {
    const double lambda = solver.eigenvalues()[kept[i]];
    weights[static_cast<Index>(i)] = lambda;
    factors.col(static_cast<Index>(i)) =
        (c * solver.eigenvectors().col(kept[i])) / std::sqrt(lambda);
  }
  // Factors attached to eigenvalues near the rounding floor pick up norm
  // errors of order eps/lambda; a QR polish restores orthonormality at a
  // density perturbation of order lambda * error, far below the weights.
  const Eigen::HouseholderQR<ComplexMatrix> qr(factors);
  factors = qr.householderQ() * ComplexMatrix::Identity(dim, factors.cols());
  // Dropped eigenvalues are below drop_tol * trace by construction; fold the
  // lost mass back in so the trace is preserved exactly.
  const double kept_sum = weights.sum();
  if (kept_sum > 0.0) weights *= total / kept_sum;
  return DensityRep::from_factors(std::move(weights), std::move(factors));
}

TruncationResult truncate_rank(const DensityRep& rho, double budget) {
  if (!(budget > 0.0 && budget < 1.0)) {
    throw std::invalid_argument("truncation budget must lie in (0, 1)");
  }
  auto terms = rho.rank_one_terms(0.0);
  std::sort(terms.begin(), terms.end(),
            [](const auto& a, const auto& b) { return a.first > b.first; });

  // Walk from the smallest weight upward, discarding while the cumulative
  // mass stays within budget. Always keep at least one term.
  double discarded = 0.0;
  size_t keep = terms.size();
  while (keep > 1) {
    const double candidate = discarded + terms[keep - 1].first;
    if (candidate > budget) break;
    discarded = candidate;
    --keep;
  }

  RealVector weights(static_cast<Index>(keep));
  ComplexMatrix factors(rho.dim(), static_cast<Index>(keep));
  double kept_mass = 0.0;
  for (size_t i = 0; i < keep; ++i) {
    weights[static_cast<Index>(i)] = terms[i].first;
    factors.col(static_cast<Index>(i)) = terms[i].second;
    kept_mass += terms[i].first;
  }
  weights *= rho.trace() / kept_mass;
  TruncationResult result;
  result.rep = DensityRep::from_factors(std::move(weights), std::move(factors));
  result.discarded = discarded;
  return result;
}

double trace_distance(const ComplexMatrix& a, const ComplexMatrix& b) {
  const EigenDecomposition eig = hermitian_eigendecompose(a - b, 1e-8);
  return 0.5 * eig.eigenvalues.cwiseAbs().sum();
}

}  // namespace rqs
