#include "rqs/spectral.hpp"

#include <cmath>
#include <sstream>

namespace rqs {

double hermiticity_defect(const ComplexMatrix& m) {
  const double scale = std::max(1.0, m.norm());
  return (m - m.adjoint()).norm() / scale;
}

void require_hermitian(const ComplexMatrix& m, double tol) {
  if (m.rows() != m.cols()) {
    std::ostringstream msg;
    msg << "matrix is not square: " << m.rows() << "x" << m.cols();
    throw std::invalid_argument(msg.str());
  }
  const double defect = hermiticity_defect(m);
  if (!(defect <= tol)) {
    std::ostringstream msg;
    msg << "matrix is not Hermitian: relative asymmetry " << defect << " exceeds " << tol;
    throw std::invalid_argument(msg.str());
  }
}

EigenDecomposition hermitian_eigendecompose(const ComplexMatrix& m, double tol) {
  require_hermitian(m, tol);
  // Symmetrize first so the solver sees an exactly Hermitian input.
  const ComplexMatrix sym = 0.5 * (m + m.adjoint());
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(sym);
  if (solver.info() != Eigen::Success) {
    throw std::runtime_error("eigendecomposition failed to converge");
  }
  return {solver.eigenvalues(), solver.eigenvectors()};
}

ComplexMatrix dense_unitary_exp(const ComplexMatrix& hermitian, Index dense_cap) {
  if (hermitian.rows() > dense_cap) {
    std::ostringstream msg;
    msg << "dimension " << hermitian.rows() << " exceeds dense exponential cap " << dense_cap
        << "; use the Krylov path";
    throw std::invalid_argument(msg.str());
  }
  const EigenDecomposition eig = hermitian_eigendecompose(hermitian);
  ComplexVector phases(eig.eigenvalues.size());
  for (Index k = 0; k < phases.size(); ++k) {
    phases[k] = std::exp(Complex(0.0, -eig.eigenvalues[k]));
  }
  return eig.eigenvectors * phases.asDiagonal() * eig.eigenvectors.adjoint();
}

void apply_single_pauli(const ComplexVector& in, ComplexVector& out, int site, PauliAxis axis) {
  const Index dim = in.size();
  out.resize(dim);
  const Index bit = Index{1} << site;
  switch (axis) {
    case PauliAxis::x:
      for (Index s = 0; s < dim; ++s) out[s] = in[s ^ bit];
      break;
    case PauliAxis::y:
      for (Index s = 0; s < dim; ++s) {
        out[s] = ((s & bit) ? kImag : -kImag) * in[s ^ bit];
      }
      break;
    case PauliAxis::z:
      for (Index s = 0; s < dim; ++s) out[s] = ((s & bit) ? -in[s] : in[s]);
      break;
  }
}

ComplexVector apply_single_pauli(const ComplexVector& in, int site, PauliAxis axis) {
  ComplexVector out;
  apply_single_pauli(in, out, site, axis);
  return out;
}

void PauliSumTerm::apply_add(const ComplexVector& in, ComplexVector& out) const {
  const Index dim = in.size();
  for (int site = 0; site < sites; ++site) {
    const Index bit = Index{1} << site;
    const double cx = coeff[3 * site + 0];
    const double cy = coeff[3 * site + 1];
    const double cz = coeff[3 * site + 2];
    if (cx == 0.0 && cy == 0.0 && cz == 0.0) continue;
    for (Index s = 0; s < dim; ++s) {
      const bool up = (s & bit) != 0;
      const Complex flipped = in[s ^ bit];
      out[s] += cx * flipped;
      out[s] += cy * (up ? kImag : -kImag) * flipped;
      out[s] += cz * (up ? -in[s] : in[s]);
    }
  }
}

ComplexMatrix PauliSumTerm::materialize(Index dim) const {
  ComplexMatrix m = ComplexMatrix::Zero(dim, dim);
  ComplexVector column(dim), unit = ComplexVector::Zero(dim);
  for (Index j = 0; j < dim; ++j) {
    unit[j] = 1.0;
    column.setZero();
    apply_add(unit, column);
    m.col(j) = column;
    unit[j] = 0.0;
  }
  return m;
}

double PauliSumTerm::norm_bound() const {
  double sum = 0.0;
  for (double c : coeff) sum += std::abs(c);
  return sum;
}

void CirculantShiftTerm::apply_add(const ComplexVector& in, ComplexVector& out) const {
  const Index dim = in.size();
  if (coeff == 0.0 || dim == 0) return;
  for (Index d = 0; d < dim; ++d) {
    const Index prev = (d == 0) ? dim - 1 : d - 1;
    const Index next = (d == dim - 1) ? 0 : d + 1;
    out[d] += coeff * (in[prev] + in[next]);
  }
}

ComplexMatrix CirculantShiftTerm::materialize(Index dim) const {
  ComplexMatrix m = ComplexMatrix::Zero(dim, dim);
  for (Index d = 0; d < dim; ++d) {
    m((d + 1) % dim, d) += coeff;
    m(d, (d + 1) % dim) += coeff;
  }
  return m;
}

void StructuredHamiltonian::add_rank_one(double weight, ComplexVector phi) {
  if (phi.size() != dim_) {
    throw std::invalid_argument("rank-one term dimension mismatch");
  }
  rank_one_.emplace_back(weight, std::move(phi));
}

void StructuredHamiltonian::apply_into(const ComplexVector& in, ComplexVector& out,
                                       double shift) const {
  out = (identity_ - shift) * in;
  for (const auto& [weight, phi] : rank_one_) {
    const Complex overlap = phi.dot(in);  // <phi|in>
    out.noalias() += (weight * overlap) * phi;
  }
  if (const auto* pauli = std::get_if<PauliSumTerm>(&extra_)) {
    pauli->apply_add(in, out);
  } else if (const auto* circ = std::get_if<CirculantShiftTerm>(&extra_)) {
    circ->apply_add(in, out);
  }
}

ComplexVector StructuredHamiltonian::apply(const ComplexVector& in) const {
  ComplexVector out;
  apply_into(in, out);
  return out;
}

StructuredHamiltonian StructuredHamiltonian::negated() const {
  StructuredHamiltonian neg(dim_, -identity_);
  for (const auto& [weight, phi] : rank_one_) neg.add_rank_one(-weight, phi);
  if (const auto* pauli = std::get_if<PauliSumTerm>(&extra_)) {
    PauliSumTerm flipped = *pauli;
    for (double& c : flipped.coeff) c = -c;
    neg.set_extra(std::move(flipped));
  } else if (const auto* circ = std::get_if<CirculantShiftTerm>(&extra_)) {
    neg.set_extra(CirculantShiftTerm{-circ->coeff});
  }
  return neg;
}

ComplexMatrix StructuredHamiltonian::materialize() const {
  ComplexMatrix m = identity_ * ComplexMatrix::Identity(dim_, dim_);
  for (const auto& [weight, phi] : rank_one_) {
    m.noalias() += weight * phi * phi.adjoint();
  }
  if (const auto* pauli = std::get_if<PauliSumTerm>(&extra_)) {
    m += pauli->materialize(dim_);
  } else if (const auto* circ = std::get_if<CirculantShiftTerm>(&extra_)) {
    m += circ->materialize(dim_);
  }
  return m;
}

double StructuredHamiltonian::norm_bound() const {
  double bound = std::abs(identity_);
  for (const auto& [weight, phi] : rank_one_) bound += std::abs(weight) * phi.squaredNorm();
  if (const auto* pauli = std::get_if<PauliSumTerm>(&extra_)) {
    bound += pauli->norm_bound();
  } else if (const auto* circ = std::get_if<CirculantShiftTerm>(&extra_)) {
    bound += circ->norm_bound();
  }
  return bound;
}

namespace {

//! exp(-iT) e_1 for the real symmetric tridiagonal Lanczos matrix.
ComplexVector tridiag_exp_e1(const std::vector<double>& alpha, const std::vector<double>& beta,
                             int m) {
  Eigen::MatrixXd t = Eigen::MatrixXd::Zero(m, m);
  for (int j = 0; j < m; ++j) {
    t(j, j) = alpha[j];
    if (j + 1 < m) {
      t(j, j + 1) = beta[j];
      t(j + 1, j) = beta[j];
    }
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(t);
  const Eigen::MatrixXd& vecs = solver.eigenvectors();
  const Eigen::VectorXd& vals = solver.eigenvalues();
  ComplexVector result = ComplexVector::Zero(m);
  for (int k = 0; k < m; ++k) {
    const Complex phase = std::exp(Complex(0.0, -vals[k]));
    result += (phase * vecs(0, k)) * vecs.col(k).cast<Complex>();
  }
  return result;
}

}  // namespace

ComplexVector krylov_exp_apply(const StructuredHamiltonian& h, const ComplexVector& v,
                               const KrylovOptions& opts) {
  if (!(opts.tol > 0.0 && opts.tol <= 1e-4)) {
    throw std::invalid_argument("krylov tolerance must lie in (0, 1e-4]");
  }
  if (v.size() != h.dim()) {
    throw std::invalid_argument("krylov input dimension mismatch");
  }
  const double input_norm = v.norm();
  if (std::abs(input_norm - 1.0) > 1e-6) {
    throw std::invalid_argument("krylov input vector must be normalized");
  }

  // The identity coefficient commutes with everything: peel it off as a
  // global phase so the Lanczos matrix keeps the smallest possible norm.
  const double shift = h.identity_coeff();
  const Complex global_phase = std::exp(Complex(0.0, -shift));

  const Index dim = h.dim();
  const int max_dim = std::min<Index>(opts.max_dim, dim);
  ComplexMatrix basis(dim, max_dim);
  std::vector<double> alpha, beta;
  alpha.reserve(max_dim);
  beta.reserve(max_dim);

  basis.col(0) = v / input_norm;
  ComplexVector w(dim);
  double residual = 0.0;

  for (int j = 0; j < max_dim; ++j) {
    h.apply_into(basis.col(j), w, shift);
    const double a = std::real(Complex(basis.col(j).dot(w)));
    alpha.push_back(a);
    w.noalias() -= a * basis.col(j);
    if (j > 0) w.noalias() -= beta[j - 1] * basis.col(j - 1);
    // Full reorthogonalization; m <= 64 keeps this cheap and removes the
    // classical loss-of-orthogonality failure mode.
    for (int i = 0; i <= j; ++i) {
      const Complex overlap = basis.col(i).dot(w);
      w.noalias() -= overlap * basis.col(i);
    }
    const double b = w.norm();
    const int m = j + 1;
    const ComplexVector small = tridiag_exp_e1(alpha, beta, m);
    residual = b * std::abs(small[m - 1]);
    const bool happy_breakdown = b <= 1e-14 * std::max(1.0, h.norm_bound());
    if (residual <= opts.tol || happy_breakdown || m == dim) {
      ComplexVector result = basis.leftCols(m) * small;
      return (global_phase * input_norm) * result;
    }
    if (m < max_dim) {
      beta.push_back(b);
      basis.col(m) = w / b;
    }
  }

  std::ostringstream msg;
  msg << "krylov propagator did not reach tolerance " << opts.tol << " within " << max_dim
      << " iterations (residual estimate " << residual << ")";
  throw ConvergenceError(msg.str(), residual);
}

ComplexVector krylov_exp_apply(const StructuredHamiltonian& h, const ComplexVector& v, double tol) {
  KrylovOptions opts;
  opts.tol = tol;
  return krylov_exp_apply(h, v, opts);
}

}  // namespace rqs
