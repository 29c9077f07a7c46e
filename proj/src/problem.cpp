#include "rqs/problem.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace rqs {

SearchInstance::SearchInstance(Encoding enc, int n, Index dim, Index target)
    : encoding_(enc), n_qubits_(n), dim_(dim), target_(target) {}

SearchInstance SearchInstance::qubits(int n, Index target_index) {
  if (n < 1 || n > kMaxQubits) {
    std::ostringstream msg;
    msg << "qubit count " << n << " outside supported range [1, " << kMaxQubits << "]";
    throw std::invalid_argument(msg.str());
  }
  const Index dim = Index{1} << n;
  if (target_index < 0 || target_index >= dim) {
    throw std::invalid_argument("target index out of range");
  }
  return SearchInstance(Encoding::qubit, n, dim, target_index);
}

namespace {

void require_dense_path(Index dim) {
  if (dim > kDenseStateCap) {
    std::ostringstream msg;
    msg << "dimension " << dim << " exceeds the dense-path cap " << kDenseStateCap
        << " (full-space states need N <= " << kMaxDenseQubits << " qubits)";
    throw std::invalid_argument(msg.str());
  }
}

}  // namespace

SearchInstance SearchInstance::qudit(Index levels, Index target_index) {
  if (levels < 2 || levels > kMaxQuditLevels) {
    std::ostringstream msg;
    msg << "qudit dimension " << levels << " outside supported range [2, " << kMaxQuditLevels
        << "]";
    throw std::invalid_argument(msg.str());
  }
  if (target_index < 0 || target_index >= levels) {
    throw std::invalid_argument("target index out of range");
  }
  return SearchInstance(Encoding::qudit, -1, levels, target_index);
}

int SearchInstance::num_qubits() const {
  if (encoding_ != Encoding::qubit) {
    throw std::logic_error("num_qubits requested on a qudit instance");
  }
  return n_qubits_;
}

ComplexVector SearchInstance::initial_state() const {
  require_dense_path(dim_);
  const double amp = 1.0 / std::sqrt(static_cast<double>(dim_));
  return ComplexVector::Constant(dim_, Complex(amp, 0.0));
}

ComplexVector SearchInstance::target_state() const {
  require_dense_path(dim_);
  ComplexVector psi = ComplexVector::Zero(dim_);
  psi[target_] = 1.0;
  return psi;
}

ComplexVector SearchInstance::orthogonal_uniform_state() const {
  require_dense_path(dim_);
  const double amp = 1.0 / std::sqrt(static_cast<double>(dim_ - 1));
  ComplexVector psi = ComplexVector::Constant(dim_, Complex(amp, 0.0));
  psi[target_] = 0.0;
  return psi;
}

std::string SearchInstance::describe() const {
  std::ostringstream out;
  if (encoding_ == Encoding::qubit) {
    out << "N" << n_qubits_;
  } else {
    out << "D" << dim_;
  }
  return out.str();
}

GroverSchedule::GroverSchedule(double p0, long layers) : p0_(p0), layers_(layers) {
  if (!(p0 > 0.0 && p0 < 1.0)) {
    throw std::invalid_argument("Grover schedule needs P0 strictly between 0 and 1");
  }
  if (layers < 2) {
    throw std::invalid_argument("Grover schedule needs at least 2 layers");
  }
  phi_ = std::atan(std::sqrt((1.0 - p0) / p0));
}

double GroverSchedule::time(long l) const {
  if (l < 0 || l >= layers_) {
    throw std::invalid_argument("layer index outside schedule");
  }
  // The formula evaluates to exactly 0 and 1 at the ends; returning them
  // directly avoids the arctan/tan round trip.
  if (l == 0) return 0.0;
  if (l == layers_ - 1) return 1.0;
  const double fraction = 1.0 - 2.0 * static_cast<double>(l) / static_cast<double>(layers_ - 1);
  const double t =
      0.5 * (1.0 - std::sqrt(p0_ / (1.0 - p0_)) * std::tan(fraction * phi_));
  return std::min(1.0, std::max(0.0, t));
}

LayerCoefficients GroverSchedule::coefficients(long l, double r) const {
  const double t = time(l);
  return LayerCoefficients{1.0 - t, t, r};
}

std::string describe(const ScheduleSpec& spec) {
  std::ostringstream out;
  if (const auto* grover = std::get_if<GroverScheduleSpec>(&spec)) {
    out << "grover:L=" << grover->layers;
  } else if (const auto* greedy = std::get_if<GreedyScheduleSpec>(&spec)) {
    out << "greedy:L=" << greedy->layers;
  } else {
    out << "explicit:L=" << std::get<ExplicitScheduleSpec>(spec).coefficients.size();
  }
  return out.str();
}

StructuredHamiltonian assemble_hamiltonian(
    const SearchInstance& inst, const LayerCoefficients& coeffs,
    const std::vector<std::pair<double, ComplexVector>>& rho_terms, const ExtraTerm& noise) {
  StructuredHamiltonian h(inst.dim(), coeffs.a + coeffs.b);
  if (coeffs.a != 0.0) h.add_rank_one(-coeffs.a, inst.initial_state());
  if (coeffs.b != 0.0) h.add_rank_one(-coeffs.b, inst.target_state());
  if (coeffs.r != 0.0) {
    for (const auto& [weight, phi] : rho_terms) {
      if (phi.size() != inst.dim()) {
        throw std::invalid_argument("reinforcement state dimension mismatch");
      }
      if (weight != 0.0) h.add_rank_one(-coeffs.r * weight, phi);
    }
  }
  h.set_extra(noise);
  return h;
}

StructuredHamiltonian assemble_hamiltonian(const SearchInstance& inst,
                                           const LayerCoefficients& coeffs,
                                           const DensityRep& rho, const ExtraTerm& noise) {
  if (rho.dim() != inst.dim()) {
    throw std::invalid_argument("density dimension does not match instance");
  }
  if (coeffs.r == 0.0) {
    return assemble_hamiltonian(inst, coeffs, std::vector<std::pair<double, ComplexVector>>{},
                                noise);
  }
  return assemble_hamiltonian(inst, coeffs, rho.rank_one_terms(), noise);
}

StructuredHamiltonian assemble_hamiltonian(const SearchInstance& inst,
                                           const LayerCoefficients& coeffs,
                                           const ComplexVector& psi, const ExtraTerm& noise) {
  if (psi.size() != inst.dim()) {
    throw std::invalid_argument("state dimension does not match instance");
  }
  std::vector<std::pair<double, ComplexVector>> terms;
  if (coeffs.r != 0.0) terms.emplace_back(1.0, psi);
  return assemble_hamiltonian(inst, coeffs, terms, noise);
}

double success_probability(const ComplexVector& psi, const SearchInstance& inst) {
  return std::norm(psi[inst.target_index()]);
}

double success_probability(const DensityRep& rho, const SearchInstance& inst) {
  return rho.basis_overlap(inst.target_index());
}

}  // namespace rqs
