#include "rqs/noise.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "rqs/rng.hpp"

namespace rqs {

std::string to_string(NoiseMechanism m) {
  switch (m) {
    case NoiseMechanism::none: return "none";
    case NoiseMechanism::qubit_coherent: return "qubit-coherent";
    case NoiseMechanism::qudit_coherent: return "qudit-coherent";
    case NoiseMechanism::qubit_channel: return "qubit-channel";
    case NoiseMechanism::qudit_channel: return "qudit-channel";
  }
  return "unknown";
}

NoiseMechanism noise_mechanism_from_string(const std::string& name) {
  if (name == "none") return NoiseMechanism::none;
  if (name == "qubit-coherent") return NoiseMechanism::qubit_coherent;
  if (name == "qudit-coherent") return NoiseMechanism::qudit_coherent;
  if (name == "qubit-channel") return NoiseMechanism::qubit_channel;
  if (name == "qudit-channel") return NoiseMechanism::qudit_channel;
  throw std::invalid_argument("unknown noise mechanism: " + name);
}

bool is_incoherent(NoiseMechanism m) {
  return m == NoiseMechanism::qubit_channel || m == NoiseMechanism::qudit_channel;
}

bool is_random(NoiseMechanism m) {
  return m == NoiseMechanism::qubit_coherent || m == NoiseMechanism::qubit_channel;
}

std::string NoiseSpec::describe() const {
  std::ostringstream out;
  out << to_string(mechanism) << ":eps=" << strength;
  return out.str();
}

std::vector<double> normalize_weights(std::vector<double> raw) {
  double sum = 0.0;
  for (double v : raw) {
    if (!(v > 0.0)) throw std::invalid_argument("weights must be positive before normalization");
    sum += v;
  }
  for (double& v : raw) v /= sum;
  return raw;
}

PauliSumTerm sample_qubit_coherent(std::uint64_t seed, long layer, double eps_l, int sites) {
  if (eps_l < 0.0) throw std::invalid_argument("noise strength must be non-negative");
  PauliSumTerm term;
  term.sites = sites;
  term.coeff.assign(3 * static_cast<size_t>(sites), 0.0);
  if (eps_l == 0.0) return term;
  Xoshiro256 rng(layer_seed(seed, static_cast<std::uint64_t>(layer)));
  for (double& c : term.coeff) c = rng.normal(0.0, eps_l);
  return term;
}

CirculantShiftTerm qudit_coherent(double eps_l) {
  if (eps_l < 0.0) throw std::invalid_argument("noise strength must be non-negative");
  return CirculantShiftTerm{eps_l};
}

PauliWeights sample_pauli_weights(std::uint64_t seed, int sites, WeightDistribution dist) {
  if (sites < 1) throw std::invalid_argument("need at least one site");
  Xoshiro256 rng(mix64(seed ^ 0x5ca1ab1e5eed5eedULL));
  std::vector<double> raw(3 * static_cast<size_t>(sites));
  for (double& v : raw) {
    const double u = 1.0 - rng.uniform01();  // (0, 1]
    v = (dist == WeightDistribution::normalized_uniform) ? u : -std::log(u);
  }
  PauliWeights weights;
  weights.sites = sites;
  weights.w = normalize_weights(std::move(raw));
  return weights;
}

namespace {

void require_probability(double eps_l) {
  if (!(eps_l >= 0.0 && eps_l <= 1.0)) {
    std::ostringstream msg;
    msg << "channel strength " << eps_l << " outside [0, 1]";
    throw std::invalid_argument(msg.str());
  }
}

int log2_dim(Index dim) {
  int n = 0;
  while ((Index{1} << n) < dim) ++n;
  if ((Index{1} << n) != dim) {
    throw std::invalid_argument("qubit channel needs a power-of-two dimension");
  }
  return n;
}

}  // namespace

DensityRep apply_qubit_pauli_channel(const DensityRep& rho, double eps_l, const PauliWeights& w) {
  require_probability(eps_l);
  const Index dim = rho.dim();
  const int sites = log2_dim(dim);
  if (sites != w.sites) throw std::invalid_argument("weight table does not match register size");
  if (eps_l == 0.0) return rho;

  if (rho.is_dense()) {
    const ComplexMatrix& in = rho.dense_matrix();
    ComplexMatrix out = (1.0 - eps_l) * in;
    for (int site = 0; site < sites; ++site) {
      const Index bit = Index{1} << site;
      const double wx = w.at(site, PauliAxis::x);
      const double wy = w.at(site, PauliAxis::y);
      const double wz = w.at(site, PauliAxis::z);
      for (Index s = 0; s < dim; ++s) {
        for (Index t = 0; t < dim; ++t) {
          const bool same = ((s & bit) != 0) == ((t & bit) != 0);
          const Complex flipped = in(s ^ bit, t ^ bit);
          out(s, t) += eps_l * wx * flipped;
          out(s, t) += eps_l * wy * (same ? flipped : -flipped);
          out(s, t) += eps_l * wz * (same ? in(s, t) : -in(s, t));
        }
      }
    }
    return DensityRep::from_dense(std::move(out));
  }

  std::vector<std::pair<double, ComplexVector>> branches;
  branches.reserve(static_cast<size_t>(rho.rank()) * (3 * sites + 1));
  for (Index k = 0; k < rho.rank(); ++k) {
    const double p = rho.weights()[k];
    const ComplexVector phi = rho.factors().col(k);
    branches.emplace_back((1.0 - eps_l) * p, phi);
    for (int site = 0; site < sites; ++site) {
      for (PauliAxis axis : {PauliAxis::x, PauliAxis::y, PauliAxis::z}) {
        branches.emplace_back(eps_l * w.at(site, axis) * p,
                              apply_single_pauli(phi, site, axis));
      }
    }
  }
  return reorthonormalize_branches(branches);
}

DensityRep apply_qudit_shift_channel(const DensityRep& rho, double eps_l) {
  require_probability(eps_l);
  if (eps_l == 0.0) return rho;
  const Index dim = rho.dim();

  if (rho.is_dense()) {
    const ComplexMatrix& in = rho.dense_matrix();
    ComplexMatrix out = (1.0 - eps_l) * in;
    for (Index s = 0; s < dim; ++s) {
      const Index sm = (s == 0) ? dim - 1 : s - 1;
      for (Index t = 0; t < dim; ++t) {
        const Index tm = (t == 0) ? dim - 1 : t - 1;
        out(s, t) += eps_l * in(sm, tm);  // (X rho X^dag)(s,t) = rho(s-1,t-1)
      }
    }
    return DensityRep::from_dense(std::move(out));
  }

  std::vector<std::pair<double, ComplexVector>> branches;
  branches.reserve(static_cast<size_t>(rho.rank()) * 2);
  ComplexVector shifted(dim);
  for (Index k = 0; k < rho.rank(); ++k) {
    const double p = rho.weights()[k];
    const ComplexVector phi = rho.factors().col(k);
    branches.emplace_back((1.0 - eps_l) * p, phi);
    QuditPauliOps::apply_shift(phi, shifted);
    branches.emplace_back(eps_l * p, shifted);
  }
  return reorthonormalize_branches(branches);
}

Complex QuditPauliOps::omega() const {
  return std::exp(Complex(0.0, 2.0 * M_PI / static_cast<double>(levels)));
}

ComplexMatrix QuditPauliOps::x() const {
  ComplexMatrix m = ComplexMatrix::Zero(levels, levels);
  for (Index d = 0; d < levels; ++d) m((d + 1) % levels, d) = 1.0;
  return m;
}

ComplexMatrix QuditPauliOps::z() const {
  ComplexMatrix m = ComplexMatrix::Zero(levels, levels);
  const Complex w = omega();
  Complex power{1.0, 0.0};
  for (Index d = 0; d < levels; ++d) {
    m(d, d) = power;
    power *= w;
  }
  return m;
}

ComplexMatrix QuditPauliOps::y() const { return x() * z(); }

void QuditPauliOps::apply_shift(const ComplexVector& in, ComplexVector& out) {
  const Index dim = in.size();
  out.resize(dim);
  for (Index d = 0; d < dim; ++d) out[d] = in[(d == 0) ? dim - 1 : d - 1];
}

void QuditPauliOps::apply_shift_adj(const ComplexVector& in, ComplexVector& out) {
  const Index dim = in.size();
  out.resize(dim);
  for (Index d = 0; d < dim; ++d) out[d] = in[(d == dim - 1) ? 0 : d + 1];
}

}  // namespace rqs
