#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "rqs/density.hpp"
#include "rqs/spectral.hpp"
#include "rqs/types.hpp"

namespace rqs {

enum class NoiseMechanism {
  none,
  qubit_coherent,   // random weight-one Pauli term in H, fresh each layer
  qudit_coherent,   // deterministic eps_l (X + X^dag) term in H
  qubit_channel,    // rho -> (1-eps_l) rho + eps_l sum w_imu sigma rho sigma
  qudit_channel,    // rho -> (1-eps_l) rho + eps_l X rho X^dag
};

std::string to_string(NoiseMechanism m);
NoiseMechanism noise_mechanism_from_string(const std::string& name);

bool is_incoherent(NoiseMechanism m);
bool is_random(NoiseMechanism m);

enum class WeightDistribution {
  normalized_uniform,  // iid U(0,1) scaled by the sum
  dirichlet,           // flat Dirichlet, iid Exp(1) scaled by the sum
};

//! Noise configuration for a run. The per-layer strength is always
//! eps_l = strength / L for a run planned with L layers.
struct NoiseSpec {
  NoiseMechanism mechanism = NoiseMechanism::none;
  double strength = 0.0;  // the eps of eps_l = eps / L
  WeightDistribution weight_distribution = WeightDistribution::normalized_uniform;

  bool enabled() const { return mechanism != NoiseMechanism::none && strength != 0.0; }
  std::string describe() const;
};

//! Pauli-channel weights w_{i,mu} > 0 with sum 1.
struct PauliWeights {
  int sites = 0;
  std::vector<double> w;  // 3*sites entries, index = 3*site + axis

  double at(int site, PauliAxis axis) const { return w[3 * site + static_cast<int>(axis)]; }
};

//! Scales positive draws so they sum to one.
std::vector<double> normalize_weights(std::vector<double> raw);

//! V_l = sum_{i,mu} eps_{l,i,mu} sigma_i^mu with eps_{l,i,mu} iid
//! N(0, eps_l^2), redrawn per layer (the draw depends on both seed and
//! layer index).
PauliSumTerm sample_qubit_coherent(std::uint64_t seed, long layer, double eps_l, int sites);

//! V_l = eps_l (X + X^dag), deterministic.
CirculantShiftTerm qudit_coherent(double eps_l);

//! One set of channel weights per realization (no layer dependence).
PauliWeights sample_pauli_weights(std::uint64_t seed, int sites,
                                  WeightDistribution dist = WeightDistribution::normalized_uniform);

//! rho -> (1-eps_l) rho + eps_l sum_{i,mu} w_{i,mu} sigma_i^mu rho sigma_i^mu
DensityRep apply_qubit_pauli_channel(const DensityRep& rho, double eps_l, const PauliWeights& w);

//! rho -> (1-eps_l) rho + eps_l X rho X^dag
DensityRep apply_qudit_shift_channel(const DensityRep& rho, double eps_l);

//! Generalized Pauli operators on a D-level system: X|d> = |d+1 mod D>,
//! Z|d> = omega^d |d>, Y = XZ, omega = exp(i 2 pi / D). Only X enters the
//! noise models; Z and Y are provided for completeness.
struct QuditPauliOps {
  Index levels = 0;

  Complex omega() const;
  ComplexMatrix x() const;
  ComplexMatrix z() const;
  ComplexMatrix y() const;

  static void apply_shift(const ComplexVector& in, ComplexVector& out);      // X v
  static void apply_shift_adj(const ComplexVector& in, ComplexVector& out);  // X^dag v
};

}  // namespace rqs
