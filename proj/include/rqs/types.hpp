#pragma once

#include <Eigen/Dense>
#include <complex>
#include <cstdint>

namespace rqs {

using Complex = std::complex<double>;
using ComplexVector = Eigen::VectorXcd;
using ComplexMatrix = Eigen::MatrixXcd;
using RealVector = Eigen::VectorXd;
using Index = Eigen::Index;

inline constexpr Complex kImag{0.0, 1.0};

//! Numerical tolerances and size caps shared across the library.
//! All defaults are fixed here; operations take these values either
//! implicitly (library defaults) or through explicit settings structs.
struct Tolerances {
  double hermiticity = 1e-10;        // relative Frobenius asymmetry allowed
  double unitarity = 1e-10;          // per-dimension unitarity defect
  double state_norm = 1e-10;         // |norm - 1| allowed for quantum states
  double trace = 1e-9;               // |trace - 1| allowed for densities
  double positivity = -1e-9;         // eigenvalue floor for densities
  double krylov_default = 1e-10;     // default propagator accuracy
  Index dense_exp_cap = 1024;        // largest dim for dense exponentials
};

inline const Tolerances& default_tolerances() {
  static const Tolerances t{};
  return t;
}

}  // namespace rqs
