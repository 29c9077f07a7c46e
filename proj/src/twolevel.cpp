#include "rqs/twolevel.hpp"

#include <cmath>
#include <stdexcept>

#include "rqs/gridopt.hpp"

namespace rqs {

FieldVector field_components(const LayerCoefficients& coeffs, double p0, const TwoLevelState& s) {
  const Complex cross = s.alpha * std::conj(s.beta);
  FieldVector f;
  f.h0 = 0.5 * (coeffs.a + coeffs.b - coeffs.r);
  f.hx = -coeffs.a * std::sqrt(p0 * (1.0 - p0)) - coeffs.r * cross.real();
  f.hy = coeffs.r * cross.imag();
  f.hz = 0.5 * (coeffs.a - coeffs.b - 2.0 * coeffs.a * p0 -
                coeffs.r * (2.0 * std::norm(s.alpha) - 1.0));
  return f;
}

TwoLevelState evolve_two_level(const TwoLevelState& s, const FieldVector& f) {
  const Complex phase = std::exp(Complex(0.0, -f.h0));
  const double h = f.magnitude();
  if (h == 0.0) {
    return {phase * s.alpha, phase * s.beta};
  }
  const double c = std::cos(h);
  const double sn = std::sin(h);
  const double nx = f.hx / h;
  const double ny = f.hy / h;
  const double nz = f.hz / h;
  // cos(h) I - i sin(h) nhat.sigma acting on (alpha, beta)
  const Complex u00 = Complex(c, -sn * nz);
  const Complex u01 = Complex(-sn * ny, -sn * nx);
  const Complex u10 = Complex(sn * ny, -sn * nx);
  const Complex u11 = Complex(c, sn * nz);
  return {phase * (u00 * s.alpha + u01 * s.beta), phase * (u10 * s.alpha + u11 * s.beta)};
}

TwoLevelGreedyStep greedy_step(const TwoLevelState& s, double p0, double r,
                               const GreedySettings& settings) {
  const GridMaximum best = grid_maximize(
      [&](double a, double b) {
        const FieldVector f = field_components({a, b, r}, p0, s);
        return evolve_two_level(s, f).p_success();
      },
      settings);
  TwoLevelGreedyStep step;
  step.coefficients = {best.a, best.b, r};
  step.next = evolve_two_level(s, field_components(step.coefficients, p0, s));
  step.p_success = step.next.p_success();
  return step;
}

std::vector<double> two_level_success_trace(double p0,
                                            const std::vector<LayerCoefficients>& coeffs) {
  TwoLevelState state = TwoLevelState::initial(p0);
  std::vector<double> trace;
  trace.reserve(coeffs.size());
  for (const LayerCoefficients& c : coeffs) {
    state = evolve_two_level(state, field_components(c, p0, state));
    trace.push_back(state.p_success());
  }
  return trace;
}

TwoLevelGreedyRun two_level_greedy_run(double p0, double r, long layers,
                                       const GreedySettings& settings) {
  TwoLevelGreedyRun run;
  run.coefficients.reserve(layers);
  run.p_success.reserve(layers);
  TwoLevelState state = TwoLevelState::initial(p0);
  for (long l = 0; l < layers; ++l) {
    TwoLevelGreedyStep step = greedy_step(state, p0, r, settings);
    state = step.next;
    run.coefficients.push_back(step.coefficients);
    run.p_success.push_back(step.p_success);
  }
  run.final_state = state;
  return run;
}

ComputationTime computation_time_two_level(double p0, double r, double delta, long layer_cap,
                                           const GreedySettings& settings) {
  if (!(delta > 0.0 && delta < 1.0)) {
    throw std::invalid_argument("delta must lie strictly between 0 and 1");
  }
  if (layer_cap < 1) {
    throw std::invalid_argument("layer cap must be at least 1");
  }
  const double threshold = 1.0 - delta;
  TwoLevelState state = TwoLevelState::initial(p0);
  // P_success(0) is P0 by definition; the amplitude round trip
  // sqrt(p0)^2 can land a hair above it and must not decide the check.
  double best_p = p0;
  if (best_p > threshold) return {0, best_p};
  for (long l = 1; l <= layer_cap; ++l) {
    const TwoLevelGreedyStep step = greedy_step(state, p0, r, settings);
    state = step.next;
    best_p = std::max(best_p, step.p_success);
    if (step.p_success > threshold) return {l, step.p_success};
  }
  return {std::nullopt, best_p};
}

ComputationTime computation_time_two_level(const SearchInstance& inst, double r, double delta,
                                           long layer_cap, const GreedySettings& settings) {
  return computation_time_two_level(inst.p0(), r, delta, layer_cap, settings);
}

}  // namespace rqs
