#pragma once

// Alternating optimization of the RIS phases and the BS beamformer to maximize one user's
// effective gain, plus the identity-phase / uniform-beamformer baseline.

#include "risnoma/model.hpp"

#include <vector>

namespace risnoma {

struct IterationTrace {
  std::vector<double> gain_values;  // objective after the initial step and after each iteration
  int iterations = 0;
  bool converged = false;
};

struct BeamformingResult {
  RisConfig ris;
  IterationTrace trace;

  double gain() const { return trace.gain_values.back(); }
};

namespace detail {

inline CVector matched_beamformer(const CRowVector& row) {
  const double n = row.norm();
  if (!(n > 0.0)) throw DegenerateChannel("cascaded channel is identically zero");
  return row.adjoint() / n;
}

}  // namespace detail

/// Maximizes ||h^H Phi H_RS w||^2 over unit-modulus Phi and unit w by alternating the two
/// closed-form block updates:
///   phi_i = -beta_i - theta_i   (beta: angles of h^H, theta: angles of H_RS w)
///   w     = (h^H Phi H_RS)^H / ||h^H Phi H_RS||
/// starting from phi_i = -beta_i. Stops when successive objective values differ by less than
/// epsilon, or after max_iters iterations (converged = false). The objective sequence is
/// nondecreasing; a decrease beyond rounding is reported as std::logic_error.
inline BeamformingResult alternating_optimization(const CVector& h_target, const CMatrix& h_rs,
                                                  double epsilon, int max_iters) {
  require(h_target.size() == h_rs.rows(), "alternating_optimization: dimension mismatch");
  require(epsilon > 0.0, "alternating_optimization: epsilon must be > 0");
  require(max_iters >= 1, "alternating_optimization: max_iters must be >= 1");
  require(h_target.allFinite() && h_rs.allFinite(), "alternating_optimization: non-finite channel");

  const Index nr = h_rs.rows();
  RVector beta(nr);
  for (Index i = 0; i < nr; ++i) beta(i) = polar_angle(std::conj(h_target(i)));

  BeamformingResult out;
  RisConfig& ris = out.ris;
  ris.phases.resize(nr);
  for (Index i = 0; i < nr; ++i) ris.phases(i) = wrap_phase(-beta(i));

  CRowVector row = cascade(h_target, h_rs, ris.phases);
  ris.w = detail::matched_beamformer(row);
  double current = row.squaredNorm();
  auto& trace = out.trace;
  trace.gain_values.push_back(current);

  double previous = 0.0;
  while (std::abs(current - previous) >= epsilon && trace.iterations < max_iters) {
    previous = current;
    ++trace.iterations;
    const CVector beam_at_ris = h_rs * ris.w;
    for (Index i = 0; i < nr; ++i)
      ris.phases(i) = wrap_phase(-beta(i) - polar_angle(beam_at_ris(i)));
    row = cascade(h_target, h_rs, ris.phases);
    ris.w = detail::matched_beamformer(row);
    current = row.squaredNorm();
    if (current < previous * (1.0 - 1e-9))
      throw std::logic_error("alternating_optimization: objective decreased");
    trace.gain_values.push_back(current);
  }
  trace.converged = std::abs(current - previous) < epsilon;
  return out;
}

inline BeamformingResult alternating_optimization(const ChannelSet& ch, User target,
                                                  const SystemConfig& cfg) {
  return alternating_optimization(ch.user(target), ch.h_rs, cfg.epsilon, cfg.max_iters);
}

/// Phi = I and w = (1,...,1)/sqrt(Ns).
inline RisConfig no_beamforming(int nr, int ns) {
  require(nr >= 1 && ns >= 1, "no_beamforming: Nr and Ns must be >= 1");
  RisConfig ris;
  ris.phases = RVector::Zero(nr);
  ris.w = CVector::Constant(ns, Complex{1.0 / std::sqrt(static_cast<double>(ns)), 0.0});
  return ris;
}

inline RisConfig no_beamforming(const SystemConfig& cfg) { return no_beamforming(cfg.nr, cfg.ns); }

/// Objective restricted to a single phase phi_i with everything else fixed:
///   |q1 e^{j phi_i} + q2|^2 = offset + amplitude * cos(phase + phi_i)
/// where q1 is element i's contribution at phi_i = 0 and q2 the sum of the other elements.
struct PhaseReduction {
  double offset = 0.0;     // |q1|^2 + |q2|^2
  double amplitude = 0.0;  // 2 |q1 q2^*|
  double phase = 0.0;      // arg(q1 q2^*)

  double operator()(double phi) const { return offset + amplitude * std::cos(phase + phi); }
};

inline PhaseReduction reduced_phase_objective(const CVector& h_target, const CMatrix& h_rs,
                                              const RisConfig& ris, Index element) {
  require(element >= 0 && element < h_rs.rows(), "reduced_phase_objective: element out of range");
  require(ris.w.size() == h_rs.cols() && ris.phases.size() == h_rs.rows(),
          "reduced_phase_objective: dimension mismatch");
  const CVector beam_at_ris = h_rs * ris.w;
  Complex q1 = std::conj(h_target(element)) * beam_at_ris(element);
  Complex q2{0.0, 0.0};
  for (Index n = 0; n < h_rs.rows(); ++n)
    if (n != element) q2 += std::conj(h_target(n)) * std::polar(1.0, ris.phases(n)) * beam_at_ris(n);
  const Complex cross = q1 * std::conj(q2);
  return {std::norm(q1) + std::norm(q2), 2.0 * std::abs(cross), polar_angle(cross)};
}

inline PhaseReduction reduced_phase_objective(const ChannelSet& ch, const RisConfig& ris,
                                              Index element, User target = User::far) {
  return reduced_phase_objective(ch.user(target), ch.h_rs, ris, element);
}

}  // namespace risnoma
