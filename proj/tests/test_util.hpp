#pragma once

#include "risnoma/model.hpp"
#include "risnoma/rng.hpp"

#include <algorithm>
#include <cstdint>
#include <vector>

namespace risnoma::testing {

/// i.i.d. CN(0, 1) channels with the given dimensions (no path loss).
inline ChannelSet gaussian_channels(Index nr, Index ns, Index m, Rng& rng) {
  ChannelSet ch;
  ch.h_rs.resize(nr, ns);
  for (Index r = 0; r < nr; ++r)
    for (Index c = 0; c < ns; ++c) ch.h_rs(r, c) = complex_normal(rng, {0.0, 0.0}, 1.0);
  ch.h_ru1 = complex_normal_vector(rng, nr);
  ch.h_ru2 = complex_normal_vector(rng, nr);
  for (Index i = 0; i < m; ++i) {
    ch.h_re.push_back(complex_normal_vector(rng, nr));
    ch.var_re.push_back(1.0);
  }
  ch.var_rs = ch.var_ru1 = ch.var_ru2 = 1.0;
  return ch;
}

/// Channels drawn from the simulation model at the reference layout used in the figures.
inline ChannelSet layout_channels(int nr, int ns, int m, Rng& rng) {
  SystemConfig cfg;
  cfg.nr = nr;
  cfg.ns = ns;
  cfg.m = m;
  Geometry geo;
  for (int i = 0; i < m; ++i) geo.eavesdroppers.push_back({uniform(rng, 1.0, 1.5), 0.0});
  return sample_channels(cfg, geo, rng);
}

/// |sum_n conj(h_n) e^{j phi_n} sum_k H_nk w_k|^2 with explicit loops.
inline double naive_gain(const CVector& h, const CMatrix& h_rs, const RVector& phases, const CVector& w) {
  Complex acc{0.0, 0.0};
  for (Index n = 0; n < h_rs.rows(); ++n) {
    Complex inner{0.0, 0.0};
    for (Index k = 0; k < h_rs.cols(); ++k) inner += h_rs(n, k) * w(k);
    acc += std::conj(h(n)) * std::polar(1.0, phases(n)) * inner;
  }
  return std::norm(acc);
}

inline CVector random_unit(Rng& rng, Index n) {
  CVector v = complex_normal_vector(rng, n);
  return v / v.norm();
}

inline RVector random_phases(Rng& rng, Index n) {
  RVector p(n);
  for (Index i = 0; i < n; ++i) p(i) = uniform(rng, 0.0, two_pi);
  return p;
}

/// max over a phase grid of ||sum_n conj(h_n) e^{j phi_n} H_n,:||^2 (the optimal w is matched to
/// that row). phi_0 is pinned to 0 since a common phase rotation leaves the objective unchanged.
inline double phase_grid_oracle(const CVector& h, const CMatrix& h_rs, int steps = 720) {
  const std::size_t nr = static_cast<std::size_t>(h_rs.rows());
  std::vector<CRowVector> rows;
  for (std::size_t n = 0; n < nr; ++n) rows.push_back(std::conj(h(Index(n))) * h_rs.row(Index(n)));
  std::vector<Complex> unit;
  for (int k = 0; k < steps; ++k) unit.push_back(std::polar(1.0, two_pi * k / steps));

  double best = 0.0;
  std::vector<std::size_t> idx(nr, 0);
  CRowVector acc(h_rs.cols());
  while (true) {
    acc = rows[0];
    for (std::size_t n = 1; n < nr; ++n) acc += unit[idx[n]] * rows[n];
    best = std::max(best, acc.squaredNorm());
    std::size_t n = 1;
    while (n < nr && ++idx[n] == unit.size()) idx[n++] = 0;
    if (n >= nr) break;
  }
  return best;
}

/// Largest singular value.
inline double operator_norm(const CMatrix& a) {
  return Eigen::JacobiSVD<CMatrix>(a).singularValues()(0);
}

}  // namespace risnoma::testing
