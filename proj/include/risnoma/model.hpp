#pragma once

// System parameters, node geometry, Rician channel generation with path loss, imperfect-CSI
// perturbation and effective (end-to-end) channel gains through the RIS.

#include "risnoma/core.hpp"
#include "risnoma/rng.hpp"

#include <algorithm>
#include <cstddef>
#include <limits>
#include <optional>
#include <vector>

namespace risnoma {

struct SystemConfig {
  int ns = 16;            // BS antennas
  int nr = 16;            // RIS elements
  int m = 0;              // external eavesdroppers
  double p_dbm = 25.0;    // total transmit power
  double n0_dbm = 0.0;    // noise power
  double k_factor = 10.0;
  double eta = 2.0;       // path-loss exponent
  double r1_th = 1.0;     // bps/Hz
  double r2_th = 1.0;     // bps/Hz
  double epsilon = 1e-4;  // alternating-optimization tolerance
  int max_iters = 1000;
  bool random_los_phase = false;  // LoS mean gets an independent uniform phase per entry

  double power() const { return db_to_linear(p_dbm); }
  double noise() const { return db_to_linear(n0_dbm); }
  double gamma1_th() const { return snr_threshold(r1_th); }
  double gamma2_th() const { return snr_threshold(r2_th); }

  void validate() const {
    require(ns >= 1, "Ns must be >= 1");
    require(nr >= 1, "Nr must be >= 1");
    require(m >= 0, "M must be >= 0");
    require(k_factor > 0.0, "K must be > 0");
    require(eta >= 0.0, "eta must be >= 0");
    require(epsilon > 0.0, "epsilon must be > 0");
    require(max_iters >= 1, "max_iters must be >= 1");
    require(std::isfinite(p_dbm) && std::isfinite(n0_dbm), "powers must be finite");
    require(r1_th >= 0.0 && r2_th >= 0.0, "rate thresholds must be >= 0");
  }

  bool operator==(const SystemConfig&) const = default;
};

struct Point2 {
  double x = 0.0;
  double y = 0.0;
  bool operator==(const Point2&) const = default;
};

inline double distance(Point2 a, Point2 b) { return std::hypot(a.x - b.x, a.y - b.y); }

/// Node positions in the plane; the BS sits at the origin.
struct Geometry {
  Point2 bs{0.0, 0.0};
  Point2 ris{0.5, 0.5};
  Point2 u1{2.0, 0.0};
  Point2 u2{3.0, 0.0};
  std::vector<Point2> eavesdroppers;

  double bs_ris() const { return distance(bs, ris); }
  double ris_to(Point2 p) const { return distance(ris, p); }

  void validate() const {
    require(bs_ris() > 0.0, "BS and RIS positions coincide");
    require(ris_to(u1) > 0.0, "RIS and U1 positions coincide");
    require(ris_to(u2) > 0.0, "RIS and U2 positions coincide");
    for (const auto& e : eavesdroppers) require(ris_to(e) > 0.0, "RIS and eavesdropper coincide");
  }
};

/// One channel realization. Entries are path-loss-weighted Rician samples; the per-link entry
/// variance of the generating distribution is kept for imperfect-CSI modelling.
struct ChannelSet {
  CMatrix h_rs;               // Nr x Ns, BS -> RIS
  CVector h_ru1;              // Nr, RIS -> U1
  CVector h_ru2;              // Nr, RIS -> U2
  std::vector<CVector> h_re;  // M x Nr, RIS -> eavesdroppers

  double var_rs = 0.0;
  double var_ru1 = 0.0;
  double var_ru2 = 0.0;
  std::vector<double> var_re;

  Index nr() const { return h_rs.rows(); }
  Index ns() const { return h_rs.cols(); }
  Index m() const { return static_cast<Index>(h_re.size()); }

  const CVector& user(User u) const { return u == User::near ? h_ru1 : h_ru2; }
};

/// RIS phase shifts (diagonal of Phi) and the unit-norm BS transmit beamformer.
struct RisConfig {
  RVector phases;  // each in [0, 2*pi)
  CVector w;

  CVector reflection() const {
    CVector r(phases.size());
    for (Index i = 0; i < phases.size(); ++i) r(i) = std::polar(1.0, phases(i));
    return r;
  }
};

struct EffectiveGains {
  double h1 = 0.0;
  double h2 = 0.0;
  std::vector<double> h_e1;  // signal gain at each eavesdropper
  std::vector<double> h_e2;  // AN gain at each eavesdropper (zero when AN is disabled)
  std::optional<std::size_t> strongest;
};

namespace detail {

inline double path_loss_amplitude(double d, double eta) {
  require(d > 0.0, "path-loss distance must be > 0");
  return std::pow(d, -eta / 2.0);
}

inline void fill_rician(Rng& rng, Eigen::Ref<CMatrix> out, double k, double amplitude,
                        bool random_phase) {
  const double los = std::sqrt(k / (k + 1.0));
  const double var = 1.0 / (k + 1.0);
  for (Index r = 0; r < out.rows(); ++r)
    for (Index c = 0; c < out.cols(); ++c) {
      const Complex mean = random_phase ? std::polar(los, uniform(rng, 0.0, two_pi)) : Complex{los, 0.0};
      out(r, c) = amplitude * complex_normal(rng, mean, var);
    }
}

inline CVector rician_vector(Rng& rng, Index n, double k, double amplitude, bool random_phase) {
  CMatrix v(n, 1);
  fill_rician(rng, v, k, amplitude, random_phase);
  return v.col(0);
}

}  // namespace detail

/// Draws one realization: each raw entry ~ CN(sqrt(K/(K+1)), 1/(K+1)), then each link is scaled
/// in amplitude by d^(-eta/2). Draw order: H_RS row-major, h_RU1, h_RU2, then each h_REi.
inline ChannelSet sample_channels(const SystemConfig& cfg, const Geometry& geo, Rng& rng) {
  cfg.validate();
  geo.validate();
  const double k = cfg.k_factor;
  const double raw_var = 1.0 / (k + 1.0);
  ChannelSet ch;
  const double a_rs = detail::path_loss_amplitude(geo.bs_ris(), cfg.eta);
  const double a_u1 = detail::path_loss_amplitude(geo.ris_to(geo.u1), cfg.eta);
  const double a_u2 = detail::path_loss_amplitude(geo.ris_to(geo.u2), cfg.eta);

  ch.h_rs.resize(cfg.nr, cfg.ns);
  detail::fill_rician(rng, ch.h_rs, k, a_rs, cfg.random_los_phase);
  ch.h_ru1 = detail::rician_vector(rng, cfg.nr, k, a_u1, cfg.random_los_phase);
  ch.h_ru2 = detail::rician_vector(rng, cfg.nr, k, a_u2, cfg.random_los_phase);
  ch.var_rs = a_rs * a_rs * raw_var;
  ch.var_ru1 = a_u1 * a_u1 * raw_var;
  ch.var_ru2 = a_u2 * a_u2 * raw_var;
  for (const auto& e : geo.eavesdroppers) {
    const double a = detail::path_loss_amplitude(geo.ris_to(e), cfg.eta);
    ch.h_re.push_back(detail::rician_vector(rng, cfg.nr, k, a, cfg.random_los_phase));
    ch.var_re.push_back(a * a * raw_var);
  }
  return ch;
}

/// Estimated channel h + e with e ~ CN(0, t^2 * sigma_h^2) per entry, sigma_h^2 being the entry's
/// generating variance. t == 0 returns an exact copy.
inline ChannelSet perturb_csi(const ChannelSet& ch, double t, Rng& rng) {
  require(t >= 0.0 && std::isfinite(t), "CSI error ratio t must be >= 0");
  ChannelSet out = ch;
  if (t == 0.0) return out;
  const auto add_error = [&](auto& m, double var) {
    const double ev = t * t * var;
    for (Index r = 0; r < m.rows(); ++r)
      for (Index c = 0; c < m.cols(); ++c) m(r, c) += complex_normal(rng, {0.0, 0.0}, ev);
  };
  add_error(out.h_rs, ch.var_rs);
  add_error(out.h_ru1, ch.var_ru1);
  add_error(out.h_ru2, ch.var_ru2);
  for (std::size_t i = 0; i < out.h_re.size(); ++i) add_error(out.h_re[i], ch.var_re[i]);
  return out;
}

/// Row vector h^H Phi H_RS for a receive channel h.
inline CRowVector cascade(const CVector& h, const CMatrix& h_rs, const RVector& phases) {
  require(h.size() == h_rs.rows() && phases.size() == h_rs.rows(),
          "cascade: RIS dimension mismatch");
  CVector weighted(h.size());
  for (Index i = 0; i < h.size(); ++i) weighted(i) = std::conj(h(i)) * std::polar(1.0, phases(i));
  return weighted.transpose() * h_rs;
}

/// Index of the largest entry; ties resolve to the lowest index.
inline std::optional<std::size_t> argmax_index(const std::vector<double>& v) {
  if (v.empty()) return std::nullopt;
  std::size_t best = 0;
  for (std::size_t i = 1; i < v.size(); ++i)
    if (v[i] > v[best]) best = i;
  return best;
}

/// End-to-end gains ||h^H Phi H_RS w||^2 for both users and every eavesdropper. When a noise
/// beamforming matrix is supplied, h_e2[i] = ||h_REi^H Phi H_RS T||^2, otherwise zeros.
inline EffectiveGains effective_gains(const ChannelSet& ch, const RisConfig& ris,
                                      const CMatrix* noise_directions = nullptr) {
  require(ris.w.size() == ch.ns(), "effective_gains: beamformer length != Ns");
  require(ris.phases.size() == ch.nr(), "effective_gains: phase count != Nr");
  if (noise_directions != nullptr && noise_directions->cols() > 0)
    require(noise_directions->rows() == ch.ns(), "effective_gains: T must have Ns rows");

  EffectiveGains g;
  g.h1 = std::norm((cascade(ch.h_ru1, ch.h_rs, ris.phases) * ris.w)(0));
  g.h2 = std::norm((cascade(ch.h_ru2, ch.h_rs, ris.phases) * ris.w)(0));
  for (const auto& he : ch.h_re) {
    const CRowVector row = cascade(he, ch.h_rs, ris.phases);
    g.h_e1.push_back(std::norm((row * ris.w)(0)));
    if (noise_directions != nullptr && noise_directions->cols() > 0)
      g.h_e2.push_back((row * *noise_directions).squaredNorm());
    else
      g.h_e2.push_back(0.0);
  }
  g.strongest = argmax_index(g.h_e1);
  return g;
}

}  // namespace risnoma
