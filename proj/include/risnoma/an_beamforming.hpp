#pragma once

// Noise beamforming matrices T whose columns lie in the null space of both users' cascaded
// channels, so artificial noise reaches only non-legitimate receivers.
//
// Orthogonality convention: the null condition is the bilinear c_j^T t = 0 with
// c_j = (h_RUj^H Phi H_RS)^T. Since c^T t = <conj(c), t>, every column is built
// Hermitian-orthogonal to span{conj(c_1), conj(c_2)}.

#include "risnoma/model.hpp"

#include <algorithm>
#include <array>
#include <numeric>
#include <span>
#include <vector>

namespace risnoma {

enum class AnMode { none, blind, csi_case1, csi_case2 };

inline const char* to_string(AnMode m) {
  switch (m) {
    case AnMode::none: return "none";
    case AnMode::blind: return "blind";
    case AnMode::csi_case1: return "csi_case1";
    case AnMode::csi_case2: return "csi_case2";
  }
  return "?";
}

struct AnBeamformer {
  CMatrix t;  // Ns x Nv, unit-norm columns
  AnMode mode = AnMode::none;
  // Eavesdropper index each column targets (CSI modes only).
  std::vector<std::size_t> targets;

  Index nv() const { return t.cols(); }
};

/// Relative singular-value threshold for rank decisions.
inline constexpr double rank_tolerance = 1e-10;

inline Index numeric_rank(const CMatrix& a, double rel_tol = rank_tolerance) {
  if (a.size() == 0) return 0;
  Eigen::JacobiSVD<CMatrix> svd(a);
  const RVector& sv = svd.singularValues();
  if (sv.size() == 0 || !(sv(0) > 0.0)) return 0;
  Index r = 0;
  for (Index i = 0; i < sv.size(); ++i)
    if (sv(i) > rel_tol * sv(0)) ++r;
  return r;
}

namespace detail {

inline CMatrix stack_columns(std::span<const CVector> vs, Index rows) {
  CMatrix m(rows, static_cast<Index>(vs.size()));
  for (std::size_t i = 0; i < vs.size(); ++i) m.col(static_cast<Index>(i)) = vs[i];
  return m;
}

/// Removes the components of v along the orthonormal columns of q (two passes).
inline CVector project_out(CVector v, const std::vector<CVector>& q) {
  for (int pass = 0; pass < 2; ++pass)
    for (const auto& b : q) v -= b * b.dot(v);
  return v;
}

/// Orthonormal basis (Hermitian product) of span(vs); dependent vectors are dropped.
inline std::vector<CVector> orthonormal_basis(std::span<const CVector> vs) {
  std::vector<CVector> q;
  for (const auto& v : vs) {
    const double scale = v.norm();
    if (!(scale > 0.0)) continue;
    CVector r = project_out(v, q);
    const double n = r.norm();
    if (n > rank_tolerance * scale) q.push_back(r / n);
  }
  return q;
}

inline std::vector<CVector> conjugated(std::span<const CVector> vs) {
  std::vector<CVector> out;
  out.reserve(vs.size());
  for (const auto& v : vs) out.push_back(v.conjugate());
  return out;
}

/// One random unit vector Hermitian-orthogonal to the orthonormal set q.
inline CVector random_orthogonal_unit(Index ns, const std::vector<CVector>& q, Rng& rng) {
  for (int attempt = 0; attempt < 64; ++attempt) {
    const CVector p = complex_normal_vector(rng, ns);
    const CVector r = project_out(p, q);
    const double n = r.norm();
    if (n > rank_tolerance * p.norm()) return r / n;
  }
  throw DegenerateChannel("no direction left outside the constrained subspace");
}

}  // namespace detail

/// Null-space matrix without eavesdropper CSI: Nv random directions, checked to be independent of
/// the constraint vectors, then Gram-Schmidt orthonormalized against conj(c_j) and each other.
inline CMatrix blind_null_space(std::span<const CVector> constraints, Index ns, Index nv, Rng& rng) {
  require(ns >= 1 && nv >= 0, "blind_null_space: invalid dimensions");
  for (const auto& c : constraints) require(c.size() == ns, "blind_null_space: constraint length != Ns");
  if (nv == 0) return CMatrix(ns, 0);

  const std::vector<CVector> conj_c = detail::conjugated(constraints);
  const std::vector<CVector> basis = detail::orthonormal_basis(conj_c);
  require(static_cast<Index>(basis.size()) + nv <= ns, "blind_null_space: null space too small for Nv");
  const Index c_rank = numeric_rank(detail::stack_columns(conj_c, ns));

  for (int attempt = 0; attempt < 64; ++attempt) {
    std::vector<CVector> all = conj_c;
    for (Index i = 0; i < nv; ++i) all.push_back(complex_normal_vector(rng, ns));
    if (numeric_rank(detail::stack_columns(all, ns)) != c_rank + nv) continue;

    std::vector<CVector> q = basis;
    CMatrix t(ns, nv);
    bool ok = true;
    for (Index i = 0; i < nv && ok; ++i) {
      const CVector& p = all[conj_c.size() + static_cast<std::size_t>(i)];
      const CVector r = detail::project_out(p, q);
      const double n = r.norm();
      ok = n > rank_tolerance * p.norm();
      if (ok) {
        t.col(i) = r / n;
        q.push_back(t.col(i));
      }
    }
    if (ok) return t;
  }
  throw DegenerateChannel("blind_null_space: could not draw independent directions");
}

/// Columns that maximize |d_i^T t_i| subject to c_j^T t_i = 0: with d_i = omega_i + k_i1 c_1 +
/// k_i2 c_2 and omega_i Hermitian-orthogonal to span{c_1, c_2}, t_i = conj(omega_i)/||omega_i||,
/// so that d_i^T t_i = ||omega_i||. A direction lying in span{c_1, c_2} gets a blind column.
/// Columns are not mutually orthogonalized.
inline CMatrix projected_null_space(std::span<const CVector> constraints,
                                    std::span<const CVector> directions, Index ns, Rng& rng) {
  for (const auto& c : constraints) require(c.size() == ns, "projected_null_space: constraint length != Ns");
  const std::vector<CVector> c_basis = detail::orthonormal_basis(constraints);
  const std::vector<CVector> conj_basis = detail::orthonormal_basis(detail::conjugated(constraints));
  CMatrix t(ns, static_cast<Index>(directions.size()));
  for (std::size_t i = 0; i < directions.size(); ++i) {
    const CVector& d = directions[i];
    require(d.size() == ns, "projected_null_space: direction length != Ns");
    const CVector omega = detail::project_out(d, c_basis);
    const double n = omega.norm();
    const Index col = static_cast<Index>(i);
    if (d.norm() > 0.0 && n > rank_tolerance * d.norm())
      t.col(col) = omega.conjugate() / n;
    else
      t.col(col) = detail::random_orthogonal_unit(ns, conj_basis, rng);
  }
  return t;
}

/// Case-II selection: candidates sorted by descending signal gain (stable, so ties keep the lower
/// index), then greedily kept while they raise Rank(c_1, c_2, selected...). Slots left over once
/// no candidate raises the rank are filled in sorted order.
inline std::vector<std::size_t> select_directions(std::span<const CVector> constraints,
                                                  std::span<const CVector> directions,
                                                  std::span<const double> signal_gain, Index ns,
                                                  Index count) {
  require(directions.size() == signal_gain.size(), "select_directions: size mismatch");
  std::vector<std::size_t> order(directions.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return signal_gain[a] > signal_gain[b]; });

  std::vector<CVector> current(constraints.begin(), constraints.end());
  Index rank = numeric_rank(detail::stack_columns(current, ns));
  std::vector<std::size_t> selected;
  std::vector<bool> used(directions.size(), false);
  for (std::size_t idx : order) {
    if (static_cast<Index>(selected.size()) == count) break;
    current.push_back(directions[idx]);
    const Index r = numeric_rank(detail::stack_columns(current, ns));
    if (r > rank) {
      rank = r;
      selected.push_back(idx);
      used[idx] = true;
    } else {
      current.pop_back();
    }
  }
  for (std::size_t idx : order) {
    if (static_cast<Index>(selected.size()) == count) break;
    if (!used[idx]) {
      selected.push_back(idx);
      used[idx] = true;
    }
  }
  return selected;
}

struct CascadedChannels {
  std::vector<CVector> users;          // c_1, c_2
  std::vector<CVector> eavesdroppers;  // d_i
};

inline CascadedChannels cascaded_channels(const ChannelSet& ch, const RisConfig& ris) {
  CascadedChannels out;
  out.users.push_back(cascade(ch.h_ru1, ch.h_rs, ris.phases).transpose());
  out.users.push_back(cascade(ch.h_ru2, ch.h_rs, ris.phases).transpose());
  for (const auto& he : ch.h_re) out.eavesdroppers.push_back(cascade(he, ch.h_rs, ris.phases).transpose());
  return out;
}

/// Noise beamforming without eavesdropper CSI (Nv = Ns - 2). Ns == 2 disables AN.
inline AnBeamformer blind_noise_beamformer(const ChannelSet& ch, const RisConfig& ris, Rng& rng) {
  const Index ns = ch.ns();
  require(ns >= 2, "blind noise beamforming needs Ns >= 2");
  AnBeamformer an;
  if (ns == 2) {
    an.t = CMatrix(ns, 0);
    return an;
  }
  const CascadedChannels cc = cascaded_channels(ch, ris);
  an.t = blind_null_space(cc.users, ns, ns - 2, rng);
  an.mode = AnMode::blind;
  return an;
}

/// Noise beamforming with eavesdropper CSI. Case I (M <= Ns - 2): one column per eavesdropper.
/// Case II (M > Ns - 2): Ns - 2 columns for the rank-preserving selection of the strongest ones.
inline AnBeamformer csi_noise_beamformer(const ChannelSet& ch, const RisConfig& ris, Rng& rng) {
  const Index ns = ch.ns();
  const Index m = ch.m();
  require(m >= 1, "CSI noise beamforming needs at least one eavesdropper");
  require(ns >= 3, "CSI noise beamforming needs Ns >= 3");
  const CascadedChannels cc = cascaded_channels(ch, ris);

  AnBeamformer an;
  if (m <= ns - 2) {
    an.mode = AnMode::csi_case1;
    an.targets.resize(static_cast<std::size_t>(m));
    std::iota(an.targets.begin(), an.targets.end(), std::size_t{0});
  } else {
    an.mode = AnMode::csi_case2;
    std::vector<double> gain;
    for (const auto& d : cc.eavesdroppers) gain.push_back(std::norm((d.transpose() * ris.w).value()));
    an.targets = select_directions(cc.users, cc.eavesdroppers, gain, ns, ns - 2);
  }
  std::vector<CVector> chosen;
  for (std::size_t idx : an.targets) chosen.push_back(cc.eavesdroppers[idx]);
  an.t = projected_null_space(cc.users, chosen, ns, rng);
  return an;
}

struct AnLeakage {
  std::array<double, 2> users{0.0, 0.0};
  std::vector<double> eavesdroppers;
};

/// Received AN power ((1 - psi) P / Nv) * ||h^H Phi H_RS T||^2 at each user and eavesdropper.
inline AnLeakage an_leakage(const ChannelSet& ch, const RisConfig& ris, const AnBeamformer& an,
                            double psi, const SystemConfig& cfg) {
  require(psi > 0.0 && psi <= 1.0, "an_leakage: psi must lie in (0, 1]");
  require(an.nv() > 0 || psi == 1.0, "an_leakage: AN power allocated but no AN directions");
  AnLeakage out;
  if (an.nv() == 0) {
    out.eavesdroppers.assign(static_cast<std::size_t>(ch.m()), 0.0);
    return out;
  }
  require(an.t.rows() == ch.ns(), "an_leakage: T must have Ns rows");
  const double per_column = (1.0 - psi) * cfg.power() / static_cast<double>(an.nv());
  out.users[0] = per_column * (cascade(ch.h_ru1, ch.h_rs, ris.phases) * an.t).squaredNorm();
  out.users[1] = per_column * (cascade(ch.h_ru2, ch.h_rs, ris.phases) * an.t).squaredNorm();
  for (const auto& he : ch.h_re)
    out.eavesdroppers.push_back(per_column * (cascade(he, ch.h_rs, ris.phases) * an.t).squaredNorm());
  return out;
}

}  // namespace risnoma
