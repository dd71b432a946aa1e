#pragma once

// Power sharing between the two NOMA symbols (alpha) and between signal and artificial noise
// (psi). All solvers take scalar effective gains; only the strongest external eavesdropper
// enters the allocation.

#include "risnoma/model.hpp"

#include <algorithm>
#include <array>
#include <limits>
#include <optional>
#include <vector>

namespace risnoma {

enum class BindingCase { internal, no_csi, case_I, case_II, case_III, infeasible };

inline const char* to_string(BindingCase c) {
  switch (c) {
    case BindingCase::internal: return "internal";
    case BindingCase::no_csi: return "no_csi";
    case BindingCase::case_I: return "case_I";
    case BindingCase::case_II: return "case_II";
    case BindingCase::case_III: return "case_III";
    case BindingCase::infeasible: return "infeasible";
  }
  return "?";
}

struct PowerSplit {
  double alpha = 0.5;  // share of signal power carried by x2 (far user)
  double psi = 1.0;    // share of total power carried by the signal (rest is AN)
  bool feasible = false;
  BindingCase binding_case = BindingCase::infeasible;
  // Set when the closed-form stationary point disagreed with the numeric one and was replaced.
  bool g_formula_mismatch = false;
};

/// Gains seen by the allocation: both users and the strongest external eavesdropper.
struct SecrecyGains {
  double h1 = 0.0;
  double h2 = 0.0;
  double h_e1 = 0.0;
  double h_e2 = 0.0;
};

/// A point (psi, alpha) of the allocation plane.
struct RegionPoint {
  double psi = 0.0;
  double alpha = 0.0;
};

struct RegionPoints {
  RegionPoint a;  // upper boundary at psi = O_bound
  RegionPoint b;  // lower boundary at psi = 1
  RegionPoint c;  // upper boundary at psi = 1
  RegionPoint d;  // intersection of the two boundaries
  std::optional<RegionPoint> g;  // stationary point on the upper boundary, if it exists
  double o_bound = std::numeric_limits<double>::infinity();
};

/// Relative slack when testing the minimum-rate constraints.
inline constexpr double constraint_slack = 1e-9;

/// Largest alpha meeting U1's rate constraint at this psi.
inline double alpha_upper(double psi, double h1, const SystemConfig& cfg) {
  const double p = cfg.power();
  const double g1 = cfg.gamma1_th();
  return (h1 * psi * p - cfg.noise() * g1) / (h1 * psi * p * (1.0 + g1));
}

/// Smallest alpha meeting U2's rate constraint at this psi.
inline double alpha_lower(double psi, double h2, const SystemConfig& cfg) {
  return cfg.noise() * cfg.gamma2_th() / (h2 * psi * cfg.power());
}

inline bool meets_rate_constraints(double psi, double alpha, double h1, double h2,
                                   const SystemConfig& cfg) {
  if (!(psi > 0.0 && psi <= 1.0 && alpha >= 0.0 && alpha <= 1.0)) return false;
  const double p = cfg.power();
  const double n0 = cfg.noise();
  const double g1x1 = h1 * (1.0 - alpha) * psi * p / (h1 * alpha * psi * p + n0);
  const double g2x2 = h2 * alpha * psi * p / n0;
  return g1x1 >= cfg.gamma1_th() * (1.0 - constraint_slack) &&
         g2x2 >= cfg.gamma2_th() * (1.0 - constraint_slack);
}

/// log2(1 + g2x2) - log2(1 + max(g1x2, gEx2)) without the feasibility mask.
inline double secrecy_value(double psi, double alpha, const SecrecyGains& g, Index nv,
                            const SystemConfig& cfg) {
  const double p = cfg.power();
  const double n0 = cfg.noise();
  const double s = alpha * psi * p;
  const double an = nv > 0 ? (1.0 - psi) * p * g.h_e2 / static_cast<double>(nv) : 0.0;
  const double g2x2 = g.h2 * s / n0;
  const double g1x2 = g.h1 * s / n0;
  const double gex2 = g.h_e1 * s / (an + n0);
  return std::log2(1.0 + g2x2) - std::log2(1.0 + std::max(g1x2, gex2));
}

/// Secrecy objective over the allocation plane: the rate difference inside the feasible region,
/// zero outside it.
inline double secrecy_objective(double psi, double alpha, const SecrecyGains& g, Index nv,
                                const SystemConfig& cfg) {
  if (!meets_rate_constraints(psi, alpha, g.h1, g.h2, cfg)) return 0.0;
  return secrecy_value(psi, alpha, g, nv, cfg);
}

namespace detail {

inline double clamp_open_unit(double a) {
  if (!std::isfinite(a)) return 0.5;
  return std::clamp(a, 1e-9, 1.0 - 1e-9);
}

inline bool at_least(double lhs, double rhs) { return lhs >= rhs - 1e-12 * std::abs(rhs); }

}  // namespace detail

/// Internal-eavesdropper allocation with psi = 1: the objective grows with alpha, so the optimum
/// sits on U1's rate constraint.
inline PowerSplit solve_internal(double h1, double h2, const SystemConfig& cfg) {
  require(h1 > 0.0 && h2 > 0.0, "solve_internal: gains must be > 0");
  const double p = cfg.power();
  const double n0 = cfg.noise();
  const double g1 = cfg.gamma1_th();
  const double g2 = cfg.gamma2_th();
  const double threshold = (g1 + 1.0) * n0 * g2 / h2 + g1 * n0 / h1;
  PowerSplit s;
  s.psi = 1.0;
  s.alpha = (h1 * p - g1 * n0) / (h1 * p * (g1 + 1.0));
  s.feasible = detail::at_least(p, threshold);
  s.binding_case = s.feasible ? BindingCase::internal : BindingCase::infeasible;
  if (!s.feasible) s.alpha = detail::clamp_open_unit(s.alpha);
  return s;
}

/// Allocation with a prescribed signal share psi (no eavesdropper CSI).
inline PowerSplit solve_no_csi(double h1, double h2, double psi, const SystemConfig& cfg) {
  require(psi > 0.0 && psi <= 1.0, "solve_no_csi: psi must lie in (0, 1]");
  require(h1 > 0.0 && h2 > 0.0, "solve_no_csi: gains must be > 0");
  const double p = cfg.power();
  const double n0 = cfg.noise();
  const double g1 = cfg.gamma1_th();
  const double g2 = cfg.gamma2_th();
  const double threshold = (g1 + 1.0) * n0 * g2 / (h2 * psi) + g1 * n0 / (h1 * psi);
  PowerSplit s;
  s.psi = psi;
  s.alpha = (h1 * psi * p - g1 * n0) / (h1 * psi * p * (g1 + 1.0));
  s.feasible = detail::at_least(p, threshold);
  s.binding_case = s.feasible ? BindingCase::no_csi : BindingCase::infeasible;
  if (!s.feasible) s.alpha = detail::clamp_open_unit(s.alpha);
  return s;
}

/// psi at which the internal and the external eavesdropper SNRs coincide. Above it the external
/// eavesdropper dominates. Infinite when no AN reaches the eavesdropper.
inline double o_bound(const SecrecyGains& g, Index nv, const SystemConfig& cfg) {
  if (!(g.h_e2 > 0.0) || nv <= 0) return std::numeric_limits<double>::infinity();
  const double p = cfg.power();
  const double n0 = cfg.noise();
  const double v = static_cast<double>(nv);
  return ((g.h1 - g.h_e1) * v * n0 + p * g.h1 * g.h_e2) / (p * g.h1 * g.h_e2);
}

/// Closed-form stationary point of the external-eavesdropper objective along the upper boundary.
inline std::optional<RegionPoint> stationary_point_formula(const SecrecyGains& g, Index nv,
                                                           const SystemConfig& cfg) {
  if (!(g.h_e2 > 0.0) || nv <= 0) return std::nullopt;
  const double p = cfg.power();
  const double n0 = cfg.noise();
  const double g1 = cfg.gamma1_th();
  const double v = static_cast<double>(nv);
  const double h1 = g.h1, h2 = g.h2, he1 = g.h_e1, he2 = g.h_e2;

  const double disc_x = h2 * he1 * he2 * (1.0 + g1) * v * ((-n0 * g1 + h1 * p) * he2 + n0 * h1 * v) *
                        (he2 * ((-n0 * g1 + h1 * p) * h2 + n0 * h1 * (1.0 + g1)) + n0 * h1 * (h2 - he1) * v);
  const double den_x = h2 * p * he2 * h1 * ((-g1 - 1.0) * he2 + he1 * v);
  if (disc_x < 0.0 || den_x == 0.0) return std::nullopt;
  const double gx = (-p * h1 * h2 * (1.0 + g1) * he2 * he2 -
                     h2 * ((1.0 + g1) * h1 - he1 * g1) * v * n0 * he2 + std::sqrt(disc_x)) /
                    den_x;

  const double disc_y = (1.0 + g1) * he1 * h2 * he2 * v * ((v * n0 + p * he2) * h1 - n0 * he2 * g1) *
                        (h1 * ((he2 * g1 + he2 + v * h2 - he1 * v) * n0 + p * h2 * he2) - n0 * g1 * h2 * he2);
  if (disc_y < 0.0) return std::nullopt;
  const double root_y = std::sqrt(disc_y);
  const double num_y = -h2 * (1.0 + g1) * (-n0 * g1 + h1 * p) * he2 * he2 - n0 * h1 * h2 * he2 * (1.0 + g1) * v + root_y;
  const double den_y = (1.0 + g1) * (-p * h1 * h2 * (1.0 + g1) * he2 * he2 -
                                     h2 * n0 * he2 * v * ((h1 - he1) * g1 + h1) + root_y);
  if (den_y == 0.0) return std::nullopt;
  const RegionPoint pt{gx, num_y / den_y};
  if (!std::isfinite(pt.psi) || !std::isfinite(pt.alpha)) return std::nullopt;
  return pt;
}

/// Corner and stationary points of the feasible region for the CSI-aware allocation.
inline RegionPoints region_points(const SecrecyGains& g, Index nv, const SystemConfig& cfg) {
  require(g.h1 > 0.0 && g.h2 > 0.0, "region_points: user gains must be > 0");
  const double p = cfg.power();
  const double n0 = cfg.noise();
  const double g1 = cfg.gamma1_th();
  const double g2 = cfg.gamma2_th();
  const double h1 = g.h1, h2 = g.h2;
  RegionPoints r;
  r.b = {1.0, n0 * g2 / (h2 * p)};
  r.c = {1.0, (p * h1 - n0 * g1) / (h1 * p * (1.0 + g1))};
  const double dn = g2 * (1.0 + g1) * h1 + h2 * g1;
  r.d = {dn * n0 / (h1 * h2 * p), g2 * h1 / dn};
  r.o_bound = o_bound(g, nv, cfg);
  if (std::isfinite(r.o_bound)) {
    const double v = static_cast<double>(nv);
    const double base = (h1 - g.h_e1) * v * n0 + p * h1 * g.h_e2;
    r.a = {r.o_bound, ((v * h1 - v * g.h_e1 - g.h_e2 * g1) * n0 + p * h1 * g.h_e2) / (base * (1.0 + g1))};
  } else {
    r.a = r.c;
  }
  r.g = stationary_point_formula(g, nv, cfg);
  return r;
}

namespace detail {

/// Maximizes f(x) on [lo, hi] by a uniform scan followed by golden-section refinement around the
/// best sample. Returns the argmax.
template <class F>
double maximize_on_interval(F&& f, double lo, double hi, int samples = 512) {
  if (!(hi > lo)) return lo;
  double best_x = lo;
  double best_f = f(lo);
  int best_i = 0;
  for (int i = 1; i <= samples; ++i) {
    const double x = lo + (hi - lo) * static_cast<double>(i) / samples;
    const double fx = f(x);
    if (fx > best_f) {
      best_f = fx;
      best_x = x;
      best_i = i;
    }
  }
  double a = lo + (hi - lo) * std::max(0, best_i - 1) / samples;
  double b = lo + (hi - lo) * std::min(samples, best_i + 1) / samples;
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double x1 = b - inv_phi * (b - a);
  double x2 = a + inv_phi * (b - a);
  double f1 = f(x1), f2 = f(x2);
  for (int it = 0; it < 200 && (b - a) > 1e-14 * std::max(1.0, std::abs(b)); ++it) {
    if (f1 < f2) {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + inv_phi * (b - a);
      f2 = f(x2);
    } else {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - inv_phi * (b - a);
      f1 = f(x1);
    }
  }
  const double mid = 0.5 * (a + b);
  return f(mid) >= best_f ? mid : best_x;
}

}  // namespace detail

/// Numeric maximizer of the external-eavesdropper objective along the upper boundary on [lo, hi].
inline RegionPoint upper_boundary_maximizer(const SecrecyGains& g, Index nv, const SystemConfig& cfg,
                                            double lo, double hi) {
  const double p = cfg.power();
  const double n0 = cfg.noise();
  const double v = static_cast<double>(std::max<Index>(nv, 1));
  const auto external = [&](double psi) {
    const double alpha = alpha_upper(psi, g.h1, cfg);
    const double s = alpha * psi * p;
    const double an = (1.0 - psi) * p * g.h_e2 / v;
    return std::log2(1.0 + g.h2 * s / n0) - std::log2(1.0 + g.h_e1 * s / (an + n0));
  };
  const double psi = detail::maximize_on_interval(external, lo, hi);
  return {psi, alpha_upper(psi, g.h1, cfg)};
}

/// Joint (psi, alpha) allocation against the internal eavesdropper and the strongest external
/// one. The case is picked by O_bound:
///   O_bound >= 1           internal dominates everywhere -> C
///   O_bound <= D_x         external dominates            -> G if G_x in [D_x, 1] else best of D, C
///   D_x < O_bound < 1      split at psi = O_bound        -> best of A and (G if G_x in [O_bound, 1]
///                                                           else best of A, C)
/// The returned point is the best f_R among the case's candidates and the region corners.
inline PowerSplit solve_with_csi(const SecrecyGains& g, Index nv, const SystemConfig& cfg) {
  require(g.h1 > 0.0 && g.h2 > 0.0, "solve_with_csi: user gains must be > 0");
  require(g.h_e1 >= 0.0 && g.h_e2 >= 0.0, "solve_with_csi: eavesdropper gains must be >= 0");
  const RegionPoints r = region_points(g, nv, cfg);

  PowerSplit s;
  if (!detail::at_least(r.c.alpha, r.b.alpha)) {
    s.alpha = detail::clamp_open_unit(r.c.alpha);
    s.psi = 1.0;
    s.feasible = false;
    s.binding_case = BindingCase::infeasible;
    return s;
  }
  s.feasible = true;

  const auto f = [&](const RegionPoint& pt) { return secrecy_objective(pt.psi, pt.alpha, g, nv, cfg); };
  const auto better = [&](const RegionPoint& x, const RegionPoint& y) { return f(y) > f(x) ? y : x; };

  // Stationary point on the upper boundary within [lo, 1]; the numeric maximizer replaces the
  // closed form when the two disagree.
  const auto stationary_in = [&](double lo) -> std::optional<RegionPoint> {
    std::optional<RegionPoint> formula = r.g;
    const RegionPoint numeric = upper_boundary_maximizer(g, nv, cfg, lo, 1.0);
    const bool numeric_interior = numeric.psi > lo + 1e-9 && numeric.psi < 1.0 - 1e-9;
    if (formula && formula->psi >= lo && formula->psi <= 1.0) {
      if (numeric_interior && std::abs(formula->psi - numeric.psi) > 1e-6) {
        s.g_formula_mismatch = true;
        return numeric;
      }
      return formula;
    }
    if (numeric_interior) {
      s.g_formula_mismatch = formula.has_value();
      return numeric;
    }
    return std::nullopt;
  };

  RegionPoint chosen;
  const double ob = r.o_bound;
  if (!std::isfinite(ob) || ob >= 1.0) {
    s.binding_case = BindingCase::case_I;
    chosen = r.c;
  } else if (ob <= r.d.psi) {
    s.binding_case = BindingCase::case_II;
    const auto gp = stationary_in(r.d.psi);
    chosen = gp ? *gp : better(r.d, r.c);
  } else {
    s.binding_case = BindingCase::case_III;
    const auto gp = stationary_in(ob);
    const RegionPoint upper_part = gp ? *gp : better(r.a, r.c);
    chosen = better(r.a, upper_part);
  }

  std::vector<RegionPoint> extra{r.c, r.d, r.b};
  if (s.binding_case == BindingCase::case_III) extra.push_back(r.a);
  if (std::isfinite(ob) && nv > 0) extra.push_back(upper_boundary_maximizer(g, nv, cfg, r.d.psi, 1.0));
  double best = f(chosen);
  for (const auto& pt : extra) {
    const double fp = f(pt);
    if (fp > best + 1e-12 * std::abs(best) && meets_rate_constraints(pt.psi, pt.alpha, g.h1, g.h2, cfg)) {
      best = fp;
      chosen = pt;
    }
  }
  s.psi = chosen.psi;
  s.alpha = chosen.alpha;
  return s;
}

}  // namespace risnoma
