#pragma once

// Brute-force references for the power-allocation solvers. These re-derive everything from the
// SNR definitions and do not call into the solver code.

#include <algorithm>
#include <cmath>
#include <limits>

namespace risnoma::oracle {

struct Link {
  double h1, h2, he1, he2;
  double nv;  // AN columns
  double p, n0, g1, g2;  // linear power, noise, SNR thresholds
};

inline bool feasible(const Link& l, double psi, double alpha) {
  const double s = psi * l.p;
  const double g1x1 = l.h1 * (1.0 - alpha) * s / (l.h1 * alpha * s + l.n0);
  const double g2x2 = l.h2 * alpha * s / l.n0;
  return g1x1 >= l.g1 && g2x2 >= l.g2;
}

/// log2(1 + g2x2) - log2(1 + max(g1x2, gEx2)), no feasibility check.
inline double rate(const Link& l, double psi, double alpha) {
  const double s = alpha * psi * l.p;
  const double g2x2 = l.h2 * s / l.n0;
  const double g1x2 = l.h1 * s / l.n0;
  double worst = g1x2;
  if (l.nv > 0) worst = std::max(worst, l.he1 * s / ((1.0 - psi) * l.p * l.he2 / l.nv + l.n0));
  return std::log2(1.0 + g2x2) - std::log2(1.0 + worst);
}

/// Internal-only objective (h2 a P + N0) / (h1 a P + N0) maximized over a uniform alpha grid
/// restricted to the feasible set; returns the argmax (NaN when nothing is feasible).
inline double grid_alpha(const Link& l, double psi, int points) {
  double best_a = std::numeric_limits<double>::quiet_NaN();
  double best = -1.0;
  for (int i = 1; i < points; ++i) {
    const double a = static_cast<double>(i) / points;
    if (!feasible(l, psi, a)) continue;
    const double v = (l.h2 * a * psi * l.p + l.n0) / (l.h1 * a * psi * l.p + l.n0);
    if (v > best) {
      best = v;
      best_a = a;
    }
  }
  return best_a;
}

struct GridBest {
  double value = -std::numeric_limits<double>::infinity();
  double psi = 0.0, alpha = 0.0;
};

/// Max of the masked secrecy objective over an n x n grid of (psi, alpha) in (0,1] x (0,1).
inline GridBest grid_2d(const Link& l, int n) {
  GridBest b;
  for (int i = 1; i <= n; ++i) {
    const double psi = static_cast<double>(i) / n;
    for (int j = 0; j < n; ++j) {
      const double alpha = (j + 0.5) / n;
      if (!feasible(l, psi, alpha)) continue;
      const double v = rate(l, psi, alpha);
      if (v > b.value) b = {v, psi, alpha};
    }
  }
  return b;
}

/// Upper boundary of the feasible region: largest alpha meeting U1's constraint.
inline double upper_alpha(const Link& l, double psi) {
  return (l.h1 * psi * l.p - l.n0 * l.g1) / (l.h1 * psi * l.p * (1.0 + l.g1));
}

/// External-eavesdropper rate along the upper boundary.
inline double boundary_rate(const Link& l, double psi) {
  const double a = upper_alpha(l, psi);
  const double s = a * psi * l.p;
  return std::log2(1.0 + l.h2 * s / l.n0) -
         std::log2(1.0 + l.he1 * s / ((1.0 - psi) * l.p * l.he2 / l.nv + l.n0));
}

/// Stationary point of boundary_rate on [lo, hi]: bisection on the sign of a central-difference
/// derivative. Returns NaN when the derivative does not change sign.
inline double boundary_stationary_point(const Link& l, double lo, double hi) {
  const auto slope = [&](double x) {
    const double h = 1e-7 * std::max(1e-3, std::min(x - lo, hi - x));
    return boundary_rate(l, x + h) - boundary_rate(l, x - h);
  };
  const int scan = 2000;
  double a = std::numeric_limits<double>::quiet_NaN(), b = a;
  double prev_x = lo + (hi - lo) * 1e-6;
  double prev = slope(prev_x);
  for (int i = 1; i <= scan; ++i) {
    const double x = lo + (hi - lo) * (static_cast<double>(i) / scan) * (1.0 - 2e-6) + (hi - lo) * 1e-6;
    const double s = slope(x);
    if (prev > 0.0 && s <= 0.0) {
      a = prev_x;
      b = x;
      break;
    }
    prev_x = x;
    prev = s;
  }
  if (std::isnan(a)) return a;
  for (int it = 0; it < 200 && b - a > 1e-15; ++it) {
    const double m = 0.5 * (a + b);
    if (slope(m) > 0.0)
      a = m;
    else
      b = m;
  }
  return 0.5 * (a + b);
}

}  // namespace risnoma::oracle
