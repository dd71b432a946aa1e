#pragma once

// SNR and secrecy-rate evaluation, the named scheme registry and Monte Carlo estimators for the
// secrecy outage probability and the average secrecy rate.

#include "risnoma/an_beamforming.hpp"
#include "risnoma/beamforming.hpp"
#include "risnoma/model.hpp"
#include "risnoma/power_allocation.hpp"
#include "risnoma/rng.hpp"

#include <array>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

namespace risnoma {

struct SnrSet {
  double g1_x1 = 0.0;
  double g2_x1 = 0.0;
  double g1_x2 = 0.0;
  double g2_x2 = 0.0;
  std::vector<double> ge_x2;
};

/// SNRs with the signal share psi and equal-power AN over Nv directions. With psi = 1 (or no AN)
/// these reduce to the AN-free expressions.
inline SnrSet snrs(const EffectiveGains& gains, const PowerSplit& split, Index nv,
                   const SystemConfig& cfg) {
  const double p = cfg.power();
  const double n0 = cfg.noise();
  const double a = split.alpha;
  const double sp = split.psi * p;
  SnrSet s;
  s.g1_x1 = gains.h1 * (1.0 - a) * sp / (gains.h1 * a * sp + n0);
  s.g2_x1 = gains.h2 * (1.0 - a) * sp / (gains.h2 * a * sp + n0);
  s.g1_x2 = gains.h1 * a * sp / n0;
  s.g2_x2 = gains.h2 * a * sp / n0;
  const double an_per_column = nv > 0 ? (1.0 - split.psi) * p / static_cast<double>(nv) : 0.0;
  for (std::size_t i = 0; i < gains.h_e1.size(); ++i) {
    const double he2 = i < gains.h_e2.size() ? gains.h_e2[i] : 0.0;
    s.ge_x2.push_back(gains.h_e1[i] * a * sp / (an_per_column * he2 + n0));
  }
  return s;
}

/// max(0, log2(1 + g2_x2) - log2(1 + g1_x2)).
inline double secrecy_rate_internal(const SnrSet& s) {
  return std::max(0.0, std::log2(1.0 + s.g2_x2) - std::log2(1.0 + s.g1_x2));
}

/// Like secrecy_rate_internal but the eavesdropping SNR is the largest of g1_x2 and every
/// external eavesdropper's SNR.
inline double secrecy_rate_external(const SnrSet& s) {
  double worst = s.g1_x2;
  for (double g : s.ge_x2) worst = std::max(worst, g);
  return std::max(0.0, std::log2(1.0 + s.g2_x2) - std::log2(1.0 + worst));
}

enum class Scheme {
  proposed_internal,
  scheme2,
  proposed_no_csi,
  scheme3,
  proposed_csi,
  scheme4,
  scheme5,
  scheme6,
  baseline_alg4,
};

inline constexpr std::array<std::pair<Scheme, std::string_view>, 9> scheme_names{{
    {Scheme::proposed_internal, "proposed_internal"},
    {Scheme::scheme2, "scheme2"},
    {Scheme::proposed_no_csi, "proposed_no_csi"},
    {Scheme::scheme3, "scheme3"},
    {Scheme::proposed_csi, "proposed_csi"},
    {Scheme::scheme4, "scheme4"},
    {Scheme::scheme5, "scheme5"},
    {Scheme::scheme6, "scheme6"},
    {Scheme::baseline_alg4, "baseline_alg4"},
}};

inline std::string_view to_string(Scheme s) {
  for (const auto& [id, name] : scheme_names)
    if (id == s) return name;
  return "?";
}

inline Scheme parse_scheme(std::string_view name) {
  for (const auto& [id, n] : scheme_names)
    if (n == name) return id;
  throw DomainError("unknown scheme id '" + std::string(name) + "'");
}

/// Schemes whose allocation needs the strongest external eavesdropper.
inline bool needs_eavesdroppers(Scheme s) {
  return s == Scheme::proposed_csi || s == Scheme::scheme4 || s == Scheme::scheme6;
}

inline bool uses_artificial_noise(Scheme s) {
  return s == Scheme::proposed_no_csi || s == Scheme::scheme3 || needs_eavesdroppers(s);
}

/// Throws DomainError if the scheme cannot run with these dimensions.
inline void check_scheme(Scheme s, int ns, int m) {
  if (needs_eavesdroppers(s) && m < 1)
    throw DomainError(std::string(to_string(s)) + " needs at least one external eavesdropper (M >= 1)");
  if (uses_artificial_noise(s) && ns < 3)
    throw DomainError(std::string(to_string(s)) + " uses artificial noise and needs Ns >= 3");
}

struct SchemeOptions {
  double psi = 0.5;          // prescribed signal share for the no-CSI schemes
  double fixed_alpha = 0.05;  // schemes 2, 3, 6
  double fixed_psi = 0.5;     // scheme 6
};

/// Everything a scheme decides from (possibly estimated) channels.
struct Design {
  RisConfig ris;
  AnBeamformer an;
  PowerSplit split;
  int iterations = 0;
};

struct ScenarioResult {
  double secrecy_rate = 0.0;
  bool outage = false;  // h1 >= h2 or no feasible allocation; the rate is then 0
  SnrSet snrs;
  PowerSplit split;
  int iterations = 0;
  EffectiveGains gains;
};

namespace detail {

inline PowerSplit fixed_split(double alpha, double psi, const EffectiveGains& g, const SystemConfig& cfg) {
  PowerSplit s;
  s.alpha = alpha;
  s.psi = psi;
  s.feasible = meets_rate_constraints(psi, alpha, g.h1, g.h2, cfg);
  s.binding_case = s.feasible ? (psi == 1.0 ? BindingCase::internal : BindingCase::no_csi)
                              : BindingCase::infeasible;
  return s;
}

inline PowerSplit infeasible_split(double psi) {
  PowerSplit s;
  s.psi = psi;
  return s;
}

}  // namespace detail

/// Runs a scheme's beamforming, noise beamforming and power allocation on the given channels.
/// `an_rng` feeds the random directions of the blind null-space construction.
inline Design design_scheme(Scheme scheme, const ChannelSet& ch, const SystemConfig& cfg,
                            const SchemeOptions& opts, Rng& an_rng) {
  check_scheme(scheme, static_cast<int>(ch.ns()), static_cast<int>(ch.m()));
  Design d;
  if (scheme == Scheme::baseline_alg4) {
    d.ris = no_beamforming(static_cast<int>(ch.nr()), static_cast<int>(ch.ns()));
  } else {
    try {
      auto bf = alternating_optimization(ch, User::far, cfg);
      d.ris = std::move(bf.ris);
      d.iterations = bf.trace.iterations;
    } catch (const DegenerateChannel&) {
      // Far user's cascade is identically zero: nothing to align.
      d.ris = no_beamforming(static_cast<int>(ch.nr()), static_cast<int>(ch.ns()));
    }
  }

  switch (scheme) {
    case Scheme::proposed_no_csi:
    case Scheme::scheme3:
    case Scheme::scheme4:
      d.an = blind_noise_beamformer(ch, d.ris, an_rng);
      break;
    case Scheme::proposed_csi:
    case Scheme::scheme6:
      d.an = csi_noise_beamformer(ch, d.ris, an_rng);
      break;
    default:
      d.an.t = CMatrix(ch.ns(), 0);
      break;
  }

  const EffectiveGains g = effective_gains(ch, d.ris, &d.an.t);
  const bool usable = g.h1 > 0.0 && g.h2 > 0.0;
  switch (scheme) {
    case Scheme::proposed_internal:
    case Scheme::scheme5:
    case Scheme::baseline_alg4:
      d.split = usable ? solve_internal(g.h1, g.h2, cfg) : detail::infeasible_split(1.0);
      break;
    case Scheme::scheme2:
      d.split = detail::fixed_split(opts.fixed_alpha, 1.0, g, cfg);
      break;
    case Scheme::proposed_no_csi:
      d.split = usable ? solve_no_csi(g.h1, g.h2, opts.psi, cfg) : detail::infeasible_split(opts.psi);
      break;
    case Scheme::scheme3:
      d.split = detail::fixed_split(opts.fixed_alpha, opts.psi, g, cfg);
      break;
    case Scheme::proposed_csi:
    case Scheme::scheme4: {
      const std::size_t e = g.strongest.value();
      const SecrecyGains sg{g.h1, g.h2, g.h_e1[e], g.h_e2[e]};
      d.split = usable ? solve_with_csi(sg, d.an.nv(), cfg) : detail::infeasible_split(1.0);
      break;
    }
    case Scheme::scheme6:
      d.split = detail::fixed_split(opts.fixed_alpha, opts.fixed_psi, g, cfg);
      break;
  }
  return d;
}

/// Evaluates a design on the true channels. All external eavesdroppers count toward the
/// achieved secrecy rate.
inline ScenarioResult evaluate_design(const Design& d, const ChannelSet& ch, const SystemConfig& cfg) {
  ScenarioResult r;
  r.gains = effective_gains(ch, d.ris, &d.an.t);
  r.split = d.split;
  r.iterations = d.iterations;
  r.snrs = snrs(r.gains, d.split, d.an.nv(), cfg);
  r.outage = !d.split.feasible || r.gains.h1 >= r.gains.h2;
  r.secrecy_rate = r.outage ? 0.0 : secrecy_rate_external(r.snrs);
  return r;
}

inline ScenarioResult run_scheme(Scheme scheme, const ChannelSet& ch, const SystemConfig& cfg,
                                 const SchemeOptions& opts, Rng& an_rng) {
  return evaluate_design(design_scheme(scheme, ch, cfg, opts, an_rng), ch, cfg);
}

/// Sum with pairwise (cascade) reduction.
inline double pairwise_sum(std::span<const double> v) {
  if (v.size() <= 8) {
    double s = 0.0;
    for (double x : v) s += x;
    return s;
  }
  const std::size_t half = v.size() / 2;
  return pairwise_sum(v.first(half)) + pairwise_sum(v.subspan(half));
}

/// Evaluates fn(trial) for trial = 0..trials-1 on `workers` threads. Output order is by trial
/// index, so results do not depend on the worker count.
template <class Fn>
auto run_trials(std::size_t trials, unsigned workers, Fn&& fn) {
  using R = decltype(fn(std::size_t{0}));
  std::vector<R> out(trials);
  workers = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(std::max<std::size_t>(trials, 1))));
  if (workers == 1) {
    for (std::size_t i = 0; i < trials; ++i) out[i] = fn(i);
    return out;
  }
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(workers);
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (std::size_t i = w; i < trials; i += workers) out[i] = fn(i);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  return out;
}

/// Channels for one trial.
using ChannelSource = std::function<ChannelSet(std::uint64_t trial)>;

inline ChannelSource fixed_geometry_channels(const SystemConfig& cfg, const Geometry& geo,
                                             std::uint64_t seed) {
  return [cfg, geo, seed](std::uint64_t trial) {
    Rng rng = substream(seed, trial, StreamTag::channels);
    return sample_channels(cfg, geo, rng);
  };
}

struct AverageRate {
  double mean = 0.0;
  double std_error = 0.0;
  std::size_t outages = 0;
  std::size_t infeasible = 0;
  std::size_t trials = 0;
};

inline std::vector<ScenarioResult> simulate(Scheme scheme, const SystemConfig& cfg,
                                            const ChannelSource& channels, std::size_t trials,
                                            std::uint64_t seed, const SchemeOptions& opts = {},
                                            unsigned workers = 1) {
  require(trials >= 1, "trials must be >= 1");
  check_scheme(scheme, cfg.ns, cfg.m);
  return run_trials(trials, workers, [&](std::size_t i) {
    const ChannelSet ch = channels(i);
    Rng an_rng = substream(seed, i, StreamTag::noise_directions);
    return run_scheme(scheme, ch, cfg, opts, an_rng);
  });
}

/// Fraction of trials in which the near user's gain is at least the far user's after the
/// scheme's beamforming.
inline double estimate_sop(Scheme scheme, const SystemConfig& cfg, const ChannelSource& channels,
                           std::size_t trials, std::uint64_t seed, const SchemeOptions& opts = {},
                           unsigned workers = 1) {
  const auto results = simulate(scheme, cfg, channels, trials, seed, opts, workers);
  std::size_t events = 0;
  for (const auto& r : results) events += r.gains.h1 >= r.gains.h2 ? 1 : 0;
  return static_cast<double>(events) / static_cast<double>(trials);
}

inline double estimate_sop(Scheme scheme, const SystemConfig& cfg, const Geometry& geo,
                           std::size_t trials, std::uint64_t seed, unsigned workers = 1) {
  return estimate_sop(scheme, cfg, fixed_geometry_channels(cfg, geo, seed), trials, seed, {}, workers);
}

inline AverageRate summarize_rates(const std::vector<ScenarioResult>& results) {
  AverageRate a;
  a.trials = results.size();
  std::vector<double> rates;
  rates.reserve(results.size());
  for (const auto& r : results) {
    rates.push_back(r.secrecy_rate);
    a.outages += r.outage ? 1 : 0;
    a.infeasible += r.split.feasible ? 0 : 1;
  }
  const double n = static_cast<double>(rates.size());
  a.mean = pairwise_sum(rates) / n;
  if (rates.size() > 1) {
    std::vector<double> sq;
    sq.reserve(rates.size());
    for (double x : rates) sq.push_back((x - a.mean) * (x - a.mean));
    a.std_error = std::sqrt(pairwise_sum(sq) / (n - 1.0) / n);
  }
  return a;
}

/// Mean per-trial secrecy rate; infeasible and outage trials contribute 0.
inline AverageRate average_secrecy_rate(Scheme scheme, const SystemConfig& cfg,
                                        const ChannelSource& channels, std::size_t trials,
                                        std::uint64_t seed, const SchemeOptions& opts = {},
                                        unsigned workers = 1) {
  return summarize_rates(simulate(scheme, cfg, channels, trials, seed, opts, workers));
}

inline AverageRate average_secrecy_rate(Scheme scheme, const SystemConfig& cfg, const Geometry& geo,
                                        std::size_t trials, std::uint64_t seed,
                                        const SchemeOptions& opts = {}, unsigned workers = 1) {
  return average_secrecy_rate(scheme, cfg, fixed_geometry_channels(cfg, geo, seed), trials, seed,
                              opts, workers);
}

}  // namespace risnoma
