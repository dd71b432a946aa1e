#pragma once

// Sweep experiments: flat key-value configs, figure presets, per-trial geometry, Monte Carlo
// evaluation of several scheme series per sweep point and CSV output.

#include "risnoma/metrics.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

namespace risnoma {

/// Invalid experiment configuration. `key()` names the offending config key.
class ConfigError : public DomainError {
 public:
  ConfigError(std::string key, const std::string& message)
      : DomainError(key + ": " + message), key_(std::move(key)) {}
  const std::string& key() const { return key_; }

 private:
  std::string key_;
};

enum class Scenario { internal, external_no_csi, external_csi, dynamic_users, imperfect_csi };

inline constexpr std::array<std::pair<Scenario, std::string_view>, 5> scenario_names{{
    {Scenario::internal, "internal"},
    {Scenario::external_no_csi, "external_no_csi"},
    {Scenario::external_csi, "external_csi"},
    {Scenario::dynamic_users, "dynamic_users"},
    {Scenario::imperfect_csi, "imperfect_csi"},
}};

inline std::string_view to_string(Scenario s) {
  for (const auto& [id, name] : scenario_names)
    if (id == s) return name;
  return "?";
}

inline bool has_external_eavesdroppers(Scenario s) {
  return s == Scenario::external_no_csi || s == Scenario::external_csi || s == Scenario::dynamic_users;
}

inline bool scheme_allowed(Scenario scenario, Scheme scheme) {
  switch (scenario) {
    case Scenario::internal:
    case Scenario::imperfect_csi:
      return scheme == Scheme::proposed_internal || scheme == Scheme::scheme2 ||
             scheme == Scheme::scheme5 || scheme == Scheme::baseline_alg4;
    case Scenario::external_no_csi:
      return !needs_eavesdroppers(scheme);
    case Scenario::external_csi:
    case Scenario::dynamic_users:
      return true;
  }
  return false;
}

// Numeric parameters a config may set, with defaults.
struct ParamInfo {
  std::string_view key;
  double default_value;
  bool integer;
};

inline constexpr std::array<ParamInfo, 22> param_table{{
    {"Ns", 16, true},
    {"Nr", 16, true},
    {"M", 0, true},
    {"P_dbm", 25, false},
    {"N0_dbm", 0, false},
    {"K", 10, false},
    {"eta", 2, false},
    {"R1_th", 1, false},
    {"R2_th", 1, false},
    {"epsilon", 1e-4, false},
    {"max_iters", 1000, true},
    {"los_phase", 0, true},
    {"psi", 0.5, false},
    {"t", 0, false},
    {"d_Rx", 0.5, false},
    {"d_Ry", 0.5, false},
    {"d_U1", 2, false},
    {"d_U2", 3, false},
    {"d_E_min", 1, false},
    {"d_E_max", 1.5, false},
    {"d_E_center", 2, false},
    {"move_radius", 0.5, false},
}};

inline const ParamInfo* find_param(std::string_view key) {
  for (const auto& p : param_table)
    if (p.key == key) return &p;
  return nullptr;
}

/// "%.<digits>g" rendering.
inline std::string format_number(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", digits, v);
  return buf;
}

inline std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

inline std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    out.push_back(trim(s.substr(start, pos == std::string_view::npos ? pos : pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

inline double parse_double(const std::string& key, std::string_view text) {
  const std::string t = trim(text);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (t.empty() || ec != std::errc{} || ptr != t.data() + t.size() || !std::isfinite(v))
    throw ConfigError(key, "expected a finite number, got '" + t + "'");
  return v;
}

inline std::uint64_t parse_uint(const std::string& key, std::string_view text) {
  const std::string t = trim(text);
  std::uint64_t v = 0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (t.empty() || ec != std::errc{} || ptr != t.data() + t.size())
    throw ConfigError(key, "expected a non-negative integer, got '" + t + "'");
  return v;
}

inline double parse_param(const std::string& key, std::string_view text) {
  const ParamInfo* info = find_param(key);
  if (info == nullptr) throw ConfigError(key, "unknown key");
  const double v = parse_double(key, text);
  if (info->integer && v != std::floor(v)) throw ConfigError(key, "expected an integer");
  return v;
}

inline std::string format_param(std::string_view key, double v) {
  const ParamInfo* info = find_param(key);
  if (info != nullptr && info->integer) return std::to_string(static_cast<long long>(v));
  return format_number(v, 17);
}

struct Sweep {
  std::string var = "d_U2";
  double start = 0.0;
  double stop = 0.0;
  double step = 1.0;

  std::size_t count() const {
    if (step <= 0.0) return 1;
    return static_cast<std::size_t>(std::floor((stop - start) / step + 1e-9)) + 1;
  }
  std::vector<double> values() const {
    std::vector<double> v;
    for (std::size_t i = 0; i < count(); ++i) v.push_back(start + static_cast<double>(i) * step);
    return v;
  }
  bool operator==(const Sweep&) const = default;
};

/// One curve: a scheme plus parameters that differ from the experiment-wide ones.
struct Series {
  Scheme scheme = Scheme::proposed_internal;
  std::vector<std::pair<std::string, double>> overrides;

  std::string label() const {
    std::string s(to_string(scheme));
    for (const auto& [k, v] : overrides) s += ":" + k + "=" + format_param(k, v);
    return s;
  }
  bool operator==(const Series&) const = default;
};

/// "scheme[:key=value]..."
inline Series parse_series(std::string_view text) {
  const auto parts = split(text, ':');
  Series s;
  try {
    s.scheme = parse_scheme(parts[0]);
  } catch (const DomainError& e) {
    throw ConfigError("schemes", e.what());
  }
  for (std::size_t i = 1; i < parts.size(); ++i) {
    const auto eq = parts[i].find('=');
    if (eq == std::string::npos) throw ConfigError("schemes", "expected key=value in '" + parts[i] + "'");
    const std::string key = trim(std::string_view(parts[i]).substr(0, eq));
    s.overrides.emplace_back(key, parse_param(key, std::string_view(parts[i]).substr(eq + 1)));
  }
  return s;
}

struct Experiment {
  Scenario scenario = Scenario::internal;
  Sweep sweep;
  std::vector<Series> series;
  std::uint64_t trials = 1000;
  std::uint64_t seed = 1;
  std::string output;
  std::map<std::string, double> params;

  bool operator==(const Experiment&) const = default;
};

/// Placement knobs for the per-trial geometry.
struct Layout {
  double d_rx = 0.5, d_ry = 0.5;
  double d_u1 = 2.0, d_u2 = 3.0;
  double d_e_min = 1.0, d_e_max = 1.5, d_e_center = 2.0;
  double move_radius = 0.5;
};

/// Fully resolved parameters for one (sweep value, series) cell.
struct Point {
  SystemConfig cfg;
  Layout layout;
  SchemeOptions opts;
  double t = 0.0;
};

namespace detail {

inline void check_range(const std::string& key, bool ok, const std::string& what) {
  if (!ok) throw ConfigError(key, what);
}

inline void validate_param(const std::string& key, double v) {
  if (key == "Ns" || key == "Nr") check_range(key, v >= 1, "must be >= 1");
  if (key == "M") check_range(key, v >= 0, "must be >= 0");
  if (key == "K") check_range(key, v > 0, "must be > 0");
  if (key == "eta") check_range(key, v >= 0, "must be >= 0");
  if (key == "R1_th" || key == "R2_th") check_range(key, v >= 0, "must be >= 0");
  if (key == "epsilon") check_range(key, v > 0, "must be > 0");
  if (key == "max_iters") check_range(key, v >= 1, "must be >= 1");
  if (key == "psi") check_range(key, v > 0 && v <= 1, "must lie in (0, 1]");
  if (key == "los_phase") check_range(key, v == 0 || v == 1, "must be 0 (real LoS mean) or 1 (random LoS phase)");
  if (key == "t") check_range(key, v >= 0, "must be >= 0");
  if (key == "move_radius") check_range(key, v >= 0, "must be >= 0");
}

inline void apply_param(Point& p, const std::string& key, double v) {
  validate_param(key, v);
  if (key == "Ns") p.cfg.ns = static_cast<int>(v);
  else if (key == "Nr") p.cfg.nr = static_cast<int>(v);
  else if (key == "M") p.cfg.m = static_cast<int>(v);
  else if (key == "P_dbm") p.cfg.p_dbm = v;
  else if (key == "N0_dbm") p.cfg.n0_dbm = v;
  else if (key == "K") p.cfg.k_factor = v;
  else if (key == "eta") p.cfg.eta = v;
  else if (key == "R1_th") p.cfg.r1_th = v;
  else if (key == "R2_th") p.cfg.r2_th = v;
  else if (key == "epsilon") p.cfg.epsilon = v;
  else if (key == "max_iters") p.cfg.max_iters = static_cast<int>(v);
  else if (key == "los_phase") p.cfg.random_los_phase = v != 0;
  else if (key == "psi") p.opts.psi = v;
  else if (key == "t") p.t = v;
  else if (key == "d_Rx") p.layout.d_rx = v;
  else if (key == "d_Ry") p.layout.d_ry = v;
  else if (key == "d_U1") p.layout.d_u1 = v;
  else if (key == "d_U2") p.layout.d_u2 = v;
  else if (key == "d_E_min") p.layout.d_e_min = v;
  else if (key == "d_E_max") p.layout.d_e_max = v;
  else if (key == "d_E_center") p.layout.d_e_center = v;
  else if (key == "move_radius") p.layout.move_radius = v;
  else throw ConfigError(key, "unknown key");
}

}  // namespace detail

inline Point resolve_point(const Experiment& exp, const Series& series, double sweep_value) {
  Point p;
  for (const auto& info : param_table) detail::apply_param(p, std::string(info.key), info.default_value);
  for (const auto& [k, v] : exp.params) detail::apply_param(p, k, v);
  detail::apply_param(p, exp.sweep.var, sweep_value);
  for (const auto& [k, v] : series.overrides) detail::apply_param(p, k, v);
  return p;
}

/// Throws ConfigError naming the first offending key.
inline void validate(const Experiment& exp) {
  if (exp.trials == 0) throw ConfigError("trials", "must be >= 1");
  if (exp.series.empty()) throw ConfigError("schemes", "at least one scheme is required");
  const ParamInfo* var = find_param(exp.sweep.var);
  if (var == nullptr) throw ConfigError("sweep", "unknown sweep variable '" + exp.sweep.var + "'");
  if (!std::isfinite(exp.sweep.start)) throw ConfigError("sweep_start", "must be finite");
  if (!std::isfinite(exp.sweep.stop)) throw ConfigError("sweep_stop", "must be finite");
  if (!(exp.sweep.step > 0.0) || !std::isfinite(exp.sweep.step))
    throw ConfigError("sweep_step", "must be > 0");
  if (exp.sweep.stop < exp.sweep.start) throw ConfigError("sweep_stop", "must be >= sweep_start");
  if (exp.sweep.count() > 100000) throw ConfigError("sweep_step", "too many sweep points");
  for (const auto& [k, v] : exp.params) {
    const ParamInfo* info = find_param(k);
    if (info == nullptr) throw ConfigError(k, "unknown key");
    if (info->integer && v != std::floor(v)) throw ConfigError(k, "expected an integer");
    detail::validate_param(k, v);
  }
  const auto values = exp.sweep.values();
  for (double v : values)
    if (var->integer && v != std::floor(v)) throw ConfigError("sweep", exp.sweep.var + " takes integer values");

  for (const auto& s : exp.series) {
    for (const auto& [k, v] : s.overrides) {
      const ParamInfo* info = find_param(k);
      if (info == nullptr) throw ConfigError("schemes", "unknown key '" + k + "' in series");
      if (info->integer && v != std::floor(v)) throw ConfigError(k, "expected an integer");
      if (k == exp.sweep.var)
        throw ConfigError("schemes", "series '" + s.label() + "' overrides the sweep variable");
    }
    if (!scheme_allowed(exp.scenario, s.scheme))
      throw ConfigError("schemes", std::string(to_string(s.scheme)) + " is not valid for scenario " +
                                       std::string(to_string(exp.scenario)));
    for (double v : values) {
      const Point p = resolve_point(exp, s, v);
      if (p.layout.d_e_max < p.layout.d_e_min) throw ConfigError("d_E_max", "must be >= d_E_min");
      if (has_external_eavesdroppers(exp.scenario) && p.cfg.m < 1)
        throw ConfigError("M", "scenario " + std::string(to_string(exp.scenario)) + " needs M >= 1");
      if (!has_external_eavesdroppers(exp.scenario) && p.cfg.m != 0)
        throw ConfigError("M", "scenario " + std::string(to_string(exp.scenario)) + " has no external eavesdroppers");
      try {
        check_scheme(s.scheme, p.cfg.ns, p.cfg.m);
      } catch (const DomainError& e) {
        throw ConfigError("schemes", e.what());
      }
      if (p.layout.d_ry == 0.0 && (p.layout.d_rx == 0.0 || p.layout.d_rx == p.layout.d_u1 ||
                                   p.layout.d_rx == p.layout.d_u2))
        throw ConfigError("d_Rx", "RIS coincides with another node");
    }
  }
}

// ---- config text ----------------------------------------------------------------------------

namespace detail {

inline void set_key(Experiment& exp, const std::string& key, const std::string& value) {
  if (key == "scenario") {
    for (const auto& [id, name] : scenario_names)
      if (name == value) {
        exp.scenario = id;
        return;
      }
    throw ConfigError(key, "unknown scenario '" + value + "'");
  }
  if (key == "sweep") {
    exp.sweep.var = value;
  } else if (key == "sweep_start") {
    exp.sweep.start = parse_double(key, value);
  } else if (key == "sweep_stop") {
    exp.sweep.stop = parse_double(key, value);
  } else if (key == "sweep_step") {
    exp.sweep.step = parse_double(key, value);
  } else if (key == "schemes") {
    exp.series.clear();
    for (const auto& item : split(value, ',')) {
      if (item.empty()) throw ConfigError(key, "empty list entry");
      exp.series.push_back(parse_series(item));
    }
  } else if (key == "trials") {
    exp.trials = parse_uint(key, value);
  } else if (key == "seed") {
    exp.seed = parse_uint(key, value);
  } else if (key == "output") {
    exp.output = value;
  } else {
    exp.params[key] = parse_param(key, value);
  }
}

}  // namespace detail

/// Applies a single `key=value` assignment (as given on the command line).
inline void apply_override(Experiment& exp, std::string_view assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string_view::npos) throw ConfigError(std::string(assignment), "expected key=value");
  detail::set_key(exp, trim(assignment.substr(0, eq)), trim(assignment.substr(eq + 1)));
}

/// Parses `key = value` lines; `#` starts a comment. Unknown or repeated keys are errors.
inline Experiment parse_config(std::string_view text) {
  Experiment exp;
  std::map<std::string, int> seen;
  std::istringstream in{std::string(text)};
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    const std::string t = trim(line);
    if (t.empty()) continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos)
      throw ConfigError("line " + std::to_string(line_no), "expected 'key = value'");
    const std::string key = trim(std::string_view(t).substr(0, eq));
    if (seen[key]++ > 0) throw ConfigError(key, "given more than once");
    detail::set_key(exp, key, trim(std::string_view(t).substr(eq + 1)));
  }
  return exp;
}

inline std::string serialize_config(const Experiment& exp) {
  std::ostringstream out;
  out << "scenario = " << to_string(exp.scenario) << "\n";
  out << "sweep = " << exp.sweep.var << "\n";
  out << "sweep_start = " << format_param(exp.sweep.var, exp.sweep.start) << "\n";
  out << "sweep_stop = " << format_param(exp.sweep.var, exp.sweep.stop) << "\n";
  out << "sweep_step = " << format_number(exp.sweep.step, 17) << "\n";
  out << "schemes = ";
  for (std::size_t i = 0; i < exp.series.size(); ++i) out << (i ? ", " : "") << exp.series[i].label();
  out << "\n";
  out << "trials = " << exp.trials << "\n";
  out << "seed = " << exp.seed << "\n";
  if (!exp.output.empty()) out << "output = " << exp.output << "\n";
  for (const auto& [k, v] : exp.params) out << k << " = " << format_param(k, v) << "\n";
  return out.str();
}

// ---- presets --------------------------------------------------------------------------------
// Presets draw the LoS component with a random per-entry phase (los_phase = 1). With a common
// real LoS mean the RIS->U1 and RIS->U2 channels are almost collinear and the nearer user
// wins in virtually every trial, whatever the beamformer does.

inline const std::vector<std::string>& preset_names() {
  static const std::vector<std::string> names{"fig4", "fig5", "fig6", "fig7", "fig8", "fig9", "fig10"};
  return names;
}

inline Experiment preset(std::string_view name) {
  Experiment e;
  const auto series = [&](std::initializer_list<std::string_view> specs) {
    for (auto s : specs) e.series.push_back(parse_series(s));
  };
  if (name == "fig4") {
    e.scenario = Scenario::internal;
    e.sweep = {"d_U2", 2.5, 4.0, 0.1};
    e.params = {{"d_Rx", 0.5}, {"d_U1", 2.0}, {"los_phase", 1.0}};
    series({"proposed_internal:Ns=8:Nr=16", "proposed_internal:Ns=16:Nr=16",
            "proposed_internal:Ns=16:Nr=32", "baseline_alg4:Ns=16:Nr=16"});
    e.trials = 10000;
    e.seed = 4;
  } else if (name == "fig5") {
    e.scenario = Scenario::internal;
    e.sweep = {"d_Rx", -1.0, 4.0, 0.25};
    e.params = {{"d_U1", 1.0}, {"d_U2", 3.0}, {"los_phase", 1.0}};
    series({"proposed_internal:Ns=8:Nr=16", "proposed_internal:Ns=16:Nr=16",
            "proposed_internal:Ns=16:Nr=32", "scheme2:Ns=16:Nr=16"});
    e.trials = 2000;
    e.seed = 5;
  } else if (name == "fig6") {
    e.scenario = Scenario::internal;
    e.sweep = {"d_Rx", -1.0, 4.0, 0.25};
    e.params = {{"d_U1", 1.0}, {"d_U2", 3.0}, {"los_phase", 1.0}};
    series({"proposed_internal:Ns=16:Nr=16"});
    e.trials = 2000;
    e.seed = 6;
  } else if (name == "fig7") {
    e.scenario = Scenario::imperfect_csi;
    e.sweep = {"t", 0.0, 0.1, 0.02};
    e.params = {{"d_Rx", 0.5}, {"d_U1", 2.0}, {"d_U2", 3.0}, {"los_phase", 1.0}};
    series({"proposed_internal:Ns=16:Nr=16"});
    e.trials = 2000;
    e.seed = 7;
  } else if (name == "fig8") {
    e.scenario = Scenario::external_no_csi;
    e.sweep = {"psi", 0.1, 1.0, 0.1};
    e.params = {{"d_Rx", 0.5}, {"d_U1", 2.0}, {"d_U2", 3.0}, {"M", 10.0},
                {"d_E_min", 1.0}, {"d_E_max", 1.5}, {"los_phase", 1.0}};
    series({"proposed_no_csi:Ns=16:Nr=16", "proposed_no_csi:Ns=16:Nr=32", "scheme3:Ns=16:Nr=16",
            "scheme3:Ns=16:Nr=32"});
    e.trials = 1000;
    e.seed = 8;
  } else if (name == "fig9") {
    e.scenario = Scenario::external_csi;
    e.sweep = {"d_U2", 2.5, 4.0, 0.25};
    e.params = {{"d_Rx", 0.5}, {"d_U1", 2.0}, {"Ns", 16.0}, {"Nr", 16.0},
                {"d_E_min", 1.0}, {"d_E_max", 1.5}, {"los_phase", 1.0}};
    series({"proposed_csi:M=10", "scheme4:M=10", "scheme5:M=10", "scheme6:M=10",
            "proposed_csi:M=20", "scheme4:M=20", "scheme5:M=20", "scheme6:M=20"});
    e.trials = 1000;
    e.seed = 9;
  } else if (name == "fig10") {
    e.scenario = Scenario::dynamic_users;
    e.sweep = {"P_dbm", 10.0, 40.0, 5.0};
    e.params = {{"d_Rx", 0.5}, {"d_Ry", 1.0}, {"Ns", 16.0}, {"Nr", 16.0}, {"M", 10.0},
                {"d_E_center", 2.0}, {"d_U1", 3.0}, {"d_U2", 4.0}, {"move_radius", 0.5},
                {"los_phase", 1.0}};
    series({"proposed_csi", "scheme4", "scheme5", "scheme6"});
    e.trials = 1000;
    e.seed = 10;
  } else {
    std::string known;
    for (const auto& n : preset_names()) known += (known.empty() ? "" : ", ") + n;
    throw ConfigError("preset", "unknown preset '" + std::string(name) + "' (available: " + known + ")");
  }
  return e;
}

// ---- running --------------------------------------------------------------------------------

inline Point2 uniform_in_disk(Rng& rng, Point2 center, double radius) {
  const double r = radius * std::sqrt(uniform(rng, 0.0, 1.0));
  const double a = uniform(rng, 0.0, two_pi);
  return {center.x + r * std::cos(a), center.y + r * std::sin(a)};
}

/// Node positions for one trial. Eavesdroppers (and, for moving users, U1/U2) are drawn from the
/// trial's geometry substream.
inline Geometry trial_geometry(Scenario scenario, const Layout& l, int m, std::uint64_t seed,
                               std::uint64_t trial) {
  Geometry g;
  g.ris = {l.d_rx, l.d_ry};
  g.u1 = {l.d_u1, 0.0};
  g.u2 = {l.d_u2, 0.0};
  if (!has_external_eavesdroppers(scenario)) return g;
  Rng rng = substream(seed, trial, StreamTag::geometry);
  if (scenario == Scenario::dynamic_users) {
    g.u1 = uniform_in_disk(rng, g.u1, l.move_radius);
    g.u2 = uniform_in_disk(rng, g.u2, l.move_radius);
    for (int i = 0; i < m; ++i) g.eavesdroppers.push_back(uniform_in_disk(rng, {l.d_e_center, 0.0}, l.move_radius));
  } else {
    for (int i = 0; i < m; ++i) g.eavesdroppers.push_back({uniform(rng, l.d_e_min, l.d_e_max), 0.0});
  }
  return g;
}

struct TrialOutcome {
  double rate = 0.0;
  double rate_perfect = 0.0;  // imperfect-CSI runs only
  bool sop_event = false;
  bool infeasible = false;
  int iterations = 0;
  double h1 = 0.0;
  double h2 = 0.0;
};

inline TrialOutcome run_trial(Scenario scenario, Scheme scheme, const Point& p, std::uint64_t seed,
                              std::uint64_t trial) {
  const Geometry geo = trial_geometry(scenario, p.layout, p.cfg.m, seed, trial);
  Rng ch_rng = substream(seed, trial, StreamTag::channels);
  const ChannelSet ch = sample_channels(p.cfg, geo, ch_rng);
  Rng an_rng = substream(seed, trial, StreamTag::noise_directions);
  TrialOutcome o;
  if (scenario == Scenario::imperfect_csi) {
    Rng an_rng2 = an_rng;
    o.rate_perfect = run_scheme(scheme, ch, p.cfg, p.opts, an_rng).secrecy_rate;
    Rng err_rng = substream(seed, trial, StreamTag::csi_error);
    const ChannelSet est = perturb_csi(ch, p.t, err_rng);
    const Design d = design_scheme(scheme, est, p.cfg, p.opts, an_rng2);
    const ScenarioResult r = evaluate_design(d, ch, p.cfg);
    o.rate = r.secrecy_rate;
    o.sop_event = r.gains.h1 >= r.gains.h2;
    o.infeasible = !r.split.feasible;
    o.iterations = r.iterations;
    o.h1 = r.gains.h1;
    o.h2 = r.gains.h2;
    return o;
  }
  const ScenarioResult r = run_scheme(scheme, ch, p.cfg, p.opts, an_rng);
  o.rate = r.secrecy_rate;
  o.sop_event = r.gains.h1 >= r.gains.h2;
  o.infeasible = !r.split.feasible;
  o.iterations = r.iterations;
  o.h1 = r.gains.h1;
  o.h2 = r.gains.h2;
  return o;
}

struct ResultRow {
  std::string sweep_var;
  double sweep_value = 0.0;
  Scheme scheme = Scheme::proposed_internal;
  std::string series;
  int ns = 0, nr = 0, m = 0;
  std::uint64_t trials = 0;
  double avg_secrecy_rate = 0.0;
  double avg_secrecy_rate_normalized = 0.0;
  double stderr_secrecy_rate = 0.0;
  double sop = 0.0;
  double infeasible_fraction = 0.0;
  double mean_alg1_iters = 0.0;
  double avg_h1 = 0.0;
  double avg_h2 = 0.0;
  std::optional<double> relative_error;
  std::uint64_t seed = 0;
};

inline ResultRow aggregate(const std::vector<TrialOutcome>& trials, bool with_relative_error) {
  ResultRow row;
  const double n = static_cast<double>(trials.size());
  std::vector<double> rate, sq, sop, inf, it, h1, h2, perfect, diff;
  for (const auto& t : trials) {
    rate.push_back(t.rate);
    sop.push_back(t.sop_event ? 1.0 : 0.0);
    inf.push_back(t.infeasible ? 1.0 : 0.0);
    it.push_back(t.iterations);
    h1.push_back(t.h1);
    h2.push_back(t.h2);
    perfect.push_back(t.rate_perfect);
    diff.push_back(std::abs(t.rate_perfect - t.rate));
  }
  row.trials = trials.size();
  row.avg_secrecy_rate = pairwise_sum(rate) / n;
  for (double r : rate) sq.push_back((r - row.avg_secrecy_rate) * (r - row.avg_secrecy_rate));
  row.stderr_secrecy_rate = trials.size() > 1 ? std::sqrt(pairwise_sum(sq) / (n - 1.0) / n) : 0.0;
  row.sop = pairwise_sum(sop) / n;
  row.infeasible_fraction = pairwise_sum(inf) / n;
  row.mean_alg1_iters = pairwise_sum(it) / n;
  row.avg_h1 = pairwise_sum(h1) / n;
  row.avg_h2 = pairwise_sum(h2) / n;
  if (with_relative_error) {
    const double base = pairwise_sum(perfect);
    row.relative_error = base > 0.0 ? pairwise_sum(diff) / base : 0.0;
  }
  return row;
}

/// One row per (sweep value, series), in sweep order then series order.
inline std::vector<ResultRow> run_experiment(const Experiment& exp, unsigned workers = 1) {
  validate(exp);
  std::vector<ResultRow> rows;
  for (double v : exp.sweep.values()) {
    for (const auto& s : exp.series) {
      const Point p = resolve_point(exp, s, v);
      const auto outcomes = run_trials(exp.trials, workers, [&](std::size_t i) {
        return run_trial(exp.scenario, s.scheme, p, exp.seed, i);
      });
      ResultRow row = aggregate(outcomes, exp.scenario == Scenario::imperfect_csi);
      row.sweep_var = exp.sweep.var;
      row.sweep_value = v;
      row.scheme = s.scheme;
      row.series = s.label();
      row.ns = p.cfg.ns;
      row.nr = p.cfg.nr;
      row.m = p.cfg.m;
      row.seed = exp.seed;
      rows.push_back(std::move(row));
    }
  }
  double peak = 0.0;
  for (const auto& r : rows) peak = std::max(peak, r.avg_secrecy_rate);
  for (auto& r : rows) r.avg_secrecy_rate_normalized = peak > 0.0 ? r.avg_secrecy_rate / peak : 0.0;
  return rows;
}

inline constexpr std::string_view csv_header =
    "sweep_var,sweep_value,scheme,Ns,Nr,M,trials,avg_secrecy_rate,avg_secrecy_rate_normalized,"
    "stderr_secrecy_rate,sop,infeasible_fraction,mean_alg1_iters,avg_h1,avg_h2,relative_error,seed,"
    "series";

inline std::string to_csv(const std::vector<ResultRow>& rows) {
  const auto num = [](double v) { return format_number(v, 9); };
  std::string out(csv_header);
  out += "\n";
  for (const auto& r : rows) {
    out += r.sweep_var + "," + num(r.sweep_value) + "," + std::string(to_string(r.scheme)) + "," +
           std::to_string(r.ns) + "," + std::to_string(r.nr) + "," + std::to_string(r.m) + "," +
           std::to_string(r.trials) + "," + num(r.avg_secrecy_rate) + "," +
           num(r.avg_secrecy_rate_normalized) + "," + num(r.stderr_secrecy_rate) + "," + num(r.sop) +
           "," + num(r.infeasible_fraction) + "," + num(r.mean_alg1_iters) + "," + num(r.avg_h1) + "," +
           num(r.avg_h2) + "," + (r.relative_error ? num(*r.relative_error) : std::string()) + "," +
           std::to_string(r.seed) + "," + r.series + "\n";
  }
  return out;
}

/// Raised when the CSV cannot be written.
class OutputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline void write_text(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw OutputError("cannot open '" + path + "' for writing");
  f << text;
  f.close();
  if (!f) throw OutputError("failed writing '" + path + "'");
}

}  // namespace risnoma
