#include "risnoma/experiment.hpp"

#include <gtest/gtest.h>

#include <sstream>

namespace risnoma {
namespace {

Experiment small_internal() {
  Experiment e;
  e.scenario = Scenario::internal;
  e.sweep = {"d_U2", 2.5, 3.5, 0.5};
  e.series = {parse_series("proposed_internal:Ns=4:Nr=8"), parse_series("baseline_alg4:Ns=4:Nr=8")};
  e.trials = 30;
  e.seed = 3;
  e.params = {{"los_phase", 1.0}};
  return e;
}

std::string error_key(const Experiment& e) {
  try {
    validate(e);
  } catch (const ConfigError& err) {
    return err.key();
  }
  return "";
}

TEST(ConfigTest, PresetsRoundTrip) {
  for (const auto& name : preset_names()) {
    const Experiment e = preset(name);
    EXPECT_NO_THROW(validate(e)) << name;
    const std::string text = serialize_config(e);
    const Experiment back = parse_config(text);
    EXPECT_EQ(back, e) << name << "\n" << text;
    EXPECT_EQ(serialize_config(back), text);
  }
}

TEST(ConfigTest, ParsesCommentsAndWhitespace) {
  const Experiment e = parse_config(
      "# comment\n"
      "scenario = internal\n"
      "  sweep=d_U2   # trailing\n"
      "sweep_start = 2.5\nsweep_stop = 3\nsweep_step = 0.5\n"
      "schemes = proposed_internal, baseline_alg4:Nr=8\n"
      "trials = 10\nseed = 42\nNs = 4\n");
  EXPECT_EQ(e.sweep.var, "d_U2");
  EXPECT_EQ(e.series.size(), 2u);
  EXPECT_EQ(e.series[1].overrides.at(0).first, "Nr");
  EXPECT_EQ(e.trials, 10u);
  EXPECT_EQ(e.seed, 42u);
  EXPECT_EQ(e.params.at("Ns"), 4.0);
  EXPECT_NO_THROW(validate(e));
}

TEST(ConfigTest, RejectsDuplicateAndUnknownKeys) {
  try {
    parse_config("trials = 1\ntrials = 2\n");
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_EQ(e.key(), "trials");
  }
  try {
    parse_config("antennas = 4\n");
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_EQ(e.key(), "antennas");
  }
  EXPECT_THROW(parse_config("scenario = nowhere\n"), ConfigError);
  EXPECT_THROW(parse_config("schemes = scheme1\n"), ConfigError);
  EXPECT_THROW(parse_config("Ns = four\n"), ConfigError);
  EXPECT_THROW(parse_config("just text\n"), ConfigError);
}

TEST(ValidateTest, ErrorsNameTheKey) {
  Experiment e = small_internal();
  e.trials = 0;
  EXPECT_EQ(error_key(e), "trials");

  e = small_internal();
  e.sweep.step = 0.0;
  EXPECT_EQ(error_key(e), "sweep_step");

  e = small_internal();
  e.sweep.stop = 1.0;
  EXPECT_EQ(error_key(e), "sweep_stop");

  e = small_internal();
  e.sweep.var = "height";
  EXPECT_EQ(error_key(e), "sweep");

  e = small_internal();
  e.params["K"] = -1.0;
  EXPECT_EQ(error_key(e), "K");

  e = small_internal();
  e.params["Ns"] = 2.5;
  EXPECT_EQ(error_key(e), "Ns");

  e = small_internal();
  e.params["los_phase"] = 2.0;
  EXPECT_EQ(error_key(e), "los_phase");

  e = small_internal();
  e.series = {parse_series("proposed_csi")};
  EXPECT_EQ(error_key(e), "schemes");

  e = small_internal();
  e.series.clear();
  EXPECT_EQ(error_key(e), "schemes");

  e = small_internal();
  e.scenario = Scenario::external_csi;
  e.series = {parse_series("proposed_csi")};
  EXPECT_EQ(error_key(e), "M");
}

TEST(SweepTest, ValuesIncludeEndpoint) {
  const Sweep s{"t", 0.0, 0.1, 0.02};
  ASSERT_EQ(s.count(), 6u);
  EXPECT_NEAR(s.values().back(), 0.1, 1e-15);
  EXPECT_EQ((Sweep{"psi", 0.1, 1.0, 0.1}).count(), 10u);
  EXPECT_EQ((Sweep{"d_U2", 3.0, 3.0, 1.0}).count(), 1u);
}

TEST(ResolveTest, PrecedenceDefaultsParamsSweepSeries) {
  Experiment e = small_internal();
  e.params["Nr"] = 32;
  const Point p = resolve_point(e, e.series[0], 3.25);
  EXPECT_EQ(p.cfg.nr, 8);  // series wins over params
  EXPECT_EQ(p.cfg.ns, 4);
  EXPECT_EQ(p.layout.d_u2, 3.25);
  EXPECT_EQ(p.cfg.p_dbm, 25.0);
  EXPECT_TRUE(p.cfg.random_los_phase);
}

TEST(CsvTest, HeaderAndRowShape) {
  const Experiment e = small_internal();
  const auto rows = run_experiment(e, 2);
  ASSERT_EQ(rows.size(), 6u);
  const std::string csv = to_csv(rows);
  std::istringstream in(csv);
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, csv_header);
  int n = 0;
  while (std::getline(in, line)) {
    ++n;
    EXPECT_EQ(std::count(line.begin(), line.end(), ','), 17) << line;
  }
  EXPECT_EQ(n, 6);
  EXPECT_EQ(rows[0].series, "proposed_internal:Ns=4:Nr=8");
  EXPECT_EQ(rows[1].scheme, Scheme::baseline_alg4);
  EXPECT_EQ(rows[2].sweep_value, 3.0);
  double peak = 0.0;
  for (const auto& r : rows) {
    peak = std::max(peak, r.avg_secrecy_rate_normalized);
    EXPECT_GE(r.sop, 0.0);
    EXPECT_LE(r.sop, 1.0);
    EXPECT_FALSE(r.relative_error.has_value());
  }
  EXPECT_DOUBLE_EQ(peak, 1.0);
}

TEST(RunTest, ByteIdenticalAcrossRunsAndWorkers) {
  Experiment e = small_internal();
  const std::string a = to_csv(run_experiment(e, 1));
  EXPECT_EQ(a, to_csv(run_experiment(e, 1)));
  EXPECT_EQ(a, to_csv(run_experiment(e, 3)));
  e.seed = 4;
  EXPECT_NE(a, to_csv(run_experiment(e, 1)));
}

TEST(RunTest, ExternalScenarioIsWorkerIndependent) {
  Experiment e;
  e.scenario = Scenario::dynamic_users;
  e.sweep = {"P_dbm", 20.0, 30.0, 10.0};
  e.series = {parse_series("proposed_csi"), parse_series("scheme6")};
  e.params = {{"Ns", 6.0}, {"Nr", 8.0}, {"M", 3.0}, {"los_phase", 1.0}};
  e.trials = 20;
  EXPECT_EQ(to_csv(run_experiment(e, 1)), to_csv(run_experiment(e, 4)));
}

TEST(RunTest, PerfectCsiHasNoRelativeError) {
  Experiment e = preset("fig7");
  e.sweep = {"t", 0.0, 0.0, 0.02};
  e.trials = 20;
  const auto rows = run_experiment(e, 2);
  ASSERT_EQ(rows.size(), 1u);
  ASSERT_TRUE(rows[0].relative_error.has_value());
  EXPECT_EQ(*rows[0].relative_error, 0.0);
}

TEST(PresetTest, Contents) {
  const Experiment f7 = preset("fig7");
  EXPECT_EQ(f7.scenario, Scenario::imperfect_csi);
  EXPECT_EQ(f7.sweep.var, "t");
  EXPECT_EQ(f7.sweep.count(), 6u);

  const Experiment f8 = preset("fig8");
  EXPECT_EQ(f8.scenario, Scenario::external_no_csi);
  EXPECT_EQ(f8.params.at("M"), 10.0);
  EXPECT_NEAR(f8.sweep.values().back(), 1.0, 1e-12);

  const Experiment f10 = preset("fig10");
  EXPECT_EQ(f10.scenario, Scenario::dynamic_users);
  EXPECT_EQ(f10.sweep.var, "P_dbm");
  EXPECT_EQ(f10.series.size(), 4u);

  try {
    preset("fig1");
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_EQ(e.key(), "preset");
    EXPECT_NE(std::string(e.what()).find("fig4"), std::string::npos);
  }
}

TEST(GeometryTest, EavesdroppersInRange) {
  Layout l;
  const Geometry g = trial_geometry(Scenario::external_csi, l, 50, 1, 0);
  ASSERT_EQ(g.eavesdroppers.size(), 50u);
  for (const auto& p : g.eavesdroppers) {
    EXPECT_GE(p.x, 1.0);
    EXPECT_LE(p.x, 1.5);
    EXPECT_EQ(p.y, 0.0);
  }
  const Geometry d = trial_geometry(Scenario::dynamic_users, l, 20, 1, 0);
  EXPECT_LE(distance(d.u1, {2.0, 0.0}), 0.5);
  EXPECT_LE(distance(d.u2, {3.0, 0.0}), 0.5);
  for (const auto& p : d.eavesdroppers) EXPECT_LE(distance(p, {2.0, 0.0}), 0.5);
  EXPECT_TRUE(trial_geometry(Scenario::internal, l, 0, 1, 0).eavesdroppers.empty());
}

TEST(OutputTest, UnwritablePathThrows) {
  EXPECT_THROW(write_text("/nonexistent-dir/x.csv", "a"), OutputError);
}

}  // namespace
}  // namespace risnoma
