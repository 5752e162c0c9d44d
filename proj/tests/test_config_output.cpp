#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "lmsim/config.hpp"
#include "lmsim/error.hpp"
#include "lmsim/output.hpp"

using namespace lmsim;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

fs::path scratch_dir(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("lmsim_test_" + name);
  fs::remove_all(dir);
  return dir;
}

int parse_error_line(std::string_view text) {
  try {
    parse_config(text);
  } catch (const ParseError& e) {
    return e.line();
  }
  return -1;
}

SimulationConfig small_config() {
  auto c = parse_config(
      "[population]\nalpha_pr = 2\n[market]\nalpha_l = 2\nbeta_l = 3\n"
      "[intervention]\nt_u_threshold = 9\nt_u_max = 36\n"
      "[engine]\npool_size = 60\ntotal_steps = 430\nn_runs = 3\n");
  return c;
}

}  // namespace

TEST(ParseConfig, EmptyFileGivesDefaults) {
  const auto c = parse_config("");
  SimulationConfig d;
  const auto caps = default_skill_caps(d.population);
  d.intervention.x1_max = caps.first;
  d.intervention.x2_max = caps.second;
  EXPECT_EQ(c, d);
}

TEST(ParseConfig, ShippedDefaultConfigEqualsEmptyFile) {
  const auto shipped = load_config(fs::path(LMSIM_SOURCE_DIR) / "configs" / "default.cfg");
  EXPECT_EQ(shipped.config, parse_config(""));
}

TEST(ParseConfig, ShippedConfigFilesParse) {
  for (const auto& entry : fs::directory_iterator(fs::path(LMSIM_SOURCE_DIR) / "configs")) {
    EXPECT_NO_THROW(load_config(entry.path())) << entry.path();
  }
}

TEST(ParseConfig, NamedScenario) {
  const auto c = parse_config("[scenario]\nname = onlylow\n");
  EXPECT_EQ(c.scenario.name, ScenarioName::OnlyLow);
  const KMatrix expected{{{1, 0}, {1, 0}}};
  EXPECT_EQ(c.scenario.k_display, expected);
}

TEST(ParseConfig, CustomScenario) {
  const auto c = parse_config("[scenario]\nname = custom\nk11 = 2\nk22 = 0.5\nk_scale = 0.01\n");
  EXPECT_EQ(c.scenario.name, ScenarioName::Custom);
  const KMatrix expected{{{2, 1}, {1, 0.5}}};
  EXPECT_EQ(c.scenario.k_display, expected);
  EXPECT_DOUBLE_EQ(c.scenario.k_scale, 0.01);
  EXPECT_THROW(parse_config("[scenario]\nname = balanced\nk11 = 2\n"), ValidationError);
}

TEST(ParseConfig, Validation) {
  EXPECT_THROW(parse_config("[engine]\nspinup_discard = 400\n"), ValidationError);
  EXPECT_THROW(parse_config("[engine]\nspinup_discard = 500\n"), ValidationError);
  EXPECT_THROW(parse_config("[engine]\npool_size = 5\n"), ValidationError);
  EXPECT_THROW(parse_config("[market]\nalpha_l = 0\n"), ValidationError);
  EXPECT_THROW(parse_config("[intervention]\nx1_max = 1.0\n"), ValidationError);
}

TEST(ParseConfig, ErrorsCarryLineNumbers) {
  EXPECT_EQ(parse_error_line("[engine]\n\nbogus = 1\n"), 3);
  EXPECT_EQ(parse_error_line("# comment\n[nowhere]\n"), 2);
  EXPECT_EQ(parse_error_line("[engine]\npool_size = 10\npool_size = 20\n"), 3);
  EXPECT_EQ(parse_error_line("[engine]\npool_size = lots\n"), 2);
  EXPECT_EQ(parse_error_line("[engine]\npool_size = 10.5\n"), 2);
  EXPECT_EQ(parse_error_line("pool_size = 10\n"), 1);
  EXPECT_EQ(parse_error_line("[engine]\npool_size =\n"), 2);
  EXPECT_EQ(parse_error_line("[engine]\njust words\n"), 2);
  EXPECT_EQ(parse_error_line("[scenario]\nname = mostly_low\n"), 2);
  EXPECT_EQ(parse_error_line("[engine]\nmodel_variant = real\n"), 2);
  EXPECT_EQ(parse_error_line("[engine\n"), 1);
}

TEST(ParseConfig, CommentsAndWhitespace) {
  const auto c = parse_config("  [ engine ]  \n pool_size=50 # trailing\n; full line\n\r\n");
  EXPECT_EQ(c.pool_size, 50);
}

TEST(SerializeConfig, RoundTrips) {
  auto c = parse_config("[population]\nalpha_pr = 0.3\n[scenario]\nname = custom\nk12 = 0.25\n"
                        "[engine]\nmodel_variant = base\nbase_seed = 12345678901\n[fit]\nridge = 0.1\n");
  EXPECT_EQ(parse_config(serialize_config(c)), c);
  const auto d = parse_config("");
  EXPECT_EQ(parse_config(serialize_config(d)), d);
}

TEST(Fingerprint, ChangesIffAFieldChanges) {
  const auto base = parse_config("");
  EXPECT_EQ(fingerprint(base), fingerprint(parse_config("")));
  EXPECT_EQ(fingerprint(base).size(), 16u);

  std::vector<SimulationConfig> variants;
  auto add = [&](auto mutate) {
    auto c = base;
    mutate(c);
    variants.push_back(c);
  };
  add([](auto& c) { c.population.alpha_pr += 0.1; });
  add([](auto& c) { c.population.trunc += 0.1; });
  add([](auto& c) { c.market.alpha_l += 0.1; });
  add([](auto& c) { c.market.beta_l += 0.1; });
  add([](auto& c) { c.market.beta_b = 2.0; });
  add([](auto& c) { c.intervention.x1_max += 0.1; });
  add([](auto& c) { c.intervention.x2_max += 0.1; });
  add([](auto& c) { c.intervention.delta_t_u += 1; });
  add([](auto& c) { c.intervention.t_u_max += 1; });
  add([](auto& c) { c.intervention.t_u_threshold += 1; });
  add([](auto& c) { c.scenario = ScenarioConfig::named(ScenarioName::OnlyHigh); });
  add([](auto& c) { c.scenario = ScenarioConfig::custom({{{1, 1}, {1, 0.9}}}); });
  add([](auto& c) { c.scenario.k_scale = 0.003; });
  add([](auto& c) { c.model_variant = Variant::Base; });
  add([](auto& c) { c.pool_size += 1; });
  add([](auto& c) { c.spinup_steps += 1; });
  add([](auto& c) { c.spinup_discard += 1; });
  add([](auto& c) { c.total_steps += 1; });
  add([](auto& c) { c.refit_every += 1; });
  add([](auto& c) { c.n_runs += 1; });
  add([](auto& c) { c.base_seed += 1; });
  add([](auto& c) { c.fit.ridge *= 2; });
  add([](auto& c) { c.fit.tol *= 2; });
  add([](auto& c) { c.fit.max_iter += 1; });

  std::set<std::string> prints{fingerprint(base)};
  for (const auto& v : variants) {
    ASSERT_NE(v, base);
    EXPECT_TRUE(prints.insert(fingerprint(v)).second);
  }
}

TEST(MetricsCsv, FormatAndAbsentCells) {
  MetricsRow row;
  row.t = 401;
  row.bgsd = -0.123456789012;
  row.bgsd_abs = 0.123456789012;
  row.n_active = 390;
  const auto csv = metrics_csv({row});
  const auto header = csv.substr(0, csv.find('\n'));
  EXPECT_EQ(header,
            "t,bgsd,bgsd_abs,cf_fraction,eo,mean_s_priv,mean_s_upriv,mean_t_u_hires,bgtud_current,"
            "frac_upriv,frac_waiting_priv,frac_waiting_upriv,n_active,n_waiting");
  const auto body = csv.substr(csv.find('\n') + 1);
  EXPECT_EQ(body, "401,-0.123456789,0.123456789,,,,,,,,,,390,\n");
  EXPECT_EQ(csv.find("nan"), std::string::npos);
  EXPECT_EQ(csv.find("NaN"), std::string::npos);

  const auto back = parse_metrics_csv(csv);
  ASSERT_EQ(back.size(), 1u);
  EXPECT_EQ(back[0].t, 401);
  EXPECT_DOUBLE_EQ(*back[0].bgsd, -0.123456789);
  EXPECT_FALSE(back[0].eo.has_value());
}

TEST(MetricsCsv, QuantizeIsIdempotent) {
  for (double v : {0.1, 1.0 / 3.0, -2.5e-7, 123456.789123, 0.0}) {
    EXPECT_EQ(quantize(quantize(v)), quantize(v));
    EXPECT_EQ(format_value(quantize(v)), format_value(v));
  }
}

TEST(CoefficientsCsv, Format) {
  std::vector<CoefficientSnapshot> s{{401, {Variant::Full, {-1.5, 0.25}, 0.5}},
                                     {401, {Variant::RealProspect, {-2.0}, 0.125}}};
  EXPECT_EQ(coefficients_csv(s),
            "t,variant,coef_1,coef_2,intercept\n401,full,-1.5,0.25,0.5\n401,real,-2,,0.125\n");
}

TEST(WriteOutputs, ReaveragingReproducesEnsembleMean) {
  const auto c = small_config();
  const auto ensemble = run_ensemble(c, 1);
  RunManifest m;
  m.config_fingerprint = fingerprint(c);
  const auto dir = scratch_dir("reaverage");
  write_outputs(dir, ensemble, m, c, "# source\n");

  std::vector<std::vector<MetricsRow>> runs;
  for (int i = 0; i < c.n_runs; ++i) {
    runs.push_back(parse_metrics_csv(slurp(dir / ("run_" + std::to_string(i) + ".csv"))));
  }
  const auto recomputed = metrics_csv(average_rows(runs));
  EXPECT_EQ(recomputed, slurp(dir / "ensemble_mean.csv"));

  EXPECT_EQ(slurp(dir / "config.cfg"), "# source\n");
  EXPECT_EQ(parse_config(slurp(dir / "config_resolved.cfg")), c);
  const auto manifest = slurp(dir / "manifest.txt");
  EXPECT_NE(manifest.find("config_fingerprint = " + fingerprint(c)), std::string::npos);
  EXPECT_NE(manifest.find("tool_version = " + std::string(kToolVersion)), std::string::npos);
  EXPECT_TRUE(fs::exists(dir / "coefficients_2.csv"));
  fs::remove_all(dir);
}

TEST(WriteOutputs, RerunIsByteIdentical) {
  const auto c = small_config();
  const auto dir = scratch_dir("rerun");
  RunManifest m;
  write_outputs(dir, run_ensemble(c, 1), m, c, "");
  std::map<std::string, std::string> first;
  for (const auto& e : fs::directory_iterator(dir)) first[e.path().filename()] = slurp(e.path());
  write_outputs(dir, run_ensemble(c, 2), m, c, "");
  for (const auto& [name, content] : first) EXPECT_EQ(slurp(dir / name), content) << name;
  fs::remove_all(dir);
}

TEST(WriteOutputs, AbsentValuesAreEmptyCells) {
  auto c = small_config();
  c.n_runs = 1;
  c.total_steps = c.spinup_steps;
  const auto dir = scratch_dir("absent");
  write_outputs(dir, run_ensemble(c, 1), RunManifest{}, c, "");
  const auto csv = slurp(dir / "run_0.csv");
  EXPECT_EQ(csv.find("nan"), std::string::npos);
  const auto rows = parse_metrics_csv(csv);
  for (const auto& r : rows) EXPECT_FALSE(r.eo.has_value());
  fs::remove_all(dir);
}

TEST(WriteOutputs, UnwritableDirectoryReportsPath) {
  const auto blocker = scratch_dir("blocker");
  write_file(blocker, "not a directory");
  try {
    write_outputs(blocker / "sub", EnsembleOutput{}, RunManifest{}, parse_config(""), "");
    FAIL() << "expected IoError";
  } catch (const IoError& e) {
    EXPECT_NE(std::string(e.what()).find("lmsim_test_blocker"), std::string::npos);
  }
  fs::remove_all(blocker);
  EXPECT_THROW(load_config("/nonexistent/lmsim.cfg"), IoError);
}
