// Copyright 2026 The rydprep Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#include <gtest/gtest.h>

#include <cmath>
#include <fstream>
#include <sstream>

#include "rydprep/cli/commands.hpp"
#include "rydprep/cli/config.hpp"
#include "rydprep/cli/output.hpp"

namespace rydprep::cli {
namespace {

namespace fs = std::filesystem;

const fs::path kConfigs = RYDPREP_CONFIG_DIR;

const char* kBell = R"({
  "protocol": {"kind": "bell", "cycles": 20, "omega_a_mhz": 2.0, "omega_b_mhz": 1.2,
               "gamma_mhz": 6.0, "u_mhz": 400.0, "relax_us": 2.0},
  "initial_state": {"kind": "FULLY_MIXED_GE"},
  "observables": ["phi_plus", "phi_minus", "psi_plus", "psi_minus"],
  "output": {"prefix": "bell"}
})";

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
    dir_ = fs::temp_directory_path() / ("rydprep_cli_" + std::string(info->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  CommandOptions options() const {
    CommandOptions o;
    o.out_dir = dir_;
    return o;
  }

  fs::path write(const std::string& name, const std::string& text) const {
    const fs::path p = dir_ / name;
    std::ofstream(p) << text;
    return p;
  }

  int cli(std::vector<std::string> args) const {
    args.insert(args.begin(), "rydprep");
    std::vector<char*> argv;
    for (auto& a : args) argv.push_back(a.data());
    return main_entry(static_cast<int>(argv.size()), argv.data());
  }

  fs::path dir_;
};

double final_value(const CsvTable& t, const std::string& column) {
  return std::stod(t.rows.back().at(static_cast<std::size_t>(t.column(column))));
}

TEST_F(CliTest, BundledConfigsRoundTrip) {
  int count = 0;
  for (const auto& entry : fs::directory_iterator(kConfigs)) {
    if (entry.path().extension() != ".json") continue;
    ++count;
    const RunConfig c = load_config(entry.path());
    EXPECT_EQ(from_json(to_json(c)), c) << entry.path();
    EXPECT_EQ(config_hash(from_json(to_json(c))), config_hash(c));
    EXPECT_NO_THROW(build_study(c)) << entry.path();
  }
  EXPECT_GE(count, 13);
}

TEST_F(CliTest, UnknownFieldReportsLine) {
  const std::string text = "{\n  \"protocol\": {\n    \"kind\": \"bell\",\n    \"bogus\": 1\n  }\n}\n";
  try {
    parse_config(text);
    FAIL() << "expected ConfigError";
  } catch (const ConfigError& e) {
    const std::string what = e.what();
    EXPECT_NE(what.find("protocol.bogus"), std::string::npos) << what;
    EXPECT_NE(what.find("line 4"), std::string::npos) << what;
  }
  EXPECT_EQ(cli({"run", "--config", write("bad.json", text).string(), "--out-dir", dir_.string()}), kExitConfig);
}

TEST_F(CliTest, UnitSuffixMustMatchDimension) {
  EXPECT_THROW(parse_config(R"({"protocol": {"kind": "bell", "omega_a_us": 2.0}})"), ConfigError);
  EXPECT_THROW(parse_config("{\"protocol\": "), ConfigError);
}

TEST_F(CliTest, ZeroCyclesWritesOneRow) {
  RunConfig c = parse_config(kBell);
  c.protocol.cycles = 0;
  const RunFiles f = cmd_run(c, options());
  const CsvTable t = read_csv(f.csv);
  EXPECT_EQ(t.rows.size(), 1u);
  EXPECT_EQ(t.header.front(), "time_us");
  EXPECT_DOUBLE_EQ(final_value(t, "phi_plus"), 0.25);
}

TEST_F(CliTest, RunWritesSeriesAndReproducesFromEmbeddedConfig) {
  const RunFiles f = cmd_run(parse_config(kBell), options());
  const CsvTable t = read_csv(f.csv);
  ASSERT_EQ(t.rows.size(), 21u);
  EXPECT_GT(final_value(t, "phi_plus"), 0.99);
  for (std::size_t i = 1; i < t.rows.size(); ++i) EXPECT_GT(std::stod(t.rows[i][0]), std::stod(t.rows[i - 1][0]));
  for (const auto& row : t.rows) EXPECT_LT(std::stod(row.at(static_cast<std::size_t>(t.column("trace_error")))), 1e-8);

  const Json meta = Json::parse(slurp(f.json));
  const RunConfig embedded = from_json(meta.at("config"));
  EXPECT_EQ(config_hash(embedded), meta.at("config_hash").get<std::string>());
  CommandOptions o = options();
  o.out_dir = dir_ / "again";
  const RunFiles g = cmd_run(embedded, o);
  for (std::size_t i = 0; i < f.result.records.size(); ++i) {
    for (std::size_t k = 0; k < 4; ++k) {
      EXPECT_NEAR(g.result.records[i].values[k], f.result.records[i].values[k], 1e-10);
    }
  }
}

TEST_F(CliTest, FloatsUseTwelveDigits) {
  EXPECT_EQ(format_number(1.0 / 3.0), "0.333333333333");
  EXPECT_EQ(format_number(2.0), "2");
  EXPECT_EQ(format_number(1e-13), "1e-13");
}

TEST_F(CliTest, SegmentRecordOverride) {
  RunConfig c = parse_config(kBell);
  c.protocol.cycles = 2;
  CommandOptions o = options();
  o.record = "segment";
  EXPECT_EQ(read_csv(cmd_run(c, o).csv).rows.size(), 1u + 2u * 6u);
}

TEST_F(CliTest, SweepOverInteraction) {
  RunConfig c = parse_config(kBell);
  const SweepFiles f = cmd_sweep(c, options(), {{"protocol.u_mhz", {8.0, 40.0, 400.0}}});
  const CsvTable t = read_csv(f.final_csv);
  ASSERT_EQ(t.rows.size(), 3u);
  const int col = t.column("phi_plus");
  std::vector<double> p;
  for (const auto& r : t.rows) p.push_back(std::stod(r.at(static_cast<std::size_t>(col))));
  EXPECT_LE(p[0], p[1]);
  EXPECT_LE(p[1], p[2]);
  EXPECT_LT(std::abs(p[1] - p[2]), 0.01);
  EXPECT_EQ(t.header.front(), "protocol.u_mhz");
}

TEST_F(CliTest, SweepErrors) {
  const RunConfig c = parse_config(kBell);
  EXPECT_THROW(cmd_sweep(c, options(), {{"protocol.u_mhz", {}}}), ConfigError);
  EXPECT_THROW(cmd_sweep(c, options(), {{"protocol.nothing", {1.0}}}), ConfigError);
  EXPECT_THROW(cmd_sweep(c, options(), {}), ConfigError);
  const fs::path cfg = write("bell.json", kBell);
  EXPECT_EQ(cli({"sweep", "--config", cfg.string(), "--out-dir", dir_.string(), "--param", "protocol.u_mhz",
                 "--values", ""}),
            kExitConfig);
}

TEST_F(CliTest, MonteCarloNeedsNoiseBlock) {
  EXPECT_THROW(cmd_mc(parse_config(kBell), options()), ConfigError);
}

TEST_F(CliTest, MonteCarloIsDeterministicAndReducesToRun) {
  RunConfig c = load_config(kConfigs / "thermal_fig4c.json");
  c.protocol.cycles = 4;
  CommandOptions a = options();
  a.out_dir = dir_ / "a";
  CommandOptions b = options();
  b.out_dir = dir_ / "b";
  b.threads = 3;
  const McFiles fa = cmd_mc(c, a, 4, {50.0});
  const McFiles fb = cmd_mc(c, b, 4, {50.0});
  for (auto member : {&McFiles::trajectories_csv, &McFiles::summary_csv, &McFiles::series_csv}) {
    EXPECT_EQ(slurp(fa.*member), slurp(fb.*member));
  }

  const McFiles cold = cmd_mc(c, options(), 1, {0.0});
  RunConfig plain = c;
  plain.noise.reset();
  const RunFiles r = cmd_run(plain, options());
  ASSERT_EQ(cold.summaries.size(), 1u);
  const auto& series = cold.summaries[0].trajectories[0].series;
  ASSERT_EQ(series.size(), r.result.records.size());
  for (std::size_t i = 0; i < series.size(); ++i) EXPECT_NEAR(series[i], r.result.records[i].values[0], 1e-6);
}

TEST_F(CliTest, SolveTiming) {
  const Json a = cmd_solve_timing(2.0, 20);
  EXPECT_NEAR(a.at("delta_mhz").get<double>(), 2.0 / std::sqrt(6.0), 1e-12);
  for (const auto& r : a.at("residuals")) EXPECT_LT(r.get<double>(), 1e-9);
  const Json b = cmd_solve_timing(4.0, 20);
  EXPECT_NEAR(b.at("t_us").get<double>(), a.at("t_us").get<double>() / 2.0, 1e-12);
  EXPECT_EQ(a.at("k"), 1);
  EXPECT_EQ(a.at("l"), 5);
  EXPECT_EQ(a.at("j"), 7);
  EXPECT_THROW(cmd_solve_timing(0.0, 20), ConfigError);
}

TEST_F(CliTest, PlotBellRun) {
  const RunFiles f = cmd_run(parse_config(kBell), options());
  const PlotSpec spec = plot_from_csv(read_csv(f.csv), "cycle", "", "bell");
  ASSERT_EQ(spec.series.size(), 4u);
  std::vector<std::string> names;
  for (const auto& s : spec.series) names.push_back(s.name);
  EXPECT_EQ(names, (std::vector<std::string>{"phi_plus", "phi_minus", "psi_plus", "psi_minus"}));
  const fs::path svg = dir_ / "bell.svg";
  cmd_plot(f.csv, svg, "cycle", "", "");
  const std::string text = slurp(svg);
  EXPECT_EQ(text.rfind("<?xml", 0), 0u);
  EXPECT_NE(text.find("psi_minus"), std::string::npos);
}

TEST_F(CliTest, PlotRejectsEmptySeries) {
  const fs::path empty = write("empty.csv", "time_us,cycle,segment,phi_plus\n");
  EXPECT_THROW(cmd_plot(empty, dir_ / "x.svg", "cycle", "", ""), ConfigError);
  const fs::path ragged = write("ragged.csv", "a,b\n1\n");
  EXPECT_THROW(read_csv(ragged), ConfigError);
  EXPECT_EQ(cli({"plot", "--in", empty.string(), "--out", (dir_ / "x.svg").string()}), kExitConfig);
}

TEST_F(CliTest, ExitCodes) {
  const fs::path cfg = write("bell.json", kBell);
  EXPECT_EQ(cli({"run", "--config", (dir_ / "missing.json").string()}), kExitConfig);
  EXPECT_EQ(cli({"frobnicate"}), kExitConfig);
  EXPECT_EQ(cli({"run", "--config", cfg.string(), "--record", "sometimes"}), kExitConfig);
  EXPECT_EQ(cli({"solve-timing", "--omega", "2"}), kExitOk);
  const fs::path unstable = write("unstable.json", R"({
    "protocol": {"kind": "bell", "cycles": 1},
    "integrator": {"method": "RK4_FIXED", "exact_propagators": false, "max_step_us": 0.5},
    "output": {"prefix": "unstable"}
  })");
  EXPECT_EQ(cli({"run", "--config", unstable.string(), "--out-dir", dir_.string()}), kExitNumeric);
}

TEST_F(CliTest, ParseValues) {
  const auto v = parse_values("8, 40,400 ,abc");
  ASSERT_EQ(v.size(), 4u);
  EXPECT_TRUE(v[0].is_number());
  EXPECT_EQ(v[2].get<double>(), 400.0);
  EXPECT_TRUE(v[3].is_string());
  EXPECT_TRUE(parse_values(" , ").empty());
}

}  // namespace
}  // namespace rydprep::cli
