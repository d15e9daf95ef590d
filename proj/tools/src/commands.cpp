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

#include "rydprep/cli/commands.hpp"

#include <cmath>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "rydprep/cli/output.hpp"
#include "rydprep/log.hpp"

#ifndef RYDPREP_VERSION
#define RYDPREP_VERSION "unknown"
#endif

namespace rydprep::cli {

namespace {

std::string eigen_version() {
  return std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
         std::to_string(EIGEN_MINOR_VERSION);
}

std::string prefix_of(const RunConfig& c) {
  if (!c.output.prefix.empty()) return c.output.prefix;
  if (!c.protocol.name.empty()) return c.protocol.name;
  return c.protocol.kind;
}

Json metadata(const RunConfig& c) {
  return {{"config", to_json(c)},
          {"config_hash", config_hash(c)},
          {"seed", c.seed},
          {"versions", {{"rydprep", RYDPREP_VERSION}, {"eigen", eigen_version()}}}};
}

std::vector<std::string> labels_of(const std::vector<TargetState>& obs) {
  std::vector<std::string> out;
  for (const auto& o : obs) out.push_back(o.label);
  return out;
}

void check_trace(const RunResult& r) {
  if (r.max_trace_error >= 1e-8) {
    std::ostringstream msg;
    msg << "trace drift " << r.max_trace_error << " exceeds 1e-8";
    warn(msg.str());
  }
}

// Every combination of axis values, first axis slowest.
std::vector<std::vector<Json>> cartesian(const std::vector<SweepAxis>& axes) {
  std::vector<std::vector<Json>> out{{}};
  for (const auto& axis : axes) {
    std::vector<std::vector<Json>> next;
    for (const auto& prefix : out) {
      for (const auto& v : axis.values) {
        auto row = prefix;
        row.push_back(v);
        next.push_back(std::move(row));
      }
    }
    out = std::move(next);
  }
  return out;
}

Cell json_cell(const Json& v) {
  if (v.is_number_integer()) return v.get<long long>();
  if (v.is_number()) return v.get<double>();
  if (v.is_string()) return v.get<std::string>();
  return v.dump();
}

}  // namespace

RunConfig effective_config(const RunConfig& c, const CommandOptions& o) {
  RunConfig out = c;
  if (o.seed) out.seed = *o.seed;
  if (o.record) {
    std::string r = *o.record;
    for (auto& ch : r) ch = static_cast<char>(std::toupper(static_cast<unsigned char>(ch)));
    if (r != "CYCLE" && r != "SEGMENT") throw ConfigError("--record must be cycle or segment");
    out.output.record = r;
  }
  return out;
}

RunFiles cmd_run(const RunConfig& config, const CommandOptions& o) {
  const RunConfig c = effective_config(config, o);
  const Study s = build_study(c);
  RunResult r = run(s.protocol, s.rho0, s.observables, s.record, s.integrator);
  check_trace(r);

  std::vector<std::string> header{"time_us", "cycle", "segment"};
  for (const auto& l : r.observables) header.push_back(l);
  header.push_back("trace_error");
  header.push_back("hermiticity_error");
  CsvWriter csv(header);
  for (const auto& rec : r.records) {
    std::vector<Cell> row{units::to_us(rec.time), static_cast<long long>(rec.cycle), rec.label};
    for (double v : rec.values) row.emplace_back(v);
    row.emplace_back(rec.trace_error);
    row.emplace_back(rec.hermiticity_error);
    csv.add_row(std::move(row));
  }

  const std::string prefix = prefix_of(c);
  const std::filesystem::path csv_path = o.out_dir / (prefix + ".csv");
  const std::filesystem::path json_path = o.out_dir / (prefix + ".json");
  Json j = metadata(c);
  j["protocol"] = protocol_to_json(s.protocol);
  j["observables"] = r.observables;
  Json final = Json::object();
  for (std::size_t k = 0; k < r.observables.size(); ++k) final[r.observables[k]] = r.records.back().values[k];
  j["final"] = final;
  j["final_cycle"] = r.records.back().cycle;
  j["total_time_us"] = units::to_us(r.records.back().time);
  j["records"] = r.records.size();
  j["max_trace_error"] = r.max_trace_error;
  j["max_hermiticity_error"] = r.max_hermiticity_error;
  j["min_eigenvalue"] = r.min_eigenvalue ? Json(*r.min_eigenvalue) : Json(nullptr);
  j["series_csv"] = csv_path.filename().string();
  csv.write(csv_path);
  write_json(json_path, j);
  return {csv_path, json_path, std::move(r)};
}

SweepFiles cmd_sweep(const RunConfig& config, const CommandOptions& o, const std::vector<SweepAxis>& cli_axes) {
  const RunConfig c = effective_config(config, o);
  const std::vector<SweepAxis> axes = cli_axes.empty() ? c.sweep : cli_axes;
  if (axes.empty()) throw ConfigError("sweep needs --param/--values or a sweep block in the config");
  for (const auto& a : axes) {
    if (a.values.empty()) throw ConfigError("sweep parameter '" + a.param + "' has an empty value list");
  }
  const auto points = cartesian(axes);

  std::vector<RunConfig> configs;
  for (const auto& values : points) {
    RunConfig pc = c;
    pc.sweep.clear();
    for (std::size_t k = 0; k < axes.size(); ++k) pc = with_value(pc, axes[k].param, values[k]);
    configs.push_back(pc);
  }
  std::vector<Study> studies;
  for (const auto& pc : configs) studies.push_back(build_study(pc));
  const auto labels = labels_of(studies.front().observables);
  for (const auto& st : studies) {
    if (labels_of(st.observables) != labels) throw ConfigError("sweep points must share the same observables");
  }

  std::vector<std::optional<RunResult>> results(points.size());
  parallel_for(points.size(), o.threads, [&](std::size_t i) {
    const Study& st = studies[i];
    results[i] = run(st.protocol, st.rho0, st.observables, st.record, st.integrator);
  });

  std::vector<std::string> header;
  for (const auto& a : axes) header.push_back(a.param);
  std::vector<std::string> final_header = header;
  for (const char* h : {"time_us", "cycle", "segment"}) header.push_back(h);
  for (const auto& l : labels) {
    header.push_back(l);
    final_header.push_back(l);
  }
  header.push_back("trace_error");
  final_header.push_back("total_time_us");
  CsvWriter csv(header), final_csv(final_header);
  Json point_list = Json::array();
  for (std::size_t i = 0; i < points.size(); ++i) {
    const RunResult& r = *results[i];
    check_trace(r);
    for (const auto& rec : r.records) {
      std::vector<Cell> row;
      for (const auto& v : points[i]) row.push_back(json_cell(v));
      row.emplace_back(units::to_us(rec.time));
      row.emplace_back(static_cast<long long>(rec.cycle));
      row.emplace_back(rec.label);
      for (double v : rec.values) row.emplace_back(v);
      row.emplace_back(rec.trace_error);
      csv.add_row(std::move(row));
    }
    std::vector<Cell> frow;
    for (const auto& v : points[i]) frow.push_back(json_cell(v));
    Json values = Json::object();
    Json final = Json::object();
    for (std::size_t k = 0; k < axes.size(); ++k) values[axes[k].param] = points[i][k];
    for (std::size_t k = 0; k < labels.size(); ++k) {
      frow.emplace_back(r.records.back().values[k]);
      final[labels[k]] = r.records.back().values[k];
    }
    frow.emplace_back(units::to_us(r.records.back().time));
    final_csv.add_row(std::move(frow));
    point_list.push_back({{"values", values},
                          {"config_hash", config_hash(configs[i])},
                          {"final", final},
                          {"max_trace_error", r.max_trace_error}});
  }

  const std::string prefix = prefix_of(c);
  SweepFiles files{o.out_dir / (prefix + "_sweep.csv"), o.out_dir / (prefix + "_sweep_final.csv"),
                   o.out_dir / (prefix + "_sweep.json")};
  RunConfig embedded = c;
  embedded.sweep = axes;
  Json j = metadata(embedded);
  j["observables"] = labels;
  j["points"] = point_list;
  j["series_csv"] = files.csv.filename().string();
  j["final_csv"] = files.final_csv.filename().string();
  csv.write(files.csv);
  final_csv.write(files.final_csv);
  write_json(files.json, j);
  return files;
}

McFiles cmd_mc(const RunConfig& config, const CommandOptions& o, std::optional<std::size_t> trajectories,
               const std::vector<double>& temperatures_uk) {
  RunConfig c = effective_config(config, o);
  if (!c.noise || !c.noise->thermal) throw ConfigError("mc needs a noise.thermal block in the config");
  ThermalConfig& th = *c.noise->thermal;
  if (trajectories) th.trajectories = *trajectories;
  if (!temperatures_uk.empty()) th.temperatures_uk = temperatures_uk;
  if (th.trajectories < 1) throw ConfigError("noise.thermal.trajectories must be at least 1");
  if (th.temperatures_uk.empty()) throw ConfigError("noise.thermal.temperatures_uk must not be empty");
  for (double t : th.temperatures_uk) {
    if (!(t >= 0.0)) throw ConfigError("noise.thermal.temperatures_uk must be >= 0");
  }

  const Study s = build_study(c);
  const TrapParams trap = build_trap(th);
  const MotionSpec motion = build_motion(th);
  MonteCarloOptions options;
  options.integrator.method = parse_integrator(th.integrator);
  options.integrator.slice = units::us(th.slice_us);
  options.integrator.rel_tol = s.integrator.rel_tol;
  options.integrator.abs_tol = s.integrator.abs_tol;
  options.threads = o.threads;
  const TargetState& target = s.observables.front();

  McFiles files;
  for (double t : th.temperatures_uk) {
    files.summaries.push_back(
        montecarlo(s.protocol, s.rho0, target, units::uk(t), trap, motion, th.trajectories, c.seed, options));
  }

  CsvWriter traj({"temperature_uk", "trajectory", "valid", target.label});
  CsvWriter summary({"temperature_uk", "n_valid", "mean", "stddev"});
  CsvWriter series({"temperature_uk", "cycle", "mean"});
  Json temps = Json::array();
  for (std::size_t k = 0; k < files.summaries.size(); ++k) {
    const auto& m = files.summaries[k];
    const double t = th.temperatures_uk[k];
    Json invalid = Json::array();
    for (const auto& r : m.trajectories) {
      traj.add_row({t, static_cast<long long>(r.index), static_cast<long long>(r.valid ? 1 : 0), r.final_value()});
      if (!r.valid) invalid.push_back({{"trajectory", r.index}, {"error", r.error}});
    }
    summary.add_row({t, static_cast<long long>(m.n_valid), m.mean, m.stddev});
    for (std::size_t cyc = 0; cyc < m.mean_series.size(); ++cyc) {
      series.add_row({t, static_cast<long long>(cyc), m.mean_series[cyc]});
    }
    temps.push_back({{"temperature_uk", t},
                     {"n_valid", m.n_valid},
                     {"mean", m.mean},
                     {"stddev", m.stddev},
                     {"invalid", invalid}});
  }

  const std::string prefix = prefix_of(c);
  files.trajectories_csv = o.out_dir / (prefix + "_mc_trajectories.csv");
  files.summary_csv = o.out_dir / (prefix + "_mc.csv");
  files.series_csv = o.out_dir / (prefix + "_mc_series.csv");
  files.json = o.out_dir / (prefix + "_mc.json");
  Json j = metadata(c);
  j["observable"] = target.label;
  j["trajectories"] = th.trajectories;
  j["trap_depth_uk"] = trap_depth(trap) / kBoltzmann * 1e6;
  j["temperatures"] = temps;
  traj.write(files.trajectories_csv);
  summary.write(files.summary_csv);
  series.write(files.series_csv);
  write_json(files.json, j);
  return files;
}

Json cmd_solve_timing(double omega_a_mhz, int max_k) {
  if (!(omega_a_mhz > 0.0)) throw ConfigError("--omega must be positive");
  const double omega = units::mhz(omega_a_mhz);
  const TimingSolution s = solve_stepC_timing(omega, max_k);
  const auto res = s.residuals(omega);
  return {{"omega_a_mhz", omega_a_mhz},
          {"delta_mhz", units::to_mhz(s.delta)},
          {"delta_over_omega_a", s.delta / omega},
          {"t_us", units::to_us(s.t)},
          {"k", s.k},
          {"l", s.l},
          {"j", s.j},
          {"residuals", {res[0], res[1], res[2]}}};
}

void cmd_plot(const std::filesystem::path& in, const std::filesystem::path& out, const std::string& panel,
              const std::string& group, const std::string& title) {
  const CsvTable table = read_csv(in);
  PlotSpec spec = plot_from_csv(table, panel, group, title.empty() ? in.stem().string() : title);
  write_text(out, render_svg(spec));
}

std::vector<Json> parse_values(const std::string& list) {
  std::vector<Json> out;
  std::stringstream in(list);
  std::string item;
  while (std::getline(in, item, ',')) {
    const auto b = item.find_first_not_of(" \t");
    const auto e = item.find_last_not_of(" \t");
    if (b == std::string::npos) continue;
    item = item.substr(b, e - b + 1);
    Json v = Json::parse(item, nullptr, false);
    out.push_back(v.is_discarded() || !(v.is_number() || v.is_boolean()) ? Json(item) : v);
  }
  return out;
}

int main_entry(int argc, char** argv) {
  CLI::App app{"Simulator for dissipative entangled-state preparation in Rydberg atom arrays"};
  app.set_version_flag("--version", RYDPREP_VERSION);
  app.require_subcommand(1);

  CommandOptions opts;
  std::string config_path;
  std::string record;
  std::uint64_t seed = 0;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "Run config (JSON)")->required()->check(CLI::ExistingFile);
    sub->add_option("--out-dir", opts.out_dir, "Output directory")->capture_default_str();
    sub->add_option("--seed", seed, "Override the config seed");
    sub->add_option("--threads", opts.threads, "Worker threads")->check(CLI::PositiveNumber)->capture_default_str();
    sub->add_option("--record", record, "Record resolution")->check(CLI::IsMember({"segment", "cycle"}));
  };

  auto* run_cmd = app.add_subcommand("run", "Run one protocol and write its population series");
  add_common(run_cmd);

  auto* sweep_cmd = app.add_subcommand("sweep", "Run a protocol over a grid of parameter values");
  add_common(sweep_cmd);
  std::vector<std::string> params;
  std::vector<std::string> values;
  sweep_cmd->add_option("--param", params, "Dotted config path, e.g. protocol.u_mhz (repeatable)");
  sweep_cmd->add_option("--values", values, "Comma-separated values, one list per --param");

  auto* mc_cmd = app.add_subcommand("mc", "Thermal-motion Monte Carlo");
  add_common(mc_cmd);
  std::size_t n_traj = 0;
  std::string temps;
  mc_cmd->add_option("--trajectories", n_traj, "Trajectories per temperature");
  mc_cmd->add_option("--temperature", temps, "Comma-separated temperatures in uK");

  auto* timing_cmd = app.add_subcommand("solve-timing", "Solve the step-C detuning and duration");
  double omega = 0.0;
  int max_k = 20;
  timing_cmd->add_option("--omega", omega, "Omega_a in MHz (2pi implicit)")->required();
  timing_cmd->add_option("--max-k", max_k, "Largest k to search")->capture_default_str();

  auto* plot_cmd = app.add_subcommand("plot", "Render a result CSV as an SVG line plot");
  std::string plot_in, plot_out, panel = "cycle", group, title;
  plot_cmd->add_option("--in", plot_in, "Input CSV")->required();
  plot_cmd->add_option("--out", plot_out, "Output SVG")->required();
  plot_cmd->add_option("--panel", panel, "x axis: cycle, time or a column name")->capture_default_str();
  plot_cmd->add_option("--group", group, "Column whose values split the series");
  plot_cmd->add_option("--title", title, "Plot title");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  auto load = [&](CLI::App* sub) {
    RunConfig c = load_config(config_path);
    if (c.output.prefix.empty()) c.output.prefix = std::filesystem::path(config_path).stem().string();
    if (sub->count("--seed")) opts.seed = seed;
    if (!record.empty()) opts.record = record;
    return c;
  };

  try {
    if (*run_cmd) {
      const RunFiles f = cmd_run(load(run_cmd), opts);
      std::cout << "wrote " << f.csv.string() << " and " << f.json.string() << "\n";
      const auto& last = f.result.records.back();
      for (std::size_t k = 0; k < f.result.observables.size(); ++k) {
        std::cout << f.result.observables[k] << " = " << format_number(last.values[k]) << "\n";
      }
    } else if (*sweep_cmd) {
      const RunConfig c = load(sweep_cmd);
      std::vector<SweepAxis> axes;
      if (params.size() != values.size()) throw ConfigError("give one --values list per --param");
      for (std::size_t k = 0; k < params.size(); ++k) {
        SweepAxis a{params[k], parse_values(values[k])};
        if (a.values.empty()) throw ConfigError("--values for '" + params[k] + "' is empty");
        axes.push_back(a);
      }
      const SweepFiles f = cmd_sweep(c, opts, axes);
      std::cout << "wrote " << f.csv.string() << ", " << f.final_csv.string() << " and " << f.json.string() << "\n";
    } else if (*mc_cmd) {
      const RunConfig c = load(mc_cmd);
      std::vector<double> t;
      for (const auto& v : parse_values(temps)) {
        if (!v.is_number()) throw ConfigError("--temperature values must be numbers");
        t.push_back(v.get<double>());
      }
      if (mc_cmd->count("--temperature") && t.empty()) throw ConfigError("--temperature list is empty");
      std::optional<std::size_t> n;
      if (mc_cmd->count("--trajectories")) n = n_traj;
      const McFiles f = cmd_mc(c, opts, n, t);
      for (const auto& m : f.summaries) {
        std::cout << "T = " << format_number(m.temperature * 1e6) << " uK: mean " << format_number(m.mean)
                  << " (" << m.n_valid << " valid)\n";
      }
      std::cout << "wrote " << f.summary_csv.string() << "\n";
    } else if (*timing_cmd) {
      std::cout << cmd_solve_timing(omega, max_k).dump(2) << "\n";
    } else if (*plot_cmd) {
      cmd_plot(plot_in, plot_out, panel, group, title);
      std::cout << "wrote " << plot_out << "\n";
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const NumericError& e) {
    std::cerr << "numeric failure: " << e.what();
    if (e.segment()) std::cerr << " (segment " << *e.segment() << ")";
    std::cerr << "\n";
    return kExitNumeric;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitFailure;
  }
  return kExitOk;
}

}  // namespace rydprep::cli
