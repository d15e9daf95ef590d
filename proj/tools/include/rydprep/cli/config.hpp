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

#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "rydprep/noise.hpp"

namespace rydprep::cli {

using Json = nlohmann::json;

// Every quantity is stored in the unit named by its field suffix. Frequencies
// carry an implicit 2pi: omega_a_mhz = 2 means Omega_a = 2pi x 2 MHz.

struct PairConfig {
  std::size_t i = 0;
  std::size_t j = 1;
  double u_mhz = 0.0;
  bool operator==(const PairConfig&) const = default;
};

struct SegmentConfig {
  std::string kind = "PULSE";  // PULSE | RELAX | MICROWAVE
  std::string label;
  double duration_us = 0.0;
  // PULSE
  std::string source = "G";
  double rabi_mhz = 0.0;
  double detuning_mhz = 0.0;
  std::string envelope = "SQUARE";
  double sigma_us = 0.0;
  std::vector<double> phases;
  std::string frame = "STATIC";
  std::vector<PairConfig> interaction;
  double square_duration_us = 0.0;
  // RELAX
  bool include_h = false;
  // MICROWAVE
  double omega_c_khz = 0.0;
  bool operator==(const SegmentConfig&) const = default;
};

struct FullConfig {
  double omega_a1_mhz = 200.0;
  double omega_a2_mhz = 200.0;
  double delta_mhz = 10000.0;
  bool light_shift_compensation = true;
  double gamma_p1_mhz = 6.0;
  double r_lifetime_us = 343.0;
  std::array<double, 3> r_branching{1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0};
  double gamma_p2_mhz = 0.0;
  std::array<double, 3> p2_branching{1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0};
  double recycle_mhz = 6.0;
  double gamma_ge_khz = 0.0;
  double gamma_p_khz = 0.0;
  bool operator==(const FullConfig&) const = default;
};

struct ProtocolConfig {
  std::string kind = "bell";  // bell | qutrit | ghz | explicit
  std::string name;           // defaults to kind
  std::size_t n_atoms = 2;
  std::size_t cycles = 20;
  double omega_a_mhz = 2.0;
  double omega_b_mhz = 1.2;
  double gamma_mhz = 6.0;
  double u_mhz = 400.0;
  double relax_us = 2.0;
  double omega_c_khz = 20.0;
  std::string microwave_placement = "AFTER_LAST_RELAX";  // or AFTER_EACH_RELAX
  std::string timing = "SOLVER";                          // ghz: SOLVER | RESONANT | PRINTED
  int max_k = 20;
  std::string scheme = "REDUCED_GER";  // explicit only
  std::vector<SegmentConfig> segments;  // explicit only
  std::string envelope = "SQUARE";      // SQUARE | GAUSSIAN
  std::map<std::string, double> sigma_us;
  double timing_error = 0.0;
  std::vector<std::string> timing_error_steps;  // empty means every pulse
  std::string model = "EFFECTIVE";              // EFFECTIVE | FULL
  FullConfig full;
  bool operator==(const ProtocolConfig&) const = default;
};

struct MixConfig {
  double weight = 0.0;
  std::string state;
  bool operator==(const MixConfig&) const = default;
};

struct InitialConfig {
  std::string kind = "FULLY_MIXED_GE";  // FULLY_MIXED_GE | FULLY_MIXED_GEH | MIX_LIST
  std::vector<MixConfig> mix;
  bool operator==(const InitialConfig&) const = default;
};

struct ThermalConfig {
  std::vector<double> temperatures_uk{5.2};
  std::size_t trajectories = 100;
  double waist_um = 1.2;
  double wavelength_nm = 830.0;
  double power_uw = 174.0;
  double transition_nm = 780.241;
  double linewidth_mhz = 6.0666;
  std::string depth_model = "OVERRIDE";  // OVERRIDE | PRINTED
  double depth_mk = 1.0;
  double z_spacing_um = 6.3;
  double k_eff_rad_per_um = kTwoPi * 4.0 / 6.3;
  std::map<std::string, double> k_eff_by_step_rad_per_um;
  std::string integrator = "MAGNUS_MIDPOINT";
  double slice_us = 0.005;
  bool operator==(const ThermalConfig&) const = default;
};

struct NoiseConfig {
  std::optional<ThermalConfig> thermal;
  bool operator==(const NoiseConfig&) const = default;
};

struct IntegratorSettings {
  std::string method = "RK45_ADAPTIVE";
  double rel_tol = 1e-8;
  double abs_tol = 1e-10;
  double max_step_us = 0.0;
  double slice_us = 0.005;
  bool exact_propagators = true;
  std::size_t max_superoperator_dim = 36;
  bool operator==(const IntegratorSettings&) const = default;
};

struct OutputConfig {
  std::string prefix;  // defaults to the protocol name
  std::string record = "CYCLE";
  bool operator==(const OutputConfig&) const = default;
};

struct SweepAxis {
  std::string param;  // dotted path into the config, e.g. protocol.u_mhz
  std::vector<Json> values;
  bool operator==(const SweepAxis&) const = default;
};

struct RunConfig {
  ProtocolConfig protocol;
  InitialConfig initial_state;
  std::vector<std::string> observables;  // empty means the protocol defaults
  std::optional<NoiseConfig> noise;
  IntegratorSettings integrator;
  OutputConfig output;
  std::vector<SweepAxis> sweep;
  std::uint64_t seed = 1;
  bool operator==(const RunConfig&) const = default;
};

// Throws ConfigError with the field path and, when `text` is given, its line.
RunConfig from_json(const Json& j, const std::string& text = {});
Json to_json(const RunConfig& c);
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::filesystem::path& path);

// FNV-1a 64 of the canonical JSON dump, as 16 hex digits.
std::string config_hash(const RunConfig& c);

// Sets a dotted path in the serialized config and re-validates. A missing
// leading "protocol." is tried as well. Throws ConfigError for unknown paths.
RunConfig with_value(const RunConfig& c, const std::string& param, const Json& value);

// Everything a run needs, in SI units.
struct Study {
  Protocol protocol;
  DensityMatrix rho0;
  std::vector<TargetState> observables;
  IntegratorConfig integrator;
  RecordMode record = RecordMode::Cycle;
};

Study build_study(const RunConfig& c);
Protocol build_protocol(const ProtocolConfig& c);
TrapParams build_trap(const ThermalConfig& c);
MotionSpec build_motion(const ThermalConfig& c);

// Explicit protocol JSON with every duration in microseconds.
Json protocol_to_json(const Protocol& p);

}  // namespace rydprep::cli
