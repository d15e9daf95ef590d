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
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "rydprep/protocols.hpp"

namespace rydprep {

enum class TrapDepthModel { Override, Printed };

struct TrapParams {
  double waist = 1.2e-6;        // m
  double wavelength = 830e-9;   // m, tweezer wavelength
  double power = 174e-6;        // W
  double transition_frequency = kTwoPi * kSpeedOfLight / 780.241e-9;  // rad/s
  double laser_frequency = kTwoPi * kSpeedOfLight / 830e-9;           // rad/s
  double linewidth = kTwoPi * 6.0666e6;                               // rad/s
  double mass = kRb87MassAmu * kAtomicMassUnit;                       // kg
  std::optional<double> depth_override = 1e-3 * kBoltzmann;           // J (1 mK)
};

// I = 2P/(pi w^2).
double trap_intensity(const TrapParams& p);
// depth_override when set. Otherwise the expression
//   pi c^2 Gamma / (2 omega0^2) * 3 / (omega0 - omega') * I
// exactly as printed; note that it carries units of power rather than energy.
double trap_depth(const TrapParams& p);

struct ThermalVariances {
  double x2 = 0.0;  // m^2
  double y2 = 0.0;
  double z2 = 0.0;
  double v2 = 0.0;  // (m/s)^2, each axis
};

// <x^2> = <y^2> = (w^2/4)(k_B T/U_F), <z^2> = (pi^2 w^4/(2 lambda^2))(k_B T/U_F),
// <v^2> = k_B T/m.
ThermalVariances thermal_variances(double temperature, const TrapParams& p);

struct AtomMotion {
  std::array<double, 3> dr{};  // m
  std::array<double, 3> dv{};  // m/s
};

struct ThermalSample {
  std::vector<AtomMotion> atoms;
};

// Standard-normal deviates for one trajectory, six per atom (x, y, z, vx, vy, vz).
// The stream depends only on (seed, index), so the same deviates can be
// rescaled for every temperature.
std::vector<std::array<double, 6>> unit_deviates(std::size_t n_atoms, std::uint64_t seed, std::uint64_t index);
ThermalSample scale_deviates(const std::vector<std::array<double, 6>>& deviates, const ThermalVariances& v);

ThermalSample sample_trajectory(double temperature, const TrapParams& p, std::size_t n_atoms, std::uint64_t seed,
                                std::uint64_t index = 0);

// Atoms sit on the z axis at z_j = j * z_spacing. Displacements advance
// ballistically with segment-local time: dz_j(t) = dz_j + dv_z,j t.
struct MotionFunctions {
  std::function<InteractionSpec(double)> interaction;
  std::vector<std::function<DriveSpec(double)>> drives;
};

// Pair strengths scale as (r_0/r(t))^6 (van der Waals) and drive j gets the
// extra per-atom phase k_eff[j] * (z_atom + dz_atom(t)). Throws NumericError
// when two atoms come closer than 1e-3 of their nominal spacing.
MotionFunctions apply_motion(const ThermalSample& sample, const InteractionSpec& base_interaction,
                             const std::vector<DriveSpec>& drives, double z_spacing,
                             const std::vector<double>& k_eff);

struct MotionSpec {
  double z_spacing = 6.3e-6;                      // m
  double k_eff = kTwoPi * 4.0 / 6.3e-6;           // rad/m, every pulse unless overridden
  std::map<std::string, double> k_eff_by_label;   // per-pulse overrides
  double k_for(const std::string& label) const;
};

// Time-dependent pulse Hamiltonian of one segment for a sampled trajectory.
Hamiltonian motion_pulse_generator(const ThermalSample& sample, const Segment& pulse, const MotionSpec& motion,
                                   const Basis& basis);

struct TrajectoryResult {
  std::size_t index = 0;
  bool valid = true;
  std::string error;
  std::vector<double> series;  // target population per cycle, cycle 0 included
  double final_value() const { return series.empty() ? 0.0 : series.back(); }
};

struct MonteCarloSummary {
  double temperature = 0.0;
  std::vector<TrajectoryResult> trajectories;
  std::size_t n_valid = 0;
  double mean = 0.0;
  double stddev = 0.0;
  std::vector<double> mean_series;
};

struct MonteCarloOptions {
  IntegratorConfig integrator{IntegratorMethod::MagnusMidpoint};
  std::size_t threads = 1;
};

MonteCarloSummary montecarlo(const Protocol& p, const DensityMatrix& rho0, const TargetState& target,
                             double temperature, const TrapParams& trap, const MotionSpec& motion,
                             std::size_t n_traj, std::uint64_t seed, const MonteCarloOptions& options = {});

struct DephasingSurface {
  std::vector<double> gamma_ge;  // rad/s
  std::vector<double> gamma_p;
  std::vector<std::vector<double>> population;  // [i_ge][i_p]
};

// Final target population on the (gamma_ge, gamma_p) grid of a full-model
// protocol; dephasing acts during pulses only.
DephasingSurface dephasing_study(const Protocol& p, const DensityMatrix& rho0, const TargetState& target,
                                 const std::vector<double>& gamma_ge, const std::vector<double>& gamma_p,
                                 const IntegratorConfig& cfg = {}, std::size_t threads = 1);
// Same study on an already compiled dephasing-free protocol; only pulse
// propagators are rebuilt.
DephasingSurface dephasing_study(const CompiledProtocol& base, const DensityMatrix& rho0, const TargetState& target,
                                 const std::vector<double>& gamma_ge, const std::vector<double>& gamma_p,
                                 const IntegratorConfig& cfg = {}, std::size_t threads = 1);

// First x where y crosses `level`, by linear interpolation between grid points.
std::optional<double> interpolate_crossing(const std::vector<double>& x, const std::vector<double>& y, double level);

// Runs fn(i) for i in [0, n) on up to `threads` workers. Exceptions propagate.
void parallel_for(std::size_t n, std::size_t threads, const std::function<void(std::size_t)>& fn);

}  // namespace rydprep
