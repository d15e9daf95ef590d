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

#include <atomic>
#include <cmath>

#include "rydprep/noise.hpp"
#include "rydprep/oracle.hpp"
#include "support.hpp"

namespace rydprep {
namespace {

using L = Level;

TrapParams printed_trap() {
  TrapParams p;
  p.depth_override.reset();
  return p;
}

Protocol bell(std::size_t cycles) {
  return bell_protocol(units::mhz(2.0), units::mhz(1.2), units::mhz(6.0), units::mhz(400.0), units::us(2.0), cycles);
}

TEST(Trap, OverrideAndIntensity) {
  TrapParams p;
  p.depth_override = 1.234e-26;
  EXPECT_EQ(trap_depth(p), 1.234e-26);
  EXPECT_NEAR(trap_intensity(p) / 7.69e7, 1.0, 1e-3);
}

TEST(Trap, PrintedDepthIsLinearInPower) {
  TrapParams p = printed_trap();
  const double d1 = trap_depth(p);
  p.power *= 2.0;
  EXPECT_NEAR(trap_depth(p) / d1, 2.0, 1e-12);
  p.laser_frequency = p.transition_frequency;
  EXPECT_THROW(trap_depth(p), std::invalid_argument);
}

TEST(Thermal, VarianceFormulas) {
  const TrapParams p;
  const double t = units::uk(5.2);
  const ThermalVariances v = thermal_variances(t, p);
  const double ratio = kBoltzmann * t / (1e-3 * kBoltzmann);
  EXPECT_NEAR(v.x2, p.waist * p.waist / 4.0 * ratio, 1e-30);
  EXPECT_DOUBLE_EQ(v.y2, v.x2);
  EXPECT_NEAR(v.z2 / (kPi * kPi * std::pow(p.waist, 4) / (2.0 * p.wavelength * p.wavelength) * ratio), 1.0, 1e-12);
  EXPECT_NEAR(v.v2 / (kBoltzmann * t / p.mass), 1.0, 1e-12);
}

TEST(Thermal, ZeroAndLinearLimits) {
  const TrapParams p;
  const ThermalVariances zero = thermal_variances(0.0, p);
  EXPECT_EQ(zero.x2 + zero.y2 + zero.z2 + zero.v2, 0.0);
  const ThermalVariances a = thermal_variances(units::uk(30.0), p);
  const ThermalVariances b = thermal_variances(units::uk(60.0), p);
  EXPECT_NEAR(b.x2 / a.x2, 2.0, 1e-12);
  EXPECT_NEAR(b.z2 / a.z2, 2.0, 1e-12);
  EXPECT_NEAR(b.v2 / a.v2, 2.0, 1e-12);
  EXPECT_THROW(thermal_variances(-1.0, p), std::invalid_argument);
}

TEST(Sampling, Deterministic) {
  const TrapParams p;
  const ThermalSample a = sample_trajectory(units::uk(20.0), p, 2, 99, 3);
  const ThermalSample b = sample_trajectory(units::uk(20.0), p, 2, 99, 3);
  const ThermalSample c = sample_trajectory(units::uk(20.0), p, 2, 99, 4);
  for (std::size_t j = 0; j < 2; ++j) {
    EXPECT_EQ(a.atoms[j].dr, b.atoms[j].dr);
    EXPECT_EQ(a.atoms[j].dv, b.atoms[j].dv);
  }
  EXPECT_NE(a.atoms[0].dr, c.atoms[0].dr);
}

TEST(Sampling, Statistics) {
  const TrapParams p;
  const double t = units::uk(40.0);
  const ThermalVariances v = thermal_variances(t, p);
  const int n = 10000;
  std::array<double, 6> sum{}, sum2{};
  for (int i = 0; i < n; ++i) {
    const AtomMotion m = sample_trajectory(t, p, 1, 2026, static_cast<std::uint64_t>(i)).atoms[0];
    const std::array<double, 6> x{m.dr[0], m.dr[1], m.dr[2], m.dv[0], m.dv[1], m.dv[2]};
    for (int k = 0; k < 6; ++k) {
      sum[k] += x[k];
      sum2[k] += x[k] * x[k];
    }
  }
  const std::array<double, 6> var{v.x2, v.y2, v.z2, v.v2, v.v2, v.v2};
  for (int k = 0; k < 6; ++k) {
    const double mean = sum[k] / n;
    EXPECT_LT(std::abs(mean), 3.0 * std::sqrt(var[k]) / 100.0) << "axis " << k;
    EXPECT_NEAR(sum2[k] / n / var[k], 1.0, 0.05) << "axis " << k;
  }
}

TEST(Motion, ZeroSampleKeepsBaseValues) {
  ThermalSample s;
  s.atoms.resize(2);
  const InteractionSpec base = InteractionSpec::uniform(2, units::mhz(400.0));
  const DriveSpec d = DriveSpec::for_source(DriveSource::G, units::mhz(2.0));
  const MotionSpec motion;
  const MotionFunctions f = apply_motion(s, base, {d}, motion.z_spacing, {motion.k_eff});
  EXPECT_EQ(f.interaction(0.3e-6), base);
  const DriveSpec moved = f.drives[0](0.1e-6);
  ASSERT_EQ(moved.per_atom_phase.size(), 2u);
  // k_eff z is a multiple of 2pi at the default spacing.
  EXPECT_NEAR(std::remainder(moved.per_atom_phase[1], kTwoPi), 0.0, 1e-9);
  EXPECT_EQ(moved.per_atom_phase[0], 0.0);
}

TEST(Motion, AxialShiftRescalesInteraction) {
  ThermalSample s;
  s.atoms.resize(2);
  const double z = 6.3e-6, dz = 0.2e-6;
  s.atoms[1].dr[2] = dz;
  const InteractionSpec base = InteractionSpec::uniform(2, units::mhz(400.0));
  const MotionFunctions f = apply_motion(s, base, {}, z, {});
  EXPECT_NEAR(f.interaction(0.0).pairs[0].strength / base.pairs[0].strength, std::pow(z / (z + dz), 6), 1e-12);
  s.atoms[1].dr[2] = -z;
  EXPECT_THROW(apply_motion(s, base, {}, z, {}).interaction(0.0), NumericError);
}

TEST(Motion, PulseGeneratorMatchesDirectConstruction) {
  const Basis b = build_basis(2, SchemeKind::ReducedGER);
  const ThermalSample s = sample_trajectory(units::uk(200.0), TrapParams{}, 2, 5, 0);
  const Protocol p = bell(1);
  const MotionSpec motion;
  for (std::size_t seg : {0u, 4u}) {
    const Segment& pulse = p.segments[seg];
    const Hamiltonian h = motion_pulse_generator(s, pulse, motion, b);
    for (double t : {0.0, 0.17e-6, 0.45e-6}) {
      DriveSpec d = pulse.drive;
      d.per_atom_phase.clear();
      double zs[2];
      for (std::size_t j = 0; j < 2; ++j) {
        zs[j] = static_cast<double>(j) * motion.z_spacing + s.atoms[j].dr[2] + s.atoms[j].dv[2] * t;
        d.per_atom_phase.push_back(motion.k_eff * zs[j]);
      }
      double r2 = 0.0;
      for (int k = 0; k < 3; ++k) {
        const double dk = (k == 2 ? zs[1] - zs[0]
                                  : (s.atoms[1].dr[k] + s.atoms[1].dv[k] * t) - (s.atoms[0].dr[k] + s.atoms[0].dv[k] * t));
        r2 += dk * dk;
      }
      const double u = pulse.interaction.pairs[0].strength * std::pow(motion.z_spacing * motion.z_spacing / r2, 3);
      const Matrix expect =
          drive_hamiltonian(d, b, t).dense() + rydberg_interaction(InteractionSpec::uniform(2, u), b).dense();
      const Matrix got = Matrix(h.matrix_at(t));
      EXPECT_LT((got - expect).cwiseAbs().maxCoeff(), 1e-9 * expect.cwiseAbs().maxCoeff()) << "t = " << t;
    }
  }
}

TEST(MonteCarlo, ZeroTemperatureMatchesNoiselessRun) {
  const Protocol p = bell(6);
  const DensityMatrix rho0 = initial_state({InitialKind::FullyMixedGE, {}}, p.basis());
  const TargetState phi = target_state(TargetKind::BellPhiPlus, p.basis());
  const RunResult ref = run(p, rho0, {phi});
  const MonteCarloSummary mc = montecarlo(p, rho0, phi, 0.0, TrapParams{}, MotionSpec{}, 3, 1);
  ASSERT_EQ(mc.n_valid, 3u);
  for (const auto& tr : mc.trajectories) {
    ASSERT_EQ(tr.series.size(), ref.records.size());
    for (std::size_t c = 0; c < tr.series.size(); ++c) EXPECT_NEAR(tr.series[c], ref.records[c].values[0], 1e-6);
  }
  EXPECT_NEAR(mc.stddev, 0.0, 1e-9);
}

TEST(MonteCarlo, ReproducibleAndMonotoneInTemperature) {
  const Protocol p = bell(20);
  const DensityMatrix rho0 = initial_state({InitialKind::FullyMixedGE, {}}, p.basis());
  const TargetState phi = target_state(TargetKind::BellPhiPlus, p.basis());
  MonteCarloOptions opt;
  opt.threads = 2;
  double prev = 1.0;
  for (double t_uk : {20.0, 100.0, 400.0}) {
    const MonteCarloSummary mc = montecarlo(p, rho0, phi, units::uk(t_uk), TrapParams{}, MotionSpec{}, 6, 2026, opt);
    EXPECT_EQ(mc.n_valid, 6u);
    EXPECT_LE(mc.mean, prev + 1e-12) << t_uk << " uK";
    prev = mc.mean;
    if (t_uk == 100.0) {
      const MonteCarloSummary again = montecarlo(p, rho0, phi, units::uk(t_uk), TrapParams{}, MotionSpec{}, 6, 2026);
      EXPECT_EQ(again.mean, mc.mean);
      EXPECT_EQ(again.mean_series, mc.mean_series);
    }
  }
  EXPECT_THROW(montecarlo(p, rho0, phi, 0.0, TrapParams{}, MotionSpec{}, 0, 1), std::invalid_argument);
}

// One atom, one pulse, one relaxation in the six-level model: dim 6 keeps the
// dephasing surface cheap.
Protocol single_atom_full(std::size_t cycles) {
  FullModelParams f;
  f.omega_a1 = f.omega_a2 = units::mhz(200.0);
  f.delta = units::mhz(10000.0);
  f.gamma_p1 = units::mhz(6.0);
  f.recycle_rate = units::mhz(6.0);
  Protocol p;
  p.name = "single";
  p.n_atoms = 1;
  p.cycles = cycles;
  p.omega_b = units::mhz(1.2);
  p.gamma = units::mhz(6.0);
  p.segments = {Segment::pulse("A", DriveSpec::for_source(DriveSource::G, units::mhz(2.0)), {}, units::us(0.25)),
                Segment::relax("relax_A", units::us(2.0), false)};
  return to_full_model(p, f);
}

TEST(Dephasing, SurfaceIsMonotoneAndMatchesCleanRun) {
  const Protocol p = single_atom_full(10);
  const Basis b = p.basis();
  const DensityMatrix rho0 = DensityMatrix::from_pure(product_state(b, "g"));
  const TargetState e{TargetKind::XState, "e", product_state(b, "e")};
  const std::vector<double> ge{0.0, units::khz(50.0), units::khz(200.0)};
  const std::vector<double> gp{0.0, units::khz(100.0)};
  const DephasingSurface s = dephasing_study(p, rho0, e, ge, gp);
  EXPECT_NEAR(s.population[0][0], run(p, rho0, {e}).records.back().values[0], 1e-12);
  for (std::size_t i = 0; i < ge.size(); ++i) {
    for (std::size_t j = 0; j < gp.size(); ++j) {
      if (i > 0) {
        EXPECT_LE(s.population[i][j], s.population[i - 1][j] + 1e-12);
      }
      if (j > 0) {
        EXPECT_LE(s.population[i][j], s.population[i][j - 1] + 1e-12);
      }
    }
  }
  EXPECT_LT(s.population[2][0], s.population[0][0]);
  EXPECT_THROW(dephasing_study(bell(1), initial_state({}, bell(1).basis()), e, ge, gp), std::invalid_argument);
}

TEST(Crossing, LinearInterpolation) {
  EXPECT_NEAR(*interpolate_crossing({0.0, 3.0, 6.0}, {1.0, 0.95, 0.85}, 0.9), 4.5, 1e-12);
  EXPECT_FALSE(interpolate_crossing({0.0, 1.0}, {1.0, 0.99}, 0.9).has_value());
}

TEST(ParallelFor, VisitsEveryIndexOnce) {
  std::vector<std::atomic<int>> hits(37);
  parallel_for(hits.size(), 4, [&](std::size_t i) { hits[i]++; });
  for (const auto& h : hits) EXPECT_EQ(h.load(), 1);
}

}  // namespace
}  // namespace rydprep
