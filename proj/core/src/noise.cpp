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

#include "rydprep/noise.hpp"

#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <random>
#include <sstream>
#include <thread>

namespace rydprep {

namespace {

std::array<double, 3> position(const ThermalSample& s, std::size_t atom, double z_spacing, double t) {
  const AtomMotion& m = s.atoms.at(atom);
  return {m.dr[0] + m.dv[0] * t, m.dr[1] + m.dv[1] * t, static_cast<double>(atom) * z_spacing + m.dr[2] + m.dv[2] * t};
}

// (r0 / r(t))^6 for a pair.
double pair_scale(const ThermalSample& s, std::size_t i, std::size_t j, double z_spacing, double t) {
  const auto a = position(s, i, z_spacing, t);
  const auto b = position(s, j, z_spacing, t);
  const double r0 = std::abs(static_cast<double>(j) - static_cast<double>(i)) * z_spacing;
  const double r = std::sqrt((a[0] - b[0]) * (a[0] - b[0]) + (a[1] - b[1]) * (a[1] - b[1]) + (a[2] - b[2]) * (a[2] - b[2]));
  if (!(r > 1e-3 * r0)) {
    std::ostringstream msg;
    msg << "atoms " << i << " and " << j << " collided (r = " << r * 1e6 << " um)";
    throw NumericError(msg.str(), t);
  }
  return std::pow(r0 / r, 6);
}

void require_atoms(const ThermalSample& s, std::size_t n) {
  if (s.atoms.size() < n) throw std::invalid_argument("thermal sample has fewer atoms than the protocol");
}

}  // namespace

double trap_intensity(const TrapParams& p) {
  if (!(p.waist > 0.0) || !(p.power >= 0.0)) throw std::invalid_argument("trap waist must be > 0 and power >= 0");
  return 2.0 * p.power / (kPi * p.waist * p.waist);
}

double trap_depth(const TrapParams& p) {
  if (p.depth_override) {
    if (!(*p.depth_override > 0.0)) throw std::invalid_argument("trap depth override must be positive");
    return *p.depth_override;
  }
  const double detuning = p.transition_frequency - p.laser_frequency;
  if (detuning == 0.0) throw std::invalid_argument("trap laser is resonant with the transition");
  const double w0 = p.transition_frequency;
  return kPi * kSpeedOfLight * kSpeedOfLight * p.linewidth / (2.0 * w0 * w0) * 3.0 / detuning * trap_intensity(p);
}

ThermalVariances thermal_variances(double temperature, const TrapParams& p) {
  if (temperature < 0.0) throw std::invalid_argument("temperature must be >= 0");
  const double depth = std::abs(trap_depth(p));
  if (!(depth > 0.0)) throw std::invalid_argument("trap depth must be nonzero");
  const double ratio = kBoltzmann * temperature / depth;
  ThermalVariances v;
  v.x2 = p.waist * p.waist / 4.0 * ratio;
  v.y2 = v.x2;
  v.z2 = kPi * kPi * std::pow(p.waist, 4) / (2.0 * p.wavelength * p.wavelength) * ratio;
  v.v2 = kBoltzmann * temperature / p.mass;
  return v;
}

std::vector<std::array<double, 6>> unit_deviates(std::size_t n_atoms, std::uint64_t seed, std::uint64_t index) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32)};
  std::mt19937_64 rng(seq);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<std::array<double, 6>> out(n_atoms);
  for (auto& a : out) {
    for (double& x : a) x = normal(rng);
  }
  return out;
}

ThermalSample scale_deviates(const std::vector<std::array<double, 6>>& deviates, const ThermalVariances& v) {
  const double sx = std::sqrt(v.x2), sy = std::sqrt(v.y2), sz = std::sqrt(v.z2), sv = std::sqrt(v.v2);
  ThermalSample s;
  for (const auto& d : deviates) {
    AtomMotion m;
    m.dr = {d[0] * sx, d[1] * sy, d[2] * sz};
    m.dv = {d[3] * sv, d[4] * sv, d[5] * sv};
    s.atoms.push_back(m);
  }
  return s;
}

ThermalSample sample_trajectory(double temperature, const TrapParams& p, std::size_t n_atoms, std::uint64_t seed,
                                std::uint64_t index) {
  return scale_deviates(unit_deviates(n_atoms, seed, index), thermal_variances(temperature, p));
}

MotionFunctions apply_motion(const ThermalSample& sample, const InteractionSpec& base_interaction,
                             const std::vector<DriveSpec>& drives, double z_spacing,
                             const std::vector<double>& k_eff) {
  if (!(z_spacing > 0.0)) throw std::invalid_argument("z_spacing must be positive");
  if (k_eff.size() != drives.size()) throw std::invalid_argument("one k_eff per drive is required");
  MotionFunctions out;
  out.interaction = [sample, base_interaction, z_spacing](double t) {
    InteractionSpec s = base_interaction;
    for (auto& p : s.pairs) {
      require_atoms(sample, std::max(p.i, p.j) + 1);
      p.strength *= pair_scale(sample, p.i, p.j, z_spacing, t);
    }
    return s;
  };
  for (std::size_t d = 0; d < drives.size(); ++d) {
    out.drives.push_back([sample, base = drives[d], k = k_eff[d], z_spacing](double t) {
      DriveSpec s = base;
      const std::size_t n = sample.atoms.size();
      std::vector<double> phases(n);
      for (std::size_t j = 0; j < n; ++j) phases[j] = base.phase(j) + k * position(sample, j, z_spacing, t)[2];
      s.per_atom_phase = std::move(phases);
      return s;
    });
  }
  return out;
}

double MotionSpec::k_for(const std::string& label) const {
  auto it = k_eff_by_label.find(label);
  return it == k_eff_by_label.end() ? k_eff : it->second;
}

Hamiltonian motion_pulse_generator(const ThermalSample& sample, const Segment& pulse, const MotionSpec& motion,
                                   const Basis& basis) {
  if (pulse.kind != SegmentKind::Pulse) throw std::invalid_argument("motion applies to pulse segments only");
  require_atoms(sample, basis.n_atoms());
  const DriveSpec& drive = pulse.drive;
  drive.validate(basis.n_atoms());
  const double z = motion.z_spacing;
  const double k = motion.k_for(pulse.label);
  Hamiltonian h(basis);
  // Same drive operators as drive_generator, with phases following the atoms.
  LocalOperator up;
  switch (drive.source) {
    case DriveSource::G:
      up = transition(Level::R, Level::G);
      break;
    case DriveSource::E:
      up = transition(Level::R, Level::E);
      break;
    case DriveSource::Plus:
      up = transition(Level::R, Level::G, M_SQRT1_2) + transition(Level::R, Level::E, M_SQRT1_2);
      break;
  }
  const bool oscillating = drive.frame == DriveFrame::Oscillating;
  for (std::size_t j = 0; j < basis.n_atoms(); ++j) {
    const OperatorMatrix a = embed(up, j, basis);
    const double amp = 0.5 * drive.rabi_amplitude;
    const double phi0 = drive.phase(j);
    const Envelope env = drive.envelope;
    const double delta = oscillating ? drive.detuning : 0.0;
    h.add_hermitian_pair(a, [=](double t) {
      const double zj = position(sample, j, z, t)[2];
      return amp * env.value(t) * std::exp(kI * (phi0 + k * zj - delta * t));
    });
  }
  if (!oscillating && drive.detuning != 0.0) {
    h.add(embed_all(transition(Level::R, Level::R), basis) * (-drive.detuning));
  }
  for (const auto& p : pulse.interaction.pairs) {
    InteractionSpec single{{{p.i, p.j, 1.0}}};
    const double u = p.strength;
    const std::size_t i = p.i, jj = p.j;
    h.add(rydberg_interaction(single, basis), [=](double t) { return Complex(u * pair_scale(sample, i, jj, z, t), 0.0); });
  }
  return h;
}

void parallel_for(std::size_t n, std::size_t threads, const std::function<void(std::size_t)>& fn) {
  if (threads <= 1 || n <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto worker = [&]() {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        fn(i);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  for (std::size_t t = 0; t < std::min(threads, n); ++t) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

MonteCarloSummary montecarlo(const Protocol& p, const DensityMatrix& rho0, const TargetState& target,
                             double temperature, const TrapParams& trap, const MotionSpec& motion,
                             std::size_t n_traj, std::uint64_t seed, const MonteCarloOptions& options) {
  if (n_traj < 1) throw std::invalid_argument("montecarlo needs at least one trajectory");
  if (p.tier != ModelTier::Effective) throw std::invalid_argument("thermal Monte Carlo runs on the effective model");
  const ThermalVariances variances = thermal_variances(temperature, trap);
  const Basis basis = p.basis();
  const CompiledProtocol base = compile(p);

  MonteCarloSummary out;
  out.temperature = temperature;
  out.trajectories.resize(n_traj);
  parallel_for(n_traj, options.threads, [&](std::size_t idx) {
    TrajectoryResult& r = out.trajectories[idx];
    r.index = idx;
    try {
      const ThermalSample sample = scale_deviates(unit_deviates(basis.n_atoms(), seed, idx), variances);
      CompiledProtocol compiled = base;
      for (std::size_t i = 0; i < p.segments.size(); ++i) {
        const Segment& s = p.segments[i];
        if (s.kind != SegmentKind::Pulse) continue;
        const Hamiltonian h = motion_pulse_generator(sample, s, motion, basis);
        compiled.replace(i, Propagator::from_unitary(unitary_propagator(h, s.duration, options.integrator), s.duration));
      }
      const RunResult rr = run(compiled, rho0, {target}, RecordMode::Cycle);
      for (const auto& rec : rr.records) r.series.push_back(rec.values.at(0));
    } catch (const NumericError& e) {
      r.valid = false;
      r.error = e.what();
      r.series.clear();
    }
  });

  double sum = 0.0, sum2 = 0.0;
  for (const auto& r : out.trajectories) {
    if (!r.valid) continue;
    ++out.n_valid;
    sum += r.final_value();
    sum2 += r.final_value() * r.final_value();
    if (out.mean_series.empty()) out.mean_series.assign(r.series.size(), 0.0);
    for (std::size_t c = 0; c < r.series.size(); ++c) out.mean_series[c] += r.series[c];
  }
  if (out.n_valid > 0) {
    const double n = static_cast<double>(out.n_valid);
    out.mean = sum / n;
    out.stddev = std::sqrt(std::max(0.0, sum2 / n - out.mean * out.mean));
    for (double& v : out.mean_series) v /= n;
  }
  return out;
}

DephasingSurface dephasing_study(const Protocol& p, const DensityMatrix& rho0, const TargetState& target,
                                 const std::vector<double>& gamma_ge, const std::vector<double>& gamma_p,
                                 const IntegratorConfig& cfg, std::size_t threads) {
  if (p.tier != ModelTier::Full || !p.full) throw std::invalid_argument("dephasing_study needs a FULL_SIX protocol");
  if (gamma_ge.empty() || gamma_p.empty()) throw std::invalid_argument("dephasing grid must not be empty");
  Protocol clean = p;
  clean.full->gamma_ge = 0.0;
  clean.full->gamma_p = 0.0;
  return dephasing_study(compile(clean, cfg), rho0, target, gamma_ge, gamma_p, cfg, threads);
}

DephasingSurface dephasing_study(const CompiledProtocol& base, const DensityMatrix& rho0, const TargetState& target,
                                 const std::vector<double>& gamma_ge, const std::vector<double>& gamma_p,
                                 const IntegratorConfig& cfg, std::size_t threads) {
  const Protocol& clean = base.protocol();
  if (clean.tier != ModelTier::Full || !clean.full) throw std::invalid_argument("dephasing_study needs a FULL_SIX protocol");
  if (clean.full->gamma_ge != 0.0 || clean.full->gamma_p != 0.0) {
    throw std::invalid_argument("dephasing_study base must be compiled without dephasing");
  }
  if (gamma_ge.empty() || gamma_p.empty()) throw std::invalid_argument("dephasing grid must not be empty");
  DephasingSurface out{gamma_ge, gamma_p, std::vector<std::vector<double>>(gamma_ge.size(), std::vector<double>(gamma_p.size()))};
  parallel_for(gamma_ge.size() * gamma_p.size(), threads, [&](std::size_t job) {
    const std::size_t i = job / gamma_p.size();
    const std::size_t j = job % gamma_p.size();
    Protocol q = clean;
    q.full->gamma_ge = gamma_ge[i];
    q.full->gamma_p = gamma_p[j];
    CompiledProtocol compiled = base;
    if (gamma_ge[i] > 0.0 || gamma_p[j] > 0.0) {
      for (std::size_t s = 0; s < q.segments.size(); ++s) {
        if (q.segments[s].kind != SegmentKind::Pulse) continue;
        SegmentGenerator g = segment_generator(q, s);
        compiled.replace(s, make_propagator(g.hamiltonian, g.channels, q.segments[s].duration, cfg));
      }
    }
    const RunResult r = run(compiled, rho0, {target}, RecordMode::Cycle);
    out.population[i][j] = r.records.back().values.at(0);
  });
  return out;
}

std::optional<double> interpolate_crossing(const std::vector<double>& x, const std::vector<double>& y, double level) {
  if (x.size() != y.size()) throw std::invalid_argument("x and y must have equal length");
  for (std::size_t k = 0; k + 1 < x.size(); ++k) {
    const double a = y[k] - level;
    const double b = y[k + 1] - level;
    if (a == 0.0) return x[k];
    if ((a < 0.0) != (b < 0.0) || b == 0.0) return x[k] + (level - y[k]) * (x[k + 1] - x[k]) / (y[k + 1] - y[k]);
  }
  if (!y.empty() && y.back() == level) return x.back();
  return std::nullopt;
}

}  // namespace rydprep
