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

#include "rydprep/protocols.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "rydprep/log.hpp"

namespace rydprep {

namespace {

void check_blockade(double omega_a, double u) {
  if (u < 10.0 * omega_a) {
    std::ostringstream msg;
    msg << "U = 2pi x " << units::to_mhz(u) << " MHz is below 10 Omega_a; blockade approximation is weak";
    warn(msg.str());
  }
}

void check_common(double omega_a, double omega_b, double gamma, double relax_duration) {
  if (!(omega_a > 0.0)) throw std::invalid_argument("omega_a must be positive");
  if (!(gamma > 0.0)) throw std::invalid_argument("gamma must be positive");
  if (omega_b < 0.0) throw std::invalid_argument("omega_b must be >= 0");
  if (!(relax_duration > 0.0)) throw std::invalid_argument("relaxation duration must be positive");
}

bool is_square(int v, int& root) {
  if (v < 0) return false;
  root = static_cast<int>(std::lround(std::sqrt(static_cast<double>(v))));
  return root * root == v;
}

}  // namespace

std::string_view segment_kind_name(SegmentKind kind) {
  switch (kind) {
    case SegmentKind::Pulse:
      return "PULSE";
    case SegmentKind::Relax:
      return "RELAX";
    case SegmentKind::Microwave:
      return "MICROWAVE";
  }
  return "?";
}

SegmentKind parse_segment_kind(std::string_view name) {
  for (auto k : {SegmentKind::Pulse, SegmentKind::Relax, SegmentKind::Microwave}) {
    if (segment_kind_name(k) == name) return k;
  }
  throw std::invalid_argument("unknown segment kind '" + std::string(name) + "'");
}

Segment Segment::pulse(std::string label, DriveSpec drive, InteractionSpec interaction, double duration) {
  Segment s;
  s.kind = SegmentKind::Pulse;
  s.label = std::move(label);
  s.drive = std::move(drive);
  s.interaction = std::move(interaction);
  s.duration = duration;
  return s;
}

Segment Segment::relax(std::string label, double duration, bool include_h) {
  Segment s;
  s.kind = SegmentKind::Relax;
  s.label = std::move(label);
  s.duration = duration;
  s.include_h = include_h;
  return s;
}

Segment Segment::microwave(std::string label, double omega_c, double duration) {
  Segment s;
  s.kind = SegmentKind::Microwave;
  s.label = std::move(label);
  s.omega_c = omega_c;
  s.duration = duration;
  return s;
}

double Protocol::cycle_duration() const {
  double t = 0.0;
  for (const auto& s : segments) t += s.duration;
  return t;
}

void Protocol::validate() const {
  const Basis b = basis();
  if (segments.empty()) throw std::invalid_argument("protocol has no segments");
  if (tier == ModelTier::Full && (!full || scheme != SchemeKind::FullSix)) {
    throw std::invalid_argument("full-model protocol needs FULL_SIX and full-model parameters");
  }
  for (const auto& s : segments) {
    if (!(s.duration > 0.0) || !std::isfinite(s.duration)) {
      throw std::invalid_argument("segment '" + s.label + "' must have positive duration");
    }
    if (s.kind == SegmentKind::Pulse) {
      s.drive.validate(n_atoms);
      s.interaction.validate(n_atoms);
    }
    if (s.kind == SegmentKind::Relax && s.include_h && !b.scheme().contains(Level::H)) {
      throw std::invalid_argument("relaxation '" + s.label + "' includes h but the scheme has no h level");
    }
    if (s.kind == SegmentKind::Microwave && !b.scheme().contains(Level::H)) {
      throw std::invalid_argument("microwave segment needs the h level");
    }
  }
}

std::array<double, 3> TimingSolution::residuals(double omega_a) const {
  const double w2 = std::sqrt(delta * delta + 4.0 * omega_a * omega_a);
  const double w4 = std::sqrt(delta * delta + 8.0 * omega_a * omega_a);
  return {std::abs(delta * t - kTwoPi * k), std::abs(w2 * t - kTwoPi * l), std::abs(w4 * t - kTwoPi * j)};
}

Protocol bell_protocol(double omega_a, double omega_b, double gamma, double u, double relax_duration,
                       std::size_t cycles) {
  check_common(omega_a, omega_b, gamma, relax_duration);
  check_blockade(omega_a, u);
  const InteractionSpec inter = InteractionSpec::uniform(2, u);
  const double tau_a = std::sqrt(2.0) * kPi / omega_a;
  const double tau_c = kTwoPi / omega_a;
  Protocol p;
  p.name = "bell";
  p.n_atoms = 2;
  p.scheme = SchemeKind::ReducedGER;
  p.cycles = cycles;
  p.omega_b = omega_b;
  p.gamma = gamma;
  p.segments = {
      Segment::pulse("A", DriveSpec::for_source(DriveSource::G, omega_a), inter, tau_a),
      Segment::relax("relax_A", relax_duration, false),
      Segment::pulse("B", DriveSpec::for_source(DriveSource::E, omega_a), inter, tau_a),
      Segment::relax("relax_B", relax_duration, false),
      Segment::pulse("C", DriveSpec::for_source(DriveSource::Plus, omega_a), inter, tau_c),
      Segment::relax("relax_C", relax_duration, false),
  };
  return p;
}

Protocol qutrit_protocol(double omega_a, double omega_b, double gamma, double u, double omega_c,
                         double relax_duration, std::size_t cycles, MicrowavePlacement placement) {
  check_common(omega_a, omega_b, gamma, relax_duration);
  check_blockade(omega_a, u);
  if (!(omega_c > 0.0)) throw std::invalid_argument("omega_c must be positive");
  const InteractionSpec inter = InteractionSpec::uniform(2, u);
  const double tau = 2.0 * std::sqrt(2.0) * kPi / omega_a;
  const double tau_c = kTwoPi / (7.0 * omega_c);
  Protocol p;
  p.name = "qutrit";
  p.n_atoms = 2;
  p.scheme = SchemeKind::ReducedGEHR;
  p.cycles = cycles;
  p.omega_b = omega_b;
  p.gamma = gamma;
  p.segments.push_back(Segment::pulse("A", DriveSpec::for_source(DriveSource::G, omega_a), inter, tau));
  p.segments.push_back(Segment::relax("relax_A", relax_duration, true));
  if (placement == MicrowavePlacement::AfterEachRelax) {
    p.segments.push_back(Segment::microwave("MW_A", omega_c, tau_c));
  }
  p.segments.push_back(Segment::pulse("B", DriveSpec::for_source(DriveSource::E, omega_a), inter, tau));
  p.segments.push_back(Segment::relax("relax_B", relax_duration, true));
  p.segments.push_back(Segment::microwave(placement == MicrowavePlacement::AfterEachRelax ? "MW_B" : "MW", omega_c,
                                          tau_c));
  return p;
}

Protocol ghz_protocol(std::size_t n, double omega_a, double omega_b, double gamma, double u,
                      double relax_duration, std::size_t cycles, std::optional<TimingSolution> timing) {
  if (n < 3 || n > 5) throw std::invalid_argument("ghz_protocol supports n = 3, 4, 5");
  check_common(omega_a, omega_b, gamma, relax_duration);
  check_blockade(omega_a, u);
  double delta = 0.0;
  double tau_c = kTwoPi / omega_a;
  if (timing) {
    delta = timing->delta;
    tau_c = timing->t;
  } else if (n != 3) {
    throw std::invalid_argument(
        "RESONANT step-C timing is only valid for n = 3: for n = " + std::to_string(n) +
        " the ratio of the Rabi frequencies of |X_2> and |X_4> is 1:sqrt2 rather than an integer ratio; use "
        "solve_stepC_timing");
  }
  const InteractionSpec inter = InteractionSpec::uniform(n, u);
  const double tau = kTwoPi / (std::sqrt(static_cast<double>(n)) * omega_a);
  Protocol p;
  p.name = "ghz" + std::to_string(n);
  p.n_atoms = n;
  p.scheme = SchemeKind::ReducedGER;
  p.cycles = cycles;
  p.omega_b = omega_b;
  p.gamma = gamma;
  p.segments = {
      Segment::pulse("A", DriveSpec::for_source(DriveSource::G, omega_a), inter, tau),
      Segment::relax("relax_A", relax_duration, false),
      Segment::pulse("B", DriveSpec::for_source(DriveSource::E, omega_a), inter, tau),
      Segment::relax("relax_B", relax_duration, false),
      Segment::pulse("C", DriveSpec::for_source(DriveSource::Plus, omega_a, delta), inter, tau_c),
      Segment::relax("relax_C", relax_duration, false),
  };
  return p;
}

TimingSolution solve_stepC_timing(double omega_a, int max_k) {
  if (!(omega_a > 0.0)) throw std::invalid_argument("omega_a must be positive");
  if (max_k < 1) throw std::invalid_argument("max_k must be >= 1");
  // With w = Omega t / 2pi: l^2 = k^2 + 4 w^2 and j^2 = k^2 + 8 w^2, so
  // j^2 = 2 l^2 - k^2 and t = pi sqrt(l^2 - k^2) / Omega.
  const int l_max = 64 * max_k + 64;
  std::optional<TimingSolution> best;
  int best_gap = std::numeric_limits<int>::max();
  for (int k = 1; k <= max_k; ++k) {
    for (int l = k + 1; l <= l_max; ++l) {
      const int gap = l * l - k * k;
      if (gap >= best_gap) break;
      int j = 0;
      if (!is_square(2 * l * l - k * k, j)) continue;
      if ((k + l) % 2 != 0 || (k + j) % 2 != 0) continue;
      TimingSolution s;
      s.k = k;
      s.l = l;
      s.j = j;
      s.t = kPi * std::sqrt(static_cast<double>(gap)) / omega_a;
      s.delta = kTwoPi * k / s.t;
      best = s;
      best_gap = gap;
    }
  }
  if (!best) throw Error("no step-C timing solution with k <= " + std::to_string(max_k));
  return *best;
}

Protocol gaussianize(const Protocol& p, const std::map<std::string, double>& sigma_map) {
  Protocol out = p;
  for (auto& s : out.segments) {
    if (s.kind != SegmentKind::Pulse) continue;
    if (s.drive.envelope.kind != EnvelopeKind::Square) {
      throw std::invalid_argument("gaussianize expects square pulses; '" + s.label + "' is already Gaussian");
    }
    auto it = sigma_map.find(s.label);
    if (it == sigma_map.end()) throw std::invalid_argument("gaussianize: missing sigma for step '" + s.label + "'");
    if (!(it->second > 0.0)) throw std::invalid_argument("gaussianize: sigma must be positive");
    s.square_duration = s.duration;
    s.drive.envelope = Envelope::gaussian(it->second);
    s.duration = 6.0 * it->second;
  }
  return out;
}

Protocol restore_square(const Protocol& p) {
  Protocol out = p;
  for (auto& s : out.segments) {
    if (s.kind != SegmentKind::Pulse || s.drive.envelope.kind == EnvelopeKind::Square) continue;
    if (!(s.square_duration > 0.0)) {
      throw std::invalid_argument("pulse '" + s.label + "' has no recorded square duration");
    }
    s.drive.envelope = Envelope::square();
    s.duration = s.square_duration;
    s.square_duration = 0.0;
  }
  return out;
}

Protocol perturb_timing(const Protocol& p, double fraction, const std::set<std::string>& only) {
  if (!(std::abs(fraction) < 0.5)) throw std::invalid_argument("|fraction| must be < 0.5");
  Protocol out = p;
  for (auto& s : out.segments) {
    if (s.kind != SegmentKind::Pulse) continue;
    if (!only.empty() && !only.count(s.label)) continue;
    s.duration *= 1.0 + fraction;
  }
  return out;
}

Protocol to_full_model(const Protocol& p, const FullModelParams& params) {
  if (p.n_atoms < 1) throw std::invalid_argument("protocol has no atoms");
  const double omega_eff = effective_rabi(params.omega_a1, params.omega_a2, params.delta);
  for (const auto& s : p.segments) {
    if (s.kind != SegmentKind::Pulse) continue;
    if (s.drive.envelope.kind != EnvelopeKind::Square) {
      throw std::invalid_argument("the full model supports square pulses only");
    }
    const double omega_a =
        s.drive.source == DriveSource::Plus ? s.drive.rabi_amplitude / std::sqrt(2.0) : s.drive.rabi_amplitude;
    if (std::abs(omega_a - omega_eff) > 1e-3 * omega_a) {
      std::ostringstream msg;
      msg << "full-model Omega_a1 Omega_a2 / (2 Delta) = 2pi x " << units::to_mhz(omega_eff)
          << " MHz differs from the pulse amplitude 2pi x " << units::to_mhz(omega_a) << " MHz";
      warn(msg.str());
    }
  }
  Protocol out = p;
  out.scheme = SchemeKind::FullSix;
  out.tier = ModelTier::Full;
  out.full = params;
  return out;
}

std::vector<TargetState> default_observables(const Protocol& p) {
  const Basis b = p.basis();
  if (p.name == "qutrit") {
    return {target_state(TargetKind::T1, b), target_state(TargetKind::T2, b), target_state(TargetKind::T3, b)};
  }
  if (p.n_atoms == 2) {
    return {target_state(TargetKind::BellPhiPlus, b), target_state(TargetKind::BellPhiMinus, b),
            target_state(TargetKind::BellPsiPlus, b), target_state(TargetKind::BellPsiMinus, b)};
  }
  return {ghz_state(b)};
}

SegmentGenerator segment_generator(const Protocol& p, std::size_t index) {
  const Basis b = p.basis();
  const Segment& s = p.segments.at(index);
  if (p.tier == ModelTier::Effective) {
    switch (s.kind) {
      case SegmentKind::Pulse: {
        Hamiltonian h = drive_generator(s.drive, b);
        h.add(rydberg_interaction(s.interaction, b));
        return {std::move(h), {}};
      }
      case SegmentKind::Relax:
        return {Hamiltonian(b), engineered_decay_channels(p.omega_b, p.gamma, b, s.include_h)};
      case SegmentKind::Microwave:
        return {Hamiltonian(microwave_hamiltonian(s.omega_c, b)), {}};
    }
  }
  const FullModelParams& f = p.full.value();
  std::vector<Channel> natural = natural_decay_channels(f.gamma_p1, f.gamma_r, b, f.natural);
  FullLadderSpec ladder;
  ladder.omega_a1 = f.omega_a1;
  ladder.omega_a2 = f.omega_a2;
  ladder.delta = f.delta;
  ladder.omega_b = p.omega_b;
  ladder.light_shift_compensation = f.light_shift_compensation;
  switch (s.kind) {
    case SegmentKind::Pulse: {
      if (s.drive.envelope.kind != EnvelopeKind::Square) {
        throw std::invalid_argument("the full model supports square pulses only");
      }
      ladder.source = s.drive.source;
      ladder.two_photon_detuning = s.drive.detuning;
      Hamiltonian h(full_ladder_hamiltonian(ladder, b, LadderSegment::Pulse, &s.interaction));
      std::vector<Channel> channels = natural;
      if (f.gamma_ge > 0.0 || f.gamma_p > 0.0) {
        for (auto& c : dephasing_channels(f.gamma_ge, f.gamma_ge, f.gamma_p, b)) channels.push_back(std::move(c));
      }
      return {std::move(h), std::move(channels)};
    }
    case SegmentKind::Relax: {
      Hamiltonian h(full_ladder_hamiltonian(ladder, b, LadderSegment::Relax));
      std::vector<Channel> channels = natural;
      if (!s.include_h && f.recycle_rate > 0.0) {
        for (auto& c : h_recycling_channels(f.recycle_rate, b)) channels.push_back(std::move(c));
      }
      return {std::move(h), std::move(channels)};
    }
    case SegmentKind::Microwave:
      return {Hamiltonian(microwave_hamiltonian(s.omega_c, b)), natural};
  }
  throw std::logic_error("unreachable segment kind");
}

CompiledProtocol::CompiledProtocol(Protocol p, std::vector<Propagator> propagators)
    : protocol_(std::move(p)), propagators_(std::move(propagators)) {
  if (propagators_.size() != protocol_.segments.size()) {
    throw std::invalid_argument("one propagator per segment is required");
  }
}

void CompiledProtocol::replace(std::size_t index, Propagator propagator) {
  propagators_.at(index) = std::move(propagator);
}

CompiledProtocol compile(const Protocol& p, const IntegratorConfig& cfg) {
  p.validate();
  std::vector<Propagator> props;
  // Relaxation segments with equal settings share one map.
  std::map<std::pair<bool, double>, std::size_t> relax_cache;
  for (std::size_t i = 0; i < p.segments.size(); ++i) {
    const Segment& s = p.segments[i];
    if (s.kind == SegmentKind::Relax) {
      auto key = std::make_pair(s.include_h, s.duration);
      if (auto it = relax_cache.find(key); it != relax_cache.end()) {
        props.push_back(props[it->second]);
        continue;
      }
      relax_cache[key] = i;
    }
    try {
      SegmentGenerator g = segment_generator(p, i);
      props.push_back(make_propagator(g.hamiltonian, g.channels, s.duration, cfg));
    } catch (const NumericError& e) {
      throw NumericError("segment " + std::to_string(i) + " ('" + s.label + "'): " + e.what(), e.time_reached(), i);
    }
  }
  return CompiledProtocol(p, std::move(props));
}

RunResult run(const CompiledProtocol& compiled, const DensityMatrix& rho0, const std::vector<TargetState>& observables,
              RecordMode record) {
  const Protocol& p = compiled.protocol();
  const Basis basis = p.basis();
  if (!(rho0.basis() == basis)) throw std::invalid_argument("run: initial state basis differs from protocol basis");
  for (const auto& o : observables) {
    if (!(o.state.basis() == basis)) throw std::invalid_argument("run: observable '" + o.label + "' basis mismatch");
  }
  RunResult result{{}, {}, rho0, 0.0, 0.0, std::nullopt};
  for (const auto& o : observables) result.observables.push_back(o.label);
  const bool check_positivity = basis.dim() <= 81;

  DensityMatrix& rho = result.final_state;
  auto snapshot = [&](double t, std::size_t cycle, std::size_t seg, const std::string& label) {
    Record r;
    r.time = t;
    r.cycle = cycle;
    r.segment = seg;
    r.label = label;
    for (const auto& o : observables) r.values.push_back(population(rho, o));
    r.trace_error = rho.trace_error();
    r.hermiticity_error = rho.hermiticity_error();
    result.max_trace_error = std::max(result.max_trace_error, r.trace_error);
    result.max_hermiticity_error = std::max(result.max_hermiticity_error, r.hermiticity_error);
    result.records.push_back(std::move(r));
  };

  snapshot(0.0, 0, 0, "initial");
  if (check_positivity) result.min_eigenvalue = rho.min_eigenvalue();
  double t = 0.0;
  for (std::size_t c = 1; c <= p.cycles; ++c) {
    for (std::size_t i = 0; i < p.segments.size(); ++i) {
      try {
        compiled.propagators()[i].apply(rho);
      } catch (const NumericError& e) {
        std::ostringstream msg;
        msg << "segment " << i << " ('" << p.segments[i].label << "') of cycle " << c << ": " << e.what();
        throw NumericError(msg.str(), t + e.time_reached(), i);
      }
      t += p.segments[i].duration;
      if (!rho.matrix().allFinite()) {
        throw NumericError("non-finite density matrix after segment " + std::to_string(i), t, i);
      }
      const bool end_of_cycle = i + 1 == p.segments.size();
      if (record == RecordMode::Segment || end_of_cycle) snapshot(t, c, i, p.segments[i].label);
    }
    if (check_positivity) result.min_eigenvalue = std::min(*result.min_eigenvalue, rho.min_eigenvalue());
  }
  return result;
}

RunResult run(const Protocol& p, const DensityMatrix& rho0, const std::vector<TargetState>& observables,
              RecordMode record, const IntegratorConfig& cfg) {
  return run(compile(p, cfg), rho0, observables, record);
}

}  // namespace rydprep
