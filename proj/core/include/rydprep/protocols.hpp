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

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "rydprep/hamiltonians.hpp"
#include "rydprep/lindblad.hpp"
#include "rydprep/oracle.hpp"

namespace rydprep {

enum class SegmentKind { Pulse, Relax, Microwave };

std::string_view segment_kind_name(SegmentKind kind);
SegmentKind parse_segment_kind(std::string_view name);

struct Segment {
  SegmentKind kind = SegmentKind::Pulse;
  double duration = 0.0;  // seconds
  std::string label;

  // Pulse
  DriveSpec drive;
  InteractionSpec interaction;
  double square_duration = 0.0;  // set by gaussianize, used to restore square pulses

  // Relax
  bool include_h = false;

  // Microwave
  double omega_c = 0.0;

  static Segment pulse(std::string label, DriveSpec drive, InteractionSpec interaction, double duration);
  static Segment relax(std::string label, double duration, bool include_h);
  static Segment microwave(std::string label, double omega_c, double duration);
};

enum class ModelTier { Effective, Full };

// Parameters of the six-level validation model. The pulse ladder replaces the
// effective g/e/+ -> r drive, relaxation drives r <-> p1 at omega_b with p1
// decaying naturally, and |h> is repumped to |r> during relaxation.
struct FullModelParams {
  double omega_a1 = 0.0;
  double omega_a2 = 0.0;
  double delta = 0.0;
  bool light_shift_compensation = true;
  double gamma_p1 = 0.0;
  double gamma_r = 0.0;
  NaturalDecayOptions natural;
  double recycle_rate = 0.0;
  double gamma_ge = 0.0;  // collective dephasing during pulses, gamma_g = gamma_e
  double gamma_p = 0.0;
};

struct Protocol {
  std::string name;
  std::size_t n_atoms = 2;
  SchemeKind scheme = SchemeKind::ReducedGER;
  std::vector<Segment> segments;  // one cycle
  std::size_t cycles = 1;
  double omega_b = 0.0;  // engineered dissipation
  double gamma = 0.0;
  ModelTier tier = ModelTier::Effective;
  std::optional<FullModelParams> full;

  Basis basis() const { return build_basis(n_atoms, scheme); }
  double cycle_duration() const;
  double total_duration() const { return cycle_duration() * static_cast<double>(cycles); }
  void validate() const;
};

struct TimingSolution {
  double delta = 0.0;  // rad/s
  double t = 0.0;      // seconds
  int k = 0;
  int l = 0;
  int j = 0;

  // |delta t - 2k pi|, |sqrt(delta^2 + 4 Omega^2) t - 2 l pi|, |sqrt(delta^2 + 8 Omega^2) t - 2 j pi|.
  std::array<double, 3> residuals(double omega_a) const;
};

enum class MicrowavePlacement { AfterLastRelax, AfterEachRelax };

Protocol bell_protocol(double omega_a, double omega_b, double gamma, double u, double relax_duration,
                       std::size_t cycles);
Protocol qutrit_protocol(double omega_a, double omega_b, double gamma, double u, double omega_c,
                         double relax_duration, std::size_t cycles,
                         MicrowavePlacement placement = MicrowavePlacement::AfterLastRelax);
// std::nullopt timing means RESONANT (delta = 0, t = 2pi/Omega_a), valid for n = 3 only.
Protocol ghz_protocol(std::size_t n, double omega_a, double omega_b, double gamma, double u,
                      double relax_duration, std::size_t cycles, std::optional<TimingSolution> timing);

// Smallest-t integer solution of delta t = 2k pi, sqrt(delta^2+4 Omega^2) t = 2 l pi,
// sqrt(delta^2+8 Omega^2) t = 2 j pi with k <= max_k and k+l, k+j even (so
// the |X_2> and |X_4> amplitudes return to +1).
TimingSolution solve_stepC_timing(double omega_a, int max_k);

// Pulses named in sigma_map get Gaussian envelopes of width sigma and duration 6 sigma.
Protocol gaussianize(const Protocol& p, const std::map<std::string, double>& sigma_map);
Protocol restore_square(const Protocol& p);
// Scales pulse durations by (1 + fraction). An empty `only` set means every pulse.
Protocol perturb_timing(const Protocol& p, double fraction, const std::set<std::string>& only = {});

// Converts an effective-tier protocol to the six-level model.
Protocol to_full_model(const Protocol& p, const FullModelParams& params);

std::vector<TargetState> default_observables(const Protocol& p);

struct SegmentGenerator {
  Hamiltonian hamiltonian;
  std::vector<Channel> channels;
};

SegmentGenerator segment_generator(const Protocol& p, std::size_t index);

class CompiledProtocol {
 public:
  CompiledProtocol(Protocol p, std::vector<Propagator> propagators);

  const Protocol& protocol() const noexcept { return protocol_; }
  const std::vector<Propagator>& propagators() const noexcept { return propagators_; }
  void replace(std::size_t index, Propagator propagator);

 private:
  Protocol protocol_;
  std::vector<Propagator> propagators_;
};

CompiledProtocol compile(const Protocol& p, const IntegratorConfig& cfg = {});

enum class RecordMode { Segment, Cycle };

struct Record {
  double time = 0.0;  // seconds
  std::size_t cycle = 0;
  std::size_t segment = 0;  // index within the cycle; meaningless for the initial record
  std::string label;
  std::vector<double> values;
  double trace_error = 0.0;
  double hermiticity_error = 0.0;
};

struct RunResult {
  std::vector<std::string> observables;
  std::vector<Record> records;
  DensityMatrix final_state;
  double max_trace_error = 0.0;
  double max_hermiticity_error = 0.0;
  // Smallest eigenvalue seen at cycle boundaries (dims <= 81 only).
  std::optional<double> min_eigenvalue;
};

RunResult run(const CompiledProtocol& compiled, const DensityMatrix& rho0, const std::vector<TargetState>& observables,
              RecordMode record = RecordMode::Cycle);
RunResult run(const Protocol& p, const DensityMatrix& rho0, const std::vector<TargetState>& observables,
              RecordMode record = RecordMode::Cycle, const IntegratorConfig& cfg = {});

}  // namespace rydprep
