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

#include <string>
#include <vector>

#include "rydprep/hilbert.hpp"

namespace rydprep {

enum class TargetKind { BellPhiPlus, BellPhiMinus, BellPsiPlus, BellPsiMinus, T1, T2, T3, Ghz, XState };

struct TargetState {
  TargetKind kind;
  std::string label;  // "phi_plus", "T1", "ghz3", "x2_4", ...
  StateVector state;
};

// Closed-form amplitude that m atoms remain in |+> under the detuned
// collective drive, with W_m = sqrt(delta^2 + 2 m Omega_a^2) and
// P^+- = (i/2)(-delta +- W_m):
//   (P^+ e^{P^+ t} - P^- e^{P^- t}) / (i W_m).
// The closed form carries e^{-i delta t} on ground states relative to the
// static rotated frame. m = 0 returns 1.
Complex survival_amplitude(int m, double omega_a, double delta, double t);

// The same amplitude in the static rotated frame used by the simulator:
// e^{i delta t} * survival_amplitude. Equals 1 for m = 0.
Complex static_frame_survival_amplitude(int m, double omega_a, double delta, double t);

// |+-> = (|g> +- |e>)/sqrt2; X(m, n) is the symmetric superposition of all
// placements of m atoms in |+> and n - m in |->.
TargetState x_state(int m, std::size_t n, const Basis& basis);

// GHZ(n) = (|g..g> + (-1)^n |e..e>)/sqrt2, the state whose |+-> expansion
// contains only even numbers of |+>.
TargetState ghz_state(const Basis& basis);

// Bell states: phi = (|gg> +- |ee>)/sqrt2, psi = (|eg> +- |ge>)/sqrt2.
// T1 = (|ee> - |gg> + |hh>)/sqrt3, T2 = (|eh> - |gg> + |he>)/sqrt3,
// T3 = (|eg> - |ge> - |gh> + |hg>)/2.
TargetState target_state(TargetKind kind, const Basis& basis, int m = 0);
// Looks up a target by label ("phi_plus", "T1", "ghz", "x2", ...).
TargetState target_by_label(const std::string& label, const Basis& basis);

double population(const DensityMatrix& rho, const TargetState& target);

enum class InitialKind { FullyMixedGE, FullyMixedGEH, MixList };

struct MixEntry {
  double weight;
  std::vector<Level> levels;  // product state
};

struct InitialStateSpec {
  InitialKind kind = InitialKind::FullyMixedGE;
  std::vector<MixEntry> mix;  // MixList only
};

// Normalized mixture; weights that do not sum to one are renormalized with a warning.
DensityMatrix initial_state(const InitialStateSpec& spec, const Basis& basis);

// ||H |psi>||_2.
double dark_state_residual(const OperatorMatrix& h, const TargetState& state);

}  // namespace rydprep
