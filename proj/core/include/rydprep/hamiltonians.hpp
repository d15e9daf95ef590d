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
#include <functional>
#include <vector>

#include "rydprep/hilbert.hpp"

namespace rydprep {

// ---------------------------------------------------------------------------
// Time-dependent generator: H(t) = sum_k c_k(t) A_k. Terms without a
// coefficient function are constant.

using Coefficient = std::function<Complex(double)>;

struct HamiltonianTerm {
  OperatorMatrix op;
  Coefficient coeff;  // empty means constant 1
};

class Hamiltonian {
 public:
  explicit Hamiltonian(Basis basis);
  Hamiltonian(const OperatorMatrix& constant);  // NOLINT(google-explicit-constructor)

  const Basis& basis() const noexcept { return basis_; }
  const std::vector<HamiltonianTerm>& terms() const noexcept { return terms_; }
  bool is_constant() const;
  bool is_zero() const;

  Hamiltonian& add(const OperatorMatrix& op);
  Hamiltonian& add(const OperatorMatrix& op, Coefficient coeff);
  // Adds c(t) A + conj(c(t)) A^dag.
  Hamiltonian& add_hermitian_pair(const OperatorMatrix& op, Coefficient coeff);
  Hamiltonian& add(const Hamiltonian& other);

  OperatorMatrix at(double t) const;
  SparseMatrix matrix_at(double t) const;

  // Upper bound on ||H(t)||_inf for t sampled over [t0, t1].
  double norm_bound(double t0, double t1) const;

  // Single-atom decomposition of a constant Hamiltonian, if every term has one.
  std::optional<std::vector<LocalPart>> local_parts() const;

 private:
  Basis basis_;
  std::vector<HamiltonianTerm> terms_;
};

// ---------------------------------------------------------------------------

enum class DriveSource { G, E, Plus };
enum class EnvelopeKind { Square, Gaussian };
enum class DriveFrame { Static, Oscillating };

std::string_view drive_source_name(DriveSource s);
DriveSource parse_drive_source(std::string_view name);

struct Envelope {
  EnvelopeKind kind = EnvelopeKind::Square;
  double sigma = 0.0;  // seconds; Gaussian only, centred at 3 sigma

  static Envelope square() { return {}; }
  static Envelope gaussian(double sigma) { return {EnvelopeKind::Gaussian, sigma}; }

  double center() const { return 3.0 * sigma; }
  double value(double t) const;
  bool operator==(const Envelope&) const = default;
};

struct DriveSpec {
  DriveSource source = DriveSource::G;
  // Omega_a for G/E, sqrt2 * Omega_a for PLUS.
  double rabi_amplitude = 0.0;
  double detuning = 0.0;
  Envelope envelope;
  std::vector<double> per_atom_phase;  // empty means all zero
  DriveFrame frame = DriveFrame::Static;

  // Amplitude convention helper: PLUS gets sqrt2 * omega_a.
  static DriveSpec for_source(DriveSource source, double omega_a, double detuning = 0.0);

  void validate(std::size_t n_atoms) const;
  double phase(std::size_t atom) const;
  bool operator==(const DriveSpec&) const = default;
};

struct PairStrength {
  std::size_t i;
  std::size_t j;
  double strength;  // rad/s
  bool operator==(const PairStrength&) const = default;
};

struct InteractionSpec {
  std::vector<PairStrength> pairs;

  // U_ij = -C6/|r_i - r_j|^6.
  static InteractionSpec from_c6(double c6, const std::vector<std::array<double, 3>>& positions);
  // The same U on every pair of n atoms.
  static InteractionSpec uniform(std::size_t n_atoms, double u);

  double max_strength() const;
  void validate(std::size_t n_atoms) const;
  bool operator==(const InteractionSpec&) const = default;
};

double van_der_waals(double c6, double distance);

struct FullLadderSpec {
  double omega_a1 = 0.0;
  double omega_a2 = 0.0;
  double delta = 0.0;  // intermediate detuning of p2
  DriveSource source = DriveSource::G;
  double omega_b = 0.0;          // r <-> p1 drive in relaxation segments
  double two_photon_detuning = 0.0;
  // Adds +Omega_s^2/(4 Delta) on the source state and +Omega_a1^2/(4 Delta) on r.
  bool light_shift_compensation = true;
};

enum class LadderSegment { Pulse, Relax };

double effective_rabi(double omega_a1, double omega_a2, double delta);

// ---------------------------------------------------------------------------

// Static-frame drive at time t:
// sum_j (Omega(t)/2) e^{i phi_j} |r><s|_j + h.c. - delta sum_j |r><r|_j.
OperatorMatrix drive_hamiltonian(const DriveSpec& spec, const Basis& basis, double t);
// Same drive as a time-dependent generator. In the oscillating frame the
// detuning enters as e^{-i delta t} on |r><s| instead of the diagonal term.
Hamiltonian drive_generator(const DriveSpec& spec, const Basis& basis);

OperatorMatrix rydberg_interaction(const InteractionSpec& spec, const Basis& basis);
OperatorMatrix microwave_hamiltonian(double omega_c, const Basis& basis);
OperatorMatrix blockade_effective_hamiltonian(double omega_a, const Basis& basis);
OperatorMatrix full_ladder_hamiltonian(const FullLadderSpec& spec, const Basis& basis, LadderSegment segment,
                                       const InteractionSpec* interaction = nullptr);

}  // namespace rydprep
