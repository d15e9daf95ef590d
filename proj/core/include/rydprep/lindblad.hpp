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
#include <memory>
#include <string>
#include <vector>

#include "rydprep/hamiltonians.hpp"
#include "rydprep/hilbert.hpp"

namespace rydprep {

// Dissipator term (rate/2) * (2 c rho c^dag - {c^dag c, rho}), i.e. the
// standard Lindblad form with rate `rate`.
struct Channel {
  OperatorMatrix jump;
  double rate = 1.0;
  std::string label;

  // Atom index when the jump operator acts on a single atom.
  std::optional<std::size_t> local_atom() const;
};

// Per atom: |g><r| at gamma_eff/6, |e><r| at gamma_eff/2 and, when
// include_h, |h><r| at gamma_eff/3, with gamma_eff = omega_b^2 / gamma.
std::vector<Channel> engineered_decay_channels(double omega_b, double gamma, const Basis& basis, bool include_h);

// Collective dephasing with the rate folded into the operator:
// L_g = sqrt(gamma_g/2) sum_j (|p2><p2| - |g><g|), L_e likewise with e,
// L_p = sqrt(gamma_p/2) sum_j (|r><r| - |p2><p2|). Channel rate is 1.
std::vector<Channel> dephasing_channels(double gamma_g, double gamma_e, double gamma_p, const Basis& basis);

struct NaturalDecayOptions {
  std::array<double, 3> r_branching{1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0};  // to g, e, h
  double gamma_p2 = 0.0;
  std::array<double, 3> p2_branching{1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0};
};

// p1 -> g, e, h with branching 1/6, 1/2, 1/3 of gamma_p1; r -> g, e, h with
// the configured branching of gamma_r; optional p2 decay.
std::vector<Channel> natural_decay_channels(double gamma_p1, double gamma_r, const Basis& basis,
                                            const NaturalDecayOptions& options = {});

// Incoherent |h> -> |r> repumping, one channel per atom.
std::vector<Channel> h_recycling_channels(double rate, const Basis& basis);

// -i[H, rho] + sum_k (rate_k/2)(2 c rho c^dag - c^dag c rho - rho c^dag c).
Matrix lindblad_rhs(const DensityMatrix& rho, const OperatorMatrix& h, const std::vector<Channel>& channels);

class Liouvillian {
 public:
  Liouvillian(Hamiltonian h, std::vector<Channel> channels);

  const Basis& basis() const noexcept { return h_.basis(); }
  const Hamiltonian& hamiltonian() const noexcept { return h_; }
  const std::vector<Channel>& channels() const noexcept { return channels_; }
  bool has_dissipation() const noexcept { return !channels_.empty(); }
  bool is_constant() const { return h_.is_constant(); }

  void rhs(double t, const Matrix& rho, Matrix& out) const;

  // Column-major vectorization: vec(A rho B) = (B^T kron A) vec(rho).
  Matrix superoperator(double t = 0.0) const;

  // Largest angular frequency in H and the dissipator over [t0, t1].
  double frequency_scale(double t0, double t1) const;

  // Per-atom single-site Liouvillians (L^2 x L^2) when every Hamiltonian term
  // and every channel is single-atom local and the Hamiltonian is constant.
  std::optional<std::vector<Matrix>> local_generators() const;

 private:
  Hamiltonian h_;
  std::vector<Channel> channels_;
  SparseMatrix decay_;  // sum rate c^dag c / 2
  std::vector<SparseMatrix> jumps_;
  std::vector<SparseMatrix> jumps_adj_;
};

// ---------------------------------------------------------------------------

enum class IntegratorMethod { Rk4Fixed, Rk45Adaptive, MagnusMidpoint };

std::string_view integrator_name(IntegratorMethod m);
IntegratorMethod parse_integrator(std::string_view name);

struct IntegratorConfig {
  IntegratorMethod method = IntegratorMethod::Rk45Adaptive;
  double max_step = 0.0;  // seconds; 0 selects (1/50) * 2pi / omega_max
  double rel_tol = 1e-8;
  double abs_tol = 1e-10;
  // Time slice for MAGNUS_MIDPOINT when max_step is 0.
  double slice = 5e-9;
  // Allow exact propagators for time-independent segments (Hermitian
  // eigendecomposition, single-atom product maps, dense superoperator
  // exponential up to max_superoperator_dim Hilbert dimensions).
  bool exact_propagators = true;
  std::size_t max_superoperator_dim = 36;

  void validate() const;
};

// Magnus midpoint applies to unitary segments; dissipative segments with that
// method fall back to RK45.
class Propagator {
 public:
  enum class Kind { Identity, Unitary, Superoperator, LocalProduct, Integrated };

  Kind kind() const noexcept { return kind_; }
  double duration() const noexcept { return duration_; }
  const Matrix& unitary() const;

  // Applies the map in place and re-symmetrizes.
  void apply(DensityMatrix& rho) const;

  static Propagator identity(double duration);
  static Propagator from_unitary(Matrix u, double duration);

 private:
  friend Propagator make_propagator(const Hamiltonian&, const std::vector<Channel>&, double,
                                    const IntegratorConfig&);

  Kind kind_ = Kind::Identity;
  double duration_ = 0.0;
  Matrix map_;                       // unitary or superoperator
  std::vector<Matrix> local_maps_;   // per-atom L^2 x L^2
  std::shared_ptr<const Liouvillian> liouvillian_;
  IntegratorConfig cfg_;
};

std::string_view propagator_kind_name(Propagator::Kind kind);

Propagator make_propagator(const Hamiltonian& h, const std::vector<Channel>& channels, double duration,
                           const IntegratorConfig& cfg);

// U(duration) for H(t) on [0, duration] with the configured method.
Matrix unitary_propagator(const Hamiltonian& h, double duration, const IntegratorConfig& cfg);

// Integrates rho from t = 0 to duration. Throws NumericError with the time
// reached on step-size underflow or non-finite values.
DensityMatrix evolve(const DensityMatrix& rho0, const Hamiltonian& h, const std::vector<Channel>& channels,
                     double duration, const IntegratorConfig& cfg = {});

}  // namespace rydprep
