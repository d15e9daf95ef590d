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

#include "rydprep/hamiltonians.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "rydprep/log.hpp"

namespace rydprep {

namespace {

double inf_norm(const SparseMatrix& m) {
  double best = 0.0;
  for (int k = 0; k < m.outerSize(); ++k) {
    double row = 0.0;
    for (SparseMatrix::InnerIterator it(m, k); it; ++it) row += std::abs(it.value());
    best = std::max(best, row);
  }
  return best;
}

// |r><s| for the drive source s.
LocalOperator raise_from(DriveSource source) {
  switch (source) {
    case DriveSource::G:
      return transition(Level::R, Level::G);
    case DriveSource::E:
      return transition(Level::R, Level::E);
    case DriveSource::Plus:
      return transition(Level::R, Level::G, M_SQRT1_2) + transition(Level::R, Level::E, M_SQRT1_2);
  }
  return {};
}

void require_levels(const Basis& basis, std::initializer_list<Level> levels, const char* what) {
  for (Level l : levels) {
    if (!basis.scheme().contains(l)) {
      throw std::invalid_argument(std::string(what) + ": level '" + std::string(level_name(l)) +
                                  "' is absent from scheme " + std::string(basis.scheme().name()));
    }
  }
}

void require_source(const Basis& basis, DriveSource source) {
  if (source == DriveSource::E) {
    require_levels(basis, {Level::E, Level::R}, "drive");
  } else if (source == DriveSource::G) {
    require_levels(basis, {Level::G, Level::R}, "drive");
  } else {
    require_levels(basis, {Level::G, Level::E, Level::R}, "drive");
  }
}

}  // namespace

// ---------------------------------------------------------------------------

Hamiltonian::Hamiltonian(Basis basis) : basis_(std::move(basis)) {}

Hamiltonian::Hamiltonian(const OperatorMatrix& constant) : basis_(constant.basis()) { add(constant); }

bool Hamiltonian::is_constant() const {
  return std::all_of(terms_.begin(), terms_.end(), [](const HamiltonianTerm& t) { return !t.coeff; });
}

bool Hamiltonian::is_zero() const {
  return std::all_of(terms_.begin(), terms_.end(), [](const HamiltonianTerm& t) { return t.op.nnz() == 0; });
}

Hamiltonian& Hamiltonian::add(const OperatorMatrix& op) {
  if (!(op.basis() == basis_)) throw std::invalid_argument("Hamiltonian term on a different basis");
  terms_.push_back({op, {}});
  return *this;
}

Hamiltonian& Hamiltonian::add(const OperatorMatrix& op, Coefficient coeff) {
  if (!(op.basis() == basis_)) throw std::invalid_argument("Hamiltonian term on a different basis");
  terms_.push_back({op, std::move(coeff)});
  return *this;
}

Hamiltonian& Hamiltonian::add_hermitian_pair(const OperatorMatrix& op, Coefficient coeff) {
  Coefficient conj = [c = coeff](double t) { return std::conj(c(t)); };
  add(op, std::move(coeff));
  add(op.adjoint(), std::move(conj));
  return *this;
}

Hamiltonian& Hamiltonian::add(const Hamiltonian& other) {
  if (!(other.basis_ == basis_)) throw std::invalid_argument("Hamiltonian on a different basis");
  terms_.insert(terms_.end(), other.terms_.begin(), other.terms_.end());
  return *this;
}

SparseMatrix Hamiltonian::matrix_at(double t) const {
  const auto d = static_cast<Eigen::Index>(basis_.dim());
  SparseMatrix out(d, d);
  for (const auto& term : terms_) {
    if (term.coeff) {
      out += term.op.matrix() * term.coeff(t);
    } else {
      out += term.op.matrix();
    }
  }
  out.makeCompressed();
  return out;
}

OperatorMatrix Hamiltonian::at(double t) const { return OperatorMatrix(basis_, matrix_at(t)); }

double Hamiltonian::norm_bound(double t0, double t1) const {
  constexpr int kSamples = 33;
  double out = 0.0;
  for (const auto& term : terms_) {
    double c = 1.0;
    if (term.coeff) {
      c = 0.0;
      for (int s = 0; s < kSamples; ++s) {
        const double t = t0 + (t1 - t0) * s / (kSamples - 1);
        c = std::max(c, std::abs(term.coeff(t)));
      }
    }
    out += c * inf_norm(term.op.matrix());
  }
  return out;
}

std::optional<std::vector<LocalPart>> Hamiltonian::local_parts() const {
  if (!is_constant()) return std::nullopt;
  OperatorMatrix sum = OperatorMatrix::zero(basis_);
  for (const auto& term : terms_) sum += term.op;
  return sum.local_parts();
}

// ---------------------------------------------------------------------------

std::string_view drive_source_name(DriveSource s) {
  switch (s) {
    case DriveSource::G:
      return "G";
    case DriveSource::E:
      return "E";
    case DriveSource::Plus:
      return "PLUS";
  }
  return "?";
}

DriveSource parse_drive_source(std::string_view name) {
  for (auto s : {DriveSource::G, DriveSource::E, DriveSource::Plus}) {
    if (drive_source_name(s) == name) return s;
  }
  throw std::invalid_argument("unknown drive source '" + std::string(name) + "'");
}

double Envelope::value(double t) const {
  if (kind == EnvelopeKind::Square) return 1.0;
  const double x = (t - center()) / sigma;
  return std::exp(-0.5 * x * x);
}

DriveSpec DriveSpec::for_source(DriveSource source, double omega_a, double detuning) {
  DriveSpec d;
  d.source = source;
  d.rabi_amplitude = source == DriveSource::Plus ? std::sqrt(2.0) * omega_a : omega_a;
  d.detuning = detuning;
  return d;
}

void DriveSpec::validate(std::size_t n_atoms) const {
  if (!(rabi_amplitude > 0.0) || !std::isfinite(rabi_amplitude)) {
    throw std::invalid_argument("drive rabi_amplitude must be positive");
  }
  if (!std::isfinite(detuning)) throw std::invalid_argument("drive detuning must be finite");
  if (envelope.kind == EnvelopeKind::Gaussian && !(envelope.sigma > 0.0)) {
    throw std::invalid_argument("Gaussian envelope requires sigma > 0");
  }
  if (!per_atom_phase.empty() && per_atom_phase.size() != n_atoms) {
    throw std::invalid_argument("per_atom_phase must have one entry per atom");
  }
}

double DriveSpec::phase(std::size_t atom) const { return per_atom_phase.empty() ? 0.0 : per_atom_phase.at(atom); }

double van_der_waals(double c6, double distance) {
  if (!(distance > 0.0)) throw std::invalid_argument("interatomic distance must be positive");
  return -c6 / std::pow(distance, 6);
}

InteractionSpec InteractionSpec::from_c6(double c6, const std::vector<std::array<double, 3>>& positions) {
  InteractionSpec out;
  for (std::size_t i = 0; i < positions.size(); ++i) {
    for (std::size_t j = i + 1; j < positions.size(); ++j) {
      const double dx = positions[i][0] - positions[j][0];
      const double dy = positions[i][1] - positions[j][1];
      const double dz = positions[i][2] - positions[j][2];
      const double r = std::sqrt(dx * dx + dy * dy + dz * dz);
      if (!(r > 0.0)) throw std::invalid_argument("atom positions must be distinct");
      out.pairs.push_back({i, j, van_der_waals(c6, r)});
    }
  }
  return out;
}

InteractionSpec InteractionSpec::uniform(std::size_t n_atoms, double u) {
  InteractionSpec out;
  for (std::size_t i = 0; i < n_atoms; ++i) {
    for (std::size_t j = i + 1; j < n_atoms; ++j) out.pairs.push_back({i, j, u});
  }
  return out;
}

double InteractionSpec::max_strength() const {
  double out = 0.0;
  for (const auto& p : pairs) out = std::max(out, std::abs(p.strength));
  return out;
}

void InteractionSpec::validate(std::size_t n_atoms) const {
  for (const auto& p : pairs) {
    if (p.i == p.j || p.i >= n_atoms || p.j >= n_atoms) {
      throw std::invalid_argument("interaction pair (" + std::to_string(p.i) + ", " + std::to_string(p.j) +
                                  ") invalid for " + std::to_string(n_atoms) + " atoms");
    }
    if (!std::isfinite(p.strength)) throw std::invalid_argument("interaction strength must be finite");
  }
}

double effective_rabi(double omega_a1, double omega_a2, double delta) {
  if (delta == 0.0) throw std::invalid_argument("intermediate detuning must be nonzero");
  return omega_a1 * omega_a2 / (2.0 * delta);
}

// ---------------------------------------------------------------------------

OperatorMatrix drive_hamiltonian(const DriveSpec& spec, const Basis& basis, double t) {
  DriveSpec s = spec;
  s.frame = DriveFrame::Static;
  return drive_generator(s, basis).at(t);
}

Hamiltonian drive_generator(const DriveSpec& spec, const Basis& basis) {
  require_source(basis, spec.source);
  spec.validate(basis.n_atoms());
  Hamiltonian h(basis);
  const LocalOperator up = raise_from(spec.source);
  const bool oscillating = spec.frame == DriveFrame::Oscillating && spec.detuning != 0.0;
  const bool time_dependent = oscillating || spec.envelope.kind == EnvelopeKind::Gaussian;
  for (std::size_t j = 0; j < basis.n_atoms(); ++j) {
    const Complex c0 = 0.5 * spec.rabi_amplitude * std::exp(kI * spec.phase(j));
    const OperatorMatrix a = embed(up, j, basis);
    if (!time_dependent) {
      h.add(a * c0 + a.adjoint() * std::conj(c0));
      continue;
    }
    const Envelope env = spec.envelope;
    const double delta = oscillating ? spec.detuning : 0.0;
    h.add_hermitian_pair(a, [c0, env, delta](double t) { return c0 * env.value(t) * std::exp(-kI * delta * t); });
  }
  if (spec.frame == DriveFrame::Static && spec.detuning != 0.0) {
    h.add(embed_all(transition(Level::R, Level::R), basis) * (-spec.detuning));
  }
  return h;
}

OperatorMatrix rydberg_interaction(const InteractionSpec& spec, const Basis& basis) {
  require_levels(basis, {Level::R}, "rydberg_interaction");
  spec.validate(basis.n_atoms());
  const std::size_t r = basis.scheme().index_of(Level::R);
  std::vector<Triplet> triplets;
  for (std::size_t i = 0; i < basis.dim(); ++i) {
    const auto idx = basis.decode_indices(i);
    double u = 0.0;
    for (const auto& p : spec.pairs) {
      if (idx[p.i] == r && idx[p.j] == r) u += p.strength;
    }
    if (u != 0.0) triplets.emplace_back(static_cast<int>(i), static_cast<int>(i), u);
  }
  const auto d = static_cast<Eigen::Index>(basis.dim());
  SparseMatrix m(d, d);
  m.setFromTriplets(triplets.begin(), triplets.end());
  return OperatorMatrix(basis, std::move(m));
}

OperatorMatrix microwave_hamiltonian(double omega_c, const Basis& basis) {
  require_levels(basis, {Level::G, Level::E, Level::H}, "microwave_hamiltonian");
  const Complex a = 0.5 * omega_c;
  const LocalOperator op = transition(Level::E, Level::G, a) + transition(Level::H, Level::G, a) +
                           transition(Level::G, Level::E, a) + transition(Level::G, Level::H, a);
  return embed_all(op, basis);
}

OperatorMatrix blockade_effective_hamiltonian(double omega_a, const Basis& basis) {
  if (basis.n_atoms() != 2) {
    throw std::invalid_argument("blockade_effective_hamiltonian needs exactly 2 atoms, got " +
                                std::to_string(basis.n_atoms()));
  }
  require_levels(basis, {Level::G, Level::E, Level::R}, "blockade_effective_hamiltonian");
  using L = Level;
  const double a = 0.5 * omega_a;
  std::vector<Triplet> triplets;
  auto couple = [&](std::vector<L> to, std::vector<L> from) {
    const int i = static_cast<int>(basis.encode(to));
    const int j = static_cast<int>(basis.encode(from));
    triplets.emplace_back(i, j, a);
    triplets.emplace_back(j, i, a);
  };
  couple({L::E, L::R}, {L::E, L::G});
  couple({L::R, L::E}, {L::G, L::E});
  couple({L::R, L::G}, {L::G, L::G});
  couple({L::G, L::R}, {L::G, L::G});
  const auto d = static_cast<Eigen::Index>(basis.dim());
  SparseMatrix m(d, d);
  m.setFromTriplets(triplets.begin(), triplets.end());
  return OperatorMatrix(basis, std::move(m));
}

OperatorMatrix full_ladder_hamiltonian(const FullLadderSpec& spec, const Basis& basis, LadderSegment segment,
                                       const InteractionSpec* interaction) {
  if (basis.scheme().kind() != SchemeKind::FullSix) {
    throw std::invalid_argument("full_ladder_hamiltonian requires the FULL_SIX scheme, got " +
                                std::string(basis.scheme().name()));
  }
  using L = Level;
  if (segment == LadderSegment::Relax) {
    const Complex b = 0.5 * spec.omega_b;
    return embed_all(transition(L::P1, L::R, b) + transition(L::R, L::P1, b), basis);
  }
  if (spec.delta == 0.0) throw std::invalid_argument("full ladder requires nonzero intermediate detuning");
  if (std::abs(spec.delta) < 10.0 * std::max(spec.omega_a1, spec.omega_a2)) {
    std::ostringstream msg;
    msg << "intermediate detuning Delta = 2pi x " << units::to_mhz(spec.delta)
        << " MHz is less than 10x the single-photon Rabi frequencies";
    warn(msg.str());
  }
  // The |p2><s| amplitude carries the sqrt2 of the PLUS convention so that the
  // two-photon coupling on |r><+| is sqrt2 * Omega_a.
  const double omega_s = spec.source == DriveSource::Plus ? std::sqrt(2.0) * spec.omega_a2 : spec.omega_a2;
  LocalOperator from_source;
  for (const auto& t : raise_from(spec.source)) from_source.push_back({L::P2, t.from, t.weight});
  LocalOperator up = 0.5 * omega_s * from_source + transition(L::R, L::P2, 0.5 * spec.omega_a1);
  LocalOperator down;
  for (const auto& t : up) down.push_back({t.from, t.to, std::conj(t.weight)});
  LocalOperator op = up + down + transition(L::P2, L::P2, spec.delta);
  if (spec.two_photon_detuning != 0.0) op = op + transition(L::R, L::R, -spec.two_photon_detuning);
  if (spec.light_shift_compensation) {
    const double shift_s = omega_s * omega_s / (4.0 * spec.delta);
    const double shift_r = spec.omega_a1 * spec.omega_a1 / (4.0 * spec.delta);
    LocalOperator proj_s;
    for (const auto& a : raise_from(spec.source)) {
      for (const auto& b : raise_from(spec.source)) proj_s.push_back({a.from, b.from, a.weight * std::conj(b.weight)});
    }
    op = op + shift_s * proj_s + transition(L::R, L::R, shift_r);
  }
  OperatorMatrix h = embed_all(op, basis);
  if (interaction != nullptr) h += rydberg_interaction(*interaction, basis);
  return h;
}

}  // namespace rydprep
