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

#include "rydprep/hilbert.hpp"

#include <algorithm>
#include <array>
#include <sstream>

#include <Eigen/Eigenvalues>

namespace rydprep {

namespace {

constexpr std::array<std::pair<Level, std::string_view>, 6> kLevelNames{{
    {Level::G, "g"},
    {Level::E, "e"},
    {Level::H, "h"},
    {Level::P1, "p1"},
    {Level::P2, "p2"},
    {Level::R, "r"},
}};

double max_abs(const SparseMatrix& m) {
  double out = 0.0;
  for (int k = 0; k < m.outerSize(); ++k) {
    for (SparseMatrix::InnerIterator it(m, k); it; ++it) out = std::max(out, std::abs(it.value()));
  }
  return out;
}

std::optional<std::vector<LocalPart>> merge_parts(const std::optional<std::vector<LocalPart>>& a,
                                                  const std::optional<std::vector<LocalPart>>& b,
                                                  Complex b_scale) {
  if (!a || !b) return std::nullopt;
  std::vector<LocalPart> out = *a;
  for (const auto& p : *b) {
    auto it = std::find_if(out.begin(), out.end(), [&](const LocalPart& q) { return q.atom == p.atom; });
    if (it != out.end()) {
      it->op += b_scale * p.op;
    } else {
      out.push_back({p.atom, b_scale * p.op});
    }
  }
  return out;
}

}  // namespace

std::string_view level_name(Level level) {
  for (const auto& [l, name] : kLevelNames) {
    if (l == level) return name;
  }
  return "?";
}

Level parse_level(std::string_view name) {
  for (const auto& [l, n] : kLevelNames) {
    if (n == name) return l;
  }
  throw std::invalid_argument("unknown level label '" + std::string(name) + "'");
}

std::string_view scheme_name(SchemeKind kind) {
  switch (kind) {
    case SchemeKind::ReducedGER:
      return "REDUCED_GER";
    case SchemeKind::ReducedGEHR:
      return "REDUCED_GEHR";
    case SchemeKind::FullSix:
      return "FULL_SIX";
  }
  return "?";
}

SchemeKind parse_scheme(std::string_view name) {
  for (auto k : {SchemeKind::ReducedGER, SchemeKind::ReducedGEHR, SchemeKind::FullSix}) {
    if (scheme_name(k) == name) return k;
  }
  throw std::invalid_argument("unknown level scheme '" + std::string(name) + "'");
}

LevelScheme::LevelScheme(SchemeKind kind) : kind_(kind) {
  switch (kind) {
    case SchemeKind::ReducedGER:
      levels_ = {Level::G, Level::E, Level::R};
      break;
    case SchemeKind::ReducedGEHR:
      levels_ = {Level::G, Level::E, Level::H, Level::R};
      break;
    case SchemeKind::FullSix:
      levels_ = {Level::G, Level::E, Level::H, Level::P1, Level::P2, Level::R};
      break;
  }
}

bool LevelScheme::contains(Level level) const noexcept { return find(level).has_value(); }

std::optional<std::size_t> LevelScheme::find(Level level) const noexcept {
  for (std::size_t i = 0; i < levels_.size(); ++i) {
    if (levels_[i] == level) return i;
  }
  return std::nullopt;
}

std::size_t LevelScheme::index_of(Level level) const {
  if (auto i = find(level)) return *i;
  throw std::invalid_argument("level '" + std::string(level_name(level)) + "' is not part of scheme " +
                              std::string(name()));
}

Basis::Basis(std::size_t n_atoms, LevelScheme scheme) : n_atoms_(n_atoms), scheme_(std::move(scheme)) {
  if (n_atoms < 1 || n_atoms > kMaxAtoms) {
    throw std::invalid_argument("n_atoms must be in [1, 6], got " + std::to_string(n_atoms));
  }
  const std::size_t L = scheme_.size();
  strides_.assign(n_atoms_, 1);
  for (std::size_t j = n_atoms_ - 1; j > 0; --j) strides_[j - 1] = strides_[j] * L;
  dim_ = strides_[0] * L;
}

std::vector<std::size_t> Basis::decode_indices(std::size_t index) const {
  if (index >= dim_) throw std::out_of_range("basis index out of range");
  std::vector<std::size_t> out(n_atoms_);
  for (std::size_t j = 0; j < n_atoms_; ++j) {
    out[j] = index / strides_[j];
    index %= strides_[j];
  }
  return out;
}

std::size_t Basis::encode_indices(const std::vector<std::size_t>& local) const {
  if (local.size() != n_atoms_) throw std::invalid_argument("wrong number of atoms in index tuple");
  std::size_t out = 0;
  for (std::size_t j = 0; j < n_atoms_; ++j) {
    if (local[j] >= scheme_.size()) throw std::out_of_range("level index out of range");
    out += local[j] * strides_[j];
  }
  return out;
}

std::vector<Level> Basis::decode(std::size_t index) const {
  std::vector<Level> out;
  for (std::size_t i : decode_indices(index)) out.push_back(scheme_.levels()[i]);
  return out;
}

std::size_t Basis::encode(const std::vector<Level>& levels) const {
  std::vector<std::size_t> local;
  for (Level l : levels) local.push_back(scheme_.index_of(l));
  return encode_indices(local);
}

std::string Basis::label(std::size_t index) const {
  std::string out;
  for (Level l : decode(index)) out += level_name(l);
  return out;
}

Basis build_basis(std::size_t n_atoms, SchemeKind scheme) { return Basis(n_atoms, LevelScheme(scheme)); }

std::vector<Level> parse_pattern(std::string_view pattern, std::size_t n_atoms) {
  std::vector<Level> out;
  std::size_t i = 0;
  while (i < pattern.size()) {
    if (pattern[i] == 'p' && i + 1 < pattern.size()) {
      out.push_back(parse_level(pattern.substr(i, 2)));
      i += 2;
    } else {
      out.push_back(parse_level(pattern.substr(i, 1)));
      i += 1;
    }
  }
  if (out.size() != n_atoms) {
    throw std::invalid_argument("pattern '" + std::string(pattern) + "' has " + std::to_string(out.size()) +
                                " atoms, expected " + std::to_string(n_atoms));
  }
  return out;
}

LocalOperator transition(Level to, Level from, Complex weight) { return {{to, from, weight}}; }

LocalOperator local_identity(const LevelScheme& scheme) {
  LocalOperator out;
  for (Level l : scheme.levels()) out.push_back({l, l, 1.0});
  return out;
}

LocalOperator operator+(LocalOperator a, const LocalOperator& b) {
  a.insert(a.end(), b.begin(), b.end());
  return a;
}

LocalOperator operator*(Complex s, LocalOperator a) {
  for (auto& t : a) t.weight *= s;
  return a;
}

Matrix local_matrix(const LocalOperator& op, const LevelScheme& scheme) {
  const auto L = static_cast<Eigen::Index>(scheme.size());
  Matrix m = Matrix::Zero(L, L);
  for (const auto& t : op) {
    m(static_cast<Eigen::Index>(scheme.index_of(t.to)), static_cast<Eigen::Index>(scheme.index_of(t.from))) +=
        t.weight;
  }
  return m;
}

// ---------------------------------------------------------------------------

OperatorMatrix::OperatorMatrix(Basis basis, SparseMatrix matrix)
    : basis_(std::move(basis)), matrix_(std::move(matrix)) {
  const auto d = static_cast<Eigen::Index>(basis_.dim());
  if (matrix_.rows() != d || matrix_.cols() != d) {
    throw std::invalid_argument("operator dimension does not match basis dimension " + std::to_string(d));
  }
  matrix_.makeCompressed();
}

OperatorMatrix::OperatorMatrix(Basis basis, SparseMatrix matrix, std::vector<LocalPart> parts)
    : OperatorMatrix(std::move(basis), std::move(matrix)) {
  parts_ = std::move(parts);
}

OperatorMatrix OperatorMatrix::zero(const Basis& basis) {
  const auto d = static_cast<Eigen::Index>(basis.dim());
  return OperatorMatrix(basis, SparseMatrix(d, d), {});
}

OperatorMatrix OperatorMatrix::identity(const Basis& basis) {
  const auto d = static_cast<Eigen::Index>(basis.dim());
  SparseMatrix m(d, d);
  m.setIdentity();
  return OperatorMatrix(basis, std::move(m));
}

std::size_t OperatorMatrix::nnz() const {
  std::size_t count = 0;
  for (int k = 0; k < matrix_.outerSize(); ++k) {
    for (SparseMatrix::InnerIterator it(matrix_, k); it; ++it) {
      if (it.value() != Complex(0.0, 0.0)) ++count;
    }
  }
  return count;
}

bool OperatorMatrix::is_hermitian(double tol) const {
  SparseMatrix diff = matrix_ - SparseMatrix(matrix_.adjoint());
  return max_abs(diff) <= tol * std::max(1.0, max_abs(matrix_));
}

OperatorMatrix OperatorMatrix::adjoint() const {
  OperatorMatrix out(basis_, SparseMatrix(matrix_.adjoint()));
  if (parts_) {
    std::vector<LocalPart> p;
    for (const auto& part : *parts_) p.push_back({part.atom, part.op.adjoint()});
    out.parts_ = std::move(p);
  }
  return out;
}

Vector OperatorMatrix::apply(const Vector& v) const {
  if (v.size() != static_cast<Eigen::Index>(dim())) throw std::invalid_argument("vector dimension mismatch");
  return matrix_ * v;
}

void OperatorMatrix::require_same_basis(const OperatorMatrix& other) const {
  if (!(basis_ == other.basis_)) throw std::invalid_argument("operators live on different bases");
}

OperatorMatrix OperatorMatrix::operator+(const OperatorMatrix& other) const {
  require_same_basis(other);
  OperatorMatrix out(basis_, SparseMatrix(matrix_ + other.matrix_));
  out.parts_ = merge_parts(parts_, other.parts_, 1.0);
  return out;
}

OperatorMatrix OperatorMatrix::operator-(const OperatorMatrix& other) const {
  require_same_basis(other);
  OperatorMatrix out(basis_, SparseMatrix(matrix_ - other.matrix_));
  out.parts_ = merge_parts(parts_, other.parts_, -1.0);
  return out;
}

OperatorMatrix OperatorMatrix::operator*(const OperatorMatrix& other) const {
  require_same_basis(other);
  return OperatorMatrix(basis_, SparseMatrix(matrix_ * other.matrix_));
}

OperatorMatrix OperatorMatrix::operator*(Complex s) const {
  OperatorMatrix out(basis_, SparseMatrix(matrix_ * s));
  if (parts_) {
    std::vector<LocalPart> p;
    for (const auto& part : *parts_) p.push_back({part.atom, s * part.op});
    out.parts_ = std::move(p);
  }
  return out;
}

OperatorMatrix& OperatorMatrix::operator+=(const OperatorMatrix& other) {
  *this = *this + other;
  return *this;
}

OperatorMatrix embed_matrix(const Matrix& op, std::size_t atom_index, const Basis& basis) {
  const std::size_t L = basis.levels_per_atom();
  if (atom_index >= basis.n_atoms()) {
    throw std::invalid_argument("atom index " + std::to_string(atom_index) + " out of range for " +
                                std::to_string(basis.n_atoms()) + " atoms");
  }
  if (op.rows() != static_cast<Eigen::Index>(L) || op.cols() != static_cast<Eigen::Index>(L)) {
    throw std::invalid_argument("single-atom operator has wrong dimension");
  }
  const std::size_t stride = basis.stride(atom_index);
  const std::size_t d = basis.dim();
  std::vector<Triplet> triplets;
  // Enumerate spectator configurations: indices with this atom's digit zero.
  for (std::size_t base = 0; base < d; ++base) {
    if ((base / stride) % L != 0) continue;
    for (std::size_t a = 0; a < L; ++a) {
      for (std::size_t b = 0; b < L; ++b) {
        const Complex w = op(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b));
        if (w == Complex(0.0, 0.0)) continue;
        triplets.emplace_back(static_cast<int>(base + a * stride), static_cast<int>(base + b * stride), w);
      }
    }
  }
  SparseMatrix m(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
  m.setFromTriplets(triplets.begin(), triplets.end());
  return OperatorMatrix(basis, std::move(m), {LocalPart{atom_index, op}});
}

OperatorMatrix embed(const LocalOperator& op, std::size_t atom_index, const Basis& basis) {
  return embed_matrix(local_matrix(op, basis.scheme()), atom_index, basis);
}

OperatorMatrix embed_all(const LocalOperator& op, const Basis& basis) {
  OperatorMatrix out = OperatorMatrix::zero(basis);
  const Matrix m = local_matrix(op, basis.scheme());
  for (std::size_t j = 0; j < basis.n_atoms(); ++j) out += embed_matrix(m, j, basis);
  return out;
}

// ---------------------------------------------------------------------------

StateVector::StateVector(Basis basis, Vector amplitudes) : basis_(std::move(basis)), amplitudes_(std::move(amplitudes)) {
  if (amplitudes_.size() != static_cast<Eigen::Index>(basis_.dim())) {
    throw std::invalid_argument("state vector dimension does not match basis");
  }
}

StateVector StateVector::normalized() const {
  const double n = norm();
  if (n == 0.0) throw std::invalid_argument("cannot normalize the zero vector");
  return StateVector(basis_, amplitudes_ / n);
}

StateVector product_state(const Basis& basis, const std::vector<Level>& levels) {
  Vector v = Vector::Zero(static_cast<Eigen::Index>(basis.dim()));
  v(static_cast<Eigen::Index>(basis.encode(levels))) = 1.0;
  return StateVector(basis, std::move(v));
}

StateVector product_state(const Basis& basis, std::string_view pattern) {
  return product_state(basis, parse_pattern(pattern, basis.n_atoms()));
}

OperatorMatrix projector(const std::vector<std::optional<Level>>& pattern, const Basis& basis) {
  if (pattern.size() != basis.n_atoms()) throw std::invalid_argument("pattern length does not match atom count");
  std::vector<std::optional<std::size_t>> want;
  for (const auto& p : pattern) {
    want.push_back(p ? std::optional<std::size_t>(basis.scheme().index_of(*p)) : std::nullopt);
  }
  std::vector<Triplet> triplets;
  for (std::size_t i = 0; i < basis.dim(); ++i) {
    const auto idx = basis.decode_indices(i);
    bool match = true;
    for (std::size_t j = 0; j < idx.size() && match; ++j) match = !want[j] || *want[j] == idx[j];
    if (match) triplets.emplace_back(static_cast<int>(i), static_cast<int>(i), 1.0);
  }
  const auto d = static_cast<Eigen::Index>(basis.dim());
  SparseMatrix m(d, d);
  m.setFromTriplets(triplets.begin(), triplets.end());
  return OperatorMatrix(basis, std::move(m));
}

OperatorMatrix projector(const StateVector& state) {
  const Vector psi = state.normalized().amplitudes();
  std::vector<Triplet> triplets;
  for (Eigen::Index i = 0; i < psi.size(); ++i) {
    if (psi(i) == Complex(0.0, 0.0)) continue;
    for (Eigen::Index j = 0; j < psi.size(); ++j) {
      if (psi(j) == Complex(0.0, 0.0)) continue;
      triplets.emplace_back(static_cast<int>(i), static_cast<int>(j), psi(i) * std::conj(psi(j)));
    }
  }
  SparseMatrix m(psi.size(), psi.size());
  m.setFromTriplets(triplets.begin(), triplets.end());
  return OperatorMatrix(state.basis(), std::move(m));
}

// ---------------------------------------------------------------------------

DensityMatrix::DensityMatrix(Basis basis, Matrix rho) : basis_(std::move(basis)), rho_(std::move(rho)) {
  const auto d = static_cast<Eigen::Index>(basis_.dim());
  if (rho_.rows() != d || rho_.cols() != d) throw std::invalid_argument("density matrix dimension mismatch");
}

DensityMatrix DensityMatrix::from_pure(const StateVector& state) {
  const Vector psi = state.normalized().amplitudes();
  return DensityMatrix(state.basis(), psi * psi.adjoint());
}

double DensityMatrix::hermiticity_error() const { return (rho_ - rho_.adjoint()).cwiseAbs().maxCoeff(); }

double DensityMatrix::min_eigenvalue() const {
  Eigen::SelfAdjointEigenSolver<Matrix> solver(rho_, Eigen::EigenvaluesOnly);
  return solver.eigenvalues().minCoeff();
}

void DensityMatrix::symmetrize() {
  Matrix sym = 0.5 * (rho_ + rho_.adjoint());
  rho_ = std::move(sym);
}

void DensityMatrix::normalize() {
  const double tr = rho_.trace().real();
  if (!(tr > 0.0)) throw NumericError("density matrix has non-positive trace");
  rho_ /= tr;
}

Complex DensityMatrix::expectation(const OperatorMatrix& op) const {
  if (!(op.basis() == basis_)) throw std::invalid_argument("operator and density matrix bases differ");
  return (op.matrix() * rho_).trace();
}

double DensityMatrix::overlap(const StateVector& psi) const {
  if (!(psi.basis() == basis_)) throw std::invalid_argument("state and density matrix bases differ");
  const Vector& v = psi.amplitudes();
  return v.dot(rho_ * v).real();
}

}  // namespace rydprep
