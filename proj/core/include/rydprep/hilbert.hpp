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

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "rydprep/types.hpp"

namespace rydprep {

enum class Level { G, E, H, P1, P2, R };

std::string_view level_name(Level level);
Level parse_level(std::string_view name);

enum class SchemeKind { ReducedGER, ReducedGEHR, FullSix };

std::string_view scheme_name(SchemeKind kind);
SchemeKind parse_scheme(std::string_view name);

class LevelScheme {
 public:
  explicit LevelScheme(SchemeKind kind);

  SchemeKind kind() const noexcept { return kind_; }
  std::string_view name() const { return scheme_name(kind_); }
  const std::vector<Level>& levels() const noexcept { return levels_; }
  std::size_t size() const noexcept { return levels_.size(); }

  bool contains(Level level) const noexcept;
  std::optional<std::size_t> find(Level level) const noexcept;
  // Throws std::invalid_argument naming the level and the scheme.
  std::size_t index_of(Level level) const;

  bool operator==(const LevelScheme& other) const noexcept { return kind_ == other.kind_; }

 private:
  SchemeKind kind_;
  std::vector<Level> levels_;
};

// Tensor-product basis. Atom 0 is the slowest-varying index, so
// index = sum_j level_index(atom j) * L^(n-1-j).
class Basis {
 public:
  static constexpr std::size_t kMaxAtoms = 6;

  Basis(std::size_t n_atoms, LevelScheme scheme);

  std::size_t n_atoms() const noexcept { return n_atoms_; }
  const LevelScheme& scheme() const noexcept { return scheme_; }
  std::size_t levels_per_atom() const noexcept { return scheme_.size(); }
  std::size_t dim() const noexcept { return dim_; }
  std::size_t stride(std::size_t atom) const { return strides_.at(atom); }

  std::vector<std::size_t> decode_indices(std::size_t index) const;
  std::size_t encode_indices(const std::vector<std::size_t>& local) const;
  std::vector<Level> decode(std::size_t index) const;
  std::size_t encode(const std::vector<Level>& levels) const;

  // Compact label such as "gr" or "ep1".
  std::string label(std::size_t index) const;

  bool operator==(const Basis& other) const noexcept {
    return n_atoms_ == other.n_atoms_ && scheme_ == other.scheme_;
  }

 private:
  std::size_t n_atoms_;
  LevelScheme scheme_;
  std::size_t dim_;
  std::vector<std::size_t> strides_;
};

Basis build_basis(std::size_t n_atoms, SchemeKind scheme);

// Parses per-atom level patterns such as "gg", "eh" or "gp1". Throws
// std::invalid_argument on unknown labels or a wrong number of atoms.
std::vector<Level> parse_pattern(std::string_view pattern, std::size_t n_atoms);

// Weighted single-atom map sum_k w_k |to_k><from_k|.
struct LocalTerm {
  Level to;
  Level from;
  Complex weight{1.0, 0.0};
};
using LocalOperator = std::vector<LocalTerm>;

LocalOperator transition(Level to, Level from, Complex weight = 1.0);
LocalOperator local_identity(const LevelScheme& scheme);
LocalOperator operator+(LocalOperator a, const LocalOperator& b);
LocalOperator operator*(Complex s, LocalOperator a);
Matrix local_matrix(const LocalOperator& op, const LevelScheme& scheme);

// Single-atom piece of an operator known to be a sum of one-atom terms.
struct LocalPart {
  std::size_t atom;
  Matrix op;  // levels_per_atom x levels_per_atom
};

class OperatorMatrix {
 public:
  OperatorMatrix(Basis basis, SparseMatrix matrix);
  OperatorMatrix(Basis basis, SparseMatrix matrix, std::vector<LocalPart> parts);

  static OperatorMatrix zero(const Basis& basis);
  static OperatorMatrix identity(const Basis& basis);

  const Basis& basis() const noexcept { return basis_; }
  const SparseMatrix& matrix() const noexcept { return matrix_; }
  std::size_t dim() const noexcept { return basis_.dim(); }
  std::size_t nnz() const;
  Matrix dense() const { return Matrix(matrix_); }

  // Decomposition into single-atom parts, when the operator was built as a
  // sum of embedded single-atom operators.
  const std::optional<std::vector<LocalPart>>& local_parts() const noexcept { return parts_; }

  // Relative test: ||A - A^dag||_max <= tol * max(1, ||A||_max).
  bool is_hermitian(double tol = 1e-12) const;
  OperatorMatrix adjoint() const;
  Vector apply(const Vector& v) const;

  OperatorMatrix operator+(const OperatorMatrix& other) const;
  OperatorMatrix operator-(const OperatorMatrix& other) const;
  OperatorMatrix operator*(const OperatorMatrix& other) const;
  OperatorMatrix operator*(Complex s) const;
  OperatorMatrix& operator+=(const OperatorMatrix& other);

 private:
  void require_same_basis(const OperatorMatrix& other) const;

  Basis basis_;
  SparseMatrix matrix_;
  std::optional<std::vector<LocalPart>> parts_;
};

inline OperatorMatrix operator*(Complex s, const OperatorMatrix& a) { return a * s; }

// identity x ... x op (at atom_index) x ... x identity.
OperatorMatrix embed(const LocalOperator& op, std::size_t atom_index, const Basis& basis);
OperatorMatrix embed_matrix(const Matrix& op, std::size_t atom_index, const Basis& basis);
// sum_j embed(op, j).
OperatorMatrix embed_all(const LocalOperator& op, const Basis& basis);

class StateVector {
 public:
  StateVector(Basis basis, Vector amplitudes);

  const Basis& basis() const noexcept { return basis_; }
  const Vector& amplitudes() const noexcept { return amplitudes_; }
  double norm() const { return amplitudes_.norm(); }
  StateVector normalized() const;

 private:
  Basis basis_;
  Vector amplitudes_;
};

StateVector product_state(const Basis& basis, const std::vector<Level>& levels);
StateVector product_state(const Basis& basis, std::string_view pattern);

// Pattern entries set to std::nullopt match any level (rank-k projector).
OperatorMatrix projector(const std::vector<std::optional<Level>>& pattern, const Basis& basis);
OperatorMatrix projector(const StateVector& state);

class DensityMatrix {
 public:
  DensityMatrix(Basis basis, Matrix rho);

  static DensityMatrix from_pure(const StateVector& state);

  const Basis& basis() const noexcept { return basis_; }
  const Matrix& matrix() const noexcept { return rho_; }
  Matrix& matrix() noexcept { return rho_; }
  std::size_t dim() const noexcept { return basis_.dim(); }

  Complex trace() const { return rho_.trace(); }
  double trace_error() const { return std::abs(rho_.trace() - Complex(1.0, 0.0)); }
  double hermiticity_error() const;
  double min_eigenvalue() const;
  void symmetrize();
  void normalize();

  Complex expectation(const OperatorMatrix& op) const;
  // <psi|rho|psi>, real part.
  double overlap(const StateVector& psi) const;

 private:
  Basis basis_;
  Matrix rho_;
};

}  // namespace rydprep
