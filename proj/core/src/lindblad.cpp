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

#include "rydprep/lindblad.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <unsupported/Eigen/KroneckerProduct>

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

void require_full_six(const Basis& basis, const char* what) {
  if (basis.scheme().kind() != SchemeKind::FullSix) {
    throw std::invalid_argument(std::string(what) + " requires the FULL_SIX scheme, got " +
                                std::string(basis.scheme().name()));
  }
}

void add_decay(std::vector<Channel>& out, const Basis& basis, Level to, Level from, double rate) {
  if (rate <= 0.0) return;
  for (std::size_t j = 0; j < basis.n_atoms(); ++j) {
    std::string label = std::string(level_name(from)) + "->" + std::string(level_name(to)) + "@" + std::to_string(j);
    out.push_back({embed(transition(to, from), j, basis), rate, std::move(label)});
  }
}

// Column-major generator for a single site.
Matrix site_generator(const Matrix& h, const std::vector<std::pair<Matrix, double>>& jumps) {
  const Eigen::Index L = h.rows();
  const Matrix id = Matrix::Identity(L, L);
  Matrix g = -kI * (Matrix(Eigen::kroneckerProduct(id, h)) - Matrix(Eigen::kroneckerProduct(h.transpose(), id)));
  for (const auto& [c, rate] : jumps) {
    const Matrix cdc = c.adjoint() * c;
    g += rate * (Matrix(Eigen::kroneckerProduct(c.conjugate(), c)) - 0.5 * Matrix(Eigen::kroneckerProduct(id, cdc)) -
                 0.5 * Matrix(Eigen::kroneckerProduct(cdc.transpose(), id)));
  }
  return g;
}

}  // namespace

std::optional<std::size_t> Channel::local_atom() const {
  const auto& parts = jump.local_parts();
  if (parts && parts->size() == 1) return parts->front().atom;
  return std::nullopt;
}

std::vector<Channel> engineered_decay_channels(double omega_b, double gamma, const Basis& basis, bool include_h) {
  if (!(gamma > 0.0)) throw std::invalid_argument("gamma must be positive");
  if (omega_b < 0.0) throw std::invalid_argument("omega_b must be non-negative");
  for (Level l : {Level::G, Level::E, Level::R}) basis.scheme().index_of(l);
  if (include_h && !basis.scheme().contains(Level::H)) {
    throw std::invalid_argument("include_h requested but scheme " + std::string(basis.scheme().name()) +
                                " has no h level");
  }
  if (omega_b > gamma / 3.0) {
    warn("Omega_b exceeds gamma/3; the adiabatic elimination behind gamma_eff = Omega_b^2/gamma is unreliable");
  }
  const double gamma_eff = omega_b * omega_b / gamma;
  std::vector<Channel> out;
  add_decay(out, basis, Level::G, Level::R, gamma_eff / 6.0);
  add_decay(out, basis, Level::E, Level::R, gamma_eff / 2.0);
  if (include_h) add_decay(out, basis, Level::H, Level::R, gamma_eff / 3.0);
  return out;
}

std::vector<Channel> dephasing_channels(double gamma_g, double gamma_e, double gamma_p, const Basis& basis) {
  require_full_six(basis, "dephasing_channels");
  if (gamma_g < 0.0 || gamma_e < 0.0 || gamma_p < 0.0) throw std::invalid_argument("dephasing rates must be >= 0");
  using L = Level;
  auto collective = [&](double gamma, Level plus, Level minus) {
    const double a = std::sqrt(gamma / 2.0);
    return embed_all(transition(plus, plus, a) + transition(minus, minus, -a), basis);
  };
  return {
      {collective(gamma_g, L::P2, L::G), 1.0, "dephasing_g"},
      {collective(gamma_e, L::P2, L::E), 1.0, "dephasing_e"},
      {collective(gamma_p, L::R, L::P2), 1.0, "dephasing_p"},
  };
}

std::vector<Channel> natural_decay_channels(double gamma_p1, double gamma_r, const Basis& basis,
                                            const NaturalDecayOptions& options) {
  require_full_six(basis, "natural_decay_channels");
  if (gamma_p1 < 0.0 || gamma_r < 0.0 || options.gamma_p2 < 0.0) {
    throw std::invalid_argument("decay rates must be >= 0");
  }
  using L = Level;
  std::vector<Channel> out;
  const std::array<Level, 3> grounds{L::G, L::E, L::H};
  const std::array<double, 3> p1_branching{1.0 / 6.0, 1.0 / 2.0, 1.0 / 3.0};
  for (int k = 0; k < 3; ++k) add_decay(out, basis, grounds[k], L::P1, gamma_p1 * p1_branching[k]);
  for (int k = 0; k < 3; ++k) add_decay(out, basis, grounds[k], L::R, gamma_r * options.r_branching[k]);
  for (int k = 0; k < 3; ++k) add_decay(out, basis, grounds[k], L::P2, options.gamma_p2 * options.p2_branching[k]);
  return out;
}

std::vector<Channel> h_recycling_channels(double rate, const Basis& basis) {
  basis.scheme().index_of(Level::H);
  basis.scheme().index_of(Level::R);
  std::vector<Channel> out;
  add_decay(out, basis, Level::R, Level::H, rate);
  return out;
}

Matrix lindblad_rhs(const DensityMatrix& rho, const OperatorMatrix& h, const std::vector<Channel>& channels) {
  if (!(h.basis() == rho.basis())) throw std::invalid_argument("lindblad_rhs: basis mismatch");
  for (const auto& c : channels) {
    if (!(c.jump.basis() == rho.basis())) throw std::invalid_argument("lindblad_rhs: channel basis mismatch");
  }
  Liouvillian l(Hamiltonian(h), channels);
  Matrix out;
  l.rhs(0.0, rho.matrix(), out);
  return out;
}

// ---------------------------------------------------------------------------

Liouvillian::Liouvillian(Hamiltonian h, std::vector<Channel> channels) : h_(std::move(h)) {
  const auto d = static_cast<Eigen::Index>(h_.basis().dim());
  decay_ = SparseMatrix(d, d);
  for (auto& c : channels) {
    if (!(c.jump.basis() == h_.basis())) throw std::invalid_argument("channel basis differs from Hamiltonian basis");
    if (c.rate < 0.0) throw std::invalid_argument("channel rate must be >= 0");
    if (c.rate == 0.0 || c.jump.nnz() == 0) continue;
    const SparseMatrix& m = c.jump.matrix();
    SparseMatrix adj = m.adjoint();
    decay_ += SparseMatrix(adj * m) * Complex(0.5 * c.rate, 0.0);
    jumps_.push_back(m);
    jumps_adj_.push_back(std::move(adj));
    channels_.push_back(std::move(c));
  }
  decay_.makeCompressed();
}

void Liouvillian::rhs(double t, const Matrix& rho, Matrix& out) const {
  SparseMatrix heff = h_.matrix_at(t);
  if (!jumps_.empty()) heff -= decay_ * kI;
  const Matrix x = heff * rho;
  const Matrix y = heff * rho.adjoint();
  out.noalias() = -kI * x;
  out.noalias() += kI * y.adjoint();
  for (std::size_t k = 0; k < jumps_.size(); ++k) {
    const Matrix cr = jumps_[k] * rho;
    out.noalias() += channels_[k].rate * (cr * jumps_adj_[k]);
  }
}

Matrix Liouvillian::superoperator(double t) const {
  const auto d = static_cast<Eigen::Index>(basis().dim());
  SparseMatrix id(d, d);
  id.setIdentity();
  const SparseMatrix h = h_.matrix_at(t);
  const SparseMatrix ht = h.transpose();
  SparseMatrix g = (SparseMatrix(Eigen::kroneckerProduct(id, h)) - SparseMatrix(Eigen::kroneckerProduct(ht, id))) *
                   Complex(0.0, -1.0);
  for (std::size_t k = 0; k < jumps_.size(); ++k) {
    const SparseMatrix& c = jumps_[k];
    const SparseMatrix cconj = c.conjugate();
    g += SparseMatrix(Eigen::kroneckerProduct(cconj, c)) * Complex(channels_[k].rate, 0.0);
  }
  if (!jumps_.empty()) {
    const SparseMatrix dt = decay_.transpose();
    g -= SparseMatrix(Eigen::kroneckerProduct(id, decay_));
    g -= SparseMatrix(Eigen::kroneckerProduct(dt, id));
  }
  return Matrix(g);
}

double Liouvillian::frequency_scale(double t0, double t1) const {
  return h_.norm_bound(t0, t1) + 2.0 * inf_norm(decay_);
}

std::optional<std::vector<Matrix>> Liouvillian::local_generators() const {
  const auto h_parts = h_.local_parts();
  if (!h_parts) return std::nullopt;
  const std::size_t n = basis().n_atoms();
  const auto L = static_cast<Eigen::Index>(basis().levels_per_atom());
  std::vector<Matrix> site_h(n, Matrix::Zero(L, L));
  for (const auto& p : *h_parts) site_h[p.atom] += p.op;
  std::vector<std::vector<std::pair<Matrix, double>>> site_jumps(n);
  for (const auto& c : channels_) {
    const auto atom = c.local_atom();
    if (!atom) return std::nullopt;
    site_jumps[*atom].emplace_back(c.jump.local_parts()->front().op, c.rate);
  }
  std::vector<Matrix> out;
  for (std::size_t j = 0; j < n; ++j) out.push_back(site_generator(site_h[j], site_jumps[j]));
  return out;
}

}  // namespace rydprep
