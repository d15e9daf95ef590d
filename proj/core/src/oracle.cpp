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

#include "rydprep/oracle.hpp"

#include <cmath>
#include <sstream>

#include "rydprep/log.hpp"

namespace rydprep {

namespace {

Vector combine(const Basis& basis, std::initializer_list<std::pair<const char*, double>> terms) {
  Vector v = Vector::Zero(static_cast<Eigen::Index>(basis.dim()));
  for (const auto& [pattern, w] : terms) {
    v(static_cast<Eigen::Index>(basis.encode(parse_pattern(pattern, basis.n_atoms())))) += w;
  }
  return v;
}

void require_atoms(const Basis& basis, std::size_t n, const char* what) {
  if (basis.n_atoms() != n) {
    throw std::invalid_argument(std::string(what) + " needs " + std::to_string(n) + " atoms, basis has " +
                                std::to_string(basis.n_atoms()));
  }
}

}  // namespace

Complex survival_amplitude(int m, double omega_a, double delta, double t) {
  if (m < 0) throw std::invalid_argument("m must be >= 0");
  if (m == 0) return 1.0;
  const double w = std::sqrt(delta * delta + 2.0 * m * omega_a * omega_a);
  const Complex pp = 0.5 * kI * (-delta + w);
  const Complex pm = 0.5 * kI * (-delta - w);
  return (pp * std::exp(pp * t) - pm * std::exp(pm * t)) / (kI * w);
}

Complex static_frame_survival_amplitude(int m, double omega_a, double delta, double t) {
  if (m == 0) return 1.0;
  return std::exp(kI * delta * t) * survival_amplitude(m, omega_a, delta, t);
}

TargetState x_state(int m, std::size_t n, const Basis& basis) {
  if (m < 0 || static_cast<std::size_t>(m) > n) throw std::invalid_argument("x_state requires 0 <= m <= n");
  require_atoms(basis, n, "x_state");
  const std::size_t g = basis.scheme().index_of(Level::G);
  const std::size_t e = basis.scheme().index_of(Level::E);
  Vector v = Vector::Zero(static_cast<Eigen::Index>(basis.dim()));
  const double amp = std::pow(M_SQRT1_2, static_cast<double>(n));
  // Each subset of m atoms carrying |+>.
  for (unsigned mask = 0; mask < (1u << n); ++mask) {
    if (static_cast<int>(__builtin_popcount(mask)) != m) continue;
    // Expand the product over all {g, e}^n configurations.
    for (unsigned conf = 0; conf < (1u << n); ++conf) {
      std::vector<std::size_t> idx(n);
      double sign = 1.0;
      for (std::size_t j = 0; j < n; ++j) {
        const bool is_e = (conf >> j) & 1u;
        const bool is_plus = (mask >> j) & 1u;
        idx[j] = is_e ? e : g;
        if (is_e && !is_plus) sign = -sign;
      }
      v(static_cast<Eigen::Index>(basis.encode_indices(idx))) += sign * amp;
    }
  }
  std::ostringstream label;
  label << "x" << m;
  return {TargetKind::XState, label.str(), StateVector(basis, v).normalized()};
}

TargetState ghz_state(const Basis& basis) {
  const std::size_t n = basis.n_atoms();
  std::vector<Level> all_g(n, Level::G), all_e(n, Level::E);
  Vector v = Vector::Zero(static_cast<Eigen::Index>(basis.dim()));
  v(static_cast<Eigen::Index>(basis.encode(all_g))) = M_SQRT1_2;
  v(static_cast<Eigen::Index>(basis.encode(all_e))) = (n % 2 == 0 ? 1.0 : -1.0) * M_SQRT1_2;
  return {TargetKind::Ghz, "ghz", StateVector(basis, v)};
}

TargetState target_state(TargetKind kind, const Basis& basis, int m) {
  const double s2 = M_SQRT1_2;
  const double s3 = 1.0 / std::sqrt(3.0);
  switch (kind) {
    case TargetKind::BellPhiPlus:
      require_atoms(basis, 2, "phi_plus");
      return {kind, "phi_plus", StateVector(basis, combine(basis, {{"gg", s2}, {"ee", s2}}))};
    case TargetKind::BellPhiMinus:
      require_atoms(basis, 2, "phi_minus");
      return {kind, "phi_minus", StateVector(basis, combine(basis, {{"gg", s2}, {"ee", -s2}}))};
    case TargetKind::BellPsiPlus:
      require_atoms(basis, 2, "psi_plus");
      return {kind, "psi_plus", StateVector(basis, combine(basis, {{"eg", s2}, {"ge", s2}}))};
    case TargetKind::BellPsiMinus:
      require_atoms(basis, 2, "psi_minus");
      return {kind, "psi_minus", StateVector(basis, combine(basis, {{"eg", s2}, {"ge", -s2}}))};
    case TargetKind::T1:
      require_atoms(basis, 2, "T1");
      return {kind, "T1", StateVector(basis, combine(basis, {{"ee", s3}, {"gg", -s3}, {"hh", s3}}))};
    case TargetKind::T2:
      require_atoms(basis, 2, "T2");
      return {kind, "T2", StateVector(basis, combine(basis, {{"eh", s3}, {"gg", -s3}, {"he", s3}}))};
    case TargetKind::T3:
      require_atoms(basis, 2, "T3");
      return {kind, "T3",
              StateVector(basis, combine(basis, {{"eg", 0.5}, {"ge", -0.5}, {"gh", -0.5}, {"hg", 0.5}}))};
    case TargetKind::Ghz:
      return ghz_state(basis);
    case TargetKind::XState:
      return x_state(m, basis.n_atoms(), basis);
  }
  throw std::invalid_argument("unknown target kind");
}

TargetState target_by_label(const std::string& label, const Basis& basis) {
  if (label == "phi_plus") return target_state(TargetKind::BellPhiPlus, basis);
  if (label == "phi_minus") return target_state(TargetKind::BellPhiMinus, basis);
  if (label == "psi_plus") return target_state(TargetKind::BellPsiPlus, basis);
  if (label == "psi_minus") return target_state(TargetKind::BellPsiMinus, basis);
  if (label == "T1") return target_state(TargetKind::T1, basis);
  if (label == "T2") return target_state(TargetKind::T2, basis);
  if (label == "T3") return target_state(TargetKind::T3, basis);
  if (label == "ghz") return ghz_state(basis);
  if (label.size() > 1 && label[0] == 'x') {
    std::size_t pos = 0;
    const int m = std::stoi(label.substr(1), &pos);
    if (pos + 1 == label.size()) return x_state(m, basis.n_atoms(), basis);
  }
  throw std::invalid_argument("unknown observable '" + label + "'");
}

double population(const DensityMatrix& rho, const TargetState& target) { return rho.overlap(target.state); }

DensityMatrix initial_state(const InitialStateSpec& spec, const Basis& basis) {
  const std::size_t n = basis.n_atoms();
  const auto d = static_cast<Eigen::Index>(basis.dim());
  Matrix rho = Matrix::Zero(d, d);
  auto uniform_over = [&](std::vector<Level> levels) {
    for (Level l : levels) basis.scheme().index_of(l);
    std::size_t count = 1;
    for (std::size_t j = 0; j < n; ++j) count *= levels.size();
    for (std::size_t k = 0; k < count; ++k) {
      std::vector<Level> conf(n);
      std::size_t rest = k;
      for (std::size_t j = n; j-- > 0;) {
        conf[j] = levels[rest % levels.size()];
        rest /= levels.size();
      }
      const auto i = static_cast<Eigen::Index>(basis.encode(conf));
      rho(i, i) += 1.0 / static_cast<double>(count);
    }
  };
  switch (spec.kind) {
    case InitialKind::FullyMixedGE:
      uniform_over({Level::G, Level::E});
      break;
    case InitialKind::FullyMixedGEH:
      uniform_over({Level::G, Level::E, Level::H});
      break;
    case InitialKind::MixList: {
      if (spec.mix.empty()) throw std::invalid_argument("MIX_LIST initial state needs at least one entry");
      double total = 0.0;
      for (const auto& entry : spec.mix) {
        if (!(entry.weight >= 0.0)) throw std::invalid_argument("mixture weights must be >= 0");
        const auto i = static_cast<Eigen::Index>(basis.encode(entry.levels));
        rho(i, i) += entry.weight;
        total += entry.weight;
      }
      if (!(total > 0.0)) throw std::invalid_argument("mixture weights sum to zero");
      if (std::abs(total - 1.0) > 1e-12) {
        std::ostringstream msg;
        msg << "initial-state weights sum to " << total << "; renormalizing";
        warn(msg.str());
        rho /= total;
      }
      break;
    }
  }
  return DensityMatrix(basis, std::move(rho));
}

double dark_state_residual(const OperatorMatrix& h, const TargetState& state) {
  if (!(h.basis() == state.state.basis())) throw std::invalid_argument("dark_state_residual: basis mismatch");
  return h.apply(state.state.amplitudes()).norm();
}

}  // namespace rydprep
