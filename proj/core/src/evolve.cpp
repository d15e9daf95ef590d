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

#include <algorithm>
#include <cmath>
#include <functional>
#include <sstream>

#include <Eigen/Eigenvalues>
#include <unsupported/Eigen/MatrixFunctions>

#include "rydprep/lindblad.hpp"

namespace rydprep {

namespace {

using Rhs = std::function<void(double, const Matrix&, Matrix&)>;

struct OdeOptions {
  double max_step;
  double rel_tol;
  double abs_tol;
  bool hermitian;
};

void hermitize(Matrix& y) {
  Matrix s = 0.5 * (y + y.adjoint());
  y = std::move(s);
}

// Density-matrix and unitary entries are bounded by 1 in magnitude.
constexpr double kDivergence = 10.0;

[[noreturn]] void fail(const std::string& what, double t) {
  std::ostringstream msg;
  msg << what << " at t = " << t * 1e6 << " us";
  throw NumericError(msg.str(), t);
}

// Dormand-Prince 5(4) with FSAL and max-norm mixed error control.
void integrate_rk45(const Rhs& f, Matrix& y, double t0, double t1, const OdeOptions& o) {
  constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
  constexpr double a21 = 1.0 / 5;
  constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
  constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
  constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
  constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                   a65 = -5103.0 / 18656;
  constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784, b6 = 11.0 / 84;
  constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                   e6 = 22.0 / 525, e7 = -1.0 / 40;

  const double span = t1 - t0;
  if (span <= 0.0) return;
  const double min_step = 1e-13 * span;
  double t = t0;
  double h = std::min(o.max_step, span);
  Matrix k1, k2, k3, k4, k5, k6, k7, tmp, ynew;
  f(t, y, k1);
  while (t < t1) {
    bool last = false;
    if (t + h >= t1) {
      h = t1 - t;
      last = true;
    }
    tmp = y + h * a21 * k1;
    f(t + c2 * h, tmp, k2);
    tmp = y + h * (a31 * k1 + a32 * k2);
    f(t + c3 * h, tmp, k3);
    tmp = y + h * (a41 * k1 + a42 * k2 + a43 * k3);
    f(t + c4 * h, tmp, k4);
    tmp = y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4);
    f(t + c5 * h, tmp, k5);
    tmp = y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5);
    f(t + h, tmp, k6);
    ynew = y + h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
    f(t + h, ynew, k7);
    tmp = h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
    const double err =
        (tmp.cwiseAbs().array() / (o.abs_tol + o.rel_tol * y.cwiseAbs().array().max(ynew.cwiseAbs().array())))
            .maxCoeff();
    if (!std::isfinite(err)) fail("non-finite state in RK45 integration", t);
    if (err <= 1.0) {
      t = last ? t1 : t + h;
      y.swap(ynew);
      if (o.hermitian) hermitize(y);
      if (y.cwiseAbs().maxCoeff() > kDivergence) fail("RK45 integration diverged", t);
      k1.swap(k7);
      const double factor = err == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(err, -0.2), 0.2, 5.0);
      h = std::min(o.max_step, h * factor);
    } else {
      h *= std::max(0.2, 0.9 * std::pow(err, -0.2));
      if (h < min_step) fail("RK45 step size underflow", t);
    }
  }
}

void integrate_rk4(const Rhs& f, Matrix& y, double t0, double t1, std::size_t steps, bool hermitian) {
  const double h = (t1 - t0) / static_cast<double>(steps);
  Matrix k1, k2, k3, k4, tmp;
  for (std::size_t s = 0; s < steps; ++s) {
    const double t = t0 + h * static_cast<double>(s);
    f(t, y, k1);
    tmp = y + 0.5 * h * k1;
    f(t + 0.5 * h, tmp, k2);
    tmp = y + 0.5 * h * k2;
    f(t + 0.5 * h, tmp, k3);
    tmp = y + h * k3;
    f(t + h, tmp, k4);
    y += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    if (hermitian) hermitize(y);
    if (!y.allFinite()) fail("non-finite state in RK4 integration", t + h);
    if (y.cwiseAbs().maxCoeff() > kDivergence) fail("RK4 integration diverged", t + h);
  }
}

Matrix exp_hermitian(const Matrix& h, double t) {
  Eigen::SelfAdjointEigenSolver<Matrix> solver(h);
  if (solver.info() != Eigen::Success) throw NumericError("Hermitian eigendecomposition failed");
  const Vector phases = (solver.eigenvalues().cast<Complex>() * Complex(0.0, -t)).array().exp();
  return solver.eigenvectors() * phases.asDiagonal() * solver.eigenvectors().adjoint();
}

double auto_max_step(double omega_max, double duration) {
  if (!(omega_max > 0.0)) return duration;
  return std::min(duration, kTwoPi / omega_max / 50.0);
}

std::size_t slice_count(double duration, double slice) {
  return std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(duration / slice - 1e-9)));
}

void apply_local_map(Matrix& rho, const Basis& basis, std::size_t atom, const Matrix& s) {
  const std::size_t L = basis.levels_per_atom();
  const std::size_t stride = basis.stride(atom);
  const std::size_t d = basis.dim();
  Vector block(static_cast<Eigen::Index>(L * L));
  Vector out(static_cast<Eigen::Index>(L * L));
  for (std::size_t rb = 0; rb < d; ++rb) {
    if ((rb / stride) % L != 0) continue;
    for (std::size_t cb = 0; cb < d; ++cb) {
      if ((cb / stride) % L != 0) continue;
      for (std::size_t b = 0; b < L; ++b) {
        for (std::size_t a = 0; a < L; ++a) {
          block(static_cast<Eigen::Index>(a + L * b)) =
              rho(static_cast<Eigen::Index>(rb + a * stride), static_cast<Eigen::Index>(cb + b * stride));
        }
      }
      out.noalias() = s * block;
      for (std::size_t b = 0; b < L; ++b) {
        for (std::size_t a = 0; a < L; ++a) {
          rho(static_cast<Eigen::Index>(rb + a * stride), static_cast<Eigen::Index>(cb + b * stride)) =
              out(static_cast<Eigen::Index>(a + L * b));
        }
      }
    }
  }
}

void integrate_density(const Liouvillian& l, Matrix& rho, double duration, const IntegratorConfig& cfg) {
  const Rhs f = [&l](double t, const Matrix& y, Matrix& dy) { l.rhs(t, y, dy); };
  const double max_step =
      cfg.max_step > 0.0 ? std::min(cfg.max_step, duration) : auto_max_step(l.frequency_scale(0.0, duration), duration);
  if (cfg.method == IntegratorMethod::Rk4Fixed) {
    integrate_rk4(f, rho, 0.0, duration, slice_count(duration, max_step), true);
  } else {
    integrate_rk45(f, rho, 0.0, duration, {max_step, cfg.rel_tol, cfg.abs_tol, true});
  }
}

}  // namespace

std::string_view integrator_name(IntegratorMethod m) {
  switch (m) {
    case IntegratorMethod::Rk4Fixed:
      return "RK4_FIXED";
    case IntegratorMethod::Rk45Adaptive:
      return "RK45_ADAPTIVE";
    case IntegratorMethod::MagnusMidpoint:
      return "MAGNUS_MIDPOINT";
  }
  return "?";
}

IntegratorMethod parse_integrator(std::string_view name) {
  for (auto m : {IntegratorMethod::Rk4Fixed, IntegratorMethod::Rk45Adaptive, IntegratorMethod::MagnusMidpoint}) {
    if (integrator_name(m) == name) return m;
  }
  throw std::invalid_argument("unknown integrator method '" + std::string(name) + "'");
}

void IntegratorConfig::validate() const {
  if (!(rel_tol > 0.0) || !(abs_tol > 0.0)) throw std::invalid_argument("integrator tolerances must be positive");
  if (max_step < 0.0) throw std::invalid_argument("max_step must be >= 0");
  if (!(slice > 0.0)) throw std::invalid_argument("slice must be positive");
}

std::string_view propagator_kind_name(Propagator::Kind kind) {
  switch (kind) {
    case Propagator::Kind::Identity:
      return "identity";
    case Propagator::Kind::Unitary:
      return "unitary";
    case Propagator::Kind::Superoperator:
      return "superoperator";
    case Propagator::Kind::LocalProduct:
      return "local_product";
    case Propagator::Kind::Integrated:
      return "integrated";
  }
  return "?";
}

const Matrix& Propagator::unitary() const {
  if (kind_ != Kind::Unitary) throw std::logic_error("propagator is not unitary");
  return map_;
}

Propagator Propagator::identity(double duration) {
  Propagator p;
  p.duration_ = duration;
  return p;
}

Propagator Propagator::from_unitary(Matrix u, double duration) {
  Propagator p;
  p.kind_ = Kind::Unitary;
  p.duration_ = duration;
  p.map_ = std::move(u);
  return p;
}

void Propagator::apply(DensityMatrix& rho) const {
  Matrix& m = rho.matrix();
  switch (kind_) {
    case Kind::Identity:
      return;
    case Kind::Unitary: {
      Matrix tmp = map_ * m;
      m.noalias() = tmp * map_.adjoint();
      break;
    }
    case Kind::Superoperator: {
      const Eigen::Index d = m.rows();
      Vector v = map_ * Eigen::Map<const Vector>(m.data(), d * d);
      m = Eigen::Map<const Matrix>(v.data(), d, d);
      break;
    }
    case Kind::LocalProduct:
      for (std::size_t j = 0; j < local_maps_.size(); ++j) apply_local_map(m, rho.basis(), j, local_maps_[j]);
      break;
    case Kind::Integrated:
      integrate_density(*liouvillian_, m, duration_, cfg_);
      break;
  }
  rho.symmetrize();
}

Matrix unitary_propagator(const Hamiltonian& h, double duration, const IntegratorConfig& cfg) {
  cfg.validate();
  const auto d = static_cast<Eigen::Index>(h.basis().dim());
  if (duration == 0.0) return Matrix::Identity(d, d);
  if (h.is_constant()) return exp_hermitian(Matrix(h.matrix_at(0.0)), duration);
  if (cfg.method == IntegratorMethod::MagnusMidpoint) {
    const double slice = cfg.max_step > 0.0 ? cfg.max_step : cfg.slice;
    const std::size_t n = slice_count(duration, slice);
    const double dt = duration / static_cast<double>(n);
    Matrix u = Matrix::Identity(d, d);
    for (std::size_t k = 0; k < n; ++k) {
      const double tm = (static_cast<double>(k) + 0.5) * dt;
      u = exp_hermitian(Matrix(h.matrix_at(tm)), dt) * u;
    }
    return u;
  }
  const Rhs f = [&h](double t, const Matrix& y, Matrix& dy) { dy.noalias() = Complex(0.0, -1.0) * (h.matrix_at(t) * y); };
  Matrix u = Matrix::Identity(d, d);
  const double max_step =
      cfg.max_step > 0.0 ? std::min(cfg.max_step, duration) : auto_max_step(h.norm_bound(0.0, duration), duration);
  if (cfg.method == IntegratorMethod::Rk4Fixed) {
    integrate_rk4(f, u, 0.0, duration, slice_count(duration, max_step), false);
  } else {
    integrate_rk45(f, u, 0.0, duration, {max_step, cfg.rel_tol, cfg.abs_tol, false});
  }
  return u;
}

Propagator make_propagator(const Hamiltonian& h, const std::vector<Channel>& channels, double duration,
                           const IntegratorConfig& cfg) {
  cfg.validate();
  if (duration < 0.0) throw std::invalid_argument("duration must be >= 0");
  if (duration == 0.0) return Propagator::identity(0.0);
  auto l = std::make_shared<const Liouvillian>(h, channels);
  if (!l->has_dissipation()) {
    if (h.is_zero()) return Propagator::identity(duration);
    // Time-dependent segments are integrated once as U(t) and then reused.
    if (cfg.exact_propagators || cfg.method == IntegratorMethod::MagnusMidpoint) {
      return Propagator::from_unitary(unitary_propagator(h, duration, cfg), duration);
    }
  } else if (cfg.exact_propagators && h.is_constant()) {
    if (auto gens = l->local_generators()) {
      Propagator p;
      p.kind_ = Propagator::Kind::LocalProduct;
      p.duration_ = duration;
      for (const auto& g : *gens) p.local_maps_.push_back((g * Complex(duration, 0.0)).exp());
      return p;
    }
    if (h.basis().dim() <= cfg.max_superoperator_dim) {
      Propagator p;
      p.kind_ = Propagator::Kind::Superoperator;
      p.duration_ = duration;
      p.map_ = (l->superoperator() * Complex(duration, 0.0)).exp();
      if (!p.map_.allFinite()) throw NumericError("superoperator exponential is not finite");
      return p;
    }
  }
  Propagator p;
  p.kind_ = Propagator::Kind::Integrated;
  p.duration_ = duration;
  p.liouvillian_ = std::move(l);
  p.cfg_ = cfg;
  return p;
}

DensityMatrix evolve(const DensityMatrix& rho0, const Hamiltonian& h, const std::vector<Channel>& channels,
                     double duration, const IntegratorConfig& cfg) {
  if (!(rho0.basis() == h.basis())) throw std::invalid_argument("evolve: basis mismatch");
  DensityMatrix rho = rho0;
  make_propagator(h, channels, duration, cfg).apply(rho);
  return rho;
}

}  // namespace rydprep
