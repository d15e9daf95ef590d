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


// Independent reference constructions shared by the unit tests. Nothing here
// calls the library's propagators; the dense Kronecker products and the
// fixed-step integrator are written out directly.

#pragma once

#include <algorithm>
#include <functional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "rydprep/hilbert.hpp"

namespace rydprep::testing {

using Mat = Eigen::MatrixXcd;

inline Mat kron(const Mat& a, const Mat& b) {
  Mat out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

struct Jump {
  Mat c;
  double rate;
};

// Column-major vectorized Lindbladian: vec(A X B) = (B^T kron A) vec(X).
inline Mat vectorized_lindbladian(const Mat& h, const std::vector<Jump>& jumps) {
  const Eigen::Index d = h.rows();
  const Mat id = Mat::Identity(d, d);
  const std::complex<double> i(0.0, 1.0);
  Mat l = -i * (kron(id, h) - kron(h.transpose(), id));
  for (const auto& j : jumps) {
    const Mat cdc = j.c.adjoint() * j.c;
    l += j.rate * (kron(j.c.conjugate(), j.c) - 0.5 * kron(id, cdc) - 0.5 * kron(cdc.transpose(), id));
  }
  return l;
}

inline Eigen::VectorXcd vec(const Mat& m) { return Eigen::Map<const Eigen::VectorXcd>(m.data(), m.size()); }

inline Mat unvec(const Eigen::VectorXcd& v, Eigen::Index d) { return Eigen::Map<const Mat>(v.data(), d, d); }

// Classic fixed-step RK4 on a matrix ODE.
inline Mat rk4(const std::function<Mat(double, const Mat&)>& f, Mat y, double t0, double t1, int steps) {
  const double h = (t1 - t0) / steps;
  double t = t0;
  for (int s = 0; s < steps; ++s) {
    const Mat k1 = f(t, y);
    const Mat k2 = f(t + h / 2, y + h / 2 * k1);
    const Mat k3 = f(t + h / 2, y + h / 2 * k2);
    const Mat k4 = f(t + h, y + h * k3);
    y += h / 6 * (k1 + 2 * k2 + 2 * k3 + k4);
    t += h;
  }
  return y;
}

// exp(-i H t) for Hermitian H by eigendecomposition.
inline Mat unitary(const Mat& h, double t) {
  Eigen::SelfAdjointEigenSolver<Mat> es(h);
  const std::complex<double> i(0.0, 1.0);
  Eigen::VectorXcd phases = (-i * t * es.eigenvalues().cast<std::complex<double>>()).array().exp();
  return es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();
}

// Dense master-equation right-hand side written from the definition.
inline Mat master_rhs(const Mat& h, const std::vector<Jump>& jumps, const Mat& rho) {
  const std::complex<double> i(0.0, 1.0);
  Mat out = -i * (h * rho - rho * h);
  for (const auto& j : jumps) {
    const Mat cdc = j.c.adjoint() * j.c;
    out += j.rate * (j.c * rho * j.c.adjoint() - 0.5 * (cdc * rho + rho * cdc));
  }
  return out;
}

// Ideal blockade: decouples every state with two or more atoms in r.
inline Mat blockaded(Mat h, const Basis& b) {
  for (std::size_t i = 0; i < b.dim(); ++i) {
    const std::string label = b.label(i);
    if (std::count(label.begin(), label.end(), 'r') > 1) {
      h.row(static_cast<Eigen::Index>(i)).setZero();
      h.col(static_cast<Eigen::Index>(i)).setZero();
    }
  }
  return h;
}

}  // namespace rydprep::testing
