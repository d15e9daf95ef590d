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

#include <complex>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>
#include <Eigen/Sparse>

namespace rydprep {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using SparseMatrix = Eigen::SparseMatrix<Complex, Eigen::RowMajor>;
using Triplet = Eigen::Triplet<Complex>;

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;
inline constexpr Complex kI{0.0, 1.0};

// Physical constants (SI, CODATA 2018 exact values where defined).
inline constexpr double kBoltzmann = 1.380649e-23;
inline constexpr double kAtomicMassUnit = 1.66053906660e-27;
inline constexpr double kSpeedOfLight = 299792458.0;
inline constexpr double kRb87MassAmu = 86.909180527;

// Unit helpers. Frequencies follow the "2pi x MHz" convention: mhz(2) is 2pi*2e6 rad/s.
namespace units {
constexpr double mhz(double v) { return kTwoPi * v * 1e6; }
constexpr double khz(double v) { return kTwoPi * v * 1e3; }
constexpr double thz(double v) { return kTwoPi * v * 1e12; }
constexpr double us(double v) { return v * 1e-6; }
constexpr double um(double v) { return v * 1e-6; }
constexpr double uk(double v) { return v * 1e-6; }
constexpr double to_mhz(double w) { return w / (kTwoPi * 1e6); }
constexpr double to_us(double s) { return s * 1e6; }
}  // namespace units

// Base for errors raised by the library. Precondition violations on plain
// arguments use std::invalid_argument instead.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed or inconsistent configuration (CLI exit code 2).
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Integration or propagation failure (CLI exit code 3).
class NumericError : public Error {
 public:
  NumericError(const std::string& what, double time_reached = 0.0,
               std::optional<std::size_t> segment = std::nullopt)
      : Error(what), time_reached_(time_reached), segment_(segment) {}

  double time_reached() const noexcept { return time_reached_; }
  std::optional<std::size_t> segment() const noexcept { return segment_; }

 private:
  double time_reached_;
  std::optional<std::size_t> segment_;
};

}  // namespace rydprep
