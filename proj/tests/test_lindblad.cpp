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


#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include <unsupported/Eigen/MatrixFunctions>

#include "rydprep/hamiltonians.hpp"
#include "rydprep/lindblad.hpp"
#include "support.hpp"

namespace rydprep {
namespace {

using L = Level;

// Sum over channels of rate <i|c^dag c|i>: the total decay rate out of basis state i.
double outflow(const std::vector<Channel>& channels, std::size_t i) {
  double total = 0.0;
  for (const auto& c : channels) {
    const Matrix cdc = c.jump.dense().adjoint() * c.jump.dense();
    total += c.rate * cdc(i, i).real();
  }
  return total;
}

double outflow_to(const std::vector<Channel>& channels, std::size_t from, std::size_t to) {
  double total = 0.0;
  for (const auto& c : channels) total += c.rate * std::norm(c.jump.dense()(to, from));
  return total;
}

Matrix random_density(std::size_t d, std::mt19937& rng) {
  std::normal_distribution<double> nd;
  Matrix a(d, d);
  for (Eigen::Index i = 0; i < a.size(); ++i) a(i) = Complex(nd(rng), nd(rng));
  Matrix rho = a * a.adjoint();
  return rho / rho.trace();
}

std::vector<testing::Jump> dense_jumps(const std::vector<Channel>& channels) {
  std::vector<testing::Jump> out;
  for (const auto& c : channels) out.push_back({c.jump.dense(), c.rate});
  return out;
}

IntegratorConfig tight_rk45() {
  IntegratorConfig cfg;
  cfg.exact_propagators = false;
  cfg.rel_tol = 1e-11;
  cfg.abs_tol = 1e-13;
  return cfg;
}

TEST(EngineeredDecay, EffectiveRate) {
  const Basis b = build_basis(1, SchemeKind::ReducedGEHR);
  const auto ch = engineered_decay_channels(units::mhz(1.2), units::mhz(6.0), b, true);
  EXPECT_NEAR(units::to_mhz(outflow(ch, b.scheme().index_of(L::R))), 0.24, 1e-12);
}

TEST(EngineeredDecay, ChannelCount) {
  for (std::size_t n = 1; n <= 4; ++n) {
    const Basis b = build_basis(n, SchemeKind::ReducedGER);
    EXPECT_EQ(engineered_decay_channels(units::mhz(1.2), units::mhz(6.0), b, false).size(), 2 * n);
  }
  const Basis b = build_basis(2, SchemeKind::ReducedGER);
  EXPECT_THROW(engineered_decay_channels(units::mhz(1.2), units::mhz(6.0), b, true), std::invalid_argument);
}

TEST(EngineeredDecay, BranchingRatio) {
  const Basis b = build_basis(1, SchemeKind::ReducedGEHR);
  const auto ch = engineered_decay_channels(units::mhz(1.2), units::mhz(6.0), b, true);
  const auto r = b.scheme().index_of(L::R);
  const double g = outflow_to(ch, r, b.scheme().index_of(L::G));
  EXPECT_NEAR(outflow_to(ch, r, b.scheme().index_of(L::E)) / g, 3.0, 1e-12);
  EXPECT_NEAR(outflow_to(ch, r, b.scheme().index_of(L::H)) / g, 2.0, 1e-12);
}

TEST(Dephasing, ZeroRatesLeaveStateAlone) {
  const Basis b = build_basis(2, SchemeKind::FullSix);
  std::mt19937 rng(3);
  const DensityMatrix rho(b, random_density(b.dim(), rng));
  const Matrix d = lindblad_rhs(rho, OperatorMatrix::zero(b), dephasing_channels(0.0, 0.0, 0.0, b));
  EXPECT_EQ(d.cwiseAbs().maxCoeff(), 0.0);
}

TEST(Dephasing, CollectiveHermitianJumps) {
  const Basis b = build_basis(2, SchemeKind::FullSix);
  const double gp = units::khz(2.0);
  const auto ch = dephasing_channels(units::khz(3.0), units::khz(3.0), gp, b);
  ASSERT_EQ(ch.size(), 3u);
  for (const auto& c : ch) {
    EXPECT_TRUE(c.jump.is_hermitian());
    EXPECT_FALSE(c.local_atom().has_value());
  }
  // L_p = sqrt(gp/2) sum_j (|r><r| - |p2><p2|)_j.
  const double a = std::sqrt(gp / 2.0);
  const Matrix lp = ch[2].jump.dense();
  EXPECT_NEAR(lp(b.encode({L::R, L::R}), b.encode({L::R, L::R})).real(), 2 * a, 1e-12 * a);
  EXPECT_NEAR(lp(b.encode({L::R, L::P2}), b.encode({L::R, L::P2})).real(), 0.0, 1e-12 * a);
  EXPECT_NEAR(lp(b.encode({L::G, L::P2}), b.encode({L::G, L::P2})).real(), -a, 1e-12 * a);
  EXPECT_THROW(dephasing_channels(1.0, 1.0, 1.0, build_basis(2, SchemeKind::ReducedGER)), std::invalid_argument);
}

TEST(Dephasing, PopulationsAreFixed) {
  const Basis b = build_basis(2, SchemeKind::FullSix);
  std::mt19937 rng(11);
  const DensityMatrix rho0(b, random_density(b.dim(), rng));
  const auto ch = dephasing_channels(units::khz(9.0), units::khz(5.0), units::khz(2.0), b);
  const DensityMatrix rho = evolve(rho0, Hamiltonian(b), ch, units::us(40.0));
  EXPECT_LT((rho.matrix().diagonal() - rho0.matrix().diagonal()).cwiseAbs().maxCoeff(), 1e-12);
  // Coherences between dephased levels shrink.
  const auto gg = b.encode({L::G, L::G});
  const auto p2p2 = b.encode({L::P2, L::P2});
  EXPECT_LT(std::abs(rho.matrix()(gg, p2p2)), std::abs(rho0.matrix()(gg, p2p2)));
}

TEST(NaturalDecay, IntermediateLifetime) {
  const double gamma_p1 = 1.0 / 2.62e-8;
  EXPECT_NEAR(units::to_mhz(gamma_p1), 6.07, 0.01);
  const Basis b = build_basis(1, SchemeKind::FullSix);
  const auto ch = natural_decay_channels(gamma_p1, 0.0, b);
  EXPECT_NEAR(outflow(ch, b.scheme().index_of(L::P1)), gamma_p1, 1e-9 * gamma_p1);
  EXPECT_EQ(outflow(ch, b.scheme().index_of(L::R)), 0.0);
  EXPECT_EQ(ch.size(), 3u);
}

TEST(NaturalDecay, RydbergAndIntermediateBranches) {
  const Basis b = build_basis(1, SchemeKind::FullSix);
  NaturalDecayOptions opt;
  opt.gamma_p2 = units::mhz(1.4);
  const double gr = 1.0 / 343e-6;
  const auto ch = natural_decay_channels(units::mhz(6.0), gr, b, opt);
  EXPECT_NEAR(outflow(ch, b.scheme().index_of(L::R)), gr, 1e-9 * gr);
  EXPECT_NEAR(outflow(ch, b.scheme().index_of(L::P2)), opt.gamma_p2, 1e-9 * opt.gamma_p2);
}

TEST(Rhs, ZeroGenerator) {
  const Basis b = build_basis(2, SchemeKind::ReducedGER);
  std::mt19937 rng(1);
  const DensityMatrix rho(b, random_density(b.dim(), rng));
  EXPECT_EQ(lindblad_rhs(rho, OperatorMatrix::zero(b), {}).cwiseAbs().maxCoeff(), 0.0);
}

TEST(Rhs, TraceFreeForRandomStates) {
  const Basis b = build_basis(2, SchemeKind::ReducedGEHR);
  const OperatorMatrix h = drive_hamiltonian(DriveSpec::for_source(DriveSource::Plus, units::mhz(2.0)), b, 0.0) +
                           microwave_hamiltonian(units::khz(20.0), b);
  const auto ch = engineered_decay_channels(units::mhz(1.2), units::mhz(6.0), b, true);
  std::mt19937 rng(20);
  for (int trial = 0; trial < 20; ++trial) {
    const DensityMatrix rho(b, random_density(b.dim(), rng));
    const Matrix d = lindblad_rhs(rho, h, ch);
    EXPECT_LT(std::abs(d.trace()), 1e-9 * d.cwiseAbs().maxCoeff());
    EXPECT_LT((d - d.adjoint()).cwiseAbs().maxCoeff(), 1e-9 * d.cwiseAbs().maxCoeff());
  }
}

TEST(Rhs, MatchesDefinition) {
  const Basis b = build_basis(2, SchemeKind::ReducedGER);
  const OperatorMatrix h = drive_hamiltonian(DriveSpec::for_source(DriveSource::G, units::mhz(2.0)), b, 0.0);
  const auto ch = engineered_decay_channels(units::mhz(1.2), units::mhz(6.0), b, false);
  std::mt19937 rng(5);
  const DensityMatrix rho(b, random_density(b.dim(), rng));
  const Matrix expect = testing::master_rhs(h.dense(), dense_jumps(ch), rho.matrix());
  EXPECT_LT((lindblad_rhs(rho, h, ch) - expect).cwiseAbs().maxCoeff(), 1e-9 * expect.cwiseAbs().maxCoeff());
}

TEST(Evolve, SingleAtomDecayNormalization) {
  // One channel |g><r| with rate gamma: d rho_rr / dt = -gamma rho_rr.
  const Basis b = build_basis(1, SchemeKind::ReducedGER);
  const double gamma = units::mhz(0.24);
  const std::vector<Channel> ch{{embed(transition(L::G, L::R), 0, b), gamma, "decay"}};
  const DensityMatrix rho0 = DensityMatrix::from_pure(product_state(b, "r"));
  for (double t_us : {0.5, 2.0, 6.0}) {
    const double t = units::us(t_us);
    for (bool exact : {true, false}) {
      IntegratorConfig cfg = tight_rk45();
      cfg.exact_propagators = exact;
      const DensityMatrix rho = evolve(rho0, Hamiltonian(b), ch, t, cfg);
      EXPECT_NEAR(rho.matrix()(2, 2).real(), std::exp(-gamma * t), 1e-10);
      EXPECT_NEAR(rho.matrix()(0, 0).real(), 1.0 - std::exp(-gamma * t), 1e-10);
    }
  }
}

TEST(Evolve, ZeroDurationIsIdentity) {
  const Basis b = build_basis(2, SchemeKind::ReducedGER);
  std::mt19937 rng(9);
  const DensityMatrix rho0(b, random_density(b.dim(), rng));
  const OperatorMatrix h = drive_hamiltonian(DriveSpec::for_source(DriveSource::G, units::mhz(2.0)), b, 0.0);
  const DensityMatrix rho = evolve(rho0, h, engineered_decay_channels(1e6, 4e7, b, false), 0.0);
  EXPECT_LT((rho.matrix() - rho0.matrix()).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(Evolve, FullRabiCycleFlipsSign) {
  const Basis b = build_basis(1, SchemeKind::ReducedGER);
  const double omega = units::mhz(2.0);
  Vector psi = Vector::Zero(3);
  psi(0) = psi(1) = M_SQRT1_2;
  const DensityMatrix rho0 = DensityMatrix::from_pure(StateVector(b, psi));
  const DensityMatrix rho =
      evolve(rho0, drive_generator(DriveSpec::for_source(DriveSource::G, omega), b), {}, kTwoPi / omega, tight_rk45());
  EXPECT_NEAR(rho.matrix()(0, 0).real(), 0.5, 1e-9);
  EXPECT_NEAR(rho.matrix()(2, 2).real(), 0.0, 1e-9);
  EXPECT_NEAR(rho.matrix()(0, 1).real(), -0.5, 1e-9);
}

TEST(Evolve, DampedRabiMatchesFixedStepReference) {
  const Basis b = build_basis(1, SchemeKind::ReducedGER);
  const OperatorMatrix h = drive_hamiltonian(DriveSpec::for_source(DriveSource::G, units::mhz(2.0)), b, 0.0);
  const auto ch = engineered_decay_channels(units::mhz(1.2), units::mhz(6.0), b, false);
  const DensityMatrix rho0 = DensityMatrix::from_pure(product_state(b, "g"));
  const double t = units::us(3.0);
  const Matrix hd = h.dense();
  const auto jumps = dense_jumps(ch);
  const Matrix expect = testing::rk4([&](double, const Matrix& r) { return testing::master_rhs(hd, jumps, r); },
                                     rho0.matrix(), 0.0, t, 20000);
  for (bool exact : {true, false}) {
    IntegratorConfig cfg;
    cfg.exact_propagators = exact;
    const DensityMatrix rho = evolve(rho0, h, ch, t, cfg);
    EXPECT_LT((rho.matrix() - expect).cwiseAbs().maxCoeff(), 1e-4);
  }
}

TEST(Evolve, SuperoperatorOracle) {
  // Two atoms, drive + interaction + engineered decay at once, dim 9.
  const Basis b = build_basis(2, SchemeKind::ReducedGER);
  const OperatorMatrix h = drive_hamiltonian(DriveSpec::for_source(DriveSource::Plus, units::mhz(2.0)), b, 0.0) +
                           rydberg_interaction(InteractionSpec::uniform(2, units::mhz(40.0)), b);
  const auto ch = engineered_decay_channels(units::mhz(1.2), units::mhz(6.0), b, false);
  const Matrix lv = testing::vectorized_lindbladian(h.dense(), dense_jumps(ch));
  std::mt19937 rng(2026);
  const DensityMatrix rho0(b, random_density(b.dim(), rng));
  for (double t_us : {0.1, 0.5, 1.3}) {
    const double t = units::us(t_us);
    const Matrix expect = testing::unvec(Matrix(lv * t).exp() * testing::vec(rho0.matrix()), 9);
    const DensityMatrix integrated = evolve(rho0, h, ch, t, tight_rk45());
    EXPECT_LT((integrated.matrix() - expect).cwiseAbs().maxCoeff(), 1e-8) << "t = " << t_us << " us";
    const DensityMatrix exact = evolve(rho0, h, ch, t);
    EXPECT_LT((exact.matrix() - expect).cwiseAbs().maxCoeff(), 1e-8) << "t = " << t_us << " us";
  }
}

TEST(Liouvillian, SuperoperatorMatchesKroneckerConstruction) {
  const Basis b = build_basis(2, SchemeKind::ReducedGEHR);
  const OperatorMatrix h = drive_hamiltonian(DriveSpec::for_source(DriveSource::E, units::mhz(2.0)), b, 0.0) +
                           microwave_hamiltonian(units::khz(20.0), b);
  const auto ch = engineered_decay_channels(units::mhz(1.2), units::mhz(6.0), b, true);
  const Matrix expect = testing::vectorized_lindbladian(h.dense(), dense_jumps(ch));
  const Matrix got = Liouvillian(Hamiltonian(h), ch).superoperator();
  EXPECT_LT((got - expect).cwiseAbs().maxCoeff(), 1e-12 * expect.cwiseAbs().maxCoeff());
}

TEST(Propagator, KindSelection) {
  const Basis b = build_basis(2, SchemeKind::ReducedGER);
  const IntegratorConfig cfg;
  const OperatorMatrix h = drive_hamiltonian(DriveSpec::for_source(DriveSource::G, units::mhz(2.0)), b, 0.0);
  const auto ch = engineered_decay_channels(units::mhz(1.2), units::mhz(6.0), b, false);
  EXPECT_EQ(make_propagator(h, {}, 1e-7, cfg).kind(), Propagator::Kind::Unitary);
  EXPECT_EQ(make_propagator(Hamiltonian(b), ch, 1e-6, cfg).kind(), Propagator::Kind::LocalProduct);
  const DriveSpec g = DriveSpec::for_source(DriveSource::G, units::mhz(2.0));
  EXPECT_EQ(make_propagator(drive_generator(g, b), ch, 1e-6, cfg).kind(), Propagator::Kind::LocalProduct);
  const OperatorMatrix hu = h + rydberg_interaction(InteractionSpec::uniform(2, units::mhz(40.0)), b);
  EXPECT_EQ(make_propagator(hu, ch, 1e-6, cfg).kind(), Propagator::Kind::Superoperator);
  DriveSpec gauss = DriveSpec::for_source(DriveSource::G, units::mhz(2.0));
  gauss.envelope = Envelope::gaussian(1e-7);
  EXPECT_EQ(make_propagator(drive_generator(gauss, b), {}, 6e-7, cfg).kind(), Propagator::Kind::Unitary);
  EXPECT_EQ(make_propagator(drive_generator(gauss, b), ch, 6e-7, cfg).kind(), Propagator::Kind::Integrated);
  IntegratorConfig off = cfg;
  off.exact_propagators = false;
  EXPECT_EQ(make_propagator(h, {}, 1e-7, off).kind(), Propagator::Kind::Integrated);
}

TEST(Propagator, LocalProductMatchesIntegration) {
  const Basis b = build_basis(3, SchemeKind::ReducedGER);
  const auto ch = engineered_decay_channels(units::mhz(1.2), units::mhz(6.0), b, false);
  const OperatorMatrix h = drive_hamiltonian(DriveSpec::for_source(DriveSource::E, units::mhz(0.5)), b, 0.0);
  std::mt19937 rng(44);
  const DensityMatrix rho0(b, random_density(b.dim(), rng));
  const DensityMatrix a = evolve(rho0, h, ch, units::us(2.0));
  const DensityMatrix c = evolve(rho0, h, ch, units::us(2.0), tight_rk45());
  EXPECT_LT((a.matrix() - c.matrix()).cwiseAbs().maxCoeff(), 1e-8);
}

TEST(Integrator, RejectsBadSettings) {
  IntegratorConfig cfg;
  cfg.rel_tol = 0.0;
  EXPECT_THROW(cfg.validate(), std::invalid_argument);
  cfg = {};
  cfg.max_step = -1.0;
  EXPECT_THROW(cfg.validate(), std::invalid_argument);
  EXPECT_EQ(parse_integrator(integrator_name(IntegratorMethod::MagnusMidpoint)), IntegratorMethod::MagnusMidpoint);
}

}  // namespace
}  // namespace rydprep
