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

#include <random>

#include "rydprep/hilbert.hpp"
#include "rydprep/oracle.hpp"
#include "support.hpp"

namespace rydprep {
namespace {

TEST(Basis, Dimensions) {
  EXPECT_EQ(build_basis(2, SchemeKind::ReducedGER).dim(), 9u);
  EXPECT_EQ(build_basis(5, SchemeKind::ReducedGER).dim(), 243u);
  EXPECT_EQ(build_basis(2, SchemeKind::FullSix).dim(), 36u);
  EXPECT_EQ(build_basis(2, SchemeKind::ReducedGEHR).dim(), 16u);
}

TEST(Basis, SchemeLevels) {
  EXPECT_EQ(LevelScheme(SchemeKind::ReducedGER).levels(), (std::vector<Level>{Level::G, Level::E, Level::R}));
  EXPECT_EQ(LevelScheme(SchemeKind::ReducedGEHR).levels(),
            (std::vector<Level>{Level::G, Level::E, Level::H, Level::R}));
  EXPECT_EQ(LevelScheme(SchemeKind::FullSix).levels(),
            (std::vector<Level>{Level::G, Level::E, Level::H, Level::P1, Level::P2, Level::R}));
}

TEST(Basis, RejectsBadSizes) {
  EXPECT_THROW(build_basis(0, SchemeKind::ReducedGER), std::invalid_argument);
  EXPECT_THROW(build_basis(7, SchemeKind::ReducedGER), std::invalid_argument);
}

TEST(Basis, EncodeDecodeRoundTrip) {
  for (auto scheme : {SchemeKind::ReducedGER, SchemeKind::ReducedGEHR, SchemeKind::FullSix}) {
    for (std::size_t n = 1; n <= 3; ++n) {
      const Basis b = build_basis(n, scheme);
      for (std::size_t i = 0; i < b.dim(); ++i) {
        EXPECT_EQ(b.encode(b.decode(i)), i);
        EXPECT_EQ(b.encode_indices(b.decode_indices(i)), i);
      }
    }
  }
}

TEST(Basis, AtomZeroIsSlowest) {
  const Basis b = build_basis(2, SchemeKind::ReducedGER);
  EXPECT_EQ(b.encode({Level::G, Level::E}), 1u);
  EXPECT_EQ(b.encode({Level::E, Level::G}), 3u);
  EXPECT_EQ(b.label(b.encode({Level::R, Level::G})), "rg");
}

TEST(Embed, SpectatorNonzeros) {
  const Basis b = build_basis(2, SchemeKind::ReducedGER);
  EXPECT_EQ(embed(transition(Level::R, Level::G), 0, b).nnz(), 3u);
}

TEST(Embed, IdentityLiftsToIdentity) {
  const Basis b = build_basis(3, SchemeKind::ReducedGEHR);
  for (std::size_t a = 0; a < 3; ++a) {
    const Matrix m = embed(local_identity(b.scheme()), a, b).dense();
    EXPECT_LT((m - Matrix::Identity(b.dim(), b.dim())).cwiseAbs().maxCoeff(), 1e-15);
  }
}

TEST(Embed, MapsGroundToSecondAtomExcited) {
  const Basis b = build_basis(2, SchemeKind::ReducedGER);
  const Matrix m = embed(transition(Level::E, Level::G), 1, b).dense();
  const auto gg = b.encode({Level::G, Level::G});
  const auto ge = b.encode({Level::G, Level::E});
  EXPECT_EQ(m(ge, gg), Complex(1.0, 0.0));
  EXPECT_EQ(m.cwiseAbs().sum(), 3.0);
}

TEST(Embed, MatchesKroneckerProduct) {
  const Basis b = build_basis(3, SchemeKind::ReducedGER);
  const LocalOperator op = transition(Level::R, Level::E, Complex(0.3, -0.7)) + transition(Level::G, Level::G, 2.0);
  const Matrix local = local_matrix(op, b.scheme());
  const Matrix id = Matrix::Identity(3, 3);
  const Matrix expect[3] = {testing::kron(testing::kron(local, id), id), testing::kron(testing::kron(id, local), id),
                            testing::kron(testing::kron(id, id), local)};
  for (std::size_t a = 0; a < 3; ++a) {
    EXPECT_LT((embed(op, a, b).dense() - expect[a]).cwiseAbs().maxCoeff(), 1e-15) << "atom " << a;
  }
}

TEST(Embed, DistinctAtomsCommute) {
  std::mt19937 rng(7);
  std::normal_distribution<double> nd;
  for (std::size_t n : {2u, 3u}) {
    const Basis b = build_basis(n, SchemeKind::ReducedGER);
    for (int trial = 0; trial < 5; ++trial) {
      Matrix a(3, 3), c(3, 3);
      for (Eigen::Index i = 0; i < 9; ++i) {
        a(i) = Complex(nd(rng), nd(rng));
        c(i) = Complex(nd(rng), nd(rng));
      }
      const OperatorMatrix ea = embed_matrix(a, 0, b);
      const OperatorMatrix ec = embed_matrix(c, n - 1, b);
      const Matrix comm = (ea * ec).dense() - (ec * ea).dense();
      EXPECT_LT(comm.cwiseAbs().maxCoeff(), 1e-12);
    }
  }
}

TEST(Embed, SparsityBound) {
  const Basis b = build_basis(3, SchemeKind::FullSix);
  const LocalOperator op = transition(Level::P2, Level::G) + transition(Level::R, Level::P2);
  EXPECT_LE(embed(op, 1, b).nnz(), 6u * 6u * 2u);
}

TEST(Embed, RejectsLevelOutsideScheme) {
  const Basis b = build_basis(2, SchemeKind::ReducedGER);
  EXPECT_THROW(embed(transition(Level::H, Level::G), 0, b), std::invalid_argument);
  EXPECT_THROW(embed(transition(Level::E, Level::G), 2, b), std::invalid_argument);
}

TEST(Projector, ProductState) {
  const Basis b = build_basis(2, SchemeKind::ReducedGER);
  const OperatorMatrix p = projector({Level::G, Level::G}, b);
  EXPECT_EQ(p.nnz(), 1u);
  EXPECT_EQ(p.dense()(0, 0), Complex(1.0, 0.0));
}

TEST(Projector, PartialPatternTracesSpectators) {
  const Basis b = build_basis(2, SchemeKind::ReducedGER);
  const OperatorMatrix p = projector({Level::R, std::nullopt}, b);
  EXPECT_NEAR(p.dense().trace().real(), 3.0, 1e-15);
}

TEST(Projector, BellStates) {
  const Basis b = build_basis(2, SchemeKind::ReducedGER);
  const OperatorMatrix phi = projector(target_state(TargetKind::BellPhiPlus, b).state);
  const OperatorMatrix psi = projector(target_state(TargetKind::BellPsiMinus, b).state);
  EXPECT_NEAR(phi.dense().trace().real(), 1.0, 1e-15);
  EXPECT_NEAR(std::abs((phi * psi).dense().trace()), 0.0, 1e-15);
  EXPECT_TRUE(phi.is_hermitian());
}

TEST(OperatorMatrix, BasisMismatchThrows) {
  const OperatorMatrix a = OperatorMatrix::identity(build_basis(2, SchemeKind::ReducedGER));
  const OperatorMatrix c = OperatorMatrix::identity(build_basis(2, SchemeKind::ReducedGEHR));
  EXPECT_THROW(a + c, std::invalid_argument);
}

TEST(DensityMatrix, PureStateDiagnostics) {
  const Basis b = build_basis(2, SchemeKind::ReducedGER);
  const DensityMatrix rho = DensityMatrix::from_pure(target_state(TargetKind::BellPhiPlus, b).state);
  EXPECT_LT(rho.trace_error(), 1e-15);
  EXPECT_LT(rho.hermiticity_error(), 1e-15);
  EXPECT_NEAR(rho.min_eigenvalue(), 0.0, 1e-12);
  EXPECT_NEAR(rho.overlap(target_state(TargetKind::BellPhiPlus, b).state), 1.0, 1e-15);
}

}  // namespace
}  // namespace rydprep
