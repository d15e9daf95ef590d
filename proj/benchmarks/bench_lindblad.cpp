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


#include <benchmark/benchmark.h>

#include "rydprep/hamiltonians.hpp"
#include "rydprep/lindblad.hpp"
#include "rydprep/oracle.hpp"
#include "rydprep/protocols.hpp"

namespace rydprep {
namespace {

struct Setup {
  Basis basis;
  OperatorMatrix h;
  std::vector<Channel> channels;
  DensityMatrix rho;
};

Setup make_setup(std::size_t n) {
  Basis b = build_basis(n, SchemeKind::ReducedGER);
  OperatorMatrix h = drive_hamiltonian(DriveSpec::for_source(DriveSource::Plus, units::mhz(2.0)), b, 0.0);
  auto ch = engineered_decay_channels(units::mhz(1.2), units::mhz(6.0), b, false);
  DensityMatrix rho = initial_state({InitialKind::FullyMixedGE, {}}, b);
  return {std::move(b), std::move(h), std::move(ch), std::move(rho)};
}

void BM_LindbladRhs(benchmark::State& state) {
  const Setup s = make_setup(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(lindblad_rhs(s.rho, s.h, s.channels));
}
BENCHMARK(BM_LindbladRhs)->DenseRange(2, 5);

void BM_LocalRelaxPropagator(benchmark::State& state) {
  const Setup s = make_setup(static_cast<std::size_t>(state.range(0)));
  const Hamiltonian zero(s.basis);
  for (auto _ : state) {
    benchmark::DoNotOptimize(make_propagator(zero, s.channels, units::us(2.0), IntegratorConfig{}));
  }
}
BENCHMARK(BM_LocalRelaxPropagator)->DenseRange(2, 5);

void BM_PulsePropagator(benchmark::State& state) {
  const Setup s = make_setup(static_cast<std::size_t>(state.range(0)));
  const Hamiltonian h(s.h);
  for (auto _ : state) benchmark::DoNotOptimize(make_propagator(h, {}, units::us(0.35), IntegratorConfig{}));
}
BENCHMARK(BM_PulsePropagator)->DenseRange(2, 5);

void BM_BellRun(benchmark::State& state) {
  const Protocol p = bell_protocol(units::mhz(2.0), units::mhz(1.2), units::mhz(6.0), units::mhz(400.0), units::us(2.0), 20);
  const CompiledProtocol c = compile(p);
  const DensityMatrix rho0 = initial_state({InitialKind::FullyMixedGE, {}}, p.basis());
  const std::vector<TargetState> obs{target_state(TargetKind::BellPhiPlus, p.basis())};
  for (auto _ : state) benchmark::DoNotOptimize(run(c, rho0, obs));
}
BENCHMARK(BM_BellRun)->Unit(benchmark::kMillisecond);

}  // namespace
}  // namespace rydprep

BENCHMARK_MAIN();
