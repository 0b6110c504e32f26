/*
   Copyright 2026 The polydecoh Authors

   Licensed under the Apache License, Version 2.0 (the "License");
   you may not use this file except in compliance with the License.
   You may obtain a copy of the License at

       http://www.apache.org/licenses/LICENSE-2.0

   Unless required by applicable law or agreed to in writing, software
   distributed under the License is distributed on an "AS IS" BASIS,
   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
   See the License for the specific language governing permissions and
   limitations under the License.
*/

#include <benchmark/benchmark.h>

#include "polydecoh/dynamics.hpp"
#include "polydecoh/eigensolve.hpp"
#include "polydecoh/ensemble.hpp"
#include "polydecoh/relax.hpp"
#include "polydecoh/wigner.hpp"

using namespace polydecoh;

namespace {

ModelParams chain(int n) {
    ModelParams p;
    p.nSites = n;
    return p;
}

const SuperpositionSpec kGE{SuperpositionKind::GroundExcited, 0};

void BM_EigTridiagonal(benchmark::State& state) {
    const ModelParams p = chain(static_cast<int>(state.range(0)));
    const RelaxedGeometry r = optimize_geometry(ground_state_occupation(p), p);
    const SingleParticleHamiltonian h = build_hamiltonian(r.u0, p);
    for (auto _ : state) benchmark::DoNotOptimize(eig_tridiagonal(h));
}
BENCHMARK(BM_EigTridiagonal)->Arg(20)->Arg(50)->Arg(100)->Arg(200);

void BM_Rk8Step(benchmark::State& state) {
    const ModelParams p = chain(static_cast<int>(state.range(0)));
    const EnsemblePreparation prep = prepare_ensemble(kGE, p);
    const SampledInitialCondition init = sample_initial_condition(prep.modes, p, 1, 0);
    TrajectoryState s = initial_trajectory_state(init.state, prep.gamma, p);
    Propagator prop(p, prep.gamma, s.activeLevels);
    for (auto _ : state) prop.advance(s, 0.02);
    state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_Rk8Step)->Arg(4)->Arg(20)->Arg(50)->Arg(100);

void BM_Trajectory(benchmark::State& state) {
    const ModelParams p = chain(static_cast<int>(state.range(0)));
    const EnsemblePreparation prep = prepare_ensemble(kGE, p);
    const SampledInitialCondition init = sample_initial_condition(prep.modes, p, 1, 0);
    RunOptions run;
    run.tFinal = 50.0;
    run.watchedLevels = {p.nSites / 2 + 1};
    for (auto _ : state) benchmark::DoNotOptimize(propagate_trajectory(init, prep.gamma, p, run));
}
BENCHMARK(BM_Trajectory)->Arg(20)->Unit(benchmark::kMillisecond);

void BM_Relax(benchmark::State& state) {
    const ModelParams p = chain(static_cast<int>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(optimize_geometry(ground_state_occupation(p), p));
}
BENCHMARK(BM_Relax)->Arg(20)->Arg(100)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
