// Copyright 2026 The smflow Authors.
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

#include <cmath>
#include <numbers>

#include "smflow/integrators.hpp"

namespace {

using namespace smflow;

SphereField profile(int dims, int nodes) {
  return VectorField::sample(BoxGrid(dims, nodes), [](const std::array<double, 3>& x) {
    const double t = 0.5 * std::cos(std::numbers::pi * x[0]);
    return Vec3{std::sin(t), 0.0, std::cos(t)};
  });
}

void BM_Laplacian1D(benchmark::State& state) {
  const auto u = profile(1, static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(laplacian_neumann(u));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Laplacian1D)->Arg(256)->Arg(1024)->Arg(4096);

void BM_Laplacian3D(benchmark::State& state) {
  const auto u = profile(3, static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(laplacian_neumann(u));
}
BENCHMARK(BM_Laplacian3D)->Arg(16)->Arg(32);

void BM_LlgRhs(benchmark::State& state) {
  const auto u = profile(1, static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(llg_rhs(u, 0.1));
}
BENCHMARK(BM_LlgRhs)->Arg(256)->Arg(4096);

void BM_MidpointStep1D(benchmark::State& state) {
  const FlowState s{0.0, profile(1, static_cast<int>(state.range(0))), 0};
  FlowParams p;
  p.dt = 1e-4;
  for (auto _ : state) benchmark::DoNotOptimize(step_implicit_midpoint(s, p));
}
BENCHMARK(BM_MidpointStep1D)->Arg(256)->Arg(512);

void BM_MidpointStep2D(benchmark::State& state) {
  const FlowState s{0.0, profile(2, static_cast<int>(state.range(0))), 0};
  FlowParams p;
  p.dt = 1e-4;
  for (auto _ : state) benchmark::DoNotOptimize(step_implicit_midpoint(s, p));
}
BENCHMARK(BM_MidpointStep2D)->Arg(17)->Arg(33)->Unit(benchmark::kMillisecond);

void BM_Rk4Step1D(benchmark::State& state) {
  const FlowState s{0.0, profile(1, static_cast<int>(state.range(0))), 0};
  FlowParams p;
  p.scheme = Scheme::Rk4Projected;
  p.dt = 1e-5;
  p.override_cfl = true;
  for (auto _ : state) benchmark::DoNotOptimize(step_rk4_projected(s, p));
}
BENCHMARK(BM_Rk4Step1D)->Arg(256)->Arg(512);

}  // namespace

BENCHMARK_MAIN();
