// Copyright 2026 The lodsdf Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <random>
#include <vector>

#include <benchmark/benchmark.h>

#include "lodsdf/analytic_shape.hpp"
#include "lodsdf/meshing.hpp"
#include "lodsdf/metrics.hpp"
#include "lodsdf/network.hpp"
#include "lodsdf/sampling.hpp"
#include "lodsdf/training.hpp"

namespace {

using namespace lodsdf;

std::vector<Vec3> cloud(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-0.5, 0.5);
  std::vector<Vec3> out(n);
  for (auto& p : out) p = Vec3(u(rng), u(rng), u(rng));
  return out;
}

void BM_ForwardBatch(benchmark::State& state) {
  const NetworkConfig cfg;
  const auto params = init_network(cfg, 0);
  const LatentCode l = LatentCode::Constant(cfg.latent_dim, 0.01);
  const auto xs = cloud(4096, 1);
  const int level = static_cast<int>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(forward_batch(params, xs, l, level));
  }
  state.SetItemsProcessed(state.iterations() * static_cast<long>(xs.size()));
}
BENCHMARK(BM_ForwardBatch)->Arg(1)->Arg(3)->Arg(6)->Unit(benchmark::kMillisecond);

void BM_OctreeSphere(benchmark::State& state) {
  const auto sphere = AnalyticShape::sphere(Vec3::Zero(), 0.35);
  const auto sdf = make_batch_sdf([&](const Vec3& x) { return sphere(x); });
  MeshingConfig cfg;
  cfg.target_resolution = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(extract_mesh(sdf, cfg));
}
BENCHMARK(BM_OctreeSphere)->Arg(64)->Arg(128)->Arg(256)->Unit(benchmark::kMillisecond);

void BM_DenseSphere(benchmark::State& state) {
  const auto sphere = AnalyticShape::sphere(Vec3::Zero(), 0.35);
  const auto sdf = make_batch_sdf([&](const Vec3& x) { return sphere(x); });
  for (auto _ : state) {
    benchmark::DoNotOptimize(extract_mesh_dense(sdf, static_cast<int>(state.range(0))));
  }
}
BENCHMARK(BM_DenseSphere)->Arg(64)->Arg(128)->Unit(benchmark::kMillisecond);

void BM_NetworkExtraction(benchmark::State& state) {
  const NetworkConfig cfg;
  const auto params = init_network(cfg, 0);
  const LatentCode l = LatentCode::Constant(cfg.latent_dim, 0.01);
  MeshingConfig mc;
  mc.target_resolution = 64;
  for (auto _ : state) benchmark::DoNotOptimize(extract_level(params, l, 1, mc));
}
BENCHMARK(BM_NetworkExtraction)->Unit(benchmark::kMillisecond);

void BM_Chamfer(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto a = cloud(n, 2);
  const auto b = cloud(n, 3);
  for (auto _ : state) benchmark::DoNotOptimize(chamfer(a, b));
}
BENCHMARK(BM_Chamfer)->Arg(1000)->Arg(10000)->Unit(benchmark::kMillisecond);

void BM_EmdExact(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto a = cloud(n, 4);
  const auto b = cloud(n, 5);
  for (auto _ : state) benchmark::DoNotOptimize(emd_exact(a, b));
}
BENCHMARK(BM_EmdExact)->Arg(128)->Arg(512)->Unit(benchmark::kMillisecond);

void BM_TrainStep(benchmark::State& state) {
  SamplingConfig sc;
  sc.total = 4096;
  const std::vector<SdfSampleSet> data = {
      sample_training_set(make_oracle(AnalyticShape::sphere(Vec3::Zero(), 0.35)), sc, 0)};
  TrainConfig tc;
  tc.steps = 10;
  tc.batch_shapes = 1;
  tc.samples_per_shape = static_cast<int>(state.range(0));
  const NetworkConfig cfg;
  for (auto _ : state) benchmark::DoNotOptimize(train(data, tc, cfg));
  state.SetItemsProcessed(state.iterations() * tc.steps);
}
BENCHMARK(BM_TrainStep)->Arg(512)->Arg(2048)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
