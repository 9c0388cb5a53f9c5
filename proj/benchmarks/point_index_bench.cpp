// Copyright 2026 The text-scene-motion Authors
// SPDX-License-Identifier: Apache-2.0

#include <benchmark/benchmark.h>

#include <random>

#include "tsm/sensors/point_index.hpp"

namespace {

tsm::scene::PointCloud random_cloud(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-5.0, 5.0);
  tsm::scene::PointCloud c;
  c.reserve(n);
  for (std::size_t i = 0; i < n; ++i) c.add({u(rng), u(rng), u(rng) * 0.3}, Eigen::Vector3d::UnitZ());
  return c;
}

void BM_Build(benchmark::State& state) {
  const auto cloud = random_cloud(static_cast<std::size_t>(state.range(0)), 1);
  for (auto _ : state) {
    tsm::sensors::PointIndex index(cloud);
    benchmark::DoNotOptimize(index);
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Build)->Arg(10'000)->Arg(100'000);

void BM_Nearest(benchmark::State& state) {
  const auto cloud = random_cloud(static_cast<std::size_t>(state.range(0)), 2);
  const tsm::sensors::PointIndex index(cloud);
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-5.0, 5.0);
  for (auto _ : state) {
    const Eigen::Vector3d q(u(rng), u(rng), u(rng) * 0.3);
    benchmark::DoNotOptimize(index.nearest(q, 1.0));
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_Nearest)->Arg(10'000)->Arg(100'000);

}  // namespace
