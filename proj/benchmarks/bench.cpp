// Copyright 2026 The sotrack Authors
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

#include <random>

#include "sotrack/association.hpp"
#include "sotrack/geometry.hpp"
#include "sotrack/ground.hpp"
#include "sotrack/optimizer.hpp"
#include "sotrack/synth.hpp"

using namespace sotrack;

namespace {

PointCloud random_cloud(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-10.0, 10.0);
  PointCloud cloud;
  cloud.points.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    cloud.points.push_back({u(rng), u(rng), u(rng)});
  }
  return cloud;
}

void bm_nn_query(benchmark::State& state) {
  const PointCloud cloud = random_cloud(static_cast<std::size_t>(state.range(0)), 1);
  const NnIndex index(cloud);
  const PointCloud queries = random_cloud(1024, 2);
  std::size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(index.nearest(queries.points[i++ & 1023]));
  }
}
BENCHMARK(bm_nn_query)->Arg(1000)->Arg(10000)->Arg(100000);

void bm_nn_build(benchmark::State& state) {
  const PointCloud cloud = random_cloud(static_cast<std::size_t>(state.range(0)), 3);
  for (auto _ : state) {
    const NnIndex index(cloud);
    benchmark::DoNotOptimize(index.size());
  }
}
BENCHMARK(bm_nn_build)->Arg(1000)->Arg(10000);

void bm_box_iou(benchmark::State& state) {
  const BoundingBox a{ObjectState{0.1, 0.2, 0.0, 0.4}, BoxSize{4.5, 1.9, 1.6}};
  const BoundingBox b{ObjectState{0.4, -0.1, 0.1, 0.6}, BoxSize{4.4, 1.8, 1.5}};
  for (auto _ : state) {
    benchmark::DoNotOptimize(box_iou(a, b));
  }
}
BENCHMARK(bm_box_iou);

void bm_remove_ground(benchmark::State& state) {
  PointCloud scene = random_cloud(static_cast<std::size_t>(state.range(0)), 4);
  for (std::size_t i = 0; i < scene.size(); i += 2) {
    scene.points[i].z = 0.0;  // half the scene is flat ground
  }
  for (auto _ : state) {
    benchmark::DoNotOptimize(remove_ground(scene).cloud.size());
  }
}
BENCHMARK(bm_remove_ground)->Arg(2000)->Arg(20000);

void bm_frame_estimate(benchmark::State& state) {
  synth::VehicleTemplate tpl;
  synth::TrajectorySpec traj;
  traj.kind = synth::TrajectoryKind::constant_velocity;
  traj.speed = 0.4;
  traj.frame_count = 3;
  traj.noise_sigma = 0.02;
  traj.target_points = static_cast<int>(state.range(0));
  traj.initial = ObjectState{0.0, 0.0, 1.05, 0.0};
  const Tracklet t = synth::generate_tracklet(tpl, traj, Vec3{-15.0, 5.0, 1.8}, 7);
  const PointCloud first_object =
      points_in_box(t.frames[0], t.first_box.state, t.first_box.size, 1.0);
  const PointCloud shape = world_to_object(t.first_box.state, first_object);
  const MotionDelta prior = state_difference(t.gt_states[1], t.gt_states[0]);
  for (auto _ : state) {
    std::mt19937_64 rng(11);
    benchmark::DoNotOptimize(frame_estimate(t.frames[1], first_object, prior, t.gt_states[0],
                                            t.first_box.size, t.first_box.state, shape, 1.5,
                                            LossWeights{}, SolverConfig{}, RansacParams{}, rng));
  }
}
BENCHMARK(bm_frame_estimate)->Arg(100)->Arg(400);

}  // namespace

BENCHMARK_MAIN();
