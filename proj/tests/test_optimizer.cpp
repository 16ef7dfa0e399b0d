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

#include <doctest.h>

#include <cmath>
#include <random>

#include "sotrack/geometry.hpp"
#include "sotrack/optimizer.hpp"
#include "sotrack/synth.hpp"

using namespace sotrack;

TEST_CASE("minimize solves an exact quadratic") {
  const std::array<double, 4> c{1.5, -2.0, 0.3, 0.8};
  auto f = [&](const std::array<double, 4>& x) {
    double v = 0.0;
    for (int i = 0; i < 4; ++i) {
      v += (x[i] - c[i]) * (x[i] - c[i]);
    }
    return v;
  };
  auto g = [&](const std::array<double, 4>& x) {
    std::array<double, 4> out{};
    for (int i = 0; i < 4; ++i) {
      out[i] = 2.0 * (x[i] - c[i]);
    }
    return out;
  };
  const MinimizeResult r = minimize(f, g, {0.0, 0.0, 0.0, 0.0}, SolverConfig{});
  for (int i = 0; i < 4; ++i) {
    CHECK(std::abs(r.x[i] - c[i]) < 1e-8);
  }
  CHECK(r.converged);
}

TEST_CASE("minimize handles the padded Rosenbrock valley") {
  auto f = [](const std::array<double, 4>& x) {
    const double a = 1.0 - x[0];
    const double b = x[1] - x[0] * x[0];
    return a * a + 100.0 * b * b + x[2] * x[2] + x[3] * x[3];
  };
  auto g = [](const std::array<double, 4>& x) {
    const double b = x[1] - x[0] * x[0];
    return std::array<double, 4>{-2.0 * (1.0 - x[0]) - 400.0 * x[0] * b, 200.0 * b, 2.0 * x[2],
                                 2.0 * x[3]};
  };
  SolverConfig cfg;
  cfg.max_inner_iterations = 300;
  const MinimizeResult r = minimize(f, g, {-1.2, 1.0, 0.0, 0.0}, cfg);
  CHECK(std::abs(r.x[0] - 1.0) < 1e-4);
  CHECK(std::abs(r.x[1] - 1.0) < 1e-4);
  CHECK(std::abs(r.x[2]) < 1e-4);
  CHECK(std::abs(r.x[3]) < 1e-4);
}

TEST_CASE("minimize returns a stationary init unchanged") {
  auto f = [](const std::array<double, 4>&) { return 7.0; };
  auto g = [](const std::array<double, 4>&) { return std::array<double, 4>{}; };
  const MinimizeResult r = minimize(f, g, {3.0, 1.0, -2.0, 0.5}, SolverConfig{});
  CHECK(r.x == std::array<double, 4>{3.0, 1.0, -2.0, 0.5});
  CHECK(r.converged);
  CHECK(r.iterations == 0);
}

TEST_CASE("minimize never increases the loss") {
  std::mt19937_64 rng(89);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  for (int trial = 0; trial < 25; ++trial) {
    // random positive-definite quadratic plus a quartic bump
    std::array<double, 4> c{u(rng), u(rng), u(rng), u(rng)};
    std::array<double, 4> w{};
    for (double& v : w) {
      v = 0.5 + std::abs(u(rng));
    }
    auto f = [&](const std::array<double, 4>& x) {
      double s = 0.0;
      for (int i = 0; i < 4; ++i) {
        const double d = x[i] - c[i];
        s += w[i] * d * d + 0.1 * d * d * d * d;
      }
      return s;
    };
    auto g = [&](const std::array<double, 4>& x) {
      std::array<double, 4> out{};
      for (int i = 0; i < 4; ++i) {
        const double d = x[i] - c[i];
        out[i] = 2.0 * w[i] * d + 0.4 * d * d * d;
      }
      return out;
    };
    const std::array<double, 4> init{u(rng), u(rng), u(rng), u(rng)};
    const MinimizeResult r = minimize(f, g, init, SolverConfig{});
    CHECK(r.loss <= f(init) + 1e-15);
  }
}

TEST_CASE("minimize steps over non-finite regions") {
  // f blows up for x0 > 2; the minimizer must keep the iterates finite
  auto f = [](const std::array<double, 4>& x) {
    if (x[0] > 2.0) {
      return std::numeric_limits<double>::quiet_NaN();
    }
    return (x[0] - 1.9) * (x[0] - 1.9) + x[1] * x[1] + x[2] * x[2] + x[3] * x[3];
  };
  auto g = [](const std::array<double, 4>& x) {
    return std::array<double, 4>{2.0 * (x[0] - 1.9), 2.0 * x[1], 2.0 * x[2], 2.0 * x[3]};
  };
  const MinimizeResult r = minimize(f, g, {-3.0, 0.5, 0.0, 0.0}, SolverConfig{});
  CHECK(std::isfinite(r.loss));
  CHECK(std::abs(r.x[0] - 1.9) < 1e-5);
}

namespace {

struct FrameFixture {
  Tracklet tracklet;
  PointCloud first_object;
  PointCloud shape;  // object frame
};

FrameFixture make_fixture(synth::TrajectoryKind kind, double speed, double sigma,
                          std::uint64_t seed) {
  synth::VehicleTemplate tpl;
  synth::TrajectorySpec traj;
  traj.kind = kind;
  traj.speed = speed;
  traj.frame_count = 4;
  traj.noise_sigma = sigma;
  traj.initial = ObjectState{0.0, 0.0, 1.05, 0.0};
  FrameFixture fx;
  fx.tracklet = synth::generate_tracklet(tpl, traj, Vec3{-12.0, 4.0, 1.8}, seed);
  fx.first_object = points_in_box(fx.tracklet.frames[0], fx.tracklet.first_box.state,
                                  fx.tracklet.first_box.size, 1.0);
  fx.shape = world_to_object(fx.tracklet.first_box.state, fx.first_object);
  return fx;
}

}  // namespace

TEST_CASE("frame_estimate recovers a noiseless motion seeded by the prior") {
  const FrameFixture fx = make_fixture(synth::TrajectoryKind::constant_velocity, 0.4, 0.0, 101);
  const MotionDelta truth = state_difference(fx.tracklet.gt_states[1], fx.tracklet.gt_states[0]);
  std::mt19937_64 rng(1);
  const FrameEstimateResult r =
      frame_estimate(fx.tracklet.frames[1], fx.first_object, truth, fx.tracklet.gt_states[0],
                     fx.tracklet.first_box.size, fx.tracklet.first_box.state, fx.shape, 1.5,
                     LossWeights{}, SolverConfig{}, RansacParams{}, rng);
  CHECK(!r.fallback);
  CHECK(std::abs(r.state.x - fx.tracklet.gt_states[1].x) < 1e-3);
  CHECK(std::abs(r.state.y - fx.tracklet.gt_states[1].y) < 1e-3);
  CHECK(std::abs(r.state.z - fx.tracklet.gt_states[1].z) < 1e-3);
  CHECK(std::abs(wrap_angle(r.state.theta - fx.tracklet.gt_states[1].theta)) < 1e-3);
}

TEST_CASE("frame_estimate holds a static object in place") {
  const FrameFixture fx = make_fixture(synth::TrajectoryKind::static_pose, 0.0, 0.0, 103);
  std::mt19937_64 rng(1);
  const FrameEstimateResult r =
      frame_estimate(fx.tracklet.frames[1], fx.first_object, MotionDelta{},
                     fx.tracklet.gt_states[0], fx.tracklet.first_box.size,
                     fx.tracklet.first_box.state, fx.shape, 1.5, LossWeights{}, SolverConfig{},
                     RansacParams{}, rng);
  CHECK(std::abs(r.state.x - fx.tracklet.gt_states[0].x) < 1e-6);
  CHECK(std::abs(r.state.y - fx.tracklet.gt_states[0].y) < 1e-6);
  CHECK(std::abs(r.state.z - fx.tracklet.gt_states[0].z) < 1e-6);
  CHECK(std::abs(wrap_angle(r.state.theta - fx.tracklet.gt_states[0].theta)) < 1e-6);
}

TEST_CASE("frame_estimate survives a single-point observation") {
  PointCloud frame;
  frame.points = {{0.1, 0.0, 0.5}};
  PointCloud prev_object;
  prev_object.points = {{0.0, 0.0, 0.5}};
  PointCloud shape(Frame::object);
  shape.points = {{0.0, 0.0, 0.0}};
  const ObjectState prev{0.0, 0.0, 0.5, 0.0};
  const BoxSize size{2.0, 1.0, 1.0};
  std::mt19937_64 rng(1);
  const FrameEstimateResult r =
      frame_estimate(frame, prev_object, MotionDelta{}, prev, size, prev, shape, 1.5,
                     LossWeights{}, SolverConfig{}, RansacParams{}, rng);
  CHECK(std::isfinite(r.loss));
  CHECK(!r.fallback);
  // the estimate cannot leave the search cuboid's reach
  CHECK(point_in_box({0.1, 0.0, 0.5}, r.state, size, 1.5));
}

TEST_CASE("frame_estimate falls back to dead reckoning without observations") {
  PointCloud frame;
  frame.points = {{100.0, 100.0, 100.0}};
  PointCloud prev_object;
  prev_object.points = {{0.0, 0.0, 0.5}};
  const ObjectState prev{0.0, 0.0, 0.5, 0.0};
  const MotionDelta prior{0.3, 0.0, 0.0, 0.0};
  std::mt19937_64 rng(1);
  const FrameEstimateResult r =
      frame_estimate(frame, prev_object, prior, prev, BoxSize{2.0, 1.0, 1.0}, prev,
                     PointCloud{Frame::object}, 1.5, LossWeights{}, SolverConfig{},
                     RansacParams{}, rng);
  CHECK(r.fallback);
  const ObjectState expected = compose_state(prev, prior);
  CHECK(r.state.x == doctest::Approx(expected.x));
  CHECK(r.state.y == doctest::Approx(expected.y));
}

TEST_CASE("frame_estimate is deterministic") {
  const FrameFixture fx = make_fixture(synth::TrajectoryKind::constant_velocity, 0.3, 0.02, 107);
  const MotionDelta prior{0.3, 0.0, 0.0, 0.0};
  auto run = [&]() {
    std::mt19937_64 rng(42);
    return frame_estimate(fx.tracklet.frames[1], fx.first_object, prior,
                          fx.tracklet.gt_states[0], fx.tracklet.first_box.size,
                          fx.tracklet.first_box.state, fx.shape, 1.5, LossWeights{},
                          SolverConfig{}, RansacParams{}, rng);
  };
  const FrameEstimateResult a = run();
  const FrameEstimateResult b = run();
  CHECK(a.state.x == b.state.x);
  CHECK(a.state.y == b.state.y);
  CHECK(a.state.z == b.state.z);
  CHECK(a.state.theta == b.state.theta);
  CHECK(a.loss == b.loss);
}
