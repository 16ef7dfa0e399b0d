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

#include <algorithm>
#include <cmath>

#include "sotrack/geometry.hpp"
#include "sotrack/metrics.hpp"
#include "sotrack/synth.hpp"

using namespace sotrack;
using namespace sotrack::synth;

TEST_CASE("trajectory recurrences are exact") {
  TrajectorySpec traj;
  traj.frame_count = 50;
  traj.initial = ObjectState{1.0, 2.0, 1.0, 0.0};

  SUBCASE("constant velocity steps by speed along the heading") {
    traj.kind = TrajectoryKind::constant_velocity;
    traj.speed = 1.0;
    const auto states = trajectory_states(traj);
    for (std::size_t k = 1; k < states.size(); ++k) {
      CHECK(states[k].x - states[k - 1].x == 1.0);  // exact, not approximate
      CHECK(states[k].y == states[k - 1].y);
      CHECK(states[k].theta == states[k - 1].theta);
    }
  }
  SUBCASE("curvature turns the heading by speed * curvature") {
    traj.kind = TrajectoryKind::constant_curvature;
    traj.speed = 0.5;
    traj.curvature = 0.05;
    const auto states = trajectory_states(traj);
    for (std::size_t k = 1; k < states.size(); ++k) {
      const ObjectState& p = states[k - 1];
      CHECK(states[k].x == p.x + 0.5 * std::cos(p.theta));
      CHECK(states[k].y == p.y + 0.5 * std::sin(p.theta));
      CHECK(states[k].theta == wrap_angle(p.theta + 0.5 * 0.05));
    }
  }
  SUBCASE("piecewise switches parameters at the change frame") {
    traj.kind = TrajectoryKind::piecewise;
    traj.speed = 0.2;
    traj.speed2 = 0.6;
    traj.change_frame = 25;
    const auto states = trajectory_states(traj);
    CHECK(states[10].x - states[9].x == doctest::Approx(0.2));
    CHECK(states[40].x - states[39].x == doctest::Approx(0.6));
  }
  SUBCASE("degenerate specs are rejected") {
    traj.frame_count = 1;
    CHECK_THROWS_AS((void)trajectory_states(traj), std::invalid_argument);
    traj.frame_count = 10;
    traj.speed = -1.0;
    CHECK_THROWS_AS((void)trajectory_states(traj), std::invalid_argument);
  }
}

TEST_CASE("generate_tracklet basics") {
  VehicleTemplate tpl;
  TrajectorySpec traj;
  traj.kind = TrajectoryKind::static_pose;
  traj.frame_count = 5;
  traj.noise_sigma = 0.0;
  traj.initial = ObjectState{0.0, 0.0, 1.05, 0.0};
  const Vec3 sensor{-15.0, 0.0, 1.8};

  SUBCASE("static scene repeats the same cloud") {
    const Tracklet t = generate_tracklet(tpl, traj, sensor, 7);
    REQUIRE(t.length() == 5);
    for (std::size_t k = 1; k < t.length(); ++k) {
      REQUIRE(t.frames[k].size() == t.frames[0].size());
      for (std::size_t i = 0; i < t.frames[k].size(); ++i) {
        CHECK(t.frames[k].points[i] == t.frames[0].points[i]);
      }
    }
    CHECK(t.gt_states.size() == t.length());
    CHECK(!t.gt_shape.empty());
  }
  SUBCASE("back-face culling hides the far side") {
    // sensor straight behind a +x-heading box: the front face cannot return
    const Tracklet t = generate_tracklet(tpl, traj, sensor, 7);
    const double front_x = 0.5 * tpl.size.length * tpl.shell_inset;
    for (const Vec3& p : t.frames[0].points) {
      const Vec3 local = world_to_object(t.gt_states[0], p);
      CHECK(local.x < front_x - 1e-9);
    }
    // a slightly offset sensor sees exactly one side face
    const Tracklet t2 = generate_tracklet(tpl, traj, Vec3{-15.0, 3.0, 1.8}, 7);
    bool left = false;
    bool right = false;
    const double side_y = 0.5 * tpl.size.width * tpl.shell_inset;
    for (const Vec3& p : t2.frames[0].points) {
      const Vec3 local = world_to_object(t2.gt_states[0], p);
      left = left || std::abs(local.y - side_y) < 1e-9;
      right = right || std::abs(local.y + side_y) < 1e-9;
    }
    CHECK(left);
    CHECK(!right);
  }
  SUBCASE("deterministic under the seed") {
    const Tracklet a = generate_tracklet(tpl, traj, sensor, 99);
    const Tracklet b = generate_tracklet(tpl, traj, sensor, 99);
    REQUIRE(a.length() == b.length());
    for (std::size_t k = 0; k < a.length(); ++k) {
      REQUIRE(a.frames[k].size() == b.frames[k].size());
      for (std::size_t i = 0; i < a.frames[k].size(); ++i) {
        CHECK(a.frames[k].points[i] == b.frames[k].points[i]);
      }
    }
  }
  SUBCASE("subsampling caps the per-frame count") {
    TrajectorySpec capped = traj;
    capped.target_points = 50;
    const Tracklet t = generate_tracklet(tpl, capped, sensor, 7);
    for (const PointCloud& frame : t.frames) {
      CHECK(frame.size() == 50);
    }
  }
  SUBCASE("ground and clutter are appended") {
    SceneSpec scene;
    scene.ground_points = 200;
    const Tracklet t = generate_tracklet(tpl, traj, sensor, 7, scene);
    std::size_t near_zero = 0;
    for (const Vec3& p : t.frames[0].points) {
      near_zero += std::abs(p.z) < 1e-9 ? 1 : 0;
    }
    CHECK(near_zero == 200);
  }
}

TEST_CASE("simulate_scan depth buffering") {
  SUBCASE("single point survives") {
    PointCloud shape(Frame::object);
    shape.points = {{0.0, 0.0, 0.0}};
    const PointCloud scan =
        simulate_scan(shape, ObjectState{20.0, 0.0, 0.0, 0.0}, Vec3{0.0, 0.0, 0.0}, 0.01);
    REQUIRE(scan.size() == 1);
    CHECK(scan.points[0].x == doctest::Approx(20.0));
  }
  SUBCASE("nearer return wins the bin") {
    PointCloud shape(Frame::world);
    shape.points = {{20.0, 0.0, 0.0}, {40.0, 0.0, 0.0}};
    const PointCloud scan = simulate_scan(shape, ObjectState{}, Vec3{0.0, 0.0, 0.0}, 0.01);
    REQUIRE(scan.size() == 1);
    CHECK(scan.points[0].x == doctest::Approx(20.0));
  }
  SUBCASE("every return is one of the inputs and counts never grow") {
    std::mt19937_64 rng(151);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    PointCloud shape(Frame::object);
    for (int i = 0; i < 500; ++i) {
      shape.points.push_back({2.0 * u(rng), 0.9 * u(rng), 0.7 * u(rng)});
    }
    const ObjectState pose{15.0, 5.0, 1.0, 0.7};
    const PointCloud scan = simulate_scan(shape, pose, Vec3{0.0, 0.0, 1.8}, 0.005);
    CHECK(scan.size() <= shape.size());
    const PointCloud world = object_to_world(pose, shape);
    for (const Vec3& p : scan.points) {
      CHECK(std::find(world.points.begin(), world.points.end(), p) != world.points.end());
    }
  }
  SUBCASE("doubling the range halves the returns from a thin facade") {
    // dense strip 10 m wide and 4 cm tall, scanned at 20 m and 40 m
    PointCloud wall(Frame::world);
    for (int i = 0; i < 20000; ++i) {
      const double y = -5.0 + 10.0 * (i % 2000) / 2000.0;
      const double z = 0.04 * (i / 2000) / 10.0;
      wall.points.push_back({20.0, y, z});
    }
    PointCloud far_wall = wall;
    for (Vec3& p : far_wall.points) {
      p.x = 40.0;
    }
    const double res = 0.005;
    const std::size_t near_count =
        simulate_scan(wall, ObjectState{}, Vec3{0.0, 0.0, 0.0}, res).size();
    const std::size_t far_count =
        simulate_scan(far_wall, ObjectState{}, Vec3{0.0, 0.0, 0.0}, res).size();
    const double ratio = static_cast<double>(far_count) / static_cast<double>(near_count);
    CHECK(ratio > 0.4);
    CHECK(ratio < 0.6);
  }
}

TEST_CASE("benchmark suite respects the dataset rules") {
  SuiteSpec spec;
  spec.count = 4;
  spec.frames_min = 100;
  spec.frames_max = 110;
  spec.seed = 13;
  const auto suite = generate_suite(spec);
  REQUIRE(suite.size() == 4);
  for (const Tracklet& t : suite) {
    CHECK(t.length() >= 100);
    CHECK(t.has_gt_states());
    CHECK(!t.gt_shape.empty());
    for (std::size_t k = 0; k < 10; ++k) {
      const auto count =
          points_in_box(t.frames[k], t.gt_states[k], t.first_box.size, 1.0).size();
      CHECK(count > 20);
    }
  }
  // deterministic regeneration
  const auto again = generate_suite(spec);
  for (std::size_t i = 0; i < suite.size(); ++i) {
    REQUIRE(suite[i].length() == again[i].length());
    CHECK(suite[i].frames[3].points == again[i].frames[3].points);
  }
}
