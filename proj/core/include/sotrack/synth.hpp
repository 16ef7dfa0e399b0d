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

#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "sotrack/types.hpp"

namespace sotrack {
namespace synth {

enum class FaceId { front, rear, left, right, top };

/// A cuboid-shell vehicle stand-in. Surface samples are drawn on a slightly
/// inset shell so noisy returns stay inside the nominal box.
struct VehicleTemplate {
  BoxSize size{4.6, 1.9, 1.6};
  double density = 50.0;      // surface samples per square meter
  double shell_inset = 0.95;  // sampled-shell scale relative to the box
};

struct ShellPoint {
  Vec3 local;
  FaceId face;
};

/// Deterministic surface sampling of the five visible faces (no underside).
[[nodiscard]] std::vector<ShellPoint> sample_shell(const VehicleTemplate& tpl,
                                                   std::mt19937_64& rng);

[[nodiscard]] Vec3 face_normal(FaceId face);

enum class TrajectoryKind {
  static_pose,
  constant_velocity,
  constant_curvature,
  piecewise,  // speed/curvature switch at change_frame
};

/// Per-frame state recurrence:
///   x += speed * cos(theta), y += speed * sin(theta),
///   theta += speed * curvature (wrapped), z fixed.
struct TrajectorySpec {
  TrajectoryKind kind = TrajectoryKind::constant_velocity;
  ObjectState initial;
  int frame_count = 2;
  double speed = 0.3;          // meters per frame
  double curvature = 0.0;      // 1/m
  double speed2 = 0.0;         // piecewise: after change_frame
  double curvature2 = 0.0;
  int change_frame = 0;
  double noise_sigma = 0.0;    // isotropic, meters
  int target_points = 0;       // per-frame subsample of visible points, 0 = all
};

struct Obstacle {
  ObjectState state;
  BoxSize size;
  double density = 50.0;
};

struct SceneSpec {
  double ground_points = 0.0;  // per frame, uniform patch under the object
  double ground_extent = 8.0;  // patch half-extent, meters
  std::vector<Obstacle> clutter;
};

[[nodiscard]] std::vector<ObjectState> trajectory_states(const TrajectorySpec& traj);

/// Build a full tracklet with ground truth: per frame the shell is posed at
/// the true state, back-face culled against the sensor, optionally
/// subsampled, and perturbed; ground and clutter returns are appended.
/// The reference shape is the noiseless shell in the object frame.
/// Throws std::invalid_argument on a degenerate spec.
[[nodiscard]] Tracklet generate_tracklet(const VehicleTemplate& tpl, const TrajectorySpec& traj,
                                         const Vec3& sensor, std::uint64_t seed,
                                         const SceneSpec& scene = {});

/// Single-scan visibility: pose the shape, bin the points by azimuth and
/// elevation from the sensor, keep the nearest return per bin.
[[nodiscard]] PointCloud simulate_scan(const PointCloud& shape, const ObjectState& pose,
                                       const Vec3& sensor, double angular_resolution);

/// Recipe for a reproducible tracklet benchmark: a mix of static, straight
/// and turning trajectories with sensor distances spread over a range, so
/// per-frame point counts cover a dense-to-sparse long tail. Tracklets
/// shorter than frames_min or with sparse starts (at most min_initial_points
/// in one of the first ten frames) never leave the generator.
struct SuiteSpec {
  int count = 30;
  int frames_min = 100;
  int frames_max = 200;
  double noise_sigma = 0.02;
  double static_fraction = 0.2;
  double turning_fraction = 0.4;  // remainder drives straight
  double sensor_distance_min = 10.0;
  double sensor_distance_max = 40.0;
  int points_near = 400;
  int points_far = 40;
  double clutter_fraction = 0.5;
  double ground_points = 600.0;
  double ground_extent = 8.0;
  double truck_fraction = 0.2;
  std::uint64_t seed = 1;
  int min_initial_points = 21;
};

[[nodiscard]] std::vector<Tracklet> generate_suite(const SuiteSpec& spec);

}  // namespace synth
}  // namespace sotrack
