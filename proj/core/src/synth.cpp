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

#include "sotrack/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <stdexcept>
#include <string>
#include <utility>

#include "sotrack/geometry.hpp"

namespace sotrack {
namespace synth {

Vec3 face_normal(FaceId face) {
  switch (face) {
    case FaceId::front:
      return {1.0, 0.0, 0.0};
    case FaceId::rear:
      return {-1.0, 0.0, 0.0};
    case FaceId::left:
      return {0.0, 1.0, 0.0};
    case FaceId::right:
      return {0.0, -1.0, 0.0};
    case FaceId::top:
      return {0.0, 0.0, 1.0};
  }
  return {0.0, 0.0, 1.0};
}

std::vector<ShellPoint> sample_shell(const VehicleTemplate& tpl, std::mt19937_64& rng) {
  if (!tpl.size.valid() || tpl.density <= 0.0 || tpl.shell_inset <= 0.0) {
    throw std::invalid_argument("vehicle template needs positive size, density and inset");
  }
  const double hl = 0.5 * tpl.size.length * tpl.shell_inset;
  const double hw = 0.5 * tpl.size.width * tpl.shell_inset;
  const double hh = 0.5 * tpl.size.height * tpl.shell_inset;
  std::uniform_real_distribution<double> unit(-1.0, 1.0);

  std::vector<ShellPoint> shell;
  auto sample_face = [&](FaceId face, double area, auto&& make_point) {
    const auto count = std::max<long long>(1, std::llround(tpl.density * area));
    for (long long i = 0; i < count; ++i) {
      shell.push_back({make_point(unit(rng), unit(rng)), face});
    }
  };
  sample_face(FaceId::front, 4.0 * hw * hh,
              [&](double u, double v) { return Vec3{hl, u * hw, v * hh}; });
  sample_face(FaceId::rear, 4.0 * hw * hh,
              [&](double u, double v) { return Vec3{-hl, u * hw, v * hh}; });
  sample_face(FaceId::left, 4.0 * hl * hh,
              [&](double u, double v) { return Vec3{u * hl, hw, v * hh}; });
  sample_face(FaceId::right, 4.0 * hl * hh,
              [&](double u, double v) { return Vec3{u * hl, -hw, v * hh}; });
  sample_face(FaceId::top, 4.0 * hl * hw,
              [&](double u, double v) { return Vec3{u * hl, v * hw, hh}; });
  return shell;
}

std::vector<ObjectState> trajectory_states(const TrajectorySpec& traj) {
  if (traj.frame_count < 2) {
    throw std::invalid_argument("trajectory needs at least 2 frames");
  }
  if (traj.speed < 0.0 || traj.speed2 < 0.0) {
    throw std::invalid_argument("trajectory speed must be nonnegative");
  }
  std::vector<ObjectState> states;
  states.reserve(traj.frame_count);
  states.push_back(traj.initial);
  for (int k = 1; k < traj.frame_count; ++k) {
    const ObjectState& prev = states.back();
    double speed = traj.speed;
    double curvature = traj.curvature;
    switch (traj.kind) {
      case TrajectoryKind::static_pose:
        speed = 0.0;
        curvature = 0.0;
        break;
      case TrajectoryKind::constant_velocity:
        curvature = 0.0;
        break;
      case TrajectoryKind::constant_curvature:
        break;
      case TrajectoryKind::piecewise:
        if (k >= traj.change_frame) {
          speed = traj.speed2;
          curvature = traj.curvature2;
        }
        break;
    }
    states.emplace_back(prev.x + speed * std::cos(prev.theta),
                        prev.y + speed * std::sin(prev.theta), prev.z,
                        prev.theta + speed * curvature);
  }
  return states;
}

namespace {

void render_shell(const std::vector<ShellPoint>& shell, const ObjectState& pose,
                  const Vec3& sensor, int target_points, double sigma, std::mt19937_64& rng,
                  std::vector<Vec3>& out) {
  std::vector<Vec3> visible;
  visible.reserve(shell.size());
  const double c = std::cos(pose.theta);
  const double s = std::sin(pose.theta);
  for (const ShellPoint& sp : shell) {
    const Vec3 world = object_to_world(pose, sp.local);
    const Vec3 n = face_normal(sp.face);
    const Vec3 n_world{c * n.x - s * n.y, s * n.x + c * n.y, n.z};
    if ((sensor - world).dot(n_world) > 0.0) {
      visible.push_back(world);
    }
  }
  if (target_points > 0 && visible.size() > static_cast<std::size_t>(target_points)) {
    std::vector<std::size_t> order(visible.size());
    for (std::size_t i = 0; i < order.size(); ++i) {
      order[i] = i;
    }
    std::shuffle(order.begin(), order.end(), rng);
    order.resize(static_cast<std::size_t>(target_points));
    std::sort(order.begin(), order.end());
    std::vector<Vec3> kept;
    kept.reserve(order.size());
    for (const std::size_t i : order) {
      kept.push_back(visible[i]);
    }
    visible = std::move(kept);
  }
  if (sigma > 0.0) {
    std::normal_distribution<double> noise(0.0, sigma);
    for (Vec3& p : visible) {
      p = {p.x + noise(rng), p.y + noise(rng), p.z + noise(rng)};
    }
  }
  out.insert(out.end(), visible.begin(), visible.end());
}

}  // namespace

Tracklet generate_tracklet(const VehicleTemplate& tpl, const TrajectorySpec& traj,
                           const Vec3& sensor, std::uint64_t seed, const SceneSpec& scene) {
  if (traj.noise_sigma < 0.0) {
    throw std::invalid_argument("noise sigma must be nonnegative");
  }
  if (traj.target_points < 0) {
    throw std::invalid_argument("target point count must be nonnegative");
  }
  std::mt19937_64 rng(seed);
  const std::vector<ShellPoint> shell = sample_shell(tpl, rng);
  const std::vector<ObjectState> states = trajectory_states(traj);

  Tracklet tracklet;
  tracklet.first_box = {states.front(), tpl.size};
  tracklet.gt_states = states;
  tracklet.gt_shape.frame = Frame::object;
  tracklet.gt_shape.points.reserve(shell.size());
  for (const ShellPoint& sp : shell) {
    tracklet.gt_shape.points.push_back(sp.local);
  }

  std::vector<std::vector<ShellPoint>> clutter_shells;
  clutter_shells.reserve(scene.clutter.size());
  for (const Obstacle& obstacle : scene.clutter) {
    VehicleTemplate obstacle_tpl;
    obstacle_tpl.size = obstacle.size;
    obstacle_tpl.density = obstacle.density;
    clutter_shells.push_back(sample_shell(obstacle_tpl, rng));
  }

  std::uniform_real_distribution<double> spread(-1.0, 1.0);
  std::normal_distribution<double> noise(0.0, traj.noise_sigma);
  tracklet.frames.reserve(states.size());
  for (const ObjectState& pose : states) {
    PointCloud frame(Frame::world);
    render_shell(shell, pose, sensor, traj.target_points, traj.noise_sigma, rng, frame.points);
    for (long long g = 0; g < std::llround(scene.ground_points); ++g) {
      Vec3 p{pose.x + spread(rng) * scene.ground_extent,
             pose.y + spread(rng) * scene.ground_extent, 0.0};
      if (traj.noise_sigma > 0.0) {
        p = {p.x + noise(rng), p.y + noise(rng), p.z + noise(rng)};
      }
      frame.points.push_back(p);
    }
    for (std::size_t c = 0; c < scene.clutter.size(); ++c) {
      render_shell(clutter_shells[c], scene.clutter[c].state, sensor, 0, traj.noise_sigma, rng,
                   frame.points);
    }
    tracklet.frames.push_back(std::move(frame));
  }
  return tracklet;
}

PointCloud simulate_scan(const PointCloud& shape, const ObjectState& pose, const Vec3& sensor,
                         double angular_resolution) {
  if (angular_resolution <= 0.0) {
    throw std::invalid_argument("angular resolution must be positive");
  }
  const PointCloud world = shape.frame == Frame::object ? object_to_world(pose, shape) : shape;
  struct Best {
    double range2;
    std::size_t index;
  };
  std::map<std::pair<long long, long long>, Best> bins;
  for (std::size_t i = 0; i < world.size(); ++i) {
    const Vec3 rel = world.points[i] - sensor;
    const double az = std::atan2(rel.y, rel.x);
    const double el = std::atan2(rel.z, std::hypot(rel.x, rel.y));
    const std::pair<long long, long long> key{
        static_cast<long long>(std::floor(az / angular_resolution)),
        static_cast<long long>(std::floor(el / angular_resolution))};
    const double range2 = rel.squared_norm();
    auto it = bins.find(key);
    if (it == bins.end() || range2 < it->second.range2) {
      bins[key] = {range2, i};
    }
  }
  std::vector<std::size_t> winners;
  winners.reserve(bins.size());
  for (const auto& [key, best] : bins) {
    winners.push_back(best.index);
  }
  std::sort(winners.begin(), winners.end());
  PointCloud out(Frame::world);
  out.points.reserve(winners.size());
  for (const std::size_t i : winners) {
    out.points.push_back(world.points[i]);
  }
  return out;
}

namespace {

std::uint64_t tracklet_seed(std::uint64_t base, int index) {
  return base + 0x9E3779B97F4A7C15ULL * static_cast<std::uint64_t>(index + 1);
}

}  // namespace

std::vector<Tracklet> generate_suite(const SuiteSpec& spec) {
  if (spec.count < 1 || spec.frames_min < 2 || spec.frames_max < spec.frames_min) {
    throw std::invalid_argument("suite needs a positive count and a valid frame range");
  }
  const int frames_min = std::max(spec.frames_min, 100);  // benchmark length rule

  std::vector<Tracklet> out;
  out.reserve(spec.count);
  const int n_static = static_cast<int>(std::lround(spec.static_fraction * spec.count));
  const int n_turning = static_cast<int>(std::lround(spec.turning_fraction * spec.count));

  for (int i = 0; i < spec.count; ++i) {
    std::mt19937_64 rng(tracklet_seed(spec.seed, i));
    std::uniform_real_distribution<double> unit(0.0, 1.0);

    VehicleTemplate tpl;
    const bool truck = unit(rng) < spec.truck_fraction;
    if (truck) {
      tpl.size = {7.0 + 2.0 * unit(rng), 2.3 + 0.3 * unit(rng), 2.8 + 0.6 * unit(rng)};
    } else {
      tpl.size = {4.2 + 0.8 * unit(rng), 1.75 + 0.25 * unit(rng), 1.5 + 0.2 * unit(rng)};
    }

    TrajectorySpec traj;
    traj.frame_count = frames_min + static_cast<int>(unit(rng) * (spec.frames_max - frames_min));
    traj.noise_sigma = spec.noise_sigma;
    traj.initial = ObjectState{0.0, 0.0, 0.5 * tpl.size.height + 0.25,
                               (2.0 * unit(rng) - 1.0) * M_PI};
    if (i < n_static) {
      traj.kind = TrajectoryKind::static_pose;
      traj.speed = 0.0;
    } else if (i < n_static + n_turning) {
      traj.kind = TrajectoryKind::constant_curvature;
      traj.speed = 0.2 + 0.3 * unit(rng);
      traj.curvature = (unit(rng) < 0.5 ? -1.0 : 1.0) * (0.02 + 0.05 * unit(rng));
    } else {
      traj.kind = TrajectoryKind::constant_velocity;
      traj.speed = 0.15 + 0.35 * unit(rng);
    }

    const double distance = spec.sensor_distance_min +
                            unit(rng) * (spec.sensor_distance_max - spec.sensor_distance_min);
    const double bearing = 2.0 * M_PI * unit(rng);
    const Vec3 sensor{traj.initial.x + distance * std::cos(bearing),
                      traj.initial.y + distance * std::sin(bearing), 1.8};
    const double falloff = spec.sensor_distance_min / distance;
    traj.target_points = std::clamp(
        static_cast<int>(std::lround(spec.points_near * falloff * falloff)), spec.points_far,
        spec.points_near);

    SceneSpec scene;
    scene.ground_points = spec.ground_points;
    scene.ground_extent = spec.ground_extent;
    if (unit(rng) < spec.clutter_fraction) {
      // a pole-like obstacle ahead on the path, inside the widened search box
      const std::vector<ObjectState> preview = trajectory_states(traj);
      const std::size_t mid = preview.size() / 2;
      const ObjectState& at = preview[mid];
      const double along = 2.8 + 1.2 * unit(rng);
      Obstacle pole;
      pole.size = {0.4, 0.4, 1.6};
      pole.state = ObjectState{at.x + along * std::cos(at.theta),
                               at.y + along * std::sin(at.theta), 0.8, at.theta};
      pole.density = 120.0;
      scene.clutter.push_back(pole);
    }

    // sparse starts break the initialization rule; densify until they pass
    Tracklet tracklet;
    for (int attempt = 0; attempt < 8; ++attempt) {
      tracklet = generate_tracklet(tpl, traj, sensor, tracklet_seed(spec.seed, i) ^ 0xABCDu,
                                   scene);
      bool ok = true;
      for (std::size_t k = 0; k < 10 && k < tracklet.length(); ++k) {
        const auto count =
            points_in_box(tracklet.frames[k], tracklet.gt_states[k], tpl.size, 1.0).size();
        if (count < static_cast<std::size_t>(spec.min_initial_points)) {
          ok = false;
          break;
        }
      }
      if (ok) {
        break;
      }
      traj.target_points = traj.target_points * 3 / 2 + 8;
    }
    char name[32];
    std::snprintf(name, sizeof(name), "tracklet_%03d", i);
    tracklet.name = name;
    out.push_back(std::move(tracklet));
  }
  return out;
}

}  // namespace synth
}  // namespace sotrack
