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

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace sotrack {

/// Wrap an angle to (-pi, pi].
inline double wrap_angle(double a) {
  a = std::fmod(a + M_PI, 2.0 * M_PI);
  if (a <= 0.0) {
    a += 2.0 * M_PI;
  }
  return a - M_PI;
}

struct Vec3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  constexpr Vec3() = default;
  constexpr Vec3(double x, double y, double z) : x(x), y(y), z(z) {}

  [[nodiscard]] constexpr Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
  [[nodiscard]] constexpr Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
  [[nodiscard]] constexpr Vec3 operator*(double k) const { return {x * k, y * k, z * k}; }
  [[nodiscard]] constexpr double dot(const Vec3& o) const { return x * o.x + y * o.y + z * o.z; }
  [[nodiscard]] constexpr double squared_norm() const { return x * x + y * y + z * z; }
  [[nodiscard]] double norm() const { return std::sqrt(squared_norm()); }
  [[nodiscard]] constexpr bool operator==(const Vec3& o) const = default;
};

[[nodiscard]] inline double squared_distance(const Vec3& a, const Vec3& b) {
  const double dx = a.x - b.x;
  const double dy = a.y - b.y;
  const double dz = a.z - b.z;
  return dx * dx + dy * dy + dz * dz;
}

/// 4-DOF pose of an object center: position plus heading about +z.
/// Roll and pitch are identically zero. theta is kept in (-pi, pi].
struct ObjectState {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
  double theta = 0.0;

  ObjectState() = default;
  ObjectState(double x, double y, double z, double theta)
      : x(x), y(y), z(z), theta(wrap_angle(theta)) {}

  [[nodiscard]] Vec3 position() const { return {x, y, z}; }
  [[nodiscard]] bool operator==(const ObjectState& o) const = default;
};

/// Frame-to-frame motion: translation plus heading change, dtheta in (-pi, pi].
struct MotionDelta {
  double dx = 0.0;
  double dy = 0.0;
  double dz = 0.0;
  double dtheta = 0.0;

  MotionDelta() = default;
  MotionDelta(double dx, double dy, double dz, double dtheta)
      : dx(dx), dy(dy), dz(dz), dtheta(wrap_angle(dtheta)) {}

  [[nodiscard]] bool operator==(const MotionDelta& o) const = default;
};

/// Cuboid dimensions. Fixed over a whole tracklet; rigid objects only.
struct BoxSize {
  double length = 0.0;
  double width = 0.0;
  double height = 0.0;

  [[nodiscard]] double volume() const { return length * width * height; }
  [[nodiscard]] bool valid() const { return length > 0.0 && width > 0.0 && height > 0.0; }
  [[nodiscard]] bool operator==(const BoxSize& o) const = default;
};

/// Yaw-oriented cuboid: the length axis is aligned with the heading.
struct BoundingBox {
  ObjectState state;
  BoxSize size;
};

enum class Frame {
  world,   ///< sensor/world coordinates
  object,  ///< object-local coordinates, de-posed by the first-frame state
};

struct PointCloud {
  std::vector<Vec3> points;
  Frame frame = Frame::world;

  PointCloud() = default;
  explicit PointCloud(Frame f) : frame(f) {}
  PointCloud(std::vector<Vec3> pts, Frame f) : points(std::move(pts)), frame(f) {}

  [[nodiscard]] std::size_t size() const { return points.size(); }
  [[nodiscard]] bool empty() const { return points.empty(); }
};

/// One object's frame sequence plus its first-frame box. Ground truth per
/// frame and a reference shape are optional (present for synthetic data).
struct Tracklet {
  std::string name;
  std::vector<PointCloud> frames;       // world frame
  BoundingBox first_box;
  std::vector<ObjectState> gt_states;   // empty, or one per frame
  PointCloud gt_shape{Frame::object};   // may be empty

  [[nodiscard]] std::size_t length() const { return frames.size(); }
  [[nodiscard]] bool has_gt_states() const { return !gt_states.empty(); }

  /// Throws std::invalid_argument when the structural invariants are broken.
  void validate() const {
    if (frames.size() < 2) {
      throw std::invalid_argument("tracklet needs at least 2 frames");
    }
    if (!first_box.size.valid()) {
      throw std::invalid_argument("tracklet first box has non-positive size");
    }
    if (!gt_states.empty() && gt_states.size() != frames.size()) {
      throw std::invalid_argument("tracklet gt state count does not match frame count");
    }
  }
};

}  // namespace sotrack
