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

#include "sotrack/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace sotrack {

Vec3 apply_motion(const MotionDelta& delta, const Vec3& p, const ObjectState& pivot) {
  const double c = std::cos(delta.dtheta);
  const double s = std::sin(delta.dtheta);
  const double ax = p.x - pivot.x;
  const double ay = p.y - pivot.y;
  return {pivot.x + delta.dx + c * ax - s * ay,
          pivot.y + delta.dy + s * ax + c * ay,
          p.z + delta.dz};
}

PointCloud apply_motion(const MotionDelta& delta, const PointCloud& cloud,
                        const ObjectState& pivot) {
  PointCloud out(cloud.frame);
  out.points.reserve(cloud.size());
  const double c = std::cos(delta.dtheta);
  const double s = std::sin(delta.dtheta);
  for (const Vec3& p : cloud.points) {
    const double ax = p.x - pivot.x;
    const double ay = p.y - pivot.y;
    out.points.push_back({pivot.x + delta.dx + c * ax - s * ay,
                          pivot.y + delta.dy + s * ax + c * ay,
                          p.z + delta.dz});
  }
  return out;
}

MotionDelta inverse_motion(const MotionDelta& delta) {
  const double c = std::cos(delta.dtheta);
  const double s = std::sin(delta.dtheta);
  // Undo the rotation first, so the translation has to be brought back
  // through the inverse rotation.
  return {-(c * delta.dx + s * delta.dy),
          -(-s * delta.dx + c * delta.dy),
          -delta.dz,
          -delta.dtheta};
}

ObjectState compose_state(const ObjectState& prev, const MotionDelta& delta) {
  return {prev.x + delta.dx, prev.y + delta.dy, prev.z + delta.dz, prev.theta + delta.dtheta};
}

MotionDelta state_difference(const ObjectState& a, const ObjectState& b) {
  return {a.x - b.x, a.y - b.y, a.z - b.z, a.theta - b.theta};
}

Vec3 object_to_world(const ObjectState& state, const Vec3& p) {
  const double c = std::cos(state.theta);
  const double s = std::sin(state.theta);
  return {state.x + c * p.x - s * p.y, state.y + s * p.x + c * p.y, state.z + p.z};
}

PointCloud object_to_world(const ObjectState& state, const PointCloud& cloud) {
  PointCloud out(Frame::world);
  out.points.reserve(cloud.size());
  for (const Vec3& p : cloud.points) {
    out.points.push_back(object_to_world(state, p));
  }
  return out;
}

Vec3 world_to_object(const ObjectState& state, const Vec3& p) {
  const double c = std::cos(state.theta);
  const double s = std::sin(state.theta);
  const double ax = p.x - state.x;
  const double ay = p.y - state.y;
  return {c * ax + s * ay, -s * ax + c * ay, p.z - state.z};
}

PointCloud world_to_object(const ObjectState& state, const PointCloud& cloud) {
  PointCloud out(Frame::object);
  out.points.reserve(cloud.size());
  for (const Vec3& p : cloud.points) {
    out.points.push_back(world_to_object(state, p));
  }
  return out;
}

bool point_in_box(const Vec3& p, const ObjectState& state, const BoxSize& size, double gamma) {
  const Vec3 local = world_to_object(state, p);
  return std::abs(local.x) <= 0.5 * gamma * size.length &&
         std::abs(local.y) <= 0.5 * gamma * size.width &&
         std::abs(local.z) <= 0.5 * gamma * size.height;
}

PointCloud points_in_box(const PointCloud& cloud, const ObjectState& state, const BoxSize& size,
                         double gamma) {
  PointCloud out(cloud.frame);
  for (const Vec3& p : cloud.points) {
    if (point_in_box(p, state, size, gamma)) {
      out.points.push_back(p);
    }
  }
  return out;
}

std::array<std::array<double, 2>, 4> bev_corners(const BoundingBox& box) {
  const double c = std::cos(box.state.theta);
  const double s = std::sin(box.state.theta);
  const double hl = 0.5 * box.size.length;
  const double hw = 0.5 * box.size.width;
  // counterclockwise in the local frame
  const std::array<std::array<double, 2>, 4> local = {{{hl, hw}, {-hl, hw}, {-hl, -hw}, {hl, -hw}}};
  std::array<std::array<double, 2>, 4> out{};
  for (int i = 0; i < 4; ++i) {
    out[i] = {box.state.x + c * local[i][0] - s * local[i][1],
              box.state.y + s * local[i][0] + c * local[i][1]};
  }
  return out;
}

namespace {

double polygon_area(const std::vector<std::array<double, 2>>& poly) {
  if (poly.size() < 3) {
    return 0.0;
  }
  double twice = 0.0;
  for (std::size_t i = 0; i < poly.size(); ++i) {
    const auto& a = poly[i];
    const auto& b = poly[(i + 1) % poly.size()];
    twice += a[0] * b[1] - b[0] * a[1];
  }
  return 0.5 * std::abs(twice);
}

}  // namespace

double convex_intersection_area(const std::array<std::array<double, 2>, 4>& subject,
                                const std::array<std::array<double, 2>, 4>& clip) {
  // Tolerance keeps shared edges of touching rectangles inside.
  constexpr double kEdgeEps = 1e-12;
  std::vector<std::array<double, 2>> poly(subject.begin(), subject.end());
  for (int e = 0; e < 4 && !poly.empty(); ++e) {
    const auto& a = clip[e];
    const auto& b = clip[(e + 1) % 4];
    const double ex = b[0] - a[0];
    const double ey = b[1] - a[1];
    auto side = [&](const std::array<double, 2>& p) {
      return ex * (p[1] - a[1]) - ey * (p[0] - a[0]);
    };
    std::vector<std::array<double, 2>> clipped;
    clipped.reserve(poly.size() + 4);
    for (std::size_t i = 0; i < poly.size(); ++i) {
      const auto& cur = poly[i];
      const auto& nxt = poly[(i + 1) % poly.size()];
      const double sc = side(cur);
      const double sn = side(nxt);
      if (sc >= -kEdgeEps) {
        clipped.push_back(cur);
      }
      if ((sc >= -kEdgeEps) != (sn >= -kEdgeEps)) {
        const double t = sc / (sc - sn);
        clipped.push_back({cur[0] + t * (nxt[0] - cur[0]), cur[1] + t * (nxt[1] - cur[1])});
      }
    }
    poly = std::move(clipped);
  }
  return polygon_area(poly);
}

double box_iou(const BoundingBox& a, const BoundingBox& b) {
  const double za0 = a.state.z - 0.5 * a.size.height;
  const double za1 = a.state.z + 0.5 * a.size.height;
  const double zb0 = b.state.z - 0.5 * b.size.height;
  const double zb1 = b.state.z + 0.5 * b.size.height;
  const double dz = std::min(za1, zb1) - std::max(za0, zb0);
  if (dz <= 0.0) {
    return 0.0;
  }
  double bev = convex_intersection_area(bev_corners(a), bev_corners(b));
  bev = std::min(bev, std::min(a.size.length * a.size.width, b.size.length * b.size.width));
  const double inter = bev * dz;
  const double uni = a.size.volume() + b.size.volume() - inter;
  if (uni <= 0.0) {
    return 0.0;
  }
  return std::clamp(inter / uni, 0.0, 1.0);
}

}  // namespace sotrack
