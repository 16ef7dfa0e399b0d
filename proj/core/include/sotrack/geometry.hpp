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

#include <array>

#include "sotrack/types.hpp"

namespace sotrack {

/// Rigid 4-DOF motion of a single point: rotation by delta.dtheta about the
/// vertical axis through (pivot.x, pivot.y), then translation by
/// (dx, dy, dz). The pivot heading does not enter.
[[nodiscard]] Vec3 apply_motion(const MotionDelta& delta, const Vec3& p, const ObjectState& pivot);

/// Same motion applied to a whole cloud. The input is not modified.
[[nodiscard]] PointCloud apply_motion(const MotionDelta& delta, const PointCloud& cloud,
                                      const ObjectState& pivot);

/// The motion that undoes `delta`, valid about any pivot.
[[nodiscard]] MotionDelta inverse_motion(const MotionDelta& delta);

/// Componentwise state update with heading wrap.
[[nodiscard]] ObjectState compose_state(const ObjectState& prev, const MotionDelta& delta);

/// a - b as a motion, heading difference wrapped.
[[nodiscard]] MotionDelta state_difference(const ObjectState& a, const ObjectState& b);

/// Object-local point -> world point for an object posed at `state`.
[[nodiscard]] Vec3 object_to_world(const ObjectState& state, const Vec3& p);
[[nodiscard]] PointCloud object_to_world(const ObjectState& state, const PointCloud& cloud);

/// World point -> object-local point for an object posed at `state`.
[[nodiscard]] Vec3 world_to_object(const ObjectState& state, const Vec3& p);
[[nodiscard]] PointCloud world_to_object(const ObjectState& state, const PointCloud& cloud);

/// Membership test against the yaw-oriented cuboid centered at `state` with
/// dimensions gamma * size. Boundaries are closed: points exactly on a face
/// count as inside.
[[nodiscard]] bool point_in_box(const Vec3& p, const ObjectState& state, const BoxSize& size,
                                double gamma = 1.0);

/// Subset of `cloud` inside the scaled box. May be empty.
[[nodiscard]] PointCloud points_in_box(const PointCloud& cloud, const ObjectState& state,
                                       const BoxSize& size, double gamma = 1.0);

/// Bird's-eye-view footprint corners, counterclockwise.
[[nodiscard]] std::array<std::array<double, 2>, 4> bev_corners(const BoundingBox& box);

/// Intersection area of two convex polygons (Sutherland-Hodgman clipping),
/// exact for rectangles.
[[nodiscard]] double convex_intersection_area(const std::array<std::array<double, 2>, 4>& subject,
                                              const std::array<std::array<double, 2>, 4>& clip);

/// 3D IoU of two yaw-oriented boxes: BEV polygon intersection times vertical
/// overlap, over the union volume. Disjoint boxes give 0.
[[nodiscard]] double box_iou(const BoundingBox& a, const BoundingBox& b);

}  // namespace sotrack
