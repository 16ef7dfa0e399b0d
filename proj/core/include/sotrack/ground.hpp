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

#include <optional>

#include "sotrack/types.hpp"

namespace sotrack {

/// Plane n . p + d = 0 with a unit, upward-facing normal.
struct GroundModel {
  Vec3 normal{0.0, 0.0, 1.0};
  double d = 0.0;

  [[nodiscard]] double height_above(const Vec3& p) const { return normal.dot(p) + d; }
};

struct GroundParams {
  double threshold = 0.2;           // inlier distance and removal height, meters
  int iterations = 3;               // refit rounds
  double seed_fraction = 0.1;       // lowest-z share used to seed the fit
  double min_inlier_fraction = 0.3; // below this the fit is not a ground plane
};

struct GroundRemovalResult {
  PointCloud cloud;                   // points above the plane by more than the threshold
  std::optional<GroundModel> model;   // empty when too few points to fit
};

/// Iterative ground-plane fit and removal: seed with the lowest-z quantile,
/// refit a least-squares plane to the inliers a fixed number of rounds, then
/// drop everything within the height threshold of the plane. Fewer than 3
/// points: the input passes through unchanged with no model.
[[nodiscard]] GroundRemovalResult remove_ground(const PointCloud& cloud,
                                                const GroundParams& params = {});

}  // namespace sotrack
