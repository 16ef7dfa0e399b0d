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

/// Exact nearest-neighbor index over a fixed cloud (kd-tree). Queries on a
/// built index are const and safe to run concurrently. Equidistant
/// candidates resolve to the lowest point index.
class NnIndex {
 public:
  /// Throws std::invalid_argument on an empty cloud ("empty index").
  explicit NnIndex(const PointCloud& cloud);

  [[nodiscard]] std::size_t nearest(const Vec3& query) const;
  [[nodiscard]] const Vec3& point(std::size_t i) const { return points_[i]; }
  [[nodiscard]] std::size_t size() const { return points_.size(); }

 private:
  struct Node {
    double split = 0.0;
    int axis = -1;          // -1 marks a leaf
    std::uint32_t left = 0;
    std::uint32_t right = 0;
    std::uint32_t begin = 0;
    std::uint32_t end = 0;
  };

  std::uint32_t build(std::uint32_t begin, std::uint32_t end);
  void search(std::uint32_t node, const Vec3& q, double& best_d2, std::size_t& best_idx) const;

  std::vector<Vec3> points_;
  std::vector<std::uint32_t> order_;  // permutation of point indices, leaf ranges slice it
  std::vector<Node> nodes_;
};

/// One source->target correspondence. Source points stay in their original
/// frame; the candidate motion is re-applied inside the loss.
struct PointPair {
  Vec3 source;
  Vec3 target;
  bool inlier = true;
};

struct PointPairSet {
  std::vector<PointPair> pairs;
  bool ransac_degenerate = false;

  [[nodiscard]] std::size_t size() const { return pairs.size(); }
  [[nodiscard]] bool empty() const { return pairs.empty(); }
  [[nodiscard]] std::size_t inlier_count() const;
};

struct RansacParams {
  bool enabled = true;
  int min_samples = 3;
  int iterations = 100;
  double threshold = 0.1;  // meters
};

/// Registration pairing: every source point, moved by `delta` about `pivot`,
/// is matched to its nearest target point. All pairs are inliers.
/// Throws std::invalid_argument when the target is empty.
[[nodiscard]] PointPairSet associate_icp(const PointCloud& source, const PointCloud& target,
                                         const MotionDelta& delta, const ObjectState& pivot);

/// Same, with a prebuilt index over the target cloud.
[[nodiscard]] PointPairSet associate_icp(const PointCloud& source, const NnIndex& target_index,
                                         const MotionDelta& delta, const ObjectState& pivot);

/// Yaw-plus-translation rigid motion, the model class RANSAC fits.
struct RigidMotionModel {
  double yaw = 0.0;
  Vec3 translation;

  [[nodiscard]] Vec3 apply(const Vec3& p) const;
};

/// Least-squares yaw+translation fit to the selected pairs (sources mapped
/// onto targets). At least one pair required.
[[nodiscard]] RigidMotionModel fit_rigid_motion(const std::vector<PointPair>& pairs,
                                                const std::vector<std::size_t>& sample);

/// Shape-to-observation pairing. `shape` is in the object frame; it is posed
/// at `state` (equivalently: anchored at `first_state` and moved by the state
/// difference about that anchor) before the nearest-neighbor queries. Stored
/// sources are the anchored coordinates, so the shape loss can re-apply the
/// candidate state difference. RANSAC then fits a 4-DOF rigid motion to the
/// raw pairs and keeps only pairs within the inlier threshold; with fewer
/// than min_samples consistent pairs, all pairs stay inliers and the set is
/// flagged degenerate.
[[nodiscard]] PointPairSet associate_shape_ransac(const PointCloud& shape,
                                                  const NnIndex& observed_index,
                                                  const ObjectState& state,
                                                  const ObjectState& first_state,
                                                  const RansacParams& params,
                                                  std::mt19937_64& rng);

[[nodiscard]] PointPairSet associate_shape_ransac(const PointCloud& shape,
                                                  const PointCloud& observed,
                                                  const ObjectState& state,
                                                  const ObjectState& first_state,
                                                  const RansacParams& params,
                                                  std::mt19937_64& rng);

}  // namespace sotrack
