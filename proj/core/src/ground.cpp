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

#include "sotrack/ground.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

namespace sotrack {

namespace {

GroundModel fit_plane(const std::vector<Vec3>& points, const std::vector<std::size_t>& inliers) {
  Eigen::Vector3d centroid = Eigen::Vector3d::Zero();
  for (const std::size_t i : inliers) {
    centroid += Eigen::Vector3d(points[i].x, points[i].y, points[i].z);
  }
  centroid /= static_cast<double>(inliers.size());

  Eigen::Matrix3d cov = Eigen::Matrix3d::Zero();
  for (const std::size_t i : inliers) {
    const Eigen::Vector3d r = Eigen::Vector3d(points[i].x, points[i].y, points[i].z) - centroid;
    cov += r * r.transpose();
  }
  const Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> solver(cov);
  Eigen::Vector3d normal = solver.eigenvectors().col(0);  // smallest eigenvalue
  if (normal.norm() < 1e-12) {
    normal = Eigen::Vector3d::UnitZ();
  }
  normal.normalize();
  if (normal.z() < 0.0) {
    normal = -normal;
  }
  GroundModel model;
  model.normal = {normal.x(), normal.y(), normal.z()};
  model.d = -normal.dot(centroid);
  return model;
}

}  // namespace

GroundRemovalResult remove_ground(const PointCloud& cloud, const GroundParams& params) {
  GroundRemovalResult result;
  result.cloud.frame = cloud.frame;
  const std::size_t n = cloud.size();
  if (n < 3) {
    result.cloud = cloud;
    return result;
  }

  std::vector<std::size_t> by_z(n);
  std::iota(by_z.begin(), by_z.end(), 0);
  std::sort(by_z.begin(), by_z.end(), [&](std::size_t a, std::size_t b) {
    const Vec3& pa = cloud.points[a];
    const Vec3& pb = cloud.points[b];
    return pa.z != pb.z ? pa.z < pb.z : a < b;
  });
  const std::size_t seed_count = std::min(
      n, std::max<std::size_t>(3, static_cast<std::size_t>(
                                      std::ceil(params.seed_fraction * static_cast<double>(n)))));
  std::vector<std::size_t> inliers(by_z.begin(), by_z.begin() + seed_count);

  GroundModel model = fit_plane(cloud.points, inliers);
  for (int it = 0; it < params.iterations; ++it) {
    inliers.clear();
    for (std::size_t i = 0; i < n; ++i) {
      if (std::abs(model.height_above(cloud.points[i])) <= params.threshold) {
        inliers.push_back(i);
      }
    }
    if (inliers.size() < 3) {
      break;  // keep the previous model
    }
    model = fit_plane(cloud.points, inliers);
  }

  // without a dominant planar support this is a surface fit, not ground
  std::size_t supporting = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (std::abs(model.height_above(cloud.points[i])) <= params.threshold) {
      ++supporting;
    }
  }
  if (static_cast<double>(supporting) <
      params.min_inlier_fraction * static_cast<double>(n)) {
    result.cloud = cloud;
    return result;
  }

  result.model = model;
  for (const Vec3& p : cloud.points) {
    if (model.height_above(p) > params.threshold) {
      result.cloud.points.push_back(p);
    }
  }
  return result;
}

}  // namespace sotrack
