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

#include "sotrack/association.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "sotrack/geometry.hpp"

namespace sotrack {

namespace {
constexpr std::uint32_t kLeafSize = 8;
}

NnIndex::NnIndex(const PointCloud& cloud) : points_(cloud.points) {
  if (points_.empty()) {
    throw std::invalid_argument("empty index");
  }
  order_.resize(points_.size());
  for (std::uint32_t i = 0; i < order_.size(); ++i) {
    order_[i] = i;
  }
  nodes_.reserve(2 * points_.size() / kLeafSize + 2);
  build(0, static_cast<std::uint32_t>(points_.size()));
}

std::uint32_t NnIndex::build(std::uint32_t begin, std::uint32_t end) {
  const std::uint32_t id = static_cast<std::uint32_t>(nodes_.size());
  nodes_.push_back({});
  if (end - begin <= kLeafSize) {
    nodes_[id].begin = begin;
    nodes_[id].end = end;
    return id;
  }
  // split the widest extent
  Vec3 lo = points_[order_[begin]];
  Vec3 hi = lo;
  for (std::uint32_t i = begin + 1; i < end; ++i) {
    const Vec3& p = points_[order_[i]];
    lo = {std::min(lo.x, p.x), std::min(lo.y, p.y), std::min(lo.z, p.z)};
    hi = {std::max(hi.x, p.x), std::max(hi.y, p.y), std::max(hi.z, p.z)};
  }
  const double ex = hi.x - lo.x;
  const double ey = hi.y - lo.y;
  const double ez = hi.z - lo.z;
  int axis = 0;
  if (ey >= ex && ey >= ez) {
    axis = 1;
  } else if (ez >= ex && ez >= ey) {
    axis = 2;
  }
  auto coord = [this, axis](std::uint32_t i) {
    const Vec3& p = points_[i];
    return axis == 0 ? p.x : (axis == 1 ? p.y : p.z);
  };
  const std::uint32_t mid = begin + (end - begin) / 2;
  std::nth_element(order_.begin() + begin, order_.begin() + mid, order_.begin() + end,
                   [&](std::uint32_t a, std::uint32_t b) { return coord(a) < coord(b); });
  nodes_[id].axis = axis;
  nodes_[id].split = coord(order_[mid]);
  const std::uint32_t left = build(begin, mid);
  const std::uint32_t right = build(mid, end);
  nodes_[id].left = left;
  nodes_[id].right = right;
  return id;
}

void NnIndex::search(std::uint32_t node, const Vec3& q, double& best_d2,
                     std::size_t& best_idx) const {
  const Node& n = nodes_[node];
  if (n.axis < 0) {
    for (std::uint32_t i = n.begin; i < n.end; ++i) {
      const std::uint32_t idx = order_[i];
      const double d2 = squared_distance(q, points_[idx]);
      if (d2 < best_d2 || (d2 == best_d2 && idx < best_idx)) {
        best_d2 = d2;
        best_idx = idx;
      }
    }
    return;
  }
  const double qc = n.axis == 0 ? q.x : (n.axis == 1 ? q.y : q.z);
  const double diff = qc - n.split;
  const std::uint32_t near = diff < 0.0 ? n.left : n.right;
  const std::uint32_t far = diff < 0.0 ? n.right : n.left;
  search(near, q, best_d2, best_idx);
  // <= keeps equidistant candidates reachable for the index tie-break
  if (diff * diff <= best_d2) {
    search(far, q, best_d2, best_idx);
  }
}

std::size_t NnIndex::nearest(const Vec3& query) const {
  double best_d2 = std::numeric_limits<double>::infinity();
  std::size_t best_idx = points_.size();
  search(0, query, best_d2, best_idx);
  return best_idx;
}

std::size_t PointPairSet::inlier_count() const {
  return static_cast<std::size_t>(
      std::count_if(pairs.begin(), pairs.end(), [](const PointPair& p) { return p.inlier; }));
}

PointPairSet associate_icp(const PointCloud& source, const PointCloud& target,
                           const MotionDelta& delta, const ObjectState& pivot) {
  const NnIndex index(target);  // throws on empty target
  return associate_icp(source, index, delta, pivot);
}

PointPairSet associate_icp(const PointCloud& source, const NnIndex& target_index,
                           const MotionDelta& delta, const ObjectState& pivot) {
  PointPairSet out;
  out.pairs.reserve(source.size());
  for (const Vec3& p : source.points) {
    const Vec3 moved = apply_motion(delta, p, pivot);
    const std::size_t j = target_index.nearest(moved);
    out.pairs.push_back({p, target_index.point(j), true});
  }
  return out;
}

Vec3 RigidMotionModel::apply(const Vec3& p) const {
  const double c = std::cos(yaw);
  const double s = std::sin(yaw);
  return {c * p.x - s * p.y + translation.x, s * p.x + c * p.y + translation.y,
          p.z + translation.z};
}

RigidMotionModel fit_rigid_motion(const std::vector<PointPair>& pairs,
                                  const std::vector<std::size_t>& sample) {
  if (sample.empty()) {
    throw std::invalid_argument("rigid motion fit needs at least one pair");
  }
  Vec3 src_mean, dst_mean;
  for (const std::size_t i : sample) {
    src_mean = src_mean + pairs[i].source;
    dst_mean = dst_mean + pairs[i].target;
  }
  const double inv_n = 1.0 / static_cast<double>(sample.size());
  src_mean = src_mean * inv_n;
  dst_mean = dst_mean * inv_n;

  // planar Procrustes on the centered xy coordinates
  double sxx = 0.0, sxy = 0.0, syx = 0.0, syy = 0.0;
  for (const std::size_t i : sample) {
    const double px = pairs[i].source.x - src_mean.x;
    const double py = pairs[i].source.y - src_mean.y;
    const double qx = pairs[i].target.x - dst_mean.x;
    const double qy = pairs[i].target.y - dst_mean.y;
    sxx += px * qx;
    sxy += px * qy;
    syx += py * qx;
    syy += py * qy;
  }
  RigidMotionModel model;
  model.yaw = std::atan2(sxy - syx, sxx + syy);
  const double c = std::cos(model.yaw);
  const double s = std::sin(model.yaw);
  model.translation = {dst_mean.x - (c * src_mean.x - s * src_mean.y),
                       dst_mean.y - (s * src_mean.x + c * src_mean.y),
                       dst_mean.z - src_mean.z};
  return model;
}

namespace {

std::size_t mark_inliers(std::vector<PointPair>& pairs, const RigidMotionModel& model,
                         double threshold) {
  const double thresh2 = threshold * threshold;
  std::size_t count = 0;
  for (PointPair& pair : pairs) {
    pair.inlier = squared_distance(model.apply(pair.source), pair.target) <= thresh2;
    count += pair.inlier ? 1 : 0;
  }
  return count;
}

}  // namespace

PointPairSet associate_shape_ransac(const PointCloud& shape, const NnIndex& observed_index,
                                    const ObjectState& state, const ObjectState& first_state,
                                    const RansacParams& params, std::mt19937_64& rng) {
  PointPairSet out;
  if (shape.empty()) {
    return out;
  }
  const MotionDelta to_current = state_difference(state, first_state);
  out.pairs.reserve(shape.size());
  for (const Vec3& local : shape.points) {
    const Vec3 anchored = object_to_world(first_state, local);
    const Vec3 predicted = apply_motion(to_current, anchored, first_state);
    const std::size_t j = observed_index.nearest(predicted);
    out.pairs.push_back({anchored, observed_index.point(j), true});
  }
  if (!params.enabled) {
    return out;
  }
  const std::size_t n = out.pairs.size();
  const auto min_samples = static_cast<std::size_t>(std::max(params.min_samples, 1));
  if (n < min_samples) {
    out.ransac_degenerate = true;
    return out;
  }

  // Fit against the residual motion left after moving sources to the current
  // state: conditioning is better and the threshold is easier to interpret.
  std::vector<PointPair> working = out.pairs;
  for (PointPair& pair : working) {
    pair.source = apply_motion(to_current, pair.source, first_state);
  }

  std::uniform_int_distribution<std::size_t> pick(0, n - 1);
  std::vector<std::size_t> sample(min_samples);
  std::vector<PointPair> scratch = working;
  RigidMotionModel best_model;
  std::size_t best_inliers = 0;
  bool have_model = false;
  for (int it = 0; it < params.iterations; ++it) {
    for (std::size_t& s : sample) {
      s = pick(rng);
    }
    RigidMotionModel model;
    try {
      model = fit_rigid_motion(working, sample);
    } catch (const std::invalid_argument&) {
      continue;
    }
    const std::size_t count = mark_inliers(scratch, model, params.threshold);
    if (count > best_inliers) {
      best_inliers = count;
      best_model = model;
      have_model = true;
    }
  }
  if (!have_model || best_inliers < min_samples) {
    for (PointPair& pair : out.pairs) {
      pair.inlier = true;
    }
    out.ransac_degenerate = true;
    return out;
  }

  // refine once on the consensus set
  mark_inliers(working, best_model, params.threshold);
  std::vector<std::size_t> consensus;
  consensus.reserve(best_inliers);
  for (std::size_t i = 0; i < n; ++i) {
    if (working[i].inlier) {
      consensus.push_back(i);
    }
  }
  const RigidMotionModel refined = fit_rigid_motion(working, consensus);
  const std::size_t refined_count = mark_inliers(working, refined, params.threshold);
  if (refined_count < min_samples) {
    mark_inliers(working, best_model, params.threshold);
  }
  for (std::size_t i = 0; i < n; ++i) {
    out.pairs[i].inlier = working[i].inlier;
  }
  return out;
}

PointPairSet associate_shape_ransac(const PointCloud& shape, const PointCloud& observed,
                                    const ObjectState& state, const ObjectState& first_state,
                                    const RansacParams& params, std::mt19937_64& rng) {
  if (shape.empty()) {
    return {};
  }
  const NnIndex index(observed);
  return associate_shape_ransac(shape, index, state, first_state, params, rng);
}

}  // namespace sotrack
