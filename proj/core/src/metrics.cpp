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

#include "sotrack/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>
#include <tuple>

#include "sotrack/association.hpp"
#include "sotrack/geometry.hpp"

namespace sotrack {

namespace {
// sparsity thresholds between the three difficulty bands, points per frame
constexpr double kHardBelow = 38.2;
constexpr double kMediumBelow = 808.3;
}  // namespace

const char* to_string(Difficulty d) {
  switch (d) {
    case Difficulty::easy:
      return "easy";
    case Difficulty::medium:
      return "medium";
    case Difficulty::hard:
      return "hard";
  }
  return "medium";
}

std::vector<double> iou_curve(const std::vector<ObjectState>& estimated,
                              const BoundingBox& first_box,
                              const std::vector<ObjectState>& gt_states, const BoxSize& gt_size) {
  if (estimated.size() + 1 != gt_states.size()) {
    throw std::invalid_argument("estimate count must be ground-truth count minus one");
  }
  std::vector<double> out;
  out.reserve(gt_states.size());
  out.push_back(1.0);  // the given box
  for (std::size_t k = 0; k < estimated.size(); ++k) {
    out.push_back(box_iou({estimated[k], first_box.size}, {gt_states[k + 1], gt_size}));
  }
  return out;
}

double accuracy(const std::vector<std::vector<double>>& iou_curves) {
  std::size_t frames = 0;
  double sum = 0.0;
  for (const auto& curve : iou_curves) {
    frames += curve.size();
    for (const double v : curve) {
      sum += v;
    }
  }
  if (frames == 0) {
    throw std::invalid_argument("no frames to evaluate");
  }
  return sum / static_cast<double>(frames);
}

std::size_t tracking_length(const std::vector<double>& iou_curve, double t) {
  for (std::size_t i = 0; i < iou_curve.size(); ++i) {
    if (iou_curve[i] < t) {
      return i;  // frames before the first failure
    }
  }
  return iou_curve.size();
}

RobustnessResult robustness(const std::vector<std::vector<double>>& iou_curves) {
  std::size_t total = 0;
  for (const auto& curve : iou_curves) {
    total += curve.size();
  }
  if (total == 0) {
    throw std::invalid_argument("no frames to evaluate");
  }
  RobustnessResult out;
  out.curve.reserve(21);
  double sum = 0.0;
  for (int i = 0; i <= 20; ++i) {
    const double t = 0.05 * i;
    std::size_t tracked = 0;
    for (const auto& curve : iou_curves) {
      tracked += tracking_length(curve, t);
    }
    const double frac = static_cast<double>(tracked) / static_cast<double>(total);
    out.curve.emplace_back(t, frac);
    sum += frac;
  }
  out.value = sum / 21.0;
  return out;
}

PointCloud voxel_downsample(const PointCloud& cloud, double resolution) {
  if (resolution <= 0.0 || cloud.empty()) {
    return cloud;
  }
  struct Accum {
    Vec3 sum;
    std::size_t count = 0;
  };
  std::map<std::tuple<long long, long long, long long>, Accum> voxels;
  const double inv = 1.0 / resolution;
  for (const Vec3& p : cloud.points) {
    const auto key = std::make_tuple(static_cast<long long>(std::floor(p.x * inv)),
                                     static_cast<long long>(std::floor(p.y * inv)),
                                     static_cast<long long>(std::floor(p.z * inv)));
    Accum& a = voxels[key];
    a.sum = a.sum + p;
    a.count += 1;
  }
  PointCloud out(cloud.frame);
  out.points.reserve(voxels.size());
  for (const auto& [key, a] : voxels) {
    out.points.push_back(a.sum * (1.0 / static_cast<double>(a.count)));
  }
  return out;
}

double chamfer(const PointCloud& shape, const PointCloud& gt_shape, double resolution) {
  if (shape.empty() || gt_shape.empty()) {
    throw std::invalid_argument("empty shape");
  }
  const PointCloud a = voxel_downsample(shape, resolution);
  const PointCloud b = voxel_downsample(gt_shape, resolution);
  const NnIndex ia(a);
  const NnIndex ib(b);
  double ab = 0.0;
  for (const Vec3& p : a.points) {
    ab += std::sqrt(squared_distance(p, b.points[ib.nearest(p)]));
  }
  double ba = 0.0;
  for (const Vec3& p : b.points) {
    ba += std::sqrt(squared_distance(p, a.points[ia.nearest(p)]));
  }
  return ab / static_cast<double>(a.size()) + ba / static_cast<double>(b.size());
}

double mean_initial_points(const Tracklet& tracklet, int frames) {
  const std::size_t n = std::min<std::size_t>(tracklet.length(), static_cast<std::size_t>(frames));
  if (n == 0) {
    return 0.0;
  }
  double sum = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const ObjectState& box_state =
        tracklet.has_gt_states() ? tracklet.gt_states[k] : tracklet.first_box.state;
    sum += static_cast<double>(
        points_in_box(tracklet.frames[k], box_state, tracklet.first_box.size, 1.0).size());
  }
  return sum / static_cast<double>(n);
}

Difficulty split_from_count(double mean_points) {
  if (mean_points < kHardBelow) {
    return Difficulty::hard;
  }
  if (mean_points <= kMediumBelow) {
    return Difficulty::medium;
  }
  return Difficulty::easy;
}

Difficulty split_by_difficulty(const Tracklet& tracklet) {
  return split_from_count(mean_initial_points(tracklet));
}

namespace {

SplitReport summarize(const std::string& label, const std::vector<TrackletEvalInput>& inputs,
                      std::vector<std::pair<double, double>>* curve_out) {
  SplitReport report;
  report.label = label;
  std::vector<std::vector<double>> curves;
  double cd_sum = 0.0;
  std::size_t cd_count = 0;
  for (const TrackletEvalInput& in : inputs) {
    curves.push_back(in.ious);
    report.tracklets += 1;
    report.frames += in.ious.size();
    if (in.shape_cd >= 0.0) {
      cd_sum += in.shape_cd;
      cd_count += 1;
    }
  }
  if (report.frames == 0) {
    return report;
  }
  report.acc = accuracy(curves);
  const RobustnessResult rob = robustness(curves);
  report.rob = rob.value;
  report.shape_cd = cd_count > 0 ? cd_sum / static_cast<double>(cd_count) : 0.0;
  if (curve_out != nullptr) {
    *curve_out = rob.curve;
  }
  return report;
}

}  // namespace

EvalReport assemble_report(const std::vector<TrackletEvalInput>& inputs) {
  EvalReport report;
  report.all = summarize("all", inputs, &report.rob_curve);
  for (const Difficulty d : {Difficulty::easy, Difficulty::medium, Difficulty::hard}) {
    std::vector<TrackletEvalInput> subset;
    for (const TrackletEvalInput& in : inputs) {
      if (in.difficulty == d) {
        subset.push_back(in);
      }
    }
    report.splits.push_back(summarize(to_string(d), subset, nullptr));
  }
  for (const TrackletEvalInput& in : inputs) {
    TrackletScore score;
    score.name = in.name;
    score.difficulty = in.difficulty;
    score.frames = in.ious.size();
    score.mean_iou = in.ious.empty() ? 0.0 : accuracy({in.ious});
    score.shape_cd = in.shape_cd;
    report.per_tracklet.push_back(score);
  }
  return report;
}

}  // namespace sotrack
