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

#include <string>
#include <utility>
#include <vector>

#include "sotrack/types.hpp"

namespace sotrack {

enum class Difficulty { easy, medium, hard };

[[nodiscard]] const char* to_string(Difficulty d);

/// Per-frame overlap of the estimated track against ground truth. The first
/// frame is the given box and contributes IoU 1; estimated frames use the
/// first box's size. gt covers frames 1..L, estimates frames 2..L.
[[nodiscard]] std::vector<double> iou_curve(const std::vector<ObjectState>& estimated,
                                            const BoundingBox& first_box,
                                            const std::vector<ObjectState>& gt_states,
                                            const BoxSize& gt_size);

/// Frame-weighted mean IoU over all tracklets: the IoU sum over every frame
/// of every curve divided by the total frame count.
[[nodiscard]] double accuracy(const std::vector<std::vector<double>>& iou_curves);

/// Frames tracked before the first frame whose IoU drops below t; the frame
/// right before the failure counts as the last tracked one, and a tracklet
/// that never fails contributes its full length.
[[nodiscard]] std::size_t tracking_length(const std::vector<double>& iou_curve, double t);

struct RobustnessResult {
  double value = 0.0;                             // mean of the sampled curve
  std::vector<std::pair<double, double>> curve;   // (t, fraction tracked), t = 0, 0.05, .., 1
};

/// Sampled area under the t -> tracked-fraction curve, 21 samples at 0.05
/// spacing.
[[nodiscard]] RobustnessResult robustness(const std::vector<std::vector<double>>& iou_curves);

/// Centroid-per-voxel downsampling on a grid anchored at the origin.
[[nodiscard]] PointCloud voxel_downsample(const PointCloud& cloud, double resolution);

/// Symmetric mean nearest-neighbor distance after voxel downsampling both
/// clouds. Throws std::invalid_argument on an empty input ("empty shape").
[[nodiscard]] double chamfer(const PointCloud& shape, const PointCloud& gt_shape,
                             double resolution = 0.05);

/// Sparsity split on the mean in-box point count of the first 10 frames.
/// Boxes come from per-frame ground truth when present, else the first box.
[[nodiscard]] double mean_initial_points(const Tracklet& tracklet, int frames = 10);
[[nodiscard]] Difficulty split_by_difficulty(const Tracklet& tracklet);
[[nodiscard]] Difficulty split_from_count(double mean_points);

struct TrackletScore {
  std::string name;
  Difficulty difficulty = Difficulty::medium;
  std::size_t frames = 0;
  double mean_iou = 0.0;
  double shape_cd = -1.0;  // negative when no shape was evaluated
};

struct SplitReport {
  std::string label;
  std::size_t tracklets = 0;
  std::size_t frames = 0;
  double acc = 0.0;
  double rob = 0.0;
  double shape_cd = 0.0;  // mean over tracklets with shapes
};

struct EvalReport {
  SplitReport all;
  std::vector<SplitReport> splits;  // easy, medium, hard
  std::vector<std::pair<double, double>> rob_curve;
  std::vector<TrackletScore> per_tracklet;
};

/// Input to report assembly: one entry per tracklet, already matched to its
/// ground truth.
struct TrackletEvalInput {
  std::string name;
  std::vector<double> ious;  // frames 1..L
  Difficulty difficulty = Difficulty::medium;
  double shape_cd = -1.0;
};

[[nodiscard]] EvalReport assemble_report(const std::vector<TrackletEvalInput>& inputs);

}  // namespace sotrack
