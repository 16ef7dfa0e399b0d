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
#include <vector>

#include "sotrack/association.hpp"
#include "sotrack/ground.hpp"
#include "sotrack/objective.hpp"
#include "sotrack/optimizer.hpp"
#include "sotrack/types.hpp"

namespace sotrack {

/// Which shape the shape residual registers against.
enum class ShapeMode {
  aggregate,   ///< the shape grown at keyframes
  first_frame, ///< the first-frame observation only
};

struct TrackerConfig {
  double alpha = 0.5;          // motion prior moving-average factor
  double gamma_in = 1.5;       // search box scale during estimation
  double gamma_aft = 1.1;      // box scale for the post-solve object cloud
  double gamma_first = 3.0;    // widened search for the second frame
  int keyframe_interval = 5;   // shape aggregation cadence, counted from frame 1
  int subshape_window = 2;     // extra history frames overlaid on the registration source
  ShapeMode shape_mode = ShapeMode::aggregate;
  bool ground_removal = true;
  std::uint64_t seed = 0;
};

struct FrameDiagnostics {
  double loss = 0.0;
  TermValues terms;
  std::size_t observation_count = 0;  // points inside the search box
  std::size_t object_count = 0;       // points kept after the solve
  int outer_iterations = 0;
  bool fallback = false;
  bool ransac_degenerate = false;
  bool no_ground_model = false;
};

struct TrackResult {
  std::vector<ObjectState> states;          // frames 2..L
  PointCloud shape{Frame::object};          // grown at keyframes
  std::vector<FrameDiagnostics> diagnostics; // one per estimated frame
};

/// Append the frame's object points to the shape at keyframes (frame indices
/// that are multiples of the keyframe interval); other frames pass the shape
/// through unchanged. Points are carried from the world into the object
/// frame through the estimated state.
[[nodiscard]] PointCloud overlay_shape(const PointCloud& object_points, const ObjectState& state,
                                       const PointCloud& shape, int frame_index,
                                       const ObjectState& first_state, const TrackerConfig& cfg);

/// A short history of object clouds with the states they were observed at.
struct ObjectHistory {
  std::vector<PointCloud> clouds;    // world frame, oldest first
  std::vector<ObjectState> states;   // matching pose per cloud
};

/// Concatenate the history clouds re-posed into the most recent state's
/// frame. The last history entry is the previous frame; older entries pad
/// sparse observations.
[[nodiscard]] PointCloud build_subshape(const ObjectHistory& history);

/// Moving-average prior update: alpha * prior + (1 - alpha) * motion.
[[nodiscard]] MotionDelta update_prior(const MotionDelta& prior, const MotionDelta& motion,
                                       double alpha);

/// Incremental tracking over one object. Frames are fed in order and every
/// state is final as soon as step() returns, so a caller may stream frames
/// from disk or a sensor. Frame 2 starts from a zero prior with a widened
/// search box and then seeds the prior with its own motion; later frames
/// blend the prior with a moving average and grow the shape at keyframes.
class TrackerSession {
 public:
  TrackerSession(const BoundingBox& first_box, const TrackerConfig& cfg,
                 const SolverConfig& solver, const LossWeights& weights,
                 const RansacParams& ransac = {}, const GroundParams& ground = {});

  /// Consume the first frame. Throws std::invalid_argument when the given
  /// box contains no points ("untrackable initialization").
  void initialize(const PointCloud& first_frame);

  /// Estimate the next frame's state. initialize() must have run.
  ObjectState step(const PointCloud& frame);

  [[nodiscard]] std::size_t frames_processed() const { return frame_index_; }
  [[nodiscard]] const TrackResult& result() const { return result_; }
  [[nodiscard]] TrackResult take_result() { return std::move(result_); }

 private:
  PointCloud preprocess(const PointCloud& raw, bool& no_model) const;

  TrackerConfig cfg_;
  SolverConfig solver_;
  LossWeights weights_;
  RansacParams ransac_;
  GroundParams ground_;
  ObjectState first_state_;
  BoxSize size_;
  std::mt19937_64 rng_;
  PointCloud first_shape_{Frame::object};
  PointCloud shape_{Frame::object};
  ObjectHistory history_;
  ObjectState prev_state_;
  MotionDelta prior_;
  std::size_t frame_index_ = 0;  // frames consumed so far
  TrackResult result_;
};

/// Whole-tracklet convenience wrapper around TrackerSession.
/// Throws std::invalid_argument when the first frame has no points inside
/// the given box.
[[nodiscard]] TrackResult track(const Tracklet& tracklet, const TrackerConfig& cfg,
                                const SolverConfig& solver, const LossWeights& weights,
                                const RansacParams& ransac = {},
                                const GroundParams& ground = {});

}  // namespace sotrack
