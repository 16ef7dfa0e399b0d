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

#include "sotrack/tracker.hpp"

#include <stdexcept>

#include "sotrack/geometry.hpp"

namespace sotrack {

PointCloud overlay_shape(const PointCloud& object_points, const ObjectState& state,
                         const PointCloud& shape, int frame_index, const ObjectState& first_state,
                         const TrackerConfig& cfg) {
  (void)first_state;  // the object frame is anchored at the first state by construction
  if (cfg.keyframe_interval <= 0 || frame_index % cfg.keyframe_interval != 0) {
    return shape;
  }
  PointCloud out = shape;
  const PointCloud local = world_to_object(state, object_points);
  out.points.insert(out.points.end(), local.points.begin(), local.points.end());
  return out;
}

PointCloud build_subshape(const ObjectHistory& history) {
  PointCloud out(Frame::world);
  if (history.clouds.empty()) {
    return out;
  }
  const ObjectState& anchor = history.states.back();
  for (std::size_t i = 0; i + 1 < history.clouds.size(); ++i) {
    const MotionDelta shift = state_difference(anchor, history.states[i]);
    const PointCloud moved = apply_motion(shift, history.clouds[i], history.states[i]);
    out.points.insert(out.points.end(), moved.points.begin(), moved.points.end());
  }
  const PointCloud& last = history.clouds.back();
  out.points.insert(out.points.end(), last.points.begin(), last.points.end());
  return out;
}

MotionDelta update_prior(const MotionDelta& prior, const MotionDelta& motion, double alpha) {
  return {alpha * prior.dx + (1.0 - alpha) * motion.dx,
          alpha * prior.dy + (1.0 - alpha) * motion.dy,
          alpha * prior.dz + (1.0 - alpha) * motion.dz,
          alpha * prior.dtheta + (1.0 - alpha) * motion.dtheta};
}

TrackerSession::TrackerSession(const BoundingBox& first_box, const TrackerConfig& cfg,
                               const SolverConfig& solver, const LossWeights& weights,
                               const RansacParams& ransac, const GroundParams& ground)
    : cfg_(cfg),
      solver_(solver),
      weights_(weights),
      ransac_(ransac),
      ground_(ground),
      first_state_(first_box.state),
      size_(first_box.size),
      rng_(cfg.seed),
      prev_state_(first_box.state) {
  if (!size_.valid()) {
    throw std::invalid_argument("first box has non-positive size");
  }
}

PointCloud TrackerSession::preprocess(const PointCloud& raw, bool& no_model) const {
  if (!cfg_.ground_removal) {
    no_model = false;
    return raw;
  }
  GroundRemovalResult r = remove_ground(raw, ground_);
  no_model = !r.model.has_value();
  return std::move(r.cloud);
}

void TrackerSession::initialize(const PointCloud& first_frame) {
  if (frame_index_ != 0) {
    throw std::logic_error("tracker already initialized");
  }
  bool no_model = false;
  const PointCloud frame = preprocess(first_frame, no_model);
  const PointCloud first_object = points_in_box(frame, first_state_, size_, 1.0);
  if (first_object.empty()) {
    throw std::invalid_argument("untrackable initialization: first frame has no box points");
  }
  shape_ = world_to_object(first_state_, first_object);
  first_shape_ = shape_;
  result_.shape = shape_;
  history_.clouds.push_back(first_object);
  history_.states.push_back(first_state_);
  frame_index_ = 1;
}

ObjectState TrackerSession::step(const PointCloud& raw_frame) {
  if (frame_index_ == 0) {
    throw std::logic_error("tracker not initialized");
  }
  bool no_model = false;
  const PointCloud frame = preprocess(raw_frame, no_model);
  const std::size_t k = ++frame_index_;

  const bool second = (k == 2);
  const double gamma = second ? cfg_.gamma_first : cfg_.gamma_in;
  const MotionDelta frame_prior = second ? MotionDelta{} : prior_;
  const PointCloud subshape = build_subshape(history_);
  const PointCloud& term_shape =
      cfg_.shape_mode == ShapeMode::first_frame ? first_shape_ : shape_;

  const FrameEstimateResult est =
      frame_estimate(frame, subshape, frame_prior, prev_state_, size_, first_state_, term_shape,
                     gamma, weights_, solver_, ransac_, rng_);

  const PointCloud object_points = points_in_box(frame, est.state, size_, cfg_.gamma_aft);
  if (cfg_.keyframe_interval > 0 && k % static_cast<std::size_t>(cfg_.keyframe_interval) == 0) {
    shape_ = overlay_shape(object_points, est.state, shape_, static_cast<int>(k), first_state_,
                           cfg_);
    result_.shape = shape_;
  }

  const MotionDelta motion = state_difference(est.state, prev_state_);
  prior_ = second ? motion : update_prior(prior_, motion, cfg_.alpha);

  history_.clouds.push_back(object_points);
  history_.states.push_back(est.state);
  const std::size_t keep = static_cast<std::size_t>(std::max(cfg_.subshape_window, 0)) + 1;
  while (history_.clouds.size() > keep) {
    history_.clouds.erase(history_.clouds.begin());
    history_.states.erase(history_.states.begin());
  }

  FrameDiagnostics diag;
  diag.loss = est.loss;
  diag.terms = est.terms;
  diag.observation_count = est.observation_count;
  diag.object_count = object_points.size();
  diag.outer_iterations = est.outer_iterations;
  diag.fallback = est.fallback;
  diag.ransac_degenerate = est.ransac_degenerate;
  diag.no_ground_model = no_model;
  result_.diagnostics.push_back(diag);
  result_.states.push_back(est.state);
  prev_state_ = est.state;
  return est.state;
}

TrackResult track(const Tracklet& tracklet, const TrackerConfig& cfg, const SolverConfig& solver,
                  const LossWeights& weights, const RansacParams& ransac,
                  const GroundParams& ground) {
  tracklet.validate();
  TrackerSession session(tracklet.first_box, cfg, solver, weights, ransac, ground);
  session.initialize(tracklet.frames[0]);
  for (std::size_t k = 1; k < tracklet.length(); ++k) {
    session.step(tracklet.frames[k]);
  }
  return session.take_result();
}

}  // namespace sotrack
