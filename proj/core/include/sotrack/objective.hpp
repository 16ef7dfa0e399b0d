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

#include "sotrack/association.hpp"
#include "sotrack/types.hpp"

namespace sotrack {

struct LossWeights {
  double icp = 1.0;
  double shape = 1.0;
  double motion_consistency = 0.1;
  double motion_prior = 0.1;
};

/// Everything one per-frame solve needs, frozen for the duration of the
/// solve: correspondences are not re-evaluated inside an inner minimization.
struct LossContext {
  PointPairSet icp_pairs;    // sources in the previous-frame world pose
  PointPairSet shape_pairs;  // sources anchored at the first-frame pose, inlier-filtered
  ObjectState prev_state;
  ObjectState first_state;
  MotionDelta prior;
};

/// Mean squared distance between delta-moved sources (pivot: previous state)
/// and their matched targets. Empty pair set contributes 0.
[[nodiscard]] double icp_term(const MotionDelta& delta, const LossContext& ctx);

/// Mean squared distance between shape points carried to the candidate state
/// (pivot: first state) and their matched observations, inlier pairs only.
[[nodiscard]] double shape_term(const MotionDelta& delta, const LossContext& ctx);

/// Penalty tying planar translation to the mid-step heading:
/// (|v| cos(theta_prev + dtheta/2) - dx)^2 with v = (dx, dy).
[[nodiscard]] double motion_consistency_term(const MotionDelta& delta, const LossContext& ctx);

/// Squared distance to the motion prior, heading residual wrapped.
[[nodiscard]] double motion_prior_term(const MotionDelta& delta, const LossContext& ctx);

[[nodiscard]] double total_loss(const MotionDelta& delta, const LossContext& ctx,
                                const LossWeights& weights);

/// Analytic gradient of total_loss with respect to (dx, dy, dz, dtheta),
/// correspondences held fixed.
[[nodiscard]] std::array<double, 4> loss_gradient(const MotionDelta& delta, const LossContext& ctx,
                                                  const LossWeights& weights);

/// Per-term values of one evaluation, for diagnostics.
struct TermValues {
  double icp = 0.0;
  double shape = 0.0;
  double motion_consistency = 0.0;
  double motion_prior = 0.0;
  bool icp_empty = false;
  bool shape_empty = false;
};

[[nodiscard]] TermValues evaluate_terms(const MotionDelta& delta, const LossContext& ctx);

}  // namespace sotrack
