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
#include <functional>
#include <random>

#include "sotrack/association.hpp"
#include "sotrack/objective.hpp"
#include "sotrack/types.hpp"

namespace sotrack {

struct SolverConfig {
  int max_outer_iterations = 3;    // re-association rounds per frame
  int max_inner_iterations = 50;   // quasi-Newton steps per solve
  double tolerance = 1e-6;         // absolute loss decrease across outer rounds
};

using LossFunction = std::function<double(const std::array<double, 4>&)>;
using GradientFunction = std::function<std::array<double, 4>(const std::array<double, 4>&)>;

struct MinimizeResult {
  std::array<double, 4> x{};
  double loss = 0.0;
  int iterations = 0;
  bool converged = false;       // gradient norm reached the stopping level
  bool non_finite_hit = false;  // a non-finite evaluation was stepped over
};

/// BFGS with a dense inverse-Hessian update and Armijo backtracking.
/// Stops at an infinity-norm gradient of 1e-6 or after
/// cfg.max_inner_iterations. The returned loss never exceeds the loss at
/// `init`; non-finite trial evaluations shrink the step, and if no finite
/// decrease is reachable the best iterate so far is returned.
[[nodiscard]] MinimizeResult minimize(const LossFunction& loss, const GradientFunction& gradient,
                                      const std::array<double, 4>& init, const SolverConfig& cfg);

struct FrameEstimateResult {
  ObjectState state;
  double loss = 0.0;
  TermValues terms;
  std::size_t observation_count = 0;
  int outer_iterations = 0;
  bool fallback = false;            // no observations: state propagated by the prior
  bool ransac_degenerate = false;
};

/// One frame of the tracking loop: alternate between selecting candidate
/// observation points inside the scaled box at the current state estimate,
/// re-pairing both registration terms, and minimizing the motion objective.
/// `shape` is in the object frame. When the search box stays empty the state
/// falls back to prev_state advanced by the prior.
[[nodiscard]] FrameEstimateResult frame_estimate(
    const PointCloud& frame_cloud, const PointCloud& prev_object, const MotionDelta& prior,
    const ObjectState& prev_state, const BoxSize& size, const ObjectState& first_state,
    const PointCloud& shape, double gamma_in, const LossWeights& weights, const SolverConfig& cfg,
    const RansacParams& ransac, std::mt19937_64& rng);

}  // namespace sotrack
