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

#include "sotrack/objective.hpp"

#include <cmath>

#include "sotrack/geometry.hpp"

namespace sotrack {

namespace {

struct RegistrationGradient {
  double value = 0.0;
  std::array<double, 4> grad{};
};

// Shared backbone of the two registration terms: sources rotated by `angle`
// about (cx, cy) then translated by (tx, ty, tz); mean squared residual to
// the targets. d(angle)/d(dtheta) = 1 for both callers.
RegistrationGradient registration_term(const std::vector<PointPair>& pairs, bool inliers_only,
                                       double angle, double cx, double cy, double tx, double ty,
                                       double tz, bool with_gradient) {
  RegistrationGradient out;
  const double c = std::cos(angle);
  const double s = std::sin(angle);
  std::size_t n = 0;
  double sum = 0.0;
  double gx = 0.0, gy = 0.0, gz = 0.0, gt = 0.0;
  for (const PointPair& pair : pairs) {
    if (inliers_only && !pair.inlier) {
      continue;
    }
    const double ax = pair.source.x - cx;
    const double ay = pair.source.y - cy;
    const double rx = cx + tx + c * ax - s * ay - pair.target.x;
    const double ry = cy + ty + s * ax + c * ay - pair.target.y;
    const double rz = pair.source.z + tz - pair.target.z;
    sum += rx * rx + ry * ry + rz * rz;
    if (with_gradient) {
      gx += rx;
      gy += ry;
      gz += rz;
      gt += rx * (-s * ax - c * ay) + ry * (c * ax - s * ay);
    }
    ++n;
  }
  if (n == 0) {
    return out;
  }
  const double inv_n = 1.0 / static_cast<double>(n);
  out.value = sum * inv_n;
  out.grad = {2.0 * gx * inv_n, 2.0 * gy * inv_n, 2.0 * gz * inv_n, 2.0 * gt * inv_n};
  return out;
}

RegistrationGradient icp_part(const MotionDelta& d, const LossContext& ctx, bool with_gradient) {
  return registration_term(ctx.icp_pairs.pairs, false, d.dtheta, ctx.prev_state.x,
                           ctx.prev_state.y, d.dx, d.dy, d.dz, with_gradient);
}

RegistrationGradient shape_part(const MotionDelta& d, const LossContext& ctx, bool with_gradient) {
  const ObjectState candidate = compose_state(ctx.prev_state, d);
  const MotionDelta to_candidate = state_difference(candidate, ctx.first_state);
  // wrap on dtheta shifts the angle by a multiple of 2*pi only
  return registration_term(ctx.shape_pairs.pairs, true, to_candidate.dtheta, ctx.first_state.x,
                           ctx.first_state.y, to_candidate.dx, to_candidate.dy, to_candidate.dz,
                           with_gradient);
}

struct McGradient {
  double value = 0.0;
  std::array<double, 4> grad{};
};

McGradient mc_part(const MotionDelta& d, const LossContext& ctx, bool with_gradient) {
  McGradient out;
  const double mid_heading = ctx.prev_state.theta + 0.5 * d.dtheta;
  const double ch = std::cos(mid_heading);
  const double speed = std::hypot(d.dx, d.dy);
  const double r = speed * ch - d.dx;
  out.value = r * r;
  if (with_gradient) {
    if (speed > 1e-12) {
      out.grad[0] = 2.0 * r * (d.dx / speed * ch - 1.0);
      out.grad[1] = 2.0 * r * (d.dy / speed * ch);
    } else {
      out.grad[0] = 0.0;
      out.grad[1] = 0.0;
    }
    out.grad[3] = 2.0 * r * speed * (-std::sin(mid_heading)) * 0.5;
  }
  return out;
}

}  // namespace

double icp_term(const MotionDelta& delta, const LossContext& ctx) {
  return icp_part(delta, ctx, false).value;
}

double shape_term(const MotionDelta& delta, const LossContext& ctx) {
  return shape_part(delta, ctx, false).value;
}

double motion_consistency_term(const MotionDelta& delta, const LossContext& ctx) {
  return mc_part(delta, ctx, false).value;
}

double motion_prior_term(const MotionDelta& delta, const LossContext& ctx) {
  const double rx = delta.dx - ctx.prior.dx;
  const double ry = delta.dy - ctx.prior.dy;
  const double rz = delta.dz - ctx.prior.dz;
  const double rt = wrap_angle(delta.dtheta - ctx.prior.dtheta);
  return rx * rx + ry * ry + rz * rz + rt * rt;
}

double total_loss(const MotionDelta& delta, const LossContext& ctx, const LossWeights& weights) {
  return weights.icp * icp_term(delta, ctx) + weights.shape * shape_term(delta, ctx) +
         weights.motion_consistency * motion_consistency_term(delta, ctx) +
         weights.motion_prior * motion_prior_term(delta, ctx);
}

std::array<double, 4> loss_gradient(const MotionDelta& delta, const LossContext& ctx,
                                    const LossWeights& weights) {
  const RegistrationGradient icp = icp_part(delta, ctx, true);
  const RegistrationGradient shp = shape_part(delta, ctx, true);
  const McGradient mc = mc_part(delta, ctx, true);
  const double px = delta.dx - ctx.prior.dx;
  const double py = delta.dy - ctx.prior.dy;
  const double pz = delta.dz - ctx.prior.dz;
  const double pt = wrap_angle(delta.dtheta - ctx.prior.dtheta);
  std::array<double, 4> grad{};
  const std::array<double, 4> prior_grad = {2.0 * px, 2.0 * py, 2.0 * pz, 2.0 * pt};
  for (int i = 0; i < 4; ++i) {
    grad[i] = weights.icp * icp.grad[i] + weights.shape * shp.grad[i] +
              weights.motion_consistency * mc.grad[i] + weights.motion_prior * prior_grad[i];
  }
  return grad;
}

TermValues evaluate_terms(const MotionDelta& delta, const LossContext& ctx) {
  TermValues out;
  out.icp = icp_term(delta, ctx);
  out.shape = shape_term(delta, ctx);
  out.motion_consistency = motion_consistency_term(delta, ctx);
  out.motion_prior = motion_prior_term(delta, ctx);
  out.icp_empty = ctx.icp_pairs.empty();
  out.shape_empty = ctx.shape_pairs.inlier_count() == 0;
  return out;
}

}  // namespace sotrack
