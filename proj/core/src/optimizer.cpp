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

#include "sotrack/optimizer.hpp"

#include <cmath>
#include <limits>

#include "sotrack/geometry.hpp"

namespace sotrack {

namespace {

using Vec4 = std::array<double, 4>;

double dot(const Vec4& a, const Vec4& b) {
  return a[0] * b[0] + a[1] * b[1] + a[2] * b[2] + a[3] * b[3];
}

double inf_norm(const Vec4& a) {
  double m = 0.0;
  for (const double v : a) {
    m = std::max(m, std::abs(v));
  }
  return m;
}

Vec4 axpy(const Vec4& x, double alpha, const Vec4& d) {
  return {x[0] + alpha * d[0], x[1] + alpha * d[1], x[2] + alpha * d[2], x[3] + alpha * d[3]};
}

struct Mat4 {
  std::array<double, 16> m{};

  static Mat4 identity() {
    Mat4 out;
    out.m[0] = out.m[5] = out.m[10] = out.m[15] = 1.0;
    return out;
  }

  [[nodiscard]] Vec4 mul(const Vec4& v) const {
    Vec4 out{};
    for (int r = 0; r < 4; ++r) {
      out[r] = m[4 * r] * v[0] + m[4 * r + 1] * v[1] + m[4 * r + 2] * v[2] + m[4 * r + 3] * v[3];
    }
    return out;
  }
};

// H <- (I - rho s y^T) H (I - rho y s^T) + rho s s^T
void bfgs_update(Mat4& h, const Vec4& s, const Vec4& y, double rho) {
  Mat4 a;  // I - rho s y^T
  for (int r = 0; r < 4; ++r) {
    for (int c = 0; c < 4; ++c) {
      a.m[4 * r + c] = (r == c ? 1.0 : 0.0) - rho * s[r] * y[c];
    }
  }
  Mat4 ah;
  for (int r = 0; r < 4; ++r) {
    for (int c = 0; c < 4; ++c) {
      double v = 0.0;
      for (int k = 0; k < 4; ++k) {
        v += a.m[4 * r + k] * h.m[4 * k + c];
      }
      ah.m[4 * r + c] = v;
    }
  }
  Mat4 next;
  for (int r = 0; r < 4; ++r) {
    for (int c = 0; c < 4; ++c) {
      double v = 0.0;
      for (int k = 0; k < 4; ++k) {
        v += ah.m[4 * r + k] * a.m[4 * c + k];  // times A^T
      }
      next.m[4 * r + c] = v + rho * s[r] * s[c];
    }
  }
  h = next;
}

constexpr double kGradTol = 1e-6;
constexpr double kArmijo = 1e-4;
constexpr double kMinStep = 1e-16;

}  // namespace

MinimizeResult minimize(const LossFunction& loss, const GradientFunction& gradient,
                        const Vec4& init, const SolverConfig& cfg) {
  MinimizeResult result;
  Vec4 x = init;
  double fx = loss(x);
  Vec4 g = gradient(x);
  result.x = x;
  result.loss = fx;
  if (!std::isfinite(fx)) {
    result.non_finite_hit = true;
    return result;
  }

  Mat4 h = Mat4::identity();
  for (int it = 0; it < cfg.max_inner_iterations; ++it) {
    if (inf_norm(g) <= kGradTol) {
      result.converged = true;
      break;
    }
    Vec4 d = h.mul(g);
    for (double& v : d) {
      v = -v;
    }
    double gd = dot(g, d);
    if (gd >= 0.0) {
      h = Mat4::identity();
      for (int i = 0; i < 4; ++i) {
        d[i] = -g[i];
      }
      gd = dot(g, d);
      if (gd >= 0.0) {
        break;  // zero direction
      }
    }

    double alpha = 1.0;
    double fn = std::numeric_limits<double>::infinity();
    Vec4 xn{};
    bool accepted = false;
    while (alpha > kMinStep) {
      xn = axpy(x, alpha, d);
      fn = loss(xn);
      if (std::isfinite(fn)) {
        if (fn <= fx + kArmijo * alpha * gd) {
          accepted = true;
          break;
        }
      } else {
        result.non_finite_hit = true;
      }
      alpha *= 0.5;
    }
    if (!accepted) {
      break;
    }

    const Vec4 gn = gradient(xn);
    const Vec4 s = {xn[0] - x[0], xn[1] - x[1], xn[2] - x[2], xn[3] - x[3]};
    const Vec4 y = {gn[0] - g[0], gn[1] - g[1], gn[2] - g[2], gn[3] - g[3]};
    const double sy = dot(s, y);
    if (sy > 1e-12) {
      bfgs_update(h, s, y, 1.0 / sy);
    } else {
      h = Mat4::identity();
    }
    x = xn;
    fx = fn;
    g = gn;
    result.iterations = it + 1;
    if (fx < result.loss) {
      result.x = x;
      result.loss = fx;
    }
  }
  if (inf_norm(g) <= kGradTol) {
    result.converged = true;
  }
  return result;
}

FrameEstimateResult frame_estimate(const PointCloud& frame_cloud, const PointCloud& prev_object,
                                   const MotionDelta& prior, const ObjectState& prev_state,
                                   const BoxSize& size, const ObjectState& first_state,
                                   const PointCloud& shape, double gamma_in,
                                   const LossWeights& weights, const SolverConfig& cfg,
                                   const RansacParams& ransac, std::mt19937_64& rng) {
  FrameEstimateResult result;
  ObjectState estimate = compose_state(prev_state, prior);
  bool observed_any = false;
  double prev_round_loss = std::numeric_limits<double>::infinity();

  for (int outer = 0; outer < cfg.max_outer_iterations; ++outer) {
    const PointCloud observed = points_in_box(frame_cloud, estimate, size, gamma_in);
    if (observed.empty()) {
      break;
    }
    observed_any = true;
    result.observation_count = observed.size();

    const NnIndex observed_index(observed);
    const MotionDelta current = state_difference(estimate, prev_state);

    LossContext ctx;
    ctx.prev_state = prev_state;
    ctx.first_state = first_state;
    ctx.prior = prior;
    if (!prev_object.empty()) {
      ctx.icp_pairs = associate_icp(prev_object, observed_index, current, prev_state);
    }
    if (!shape.empty() && weights.shape > 0.0) {
      ctx.shape_pairs =
          associate_shape_ransac(shape, observed_index, estimate, first_state, ransac, rng);
      result.ransac_degenerate = result.ransac_degenerate || ctx.shape_pairs.ransac_degenerate;
    }

    auto loss_fn = [&](const std::array<double, 4>& v) {
      return total_loss(MotionDelta{v[0], v[1], v[2], v[3]}, ctx, weights);
    };
    auto grad_fn = [&](const std::array<double, 4>& v) {
      return loss_gradient(MotionDelta{v[0], v[1], v[2], v[3]}, ctx, weights);
    };
    const MinimizeResult solved =
        minimize(loss_fn, grad_fn, {current.dx, current.dy, current.dz, current.dtheta}, cfg);

    const MotionDelta best{solved.x[0], solved.x[1], solved.x[2], solved.x[3]};
    estimate = compose_state(prev_state, best);
    result.loss = solved.loss;
    result.terms = evaluate_terms(best, ctx);
    result.outer_iterations = outer + 1;

    if (prev_round_loss - solved.loss < cfg.tolerance) {
      break;
    }
    prev_round_loss = solved.loss;
  }

  if (!observed_any) {
    result.state = compose_state(prev_state, prior);
    result.fallback = true;
    return result;
  }
  result.state = estimate;
  return result;
}

}  // namespace sotrack
