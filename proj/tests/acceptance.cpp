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

// End-to-end verification suite. Each criterion prints one pass/fail line;
// the exit code is the number of failures.

#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "sotrack/archive.hpp"
#include "sotrack/config.hpp"
#include "sotrack/geometry.hpp"
#include "sotrack/metrics.hpp"
#include "sotrack/synth.hpp"
#include "sotrack/tracker.hpp"

using namespace sotrack;

namespace {

int failures = 0;

void report(const std::string& id, bool ok, const std::string& detail) {
  std::printf("[%s] %s: %s\n", ok ? "PASS" : "FAIL", id.c_str(), detail.c_str());
  std::fflush(stdout);
  failures += ok ? 0 : 1;
}

double seconds_since(const std::chrono::steady_clock::time_point& t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// ---------------------------------------------------------------------------
// C1: analytic gradient vs central finite differences

LossContext random_context(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> coord(-3.0, 3.0);
  std::uniform_real_distribution<double> angle(-1.0, 1.0);
  std::uniform_int_distribution<int> count(1, 40);
  LossContext ctx;
  ctx.prev_state = ObjectState{coord(rng), coord(rng), coord(rng), angle(rng)};
  ctx.first_state = ObjectState{coord(rng), coord(rng), coord(rng), angle(rng)};
  ctx.prior = MotionDelta{0.3 * angle(rng), 0.3 * angle(rng), 0.2 * angle(rng), 0.3 * angle(rng)};
  std::bernoulli_distribution keep(0.8);
  const int icp_n = count(rng);
  for (int i = 0; i < icp_n; ++i) {
    ctx.icp_pairs.pairs.push_back(
        {{coord(rng), coord(rng), coord(rng)}, {coord(rng), coord(rng), coord(rng)}, true});
  }
  const int shape_n = count(rng);
  for (int i = 0; i < shape_n; ++i) {
    ctx.shape_pairs.pairs.push_back({{coord(rng), coord(rng), coord(rng)},
                                     {coord(rng), coord(rng), coord(rng)},
                                     keep(rng)});
  }
  if (ctx.shape_pairs.inlier_count() == 0) {
    ctx.shape_pairs.pairs.front().inlier = true;
  }
  return ctx;
}

void criterion_gradient() {
  const auto t0 = std::chrono::steady_clock::now();
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> t(-1.0, 1.0);
  std::uniform_real_distribution<double> a(-2.5, 2.5);
  const LossWeights weights;
  double worst = 0.0;
  for (int trial = 0; trial < 1000; ++trial) {
    const LossContext ctx = random_context(rng);
    const std::array<double, 4> x{t(rng), t(rng), t(rng), a(rng)};
    const auto f = [&](const std::array<double, 4>& v) {
      return total_loss(MotionDelta{v[0], v[1], v[2], v[3]}, ctx, weights);
    };
    const auto numeric = oracle::finite_difference_gradient(f, x, 1e-5);
    const auto analytic = loss_gradient(MotionDelta{x[0], x[1], x[2], x[3]}, ctx, weights);
    for (int i = 0; i < 4; ++i) {
      const double scale = std::max(1.0, std::abs(numeric[i]));
      worst = std::max(worst, std::abs(analytic[i] - numeric[i]) / scale);
    }
  }
  const double elapsed = seconds_since(t0);
  char detail[160];
  std::snprintf(detail, sizeof(detail),
                "max relative error %.3g over 1000 configurations (%.2f s)", worst, elapsed);
  report("C1 gradient-check", worst < 1e-4 && elapsed < 30.0, detail);
}

// ---------------------------------------------------------------------------
// C2: oracle equivalence for NN association, box IoU, chamfer distance

void criterion_oracles() {
  std::mt19937_64 rng(77);
  std::uniform_real_distribution<double> u(-5.0, 5.0);

  int nn_mismatch = 0;
  for (int inst = 0; inst < 100; ++inst) {
    PointCloud cloud;
    for (int i = 0; i < 500; ++i) {
      cloud.points.push_back({u(rng), u(rng), u(rng)});
    }
    const NnIndex index(cloud);
    const Vec3 q{u(rng) * 1.2, u(rng) * 1.2, u(rng) * 1.2};
    if (index.nearest(q) != oracle::brute_force_nearest(cloud.points, q)) {
      ++nn_mismatch;
    }
  }
  report("C2a nn-oracle", nn_mismatch == 0,
         std::to_string(nn_mismatch) + " mismatches over 100 instances (exact-index tolerance)");

  std::uniform_real_distribution<double> off(-0.4, 0.4);
  std::uniform_real_distribution<double> ang(-M_PI, M_PI);
  std::uniform_real_distribution<double> dim(0.3, 0.8);
  double worst_iou = 0.0;
  for (int inst = 0; inst < 100; ++inst) {
    const BoundingBox a{ObjectState{off(rng), off(rng), off(rng), ang(rng)},
                        BoxSize{dim(rng), dim(rng), dim(rng)}};
    const BoundingBox b{ObjectState{off(rng), off(rng), off(rng), ang(rng)},
                        BoxSize{dim(rng), dim(rng), dim(rng)}};
    worst_iou = std::max(worst_iou, std::abs(box_iou(a, b) - oracle::voxel_iou(a, b, 0.01)));
  }
  char iou_detail[128];
  std::snprintf(iou_detail, sizeof(iou_detail),
                "max |difference| %.4f over 100 pairs (tolerance 0.01, 1 cm grid)", worst_iou);
  report("C2b iou-oracle", worst_iou < 0.01, iou_detail);

  double worst_cd = 0.0;
  for (int inst = 0; inst < 100; ++inst) {
    PointCloud a, b;
    for (int i = 0; i < 80; ++i) {
      a.points.push_back({u(rng) * 0.4, u(rng) * 0.4, u(rng) * 0.4});
      b.points.push_back({u(rng) * 0.4, u(rng) * 0.4, u(rng) * 0.4});
    }
    const PointCloud da = voxel_downsample(a, 0.05);
    const PointCloud db = voxel_downsample(b, 0.05);
    worst_cd = std::max(worst_cd, std::abs(chamfer(a, b) -
                                           oracle::brute_force_chamfer(da.points, db.points)));
  }
  char cd_detail[128];
  std::snprintf(cd_detail, sizeof(cd_detail),
                "max |difference| %.3g over 100 pairs (tolerance 1e-9)", worst_cd);
  report("C2c chamfer-oracle", worst_cd < 1e-9, cd_detail);
}

// ---------------------------------------------------------------------------
// C3: metric hand-checks

void criterion_metric_handchecks() {
  const std::vector<double> ten(10, 1.0);
  const std::vector<double> thirty(30, 0.5);
  const double acc = accuracy({ten, thirty});
  const bool acc_ok = std::abs(acc - 0.625) < 1e-12;

  const RobustnessResult rob = robustness({std::vector<double>(50, 0.6)});
  const bool rob_ok = std::abs(rob.value - 13.0 / 21.0) < 1e-12;

  PointCloud a, b;
  a.points = {{0.0, 0.0, 0.0}};
  b.points = {{1.0, 0.0, 0.0}};
  const double cd = chamfer(a, b);
  const bool cd_ok = std::abs(cd - 2.0) < 1e-12;

  char detail[160];
  std::snprintf(detail, sizeof(detail), "acc %.6f (0.625), rob %.6f (13/21), cd %.6f (2.0)", acc,
                rob.value, cd);
  report("C3 metric-handchecks", acc_ok && rob_ok && cd_ok, detail);
}

// ---------------------------------------------------------------------------
// C4-C6: synthetic benchmark with the reference configuration and ablations

struct SuiteScores {
  double acc = 0.0;
  double rob = 0.0;
  double shape_cd = 0.0;
};

SuiteScores score_suite(const std::vector<Tracklet>& suite, const RunConfig& config) {
  std::vector<TrackletEvalInput> inputs;
  for (const Tracklet& t : suite) {
    TrackerConfig cfg = config.tracker;
    cfg.seed = config.seed;
    const TrackResult r = track(t, cfg, config.solver, config.weights, config.ransac,
                                config.ground);
    TrackletEvalInput input;
    input.name = t.name;
    input.ious = iou_curve(r.states, t.first_box, t.gt_states, t.first_box.size);
    input.difficulty = split_by_difficulty(t);
    if (!r.shape.empty() && !t.gt_shape.empty()) {
      input.shape_cd = chamfer(r.shape, t.gt_shape, config.chamfer_voxel);
    }
    inputs.push_back(std::move(input));
  }
  const EvalReport report = assemble_report(inputs);
  return {report.all.acc, report.all.rob, report.all.shape_cd};
}

synth::SuiteSpec benchmark_spec() {
  synth::SuiteSpec spec;
  spec.count = 30;
  spec.frames_min = 100;
  spec.frames_max = 200;
  spec.noise_sigma = 0.02;
  spec.seed = 20240817;
  return spec;
}

void criterion_benchmark_and_ablations() {
  const auto t0 = std::chrono::steady_clock::now();
  const std::vector<Tracklet> suite = synth::generate_suite(benchmark_spec());

  RunConfig full;  // reference defaults
  const SuiteScores full_scores = score_suite(suite, full);
  const double full_time = seconds_since(t0);
  {
    char detail[200];
    std::snprintf(detail, sizeof(detail),
                  "acc %.4f (>= 0.70), rob %.4f (>= 0.60), shape %.4f, %.0f s (< 600 s)",
                  full_scores.acc, full_scores.rob, full_scores.shape_cd, full_time);
    report("C4 benchmark-defaults",
           full_scores.acc >= 0.70 && full_scores.rob >= 0.60 && full_time < 600.0, detail);
  }

  // term ablation ladder
  RunConfig icp_mp;
  icp_mp.weights.shape = 0.0;
  icp_mp.weights.motion_consistency = 0.0;
  RunConfig s1;
  s1.weights.motion_consistency = 0.0;
  s1.tracker.shape_mode = ShapeMode::first_frame;
  RunConfig s_all;
  s_all.weights.motion_consistency = 0.0;

  const double acc_icp_mp = score_suite(suite, icp_mp).acc;
  const double acc_s1 = score_suite(suite, s1).acc;
  const double acc_s_all = score_suite(suite, s_all).acc;
  {
    char detail[200];
    std::snprintf(detail, sizeof(detail), "%.4f -> %.4f -> %.4f -> %.4f (strictly increasing)",
                  acc_icp_mp, acc_s1, acc_s_all, full_scores.acc);
    report("C5 term-ablation-order",
           acc_icp_mp < acc_s1 && acc_s1 < acc_s_all && acc_s_all < full_scores.acc, detail);
  }

  // design-choice ablations
  RunConfig no_ground;
  no_ground.tracker.ground_removal = false;
  RunConfig no_ransac;
  no_ransac.ransac.enabled = false;
  RunConfig no_subshape;
  no_subshape.tracker.subshape_window = 0;

  const double acc_no_ground = score_suite(suite, no_ground).acc;
  const double acc_no_ransac = score_suite(suite, no_ransac).acc;
  const double acc_no_subshape = score_suite(suite, no_subshape).acc;
  {
    char detail[220];
    std::snprintf(detail, sizeof(detail),
                  "full %.4f vs no-ground %.4f, no-ransac %.4f, no-subshape %.4f (all below)",
                  full_scores.acc, acc_no_ground, acc_no_ransac, acc_no_subshape);
    report("C6 design-ablation-order",
           acc_no_ground < full_scores.acc && acc_no_ransac < full_scores.acc &&
               acc_no_subshape < full_scores.acc,
           detail);
  }
}

// ---------------------------------------------------------------------------
// C7: motion export deviation at the 30-frame horizon

double deviation_at_horizon(const Tracklet& t, const TrackResult& r, int horizon) {
  std::vector<ObjectState> states;
  states.push_back(t.first_box.state);
  states.insert(states.end(), r.states.begin(), r.states.end());
  double sum = 0.0;
  std::size_t count = 0;
  for (std::size_t s = 0; s + horizon < states.size(); ++s) {
    const double ex = states[s + horizon].x - states[s].x;
    const double ey = states[s + horizon].y - states[s].y;
    const double ez = states[s + horizon].z - states[s].z;
    const double gx = t.gt_states[s + horizon].x - t.gt_states[s].x;
    const double gy = t.gt_states[s + horizon].y - t.gt_states[s].y;
    const double gz = t.gt_states[s + horizon].z - t.gt_states[s].z;
    sum += std::sqrt((ex - gx) * (ex - gx) + (ey - gy) * (ey - gy) + (ez - gz) * (ez - gz));
    ++count;
  }
  return count > 0 ? sum / static_cast<double>(count) : 0.0;
}

void criterion_motion_export() {
  synth::VehicleTemplate tpl;
  synth::SceneSpec scene;
  scene.ground_points = 400;

  auto run_case = [&](double sigma, std::uint64_t seed) {
    synth::TrajectorySpec traj;
    traj.kind = synth::TrajectoryKind::constant_velocity;
    traj.speed = 0.35;
    traj.frame_count = 80;
    traj.noise_sigma = sigma;
    traj.target_points = 250;
    traj.initial = ObjectState{0.0, 0.0, 1.05, 0.3};
    const Tracklet t = synth::generate_tracklet(tpl, traj, Vec3{-15.0, 6.0, 1.8}, seed, scene);
    const TrackResult r = track(t, TrackerConfig{}, SolverConfig{}, LossWeights{});
    return deviation_at_horizon(t, r, 30);
  };

  const double clean = (run_case(0.0, 501) + run_case(0.0, 503)) / 2.0;
  const double noisy = (run_case(0.02, 507) + run_case(0.02, 509)) / 2.0;
  char detail[160];
  std::snprintf(detail, sizeof(detail),
                "horizon-30 deviation: noiseless %.4f m (< 0.01), sigma=2cm %.4f m (< 0.10)",
                clean, noisy);
  report("C7 motion-export", clean < 0.01 && noisy < 0.10, detail);
}

// ---------------------------------------------------------------------------
// C8: module invariants (no synthetic-suite dependency for core modules)

void criterion_invariants() {
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  std::uniform_real_distribution<double> ang(-M_PI, M_PI);
  bool ok = true;
  std::string first_failure;
  auto require = [&](bool cond, const char* what) {
    if (!cond && ok) {
      ok = false;
      first_failure = what;
    }
  };

  // rigidity and invertibility
  for (int trial = 0; trial < 50; ++trial) {
    PointCloud cloud;
    for (int i = 0; i < 60; ++i) {
      cloud.points.push_back({u(rng), u(rng), u(rng)});
    }
    const MotionDelta delta{u(rng), u(rng), u(rng), ang(rng)};
    const ObjectState pivot{u(rng), u(rng), u(rng), ang(rng)};
    const PointCloud moved = apply_motion(delta, cloud, pivot);
    const PointCloud back = apply_motion(inverse_motion(delta), moved, pivot);
    for (std::size_t i = 0; i < cloud.size(); ++i) {
      require((back.points[i] - cloud.points[i]).norm() < 1e-9, "rigid invertibility");
    }
    for (std::size_t i = 0; i + 1 < cloud.size(); i += 5) {
      const double before = (cloud.points[i] - cloud.points[i + 1]).norm();
      const double after = (moved.points[i] - moved.points[i + 1]).norm();
      require(std::abs(before - after) < 1e-9, "rigidity of pairwise distances");
    }
  }

  // gamma monotonicity
  {
    PointCloud cloud;
    for (int i = 0; i < 500; ++i) {
      cloud.points.push_back({u(rng), u(rng), u(rng)});
    }
    const ObjectState state{0.2, -0.1, 0.0, 0.7};
    const BoxSize size{2.0, 1.0, 1.0};
    std::size_t prev = 0;
    for (const double gamma : {0.4, 0.8, 1.2, 1.6, 2.4}) {
      const std::size_t count = points_in_box(cloud, state, size, gamma).size();
      require(count >= prev, "gamma monotonicity");
      prev = count;
    }
  }

  // robustness curve monotone, loss nonnegative
  {
    std::vector<std::vector<double>> curves;
    std::uniform_real_distribution<double> iou(0.0, 1.0);
    for (int k = 0; k < 8; ++k) {
      std::vector<double> curve;
      for (int i = 0; i < 50; ++i) {
        curve.push_back(iou(rng));
      }
      curves.push_back(curve);
    }
    const RobustnessResult rob = robustness(curves);
    for (std::size_t i = 1; i < rob.curve.size(); ++i) {
      require(rob.curve[i].second <= rob.curve[i - 1].second + 1e-12,
              "robustness curve monotonicity");
    }
    require(rob.value >= 0.0 && rob.value <= 1.0, "robustness in [0,1]");

    for (int trial = 0; trial < 50; ++trial) {
      const LossContext ctx = random_context(rng);
      const MotionDelta d{u(rng), u(rng), u(rng), ang(rng)};
      require(total_loss(d, ctx, LossWeights{}) >= 0.0, "loss nonnegativity");
    }
  }

  // determinism under a seed and archive round trip
  {
    synth::VehicleTemplate tpl;
    synth::TrajectorySpec traj;
    traj.kind = synth::TrajectoryKind::constant_curvature;
    traj.speed = 0.3;
    traj.curvature = 0.04;
    traj.frame_count = 12;
    traj.noise_sigma = 0.02;
    traj.initial = ObjectState{0.0, 0.0, 1.05, 0.1};
    const Tracklet t = synth::generate_tracklet(tpl, traj, Vec3{-12.0, 4.0, 1.8}, 881);

    TrackerConfig cfg;
    cfg.seed = 17;
    const TrackResult a = track(t, cfg, SolverConfig{}, LossWeights{});
    const TrackResult b = track(t, cfg, SolverConfig{}, LossWeights{});
    require(format_states(a.states) == format_states(b.states), "determinism under seed");

    const std::filesystem::path dir =
        std::filesystem::temp_directory_path() / "sotrack_acceptance_archive";
    std::filesystem::remove_all(dir);
    write_tracklet_archive(dir, t);
    const Tracklet loaded = read_tracklet_archive(dir);
    bool same = loaded.length() == t.length();
    for (std::size_t k = 0; same && k < t.length(); ++k) {
      same = loaded.frames[k].size() == t.frames[k].size();
      for (std::size_t i = 0; same && i < t.frames[k].size(); ++i) {
        // values quantize to float32 on disk; a reread must be bit-stable
        const Vec3 quantized{static_cast<float>(t.frames[k].points[i].x),
                             static_cast<float>(t.frames[k].points[i].y),
                             static_cast<float>(t.frames[k].points[i].z)};
        same = loaded.frames[k].points[i] == quantized;
      }
    }
    std::filesystem::remove_all(dir);
    require(same, "archive round trip");
  }

  report("C8 invariant-suites", ok, ok ? "rigidity, monotonicity, loss, determinism, round trip"
                                       : "first failure: " + first_failure);
}

}  // namespace

int main() {
  const auto t0 = std::chrono::steady_clock::now();
  criterion_gradient();
  criterion_oracles();
  criterion_metric_handchecks();
  criterion_benchmark_and_ablations();
  criterion_motion_export();
  criterion_invariants();
  std::printf("%d criterion(s) failed, total %.0f s\n", failures, seconds_since(t0));
  return failures;
}
