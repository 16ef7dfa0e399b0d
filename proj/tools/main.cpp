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

#include <CLI11.hpp>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <mutex>
#include <nlohmann/json.hpp>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "sotrack/archive.hpp"
#include "sotrack/config.hpp"
#include "sotrack/geometry.hpp"
#include "sotrack/metrics.hpp"
#include "sotrack/synth.hpp"
#include "sotrack/tracker.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// stable across platforms, unlike std::hash
std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 1469598103934665603ULL;
  for (const char c : s) {
    h ^= static_cast<unsigned char>(c);
    h *= 1099511628211ULL;
  }
  return h;
}

void run_parallel(std::size_t jobs, int workers, const std::function<void(std::size_t)>& work) {
  if (workers <= 1 || jobs <= 1) {
    for (std::size_t i = 0; i < jobs; ++i) {
      work(i);
    }
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  std::mutex error_mutex;
  std::exception_ptr first_error;
  const int n = std::min<int>(workers, static_cast<int>(jobs));
  for (int w = 0; w < n; ++w) {
    pool.emplace_back([&]() {
      while (true) {
        const std::size_t i = next.fetch_add(1);
        if (i >= jobs) {
          return;
        }
        try {
          work(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!first_error) {
            first_error = std::current_exception();
          }
        }
      }
    });
  }
  for (std::thread& t : pool) {
    t.join();
  }
  if (first_error) {
    std::rethrow_exception(first_error);
  }
}

sotrack::RunConfig load_config(const std::string& config_path,
                               const std::optional<std::uint64_t>& seed) {
  sotrack::RunConfig config;
  if (!config_path.empty()) {
    config = sotrack::parse_run_config(config_path);
  }
  if (seed) {
    config.seed = *seed;
  }
  return config;
}

std::vector<fs::path> resolve_archives(const std::vector<std::string>& inputs) {
  std::vector<fs::path> archives;
  for (const std::string& input : inputs) {
    const fs::path path(input);
    if (fs::exists(path / "manifest.json")) {
      archives.push_back(path);
    } else {
      const auto found = sotrack::list_archives(path);
      if (found.empty()) {
        throw sotrack::ArchiveError(path.string() + ": no tracklet archives found");
      }
      archives.insert(archives.end(), found.begin(), found.end());
    }
  }
  return archives;
}

// ---------------------------------------------------------------------------
// track

int cmd_track(const std::vector<std::string>& inputs, const std::string& config_path,
              std::optional<std::uint64_t> seed, const std::string& output, int workers) {
  const sotrack::RunConfig config = load_config(config_path, seed);
  const std::vector<fs::path> archives = resolve_archives(inputs);
  fs::create_directories(output);

  std::mutex log_mutex;
  run_parallel(archives.size(), workers, [&](std::size_t i) {
    const fs::path& dir = archives[i];
    const sotrack::Tracklet tracklet = sotrack::read_tracklet_archive(dir);

    sotrack::TrackerConfig tracker_cfg = config.tracker;
    tracker_cfg.seed = config.seed ^ fnv1a(tracklet.name);

    // stream the frames so every state is fixed before the next read
    sotrack::TrackerSession session(tracklet.first_box, tracker_cfg, config.solver,
                                    config.weights, config.ransac, config.ground);
    session.initialize(sotrack::read_point_file(dir / "frames" / "frame_000001.bin",
                                                sotrack::Frame::world));
    for (std::size_t k = 2; k <= tracklet.length(); ++k) {
      char name[32];
      std::snprintf(name, sizeof(name), "frame_%06zu.bin", k);
      session.step(sotrack::read_point_file(dir / "frames" / name, sotrack::Frame::world));
    }

    const sotrack::TrackResult result = session.take_result();
    sotrack::write_track_result(fs::path(output) / tracklet.name, tracklet, result);
    {
      std::lock_guard<std::mutex> lock(log_mutex);
      std::size_t fallbacks = 0;
      for (const auto& d : result.diagnostics) {
        fallbacks += d.fallback ? 1 : 0;
      }
      std::cout << tracklet.name << ": " << result.states.size() << " states, "
                << result.shape.size() << " shape points"
                << (fallbacks > 0 ? ", " + std::to_string(fallbacks) + " fallbacks" : "")
                << "\n";
    }
  });
  return 0;
}

// ---------------------------------------------------------------------------
// eval

void write_report_files(const sotrack::EvalReport& report, const fs::path& out_dir) {
  fs::create_directories(out_dir);
  std::ofstream txt(out_dir / "report.txt");
  auto emit_split = [&](const sotrack::SplitReport& split) {
    txt << "split." << split.label << ".tracklets = " << split.tracklets << "\n";
    txt << "split." << split.label << ".frames = " << split.frames << "\n";
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.6f", split.acc);
    txt << "split." << split.label << ".acc = " << buf << "\n";
    std::snprintf(buf, sizeof(buf), "%.6f", split.rob);
    txt << "split." << split.label << ".rob = " << buf << "\n";
    std::snprintf(buf, sizeof(buf), "%.6f", split.shape_cd);
    txt << "split." << split.label << ".shape = " << buf << "\n";
  };
  emit_split(report.all);
  for (const auto& split : report.splits) {
    emit_split(split);
  }
  for (const auto& [t, v] : report.rob_curve) {
    char key[32], val[32];
    std::snprintf(key, sizeof(key), "rob_curve.%.2f", t);
    std::snprintf(val, sizeof(val), "%.6f", v);
    txt << key << " = " << val << "\n";
  }
  for (const auto& score : report.per_tracklet) {
    txt << "tracklet." << score.name << ".difficulty = " << to_string(score.difficulty) << "\n";
    txt << "tracklet." << score.name << ".frames = " << score.frames << "\n";
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.6f", score.mean_iou);
    txt << "tracklet." << score.name << ".iou = " << buf << "\n";
    if (score.shape_cd >= 0.0) {
      std::snprintf(buf, sizeof(buf), "%.6f", score.shape_cd);
      txt << "tracklet." << score.name << ".shape = " << buf << "\n";
    }
  }

  json j;
  auto split_json = [](const sotrack::SplitReport& s) {
    return json{{"label", s.label}, {"tracklets", s.tracklets}, {"frames", s.frames},
                {"acc", s.acc},     {"rob", s.rob},             {"shape", s.shape_cd}};
  };
  j["all"] = split_json(report.all);
  j["splits"] = json::array();
  for (const auto& split : report.splits) {
    j["splits"].push_back(split_json(split));
  }
  j["rob_curve"] = json::array();
  for (const auto& [t, v] : report.rob_curve) {
    j["rob_curve"].push_back({t, v});
  }
  j["tracklets"] = json::array();
  for (const auto& score : report.per_tracklet) {
    j["tracklets"].push_back({{"name", score.name},
                              {"difficulty", to_string(score.difficulty)},
                              {"frames", score.frames},
                              {"iou", score.mean_iou},
                              {"shape", score.shape_cd}});
  }
  std::ofstream(out_dir / "report.json") << j.dump(2) << "\n";
}

void print_report_table(const sotrack::EvalReport& report) {
  std::printf("%-8s %9s %9s %9s %10s\n", "split", "Acc", "Rob", "Shape", "tracklets");
  auto row = [](const sotrack::SplitReport& s) {
    if (s.tracklets == 0) {
      std::printf("%-8s %9s %9s %9s %10zu\n", s.label.c_str(), "-", "-", "-", s.tracklets);
    } else {
      std::printf("%-8s %9.4f %9.4f %9.4f %10zu\n", s.label.c_str(), s.acc, s.rob, s.shape_cd,
                  s.tracklets);
    }
  };
  row(report.all);
  for (const auto& split : report.splits) {
    row(split);
  }
}

int cmd_eval(const std::string& results_dir, const std::string& gt_dir,
             const std::string& config_path, const std::string& output) {
  sotrack::RunConfig config;
  if (!config_path.empty()) {
    config = sotrack::parse_run_config(config_path);
  }
  const auto result_dirs = sotrack::list_results(results_dir);
  if (result_dirs.empty()) {
    throw sotrack::ArchiveError(results_dir + ": no track results found");
  }
  const auto gt_dirs = sotrack::list_archives(gt_dir);

  std::map<std::string, fs::path> gt_by_name;
  for (const fs::path& dir : gt_dirs) {
    gt_by_name[dir.filename().string()] = dir;
  }
  std::vector<std::string> missing;
  for (const fs::path& dir : result_dirs) {
    if (gt_by_name.find(dir.filename().string()) == gt_by_name.end()) {
      missing.push_back(dir.filename().string());
    }
  }
  if (!missing.empty()) {
    std::string list;
    for (const std::string& name : missing) {
      list += (list.empty() ? "" : ", ") + name;
    }
    throw sotrack::ArchiveError("ground truth missing for: " + list);
  }

  std::vector<sotrack::TrackletEvalInput> inputs;
  for (const fs::path& dir : result_dirs) {
    const sotrack::LoadedTrackResult result = sotrack::read_track_result(dir);
    const sotrack::Tracklet gt = sotrack::read_tracklet_archive(
        gt_by_name.at(dir.filename().string()));
    if (!gt.has_gt_states()) {
      throw sotrack::ArchiveError(gt.name + ": archive has no ground-truth states");
    }
    if (result.states.size() + 1 != gt.length()) {
      throw sotrack::ArchiveError(gt.name + ": " + std::to_string(result.states.size()) +
                                  " states for " + std::to_string(gt.length()) + " frames");
    }
    sotrack::TrackletEvalInput input;
    input.name = result.name;
    input.ious = sotrack::iou_curve(result.states, result.first_box, gt.gt_states,
                                    gt.first_box.size);
    input.difficulty = sotrack::split_by_difficulty(gt);
    if (!result.shape.empty() && !gt.gt_shape.empty()) {
      input.shape_cd = sotrack::chamfer(result.shape, gt.gt_shape, config.chamfer_voxel);
    }
    inputs.push_back(std::move(input));
  }

  const sotrack::EvalReport report = sotrack::assemble_report(inputs);
  write_report_files(report, output);
  print_report_table(report);
  return 0;
}

// ---------------------------------------------------------------------------
// synth

int cmd_synth(const std::string& spec_path, std::optional<std::uint64_t> seed,
              const std::string& output, int workers) {
  sotrack::synth::SuiteSpec spec = sotrack::parse_suite_spec(spec_path);
  if (seed) {
    spec.seed = *seed;
  }
  const std::vector<sotrack::Tracklet> suite = sotrack::synth::generate_suite(spec);
  fs::create_directories(output);
  std::mutex log_mutex;
  run_parallel(suite.size(), workers, [&](std::size_t i) {
    sotrack::write_tracklet_archive(fs::path(output) / suite[i].name, suite[i]);
    std::lock_guard<std::mutex> lock(log_mutex);
    std::cout << suite[i].name << ": " << suite[i].length() << " frames\n";
  });
  return 0;
}

// ---------------------------------------------------------------------------
// export-motion

int cmd_export_motion(const std::string& result_dir, const std::string& gt_dir, int window,
                      const std::string& output) {
  std::vector<fs::path> result_dirs;
  if (fs::exists(fs::path(result_dir) / "states.txt")) {
    result_dirs.push_back(result_dir);
  } else {
    result_dirs = sotrack::list_results(result_dir);
  }
  if (result_dirs.empty()) {
    throw sotrack::ArchiveError(result_dir + ": no track results found");
  }
  fs::create_directories(output);

  // horizon -> (sum of deviations, samples), pooled over tracklets
  std::vector<double> deviation_sum;
  std::vector<std::size_t> deviation_count;

  for (const fs::path& dir : result_dirs) {
    const sotrack::LoadedTrackResult result = sotrack::read_track_result(dir);
    std::vector<sotrack::ObjectState> states;
    states.push_back(result.first_box.state);
    states.insert(states.end(), result.states.begin(), result.states.end());

    int effective_window = window;
    if (static_cast<std::size_t>(window) >= states.size()) {
      effective_window = static_cast<int>(states.size()) - 1;
      std::cerr << "warning: window " << window << " clamped to " << effective_window << " for "
                << result.name << "\n";
    }

    const fs::path out_file = fs::path(output) / (result.name + "_motion.txt");
    std::ofstream out(out_file);
    out << "# frame dx dy dz dtheta window_dx window_dy window_dz window_dist\n";
    char line[256];
    for (std::size_t k = 1; k < states.size(); ++k) {
      const sotrack::MotionDelta d = sotrack::state_difference(states[k], states[k - 1]);
      const std::size_t back = k >= static_cast<std::size_t>(effective_window)
                                   ? k - static_cast<std::size_t>(effective_window)
                                   : 0;
      const double wx = states[k].x - states[back].x;
      const double wy = states[k].y - states[back].y;
      const double wz = states[k].z - states[back].z;
      std::snprintf(line, sizeof(line), "%zu %.9g %.9g %.9g %.9g %.9g %.9g %.9g %.9g\n", k + 1,
                    d.dx, d.dy, d.dz, d.dtheta, wx, wy, wz,
                    std::sqrt(wx * wx + wy * wy + wz * wz));
      out << line;
    }

    if (!gt_dir.empty()) {
      const sotrack::Tracklet gt =
          sotrack::read_tracklet_archive(fs::path(gt_dir) / result.name);
      if (!gt.has_gt_states() || gt.gt_states.size() != states.size()) {
        throw sotrack::ArchiveError(result.name + ": ground truth does not match result length");
      }
      if (deviation_sum.size() < static_cast<std::size_t>(effective_window)) {
        deviation_sum.resize(effective_window, 0.0);
        deviation_count.resize(effective_window, 0);
      }
      for (int h = 1; h <= effective_window; ++h) {
        for (std::size_t s = 0; s + h < states.size(); ++s) {
          const double ex = states[s + h].x - states[s].x;
          const double ey = states[s + h].y - states[s].y;
          const double ez = states[s + h].z - states[s].z;
          const double gx = gt.gt_states[s + h].x - gt.gt_states[s].x;
          const double gy = gt.gt_states[s + h].y - gt.gt_states[s].y;
          const double gz = gt.gt_states[s + h].z - gt.gt_states[s].z;
          deviation_sum[h - 1] += std::sqrt((ex - gx) * (ex - gx) + (ey - gy) * (ey - gy) +
                                            (ez - gz) * (ez - gz));
          deviation_count[h - 1] += 1;
        }
      }
    }
  }

  if (!deviation_sum.empty()) {
    std::ofstream out(fs::path(output) / "deviation.txt");
    out << "# horizon mean_displacement_deviation\n";
    char line[64];
    for (std::size_t h = 0; h < deviation_sum.size(); ++h) {
      const double mean = deviation_count[h] > 0
                              ? deviation_sum[h] / static_cast<double>(deviation_count[h])
                              : 0.0;
      std::snprintf(line, sizeof(line), "%zu %.9g\n", h + 1, mean);
      out << line;
    }
  }
  return 0;
}

// ---------------------------------------------------------------------------
// simulate-scan

int cmd_simulate_scan(const std::string& shape_path, const std::vector<double>& pose,
                      const std::vector<double>& sensor, double resolution,
                      const std::string& output) {
  const sotrack::PointCloud shape =
      sotrack::read_point_file(shape_path, sotrack::Frame::object);
  if (shape.empty()) {
    throw sotrack::ArchiveError(shape_path + ": empty shape");
  }
  const sotrack::ObjectState state{pose[0], pose[1], pose[2], pose[3]};
  const sotrack::Vec3 origin{sensor[0], sensor[1], sensor[2]};
  const sotrack::PointCloud scan =
      sotrack::synth::simulate_scan(shape, state, origin, resolution);
  sotrack::write_point_file(output, scan);
  std::cout << scan.size() << " returns from " << shape.size() << " shape points\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Model-free single-object tracking in LiDAR point-cloud sequences"};
  app.require_subcommand(1);

  std::string config_path;
  std::optional<std::uint64_t> seed;
  int workers = 1;

  // track
  auto* track_cmd = app.add_subcommand("track", "Track objects through tracklet archives");
  std::vector<std::string> track_inputs;
  std::string track_output = "track_out";
  track_cmd->add_option("archives", track_inputs, "Tracklet archives or directories of them")
      ->required();
  track_cmd->add_option("--config", config_path, "Run configuration file");
  track_cmd->add_option("--seed", seed, "Override the configured RNG seed");
  track_cmd->add_option("--workers", workers, "Concurrent tracklets");
  track_cmd->add_option("--output", track_output, "Output directory");

  // eval
  auto* eval_cmd = app.add_subcommand("eval", "Score track results against ground truth");
  std::string eval_results, eval_gt, eval_output = "eval_out";
  eval_cmd->add_option("results", eval_results, "Directory of track results")->required();
  eval_cmd->add_option("gt", eval_gt, "Directory of ground-truth archives")->required();
  eval_cmd->add_option("--config", config_path, "Run configuration file");
  eval_cmd->add_option("--output", eval_output, "Output directory");

  // synth
  auto* synth_cmd = app.add_subcommand("synth", "Generate a synthetic tracklet benchmark");
  std::string synth_spec, synth_output = "synth_out";
  synth_cmd->add_option("spec", synth_spec, "Suite specification file")->required();
  synth_cmd->add_option("--seed", seed, "Override the suite seed");
  synth_cmd->add_option("--workers", workers, "Concurrent tracklets");
  synth_cmd->add_option("--output", synth_output, "Output directory");

  // export-motion
  auto* motion_cmd = app.add_subcommand("export-motion", "Export per-frame motion records");
  std::string motion_result, motion_gt, motion_output = "motion_out";
  int motion_window = 30;
  motion_cmd->add_option("result", motion_result, "Track result directory")->required();
  motion_cmd->add_option("--gt", motion_gt, "Ground-truth archives for deviation curves");
  motion_cmd->add_option("--window", motion_window, "Cumulative displacement window, frames");
  motion_cmd->add_option("--output", motion_output, "Output directory");

  // simulate-scan
  auto* scan_cmd = app.add_subcommand("simulate-scan", "Render one scan from a stored shape");
  std::string scan_shape, scan_output = "scan.bin";
  std::vector<double> scan_pose{0.0, 0.0, 0.0, 0.0};
  std::vector<double> scan_sensor{0.0, 0.0, 0.0};
  double scan_resolution = 0.005;
  scan_cmd->add_option("--shape", scan_shape, "Shape point file (object frame)")->required();
  scan_cmd->add_option("--pose", scan_pose, "Object pose x y z theta")->expected(4);
  scan_cmd->add_option("--sensor", scan_sensor, "Sensor position x y z")->expected(3);
  scan_cmd->add_option("--resolution", scan_resolution, "Angular bin size, radians");
  scan_cmd->add_option("--output", scan_output, "Scan point file");

  CLI11_PARSE(app, argc, argv);

  try {
    if (track_cmd->parsed()) {
      return cmd_track(track_inputs, config_path, seed, track_output, workers);
    }
    if (eval_cmd->parsed()) {
      return cmd_eval(eval_results, eval_gt, config_path, eval_output);
    }
    if (synth_cmd->parsed()) {
      return cmd_synth(synth_spec, seed, synth_output, workers);
    }
    if (motion_cmd->parsed()) {
      return cmd_export_motion(motion_result, motion_gt, motion_window, motion_output);
    }
    if (scan_cmd->parsed()) {
      return cmd_simulate_scan(scan_shape, scan_pose, scan_sensor, scan_resolution, scan_output);
    }
  } catch (const sotrack::ArchiveError& e) {
    std::cerr << "error: archive: " << e.what() << "\n";
    return 2;
  } catch (const sotrack::ConfigError& e) {
    std::cerr << "error: config: " << e.what() << "\n";
    return 1;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: invalid: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: internal: " << e.what() << "\n";
    return 3;
  }
  return 0;
}
