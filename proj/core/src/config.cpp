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

#include "sotrack/config.hpp"

#include <charconv>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

namespace sotrack {

namespace {

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string::npos) {
    return "";
  }
  const auto end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

double parse_double(const std::string& key, const std::string& value) {
  try {
    std::size_t used = 0;
    const double v = std::stod(value, &used);
    if (used != value.size()) {
      throw std::invalid_argument("trailing characters");
    }
    return v;
  } catch (const std::exception&) {
    throw ConfigError("bad numeric value for " + key + ": '" + value + "'");
  }
}

int parse_int(const std::string& key, const std::string& value) {
  int v = 0;
  const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
  if (ec != std::errc{} || ptr != value.data() + value.size()) {
    throw ConfigError("bad integer value for " + key + ": '" + value + "'");
  }
  return v;
}

std::uint64_t parse_u64(const std::string& key, const std::string& value) {
  std::uint64_t v = 0;
  const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
  if (ec != std::errc{} || ptr != value.data() + value.size()) {
    throw ConfigError("bad seed value for " + key + ": '" + value + "'");
  }
  return v;
}

bool parse_bool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "1") {
    return true;
  }
  if (value == "false" || value == "0") {
    return false;
  }
  throw ConfigError("bad boolean value for " + key + ": '" + value + "'");
}

// parse a whole flat key-value file through a per-key setter
void parse_file(const std::filesystem::path& path,
                const std::function<void(const std::string&, const std::string&)>& set) {
  std::ifstream in(path);
  if (!in) {
    throw ConfigError(path.string() + ": cannot open");
  }
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) {
      line = line.substr(0, hash);
    }
    line = trim(line);
    if (line.empty()) {
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError(path.string() + ":" + std::to_string(line_no) + ": expected key = value");
    }
    set(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
}

}  // namespace

void RunConfig::set(const std::string& key, const std::string& value) {
  if (key == "seed") {
    seed = parse_u64(key, value);
  } else if (key == "weights.icp") {
    weights.icp = parse_double(key, value);
  } else if (key == "weights.shape") {
    weights.shape = parse_double(key, value);
  } else if (key == "weights.motion_consistency") {
    weights.motion_consistency = parse_double(key, value);
  } else if (key == "weights.motion_prior") {
    weights.motion_prior = parse_double(key, value);
  } else if (key == "tracker.alpha") {
    tracker.alpha = parse_double(key, value);
  } else if (key == "tracker.gamma_in") {
    tracker.gamma_in = parse_double(key, value);
  } else if (key == "tracker.gamma_aft") {
    tracker.gamma_aft = parse_double(key, value);
  } else if (key == "tracker.gamma_first") {
    tracker.gamma_first = parse_double(key, value);
  } else if (key == "tracker.keyframe_interval") {
    tracker.keyframe_interval = parse_int(key, value);
  } else if (key == "tracker.subshape_window") {
    tracker.subshape_window = parse_int(key, value);
  } else if (key == "tracker.shape_mode") {
    if (value == "aggregate") {
      tracker.shape_mode = ShapeMode::aggregate;
    } else if (value == "first") {
      tracker.shape_mode = ShapeMode::first_frame;
    } else {
      throw ConfigError("tracker.shape_mode must be 'aggregate' or 'first', got '" + value + "'");
    }
  } else if (key == "tracker.ground_removal") {
    tracker.ground_removal = parse_bool(key, value);
  } else if (key == "solver.max_outer_iterations") {
    solver.max_outer_iterations = parse_int(key, value);
  } else if (key == "solver.max_inner_iterations") {
    solver.max_inner_iterations = parse_int(key, value);
  } else if (key == "solver.tolerance") {
    solver.tolerance = parse_double(key, value);
  } else if (key == "ransac.enabled") {
    ransac.enabled = parse_bool(key, value);
  } else if (key == "ransac.min_samples") {
    ransac.min_samples = parse_int(key, value);
  } else if (key == "ransac.iterations") {
    ransac.iterations = parse_int(key, value);
  } else if (key == "ransac.threshold") {
    ransac.threshold = parse_double(key, value);
  } else if (key == "ground.threshold") {
    ground.threshold = parse_double(key, value);
  } else if (key == "ground.iterations") {
    ground.iterations = parse_int(key, value);
  } else if (key == "ground.seed_fraction") {
    ground.seed_fraction = parse_double(key, value);
  } else if (key == "ground.min_inlier_fraction") {
    ground.min_inlier_fraction = parse_double(key, value);
  } else if (key == "metrics.chamfer_voxel") {
    chamfer_voxel = parse_double(key, value);
  } else {
    throw ConfigError("unknown configuration key: " + key);
  }
}

std::string RunConfig::dump() const {
  std::ostringstream out;
  out << "seed = " << seed << "\n";
  out << "weights.icp = " << weights.icp << "\n";
  out << "weights.shape = " << weights.shape << "\n";
  out << "weights.motion_consistency = " << weights.motion_consistency << "\n";
  out << "weights.motion_prior = " << weights.motion_prior << "\n";
  out << "tracker.alpha = " << tracker.alpha << "\n";
  out << "tracker.gamma_in = " << tracker.gamma_in << "\n";
  out << "tracker.gamma_aft = " << tracker.gamma_aft << "\n";
  out << "tracker.gamma_first = " << tracker.gamma_first << "\n";
  out << "tracker.keyframe_interval = " << tracker.keyframe_interval << "\n";
  out << "tracker.subshape_window = " << tracker.subshape_window << "\n";
  out << "tracker.shape_mode = "
      << (tracker.shape_mode == ShapeMode::aggregate ? "aggregate" : "first") << "\n";
  out << "tracker.ground_removal = " << (tracker.ground_removal ? "true" : "false") << "\n";
  out << "solver.max_outer_iterations = " << solver.max_outer_iterations << "\n";
  out << "solver.max_inner_iterations = " << solver.max_inner_iterations << "\n";
  out << "solver.tolerance = " << solver.tolerance << "\n";
  out << "ransac.enabled = " << (ransac.enabled ? "true" : "false") << "\n";
  out << "ransac.min_samples = " << ransac.min_samples << "\n";
  out << "ransac.iterations = " << ransac.iterations << "\n";
  out << "ransac.threshold = " << ransac.threshold << "\n";
  out << "ground.threshold = " << ground.threshold << "\n";
  out << "ground.iterations = " << ground.iterations << "\n";
  out << "ground.seed_fraction = " << ground.seed_fraction << "\n";
  out << "ground.min_inlier_fraction = " << ground.min_inlier_fraction << "\n";
  out << "metrics.chamfer_voxel = " << chamfer_voxel << "\n";
  return out.str();
}

RunConfig parse_run_config(const std::filesystem::path& path) {
  RunConfig config;
  parse_file(path, [&](const std::string& key, const std::string& value) {
    config.set(key, value);
  });
  return config;
}

synth::SuiteSpec parse_suite_spec(const std::filesystem::path& path) {
  synth::SuiteSpec spec;
  parse_file(path, [&](const std::string& key, const std::string& value) {
    if (key == "suite.count") {
      spec.count = parse_int(key, value);
    } else if (key == "suite.frames_min") {
      spec.frames_min = parse_int(key, value);
    } else if (key == "suite.frames_max") {
      spec.frames_max = parse_int(key, value);
    } else if (key == "suite.noise_sigma") {
      spec.noise_sigma = parse_double(key, value);
    } else if (key == "suite.static_fraction") {
      spec.static_fraction = parse_double(key, value);
    } else if (key == "suite.turning_fraction") {
      spec.turning_fraction = parse_double(key, value);
    } else if (key == "suite.sensor_distance_min") {
      spec.sensor_distance_min = parse_double(key, value);
    } else if (key == "suite.sensor_distance_max") {
      spec.sensor_distance_max = parse_double(key, value);
    } else if (key == "suite.points_near") {
      spec.points_near = parse_int(key, value);
    } else if (key == "suite.points_far") {
      spec.points_far = parse_int(key, value);
    } else if (key == "suite.clutter_fraction") {
      spec.clutter_fraction = parse_double(key, value);
    } else if (key == "suite.ground_points") {
      spec.ground_points = parse_double(key, value);
    } else if (key == "suite.ground_extent") {
      spec.ground_extent = parse_double(key, value);
    } else if (key == "suite.truck_fraction") {
      spec.truck_fraction = parse_double(key, value);
    } else if (key == "suite.seed") {
      spec.seed = parse_u64(key, value);
    } else if (key == "suite.min_initial_points") {
      spec.min_initial_points = parse_int(key, value);
    } else {
      throw ConfigError("unknown suite key: " + key);
    }
  });
  return spec;
}

}  // namespace sotrack
