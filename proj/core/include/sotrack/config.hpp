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

#include <filesystem>
#include <stdexcept>
#include <string>

#include "sotrack/ground.hpp"
#include "sotrack/synth.hpp"
#include "sotrack/tracker.hpp"

namespace sotrack {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Full run configuration with the reference defaults. Files are flat
/// `key = value` lines, `#` comments; unknown keys are rejected.
struct RunConfig {
  LossWeights weights;
  TrackerConfig tracker;
  SolverConfig solver;
  RansacParams ransac;
  GroundParams ground;
  double chamfer_voxel = 0.05;
  std::uint64_t seed = 0;

  /// Throws ConfigError for unknown keys or unparsable values.
  void set(const std::string& key, const std::string& value);

  /// Every key at its current value, one per line, parse_run_config-ready.
  [[nodiscard]] std::string dump() const;
};

[[nodiscard]] RunConfig parse_run_config(const std::filesystem::path& path);

/// Same key-value format for benchmark suite recipes (suite.* keys).
[[nodiscard]] synth::SuiteSpec parse_suite_spec(const std::filesystem::path& path);

}  // namespace sotrack
