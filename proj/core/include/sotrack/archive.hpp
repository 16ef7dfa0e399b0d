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
#include <vector>

#include "sotrack/tracker.hpp"
#include "sotrack/types.hpp"

namespace sotrack {

/// Malformed or inconsistent on-disk data. Messages name the offending file.
class ArchiveError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Tracklet directory layout:
///   manifest.json            frame count, first box, optional ground truth
///   frames/frame_NNNNNN.bin  one per frame, little-endian float32 xyz triples
///   gt_shape.bin             optional, same binary layout, object frame
///
/// Frame files are numbered from 1. Read rejects frame files whose byte size
/// is not a multiple of 12 and manifests whose frame count disagrees with
/// the files on disk.
void write_tracklet_archive(const std::filesystem::path& dir, const Tracklet& tracklet);
[[nodiscard]] Tracklet read_tracklet_archive(const std::filesystem::path& dir);

/// Raw point file helpers (the float32 layout above).
void write_point_file(const std::filesystem::path& path, const PointCloud& cloud);
[[nodiscard]] PointCloud read_point_file(const std::filesystem::path& path, Frame frame);

/// Track output directory layout, one directory per tracklet:
///   states.txt         "frame x y z theta" per line, frames 2..L, 9 significant digits
///   shape.bin          aggregated shape, object frame
///   meta.json          tracklet name, frame count, first box
///   diagnostics.json   per-frame solver diagnostics
void write_track_result(const std::filesystem::path& dir, const Tracklet& tracklet,
                        const TrackResult& result);

struct LoadedTrackResult {
  std::string name;
  std::size_t frame_count = 0;
  BoundingBox first_box;
  std::vector<ObjectState> states;  // frames 2..L
  PointCloud shape{Frame::object};
};

[[nodiscard]] LoadedTrackResult read_track_result(const std::filesystem::path& dir);

/// States serialization shared by the writer and tests.
[[nodiscard]] std::string format_states(const std::vector<ObjectState>& states);
[[nodiscard]] std::vector<ObjectState> parse_states(const std::string& text);

/// Subdirectories of `dir` that look like tracklet archives (manifest.json).
[[nodiscard]] std::vector<std::filesystem::path> list_archives(const std::filesystem::path& dir);

/// Subdirectories of `dir` that look like track results (states.txt).
[[nodiscard]] std::vector<std::filesystem::path> list_results(const std::filesystem::path& dir);

}  // namespace sotrack
