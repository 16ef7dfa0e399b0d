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

#include "sotrack/archive.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

namespace sotrack {

static_assert(std::endian::native == std::endian::little,
              "point files are little-endian float32");

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string frame_file_name(std::size_t index) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "frame_%06zu.bin", index);
  return buf;
}

json box_to_json(const BoundingBox& box) {
  return json{{"center", {box.state.x, box.state.y, box.state.z}},
              {"theta", box.state.theta},
              {"size", {box.size.length, box.size.width, box.size.height}}};
}

BoundingBox box_from_json(const json& j, const fs::path& source) {
  try {
    BoundingBox box;
    const auto& center = j.at("center");
    box.state = ObjectState{center.at(0).get<double>(), center.at(1).get<double>(),
                            center.at(2).get<double>(), j.at("theta").get<double>()};
    const auto& size = j.at("size");
    box.size = {size.at(0).get<double>(), size.at(1).get<double>(), size.at(2).get<double>()};
    return box;
  } catch (const json::exception& e) {
    throw ArchiveError(source.string() + ": bad box: " + e.what());
  }
}

json read_json_file(const fs::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw ArchiveError(path.string() + ": cannot open");
  }
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw ArchiveError(path.string() + ": invalid json: " + e.what());
  }
}

}  // namespace

void write_point_file(const fs::path& path, const PointCloud& cloud) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw ArchiveError(path.string() + ": cannot open for writing");
  }
  std::vector<float> buffer;
  buffer.reserve(cloud.size() * 3);
  for (const Vec3& p : cloud.points) {
    buffer.push_back(static_cast<float>(p.x));
    buffer.push_back(static_cast<float>(p.y));
    buffer.push_back(static_cast<float>(p.z));
  }
  out.write(reinterpret_cast<const char*>(buffer.data()),
            static_cast<std::streamsize>(buffer.size() * sizeof(float)));
  if (!out) {
    throw ArchiveError(path.string() + ": write failed");
  }
}

PointCloud read_point_file(const fs::path& path, Frame frame) {
  std::ifstream in(path, std::ios::binary | std::ios::ate);
  if (!in) {
    throw ArchiveError(path.string() + ": cannot open");
  }
  const std::streamsize bytes = in.tellg();
  if (bytes % static_cast<std::streamsize>(3 * sizeof(float)) != 0) {
    throw ArchiveError(path.string() + ": size " + std::to_string(bytes) +
                       " is not a multiple of 12 bytes");
  }
  in.seekg(0);
  std::vector<float> buffer(static_cast<std::size_t>(bytes) / sizeof(float));
  in.read(reinterpret_cast<char*>(buffer.data()), bytes);
  if (!in) {
    throw ArchiveError(path.string() + ": short read");
  }
  PointCloud cloud(frame);
  cloud.points.reserve(buffer.size() / 3);
  for (std::size_t i = 0; i + 2 < buffer.size(); i += 3) {
    const Vec3 p{buffer[i], buffer[i + 1], buffer[i + 2]};
    if (!std::isfinite(p.x) || !std::isfinite(p.y) || !std::isfinite(p.z)) {
      throw ArchiveError(path.string() + ": non-finite coordinate at point " +
                         std::to_string(i / 3));
    }
    cloud.points.push_back(p);
  }
  return cloud;
}

void write_tracklet_archive(const fs::path& dir, const Tracklet& tracklet) {
  tracklet.validate();
  fs::create_directories(dir / "frames");

  json manifest;
  manifest["format_version"] = 1;
  manifest["name"] = tracklet.name;
  manifest["frame_count"] = tracklet.length();
  manifest["first_box"] = box_to_json(tracklet.first_box);
  if (tracklet.has_gt_states()) {
    json states = json::array();
    for (const ObjectState& s : tracklet.gt_states) {
      states.push_back({s.x, s.y, s.z, s.theta});
    }
    manifest["gt_states"] = std::move(states);
  }
  if (!tracklet.gt_shape.empty()) {
    manifest["gt_shape_file"] = "gt_shape.bin";
    write_point_file(dir / "gt_shape.bin", tracklet.gt_shape);
  }
  std::ofstream out(dir / "manifest.json");
  out << manifest.dump(2) << "\n";
  if (!out) {
    throw ArchiveError((dir / "manifest.json").string() + ": write failed");
  }
  for (std::size_t k = 0; k < tracklet.length(); ++k) {
    write_point_file(dir / "frames" / frame_file_name(k + 1), tracklet.frames[k]);
  }
}

Tracklet read_tracklet_archive(const fs::path& dir) {
  const fs::path manifest_path = dir / "manifest.json";
  const json manifest = read_json_file(manifest_path);

  Tracklet tracklet;
  try {
    tracklet.name = manifest.value("name", dir.filename().string());
    tracklet.first_box = box_from_json(manifest.at("first_box"), manifest_path);
    const auto frame_count = manifest.at("frame_count").get<std::size_t>();
    if (manifest.contains("gt_states")) {
      for (const auto& s : manifest.at("gt_states")) {
        tracklet.gt_states.emplace_back(s.at(0).get<double>(), s.at(1).get<double>(),
                                        s.at(2).get<double>(), s.at(3).get<double>());
      }
      if (tracklet.gt_states.size() != frame_count) {
        throw ArchiveError(manifest_path.string() + ": gt state count " +
                           std::to_string(tracklet.gt_states.size()) +
                           " does not match frame count " + std::to_string(frame_count));
      }
    }
    std::size_t on_disk = 0;
    if (fs::is_directory(dir / "frames")) {
      for (const auto& entry : fs::directory_iterator(dir / "frames")) {
        if (entry.path().extension() == ".bin") {
          ++on_disk;
        }
      }
    }
    if (on_disk != frame_count) {
      throw ArchiveError(manifest_path.string() + ": frame count " + std::to_string(frame_count) +
                         " but " + std::to_string(on_disk) + " frame files on disk");
    }
    tracklet.frames.reserve(frame_count);
    for (std::size_t k = 0; k < frame_count; ++k) {
      tracklet.frames.push_back(
          read_point_file(dir / "frames" / frame_file_name(k + 1), Frame::world));
    }
    if (manifest.contains("gt_shape_file")) {
      tracklet.gt_shape =
          read_point_file(dir / manifest.at("gt_shape_file").get<std::string>(), Frame::object);
    }
  } catch (const json::exception& e) {
    throw ArchiveError(manifest_path.string() + ": " + e.what());
  }
  tracklet.validate();
  return tracklet;
}

std::string format_states(const std::vector<ObjectState>& states) {
  std::string out;
  char line[160];
  for (std::size_t i = 0; i < states.size(); ++i) {
    const ObjectState& s = states[i];
    std::snprintf(line, sizeof(line), "%zu %.9g %.9g %.9g %.9g\n", i + 2, s.x, s.y, s.z, s.theta);
    out += line;
  }
  return out;
}

std::vector<ObjectState> parse_states(const std::string& text) {
  std::vector<ObjectState> states;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) {
      continue;
    }
    std::istringstream ls(line);
    std::size_t frame = 0;
    double x = 0.0, y = 0.0, z = 0.0, theta = 0.0;
    if (!(ls >> frame >> x >> y >> z >> theta)) {
      throw ArchiveError("states: bad line: " + line);
    }
    states.emplace_back(x, y, z, theta);
  }
  return states;
}

void write_track_result(const fs::path& dir, const Tracklet& tracklet,
                        const TrackResult& result) {
  fs::create_directories(dir);
  {
    std::ofstream out(dir / "states.txt");
    out << format_states(result.states);
    if (!out) {
      throw ArchiveError((dir / "states.txt").string() + ": write failed");
    }
  }
  write_point_file(dir / "shape.bin", result.shape);

  json meta;
  meta["name"] = tracklet.name;
  meta["frame_count"] = tracklet.length();
  meta["first_box"] = box_to_json(tracklet.first_box);
  std::ofstream meta_out(dir / "meta.json");
  meta_out << meta.dump(2) << "\n";

  json diags = json::array();
  for (const FrameDiagnostics& d : result.diagnostics) {
    diags.push_back({{"loss", d.loss},
                     {"icp", d.terms.icp},
                     {"shape", d.terms.shape},
                     {"motion_consistency", d.terms.motion_consistency},
                     {"motion_prior", d.terms.motion_prior},
                     {"observations", d.observation_count},
                     {"object_points", d.object_count},
                     {"outer_iterations", d.outer_iterations},
                     {"fallback", d.fallback},
                     {"ransac_degenerate", d.ransac_degenerate},
                     {"no_ground_model", d.no_ground_model}});
  }
  std::ofstream diag_out(dir / "diagnostics.json");
  diag_out << diags.dump(2) << "\n";
  if (!diag_out) {
    throw ArchiveError((dir / "diagnostics.json").string() + ": write failed");
  }
}

LoadedTrackResult read_track_result(const fs::path& dir) {
  LoadedTrackResult loaded;
  const fs::path meta_path = dir / "meta.json";
  const json meta = read_json_file(meta_path);
  try {
    loaded.name = meta.value("name", dir.filename().string());
    loaded.frame_count = meta.at("frame_count").get<std::size_t>();
    loaded.first_box = box_from_json(meta.at("first_box"), meta_path);
  } catch (const json::exception& e) {
    throw ArchiveError(meta_path.string() + ": " + e.what());
  }
  std::ifstream in(dir / "states.txt");
  if (!in) {
    throw ArchiveError((dir / "states.txt").string() + ": cannot open");
  }
  std::stringstream buffer;
  buffer << in.rdbuf();
  loaded.states = parse_states(buffer.str());
  if (loaded.states.size() + 1 != loaded.frame_count) {
    throw ArchiveError((dir / "states.txt").string() + ": " +
                       std::to_string(loaded.states.size()) + " states for " +
                       std::to_string(loaded.frame_count) + " frames");
  }
  if (fs::exists(dir / "shape.bin")) {
    loaded.shape = read_point_file(dir / "shape.bin", Frame::object);
  }
  return loaded;
}

namespace {

std::vector<fs::path> list_subdirs_with(const fs::path& dir, const std::string& marker) {
  if (!fs::is_directory(dir)) {
    throw ArchiveError(dir.string() + ": not a directory");
  }
  std::vector<fs::path> out;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.is_directory() && fs::exists(entry.path() / marker)) {
      out.push_back(entry.path());
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

std::vector<fs::path> list_archives(const fs::path& dir) {
  return list_subdirs_with(dir, "manifest.json");
}

std::vector<fs::path> list_results(const fs::path& dir) {
  return list_subdirs_with(dir, "states.txt");
}

}  // namespace sotrack
