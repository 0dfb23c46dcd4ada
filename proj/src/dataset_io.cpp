// SPDX-License-Identifier: MIT

#include "sixdof/dataset_io.h"

#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include <json.hpp>

#include "sixdof/error.h"
#include "sixdof/image_io.h"
#include "sixdof/parallel.h"
#include "sixdof/serialization.h"

namespace sixdof {
namespace {

using nlohmann::json;

json read_json_file(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIoError, "cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kParseError, path.string() + ": " + e.what());
  }
}

void write_text_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kIoError, "cannot write " + path.string());
  out << text;
  if (!out) throw Error(ErrorCode::kIoError, "failed writing " + path.string());
}

std::size_t count_frames(const fs::path& dir) {
  std::size_t n = 0;
  while (fs::exists(dir / frame_filename(n))) ++n;
  return n;
}

std::vector<std::vector<double>> read_numeric_csv(const fs::path& path, std::size_t min_cols,
                                                  std::size_t max_cols) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIoError, "cannot open " + path.string());
  std::vector<std::vector<double>> rows;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos || line[0] == '#') continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    bool numeric = true;
    while (std::getline(ss, cell, ',')) {
      try {
        std::size_t used = 0;
        row.push_back(std::stod(cell, &used));
        if (cell.find_first_not_of(" \t", used) != std::string::npos) numeric = false;
      } catch (const std::logic_error&) {
        numeric = false;
      }
    }
    if (!numeric) {
      if (rows.empty() && line_no == 1) continue;
      throw Error(ErrorCode::kParseError,
                  path.string() + ":" + std::to_string(line_no) + ": non-numeric cell");
    }
    if (row.size() < min_cols || row.size() > max_cols) {
      throw Error(ErrorCode::kParseError,
                  path.string() + ":" + std::to_string(line_no) + ": expected " +
                      std::to_string(min_cols) + " columns");
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace

std::string frame_filename(std::size_t index) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%06zu.png", index);
  return buf;
}

void save_sequence(const Sequence& sequence, const fs::path& dir) {
  sequence.validate();
  fs::create_directories(dir / "depth");
  const bool has_rgb = sequence.frames.front().rgb.has_value();
  if (has_rgb) fs::create_directories(dir / "rgb");

  std::string poses;
  json timestamps = json::array();
  for (const auto& f : sequence.frames) {
    poses += pose_to_json(f.gt_pose).dump() + "\n";
    timestamps.push_back(f.timestamp_ms);
  }
  parallel_for(sequence.frames.size(), default_jobs(), [&](std::size_t i) {
    const Frame& f = sequence.frames[i];
    write_depth_png(dir / "depth" / frame_filename(i), f.depth);
    if (has_rgb) {
      if (!f.rgb) {
        throw Error(ErrorCode::kInvalidArgument, "rgb must be present on all frames or none");
      }
      write_rgb_png(dir / "rgb" / frame_filename(i), *f.rgb);
    }
  });
  write_text_file(dir / "poses.jsonl", poses);

  json meta = {{"scenario", to_string(sequence.scenario)},
               {"object_id", sequence.object_id},
               {"intrinsics", intrinsics_to_json(sequence.intrinsics)},
               {"timestamps_ms", timestamps},
               {"has_rgb", has_rgb}};
  if (sequence.markers) {
    json positions = json::array();
    for (const auto& p : sequence.markers->positions) positions.push_back(vec3_to_json(p));
    meta["markers"] = {{"diameter_mm", sequence.markers->diameter_mm},
                       {"positions", positions}};
  }
  write_text_file(dir / "meta.json", meta.dump(2) + "\n");
}

Sequence load_sequence(const fs::path& dir) {
  const std::size_t n = count_frames(dir / "depth");
  if (n == 0) throw Error(ErrorCode::kMissingFrame, "no depth frames in " + dir.string());
  {
    // Any numbered frame beyond the contiguous run indicates a gap.
    std::error_code ec;
    std::size_t files = 0;
    for (const auto& e : fs::directory_iterator(dir / "depth", ec)) {
      if (e.path().extension() == ".png") ++files;
    }
    if (files != n) {
      throw Error(ErrorCode::kMissingFrame,
                  "depth frame " + frame_filename(n) + " missing in " + dir.string());
    }
  }

  std::vector<Pose> poses;
  const fs::path pose_path = dir / "poses.jsonl";
  if (fs::exists(pose_path)) {
    std::ifstream in(pose_path);
    std::string line;
    while (std::getline(in, line)) {
      if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
      try {
        poses.push_back(pose_from_json(json::parse(line)));
      } catch (const json::exception& e) {
        throw Error(ErrorCode::kParseError, pose_path.string() + ": " + e.what());
      }
    }
  }
  if (poses.size() != n) {
    throw Error(ErrorCode::kPoseCountMismatch,
                std::to_string(poses.size()) + " poses for " + std::to_string(n) + " frames");
  }

  const json meta = read_json_file(dir / "meta.json");
  Sequence seq;
  try {
    seq.scenario = parse_scenario(meta.at("scenario").get<std::string>());
    seq.object_id = meta.at("object_id").get<std::string>();
    seq.intrinsics = intrinsics_from_json(meta.at("intrinsics"));
    const auto& ts = meta.at("timestamps_ms");
    if (ts.size() != n) {
      throw Error(ErrorCode::kPoseCountMismatch, "timestamp count differs from frame count");
    }
    seq.frames.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      seq.frames[i].timestamp_ms = ts[i].get<double>();
      seq.frames[i].gt_pose = poses[i];
    }
    if (meta.contains("markers")) {
      MarkerSet m;
      m.diameter_mm = meta["markers"].at("diameter_mm").get<double>();
      for (const auto& p : meta["markers"].at("positions")) m.positions.push_back(vec3_from_json(p));
      seq.markers = std::move(m);
    }
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kParseError, "meta.json: " + std::string(e.what()));
  }
  const bool has_rgb = meta.value("has_rgb", false);

  parallel_for(n, default_jobs(), [&](std::size_t i) {
    seq.frames[i].depth = read_depth_png(dir / "depth" / frame_filename(i));
    if (has_rgb) {
      const fs::path rgb = dir / "rgb" / frame_filename(i);
      if (!fs::exists(rgb)) throw Error(ErrorCode::kMissingFrame, "missing " + rgb.string());
      seq.frames[i].rgb = read_rgb_png(rgb);
    }
  });
  seq.validate();
  return seq;
}

DatasetManifest load_manifest(const fs::path& path) {
  const json j = read_json_file(path);
  DatasetManifest m;
  try {
    for (const auto& o : j.at("objects")) {
      m.objects.push_back({o.at("name").get<std::string>(), o.at("mesh").get<std::string>(),
                           o.value("max_dimension_mm", 0.0)});
    }
    for (const auto& s : j.at("sequences")) {
      m.sequences.push_back({s.at("path").get<std::string>(),
                             parse_scenario(s.at("scenario").get<std::string>()),
                             s.at("object").get<std::string>()});
    }
    if (j.contains("breakdown")) {
      const auto& b = j["breakdown"];
      m.breakdown.stability = b.value("stability", m.breakdown.stability);
      m.breakdown.occlusion = b.value("occlusion", m.breakdown.occlusion);
      m.breakdown.interaction = b.value("interaction", m.breakdown.interaction);
    }
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kParseError, path.string() + ": " + e.what());
  }
  return m;
}

void save_manifest(const DatasetManifest& manifest, const fs::path& path) {
  json objects = json::array();
  for (const auto& o : manifest.objects) {
    objects.push_back(
        {{"name", o.name}, {"mesh", o.mesh}, {"max_dimension_mm", o.max_dimension_mm}});
  }
  json sequences = json::array();
  for (const auto& s : manifest.sequences) {
    sequences.push_back(
        {{"path", s.path}, {"scenario", to_string(s.scenario)}, {"object", s.object}});
  }
  const json j = {{"objects", objects},
                  {"sequences", sequences},
                  {"breakdown",
                   {{"stability", manifest.breakdown.stability},
                    {"occlusion", manifest.breakdown.occlusion},
                    {"interaction", manifest.breakdown.interaction}}}};
  write_text_file(path, j.dump(2) + "\n");
}

std::vector<std::string> validate_manifest(const DatasetManifest& manifest,
                                           const fs::path& root) {
  std::vector<std::string> issues;
  std::map<std::string, std::array<int, 3>> counts;
  for (const auto& o : manifest.objects) {
    if (counts.count(o.name)) issues.push_back("object '" + o.name + "' declared twice");
    counts[o.name] = {0, 0, 0};
    if (!fs::exists(root / o.mesh)) {
      issues.push_back("object '" + o.name + "': mesh path '" + o.mesh + "' does not exist");
    }
  }
  for (const auto& s : manifest.sequences) {
    auto it = counts.find(s.object);
    if (it == counts.end()) {
      issues.push_back("sequence '" + s.path + "' references unknown object '" + s.object + "'");
    } else {
      ++it->second[s.scenario.index()];
    }
    if (!fs::exists(root / s.path)) {
      issues.push_back("sequence path '" + s.path + "' does not exist");
    }
  }
  const std::array<int, 3> expected{manifest.breakdown.stability, manifest.breakdown.occlusion,
                                    manifest.breakdown.interaction};
  const std::array<const char*, 3> names{"stability", "occlusion", "interaction"};
  for (const auto& o : manifest.objects) {
    const auto& c = counts[o.name];
    for (int f = 0; f < 3; ++f) {
      if (c[f] != expected[f]) {
        issues.push_back("object '" + o.name + "' has " + std::to_string(c[f]) + " " + names[f] +
                         " sequences, expected " + std::to_string(expected[f]));
      }
    }
  }
  return issues;
}

MocapTrack read_track_csv(const fs::path& path) {
  MocapTrack track;
  for (const auto& r : read_numeric_csv(path, 4, 4)) {
    track.push_back({r[0], Vec3(r[1], r[2], r[3])});
  }
  return track;
}

std::vector<Correspondence2D3D> read_correspondences_csv(const fs::path& path) {
  std::vector<Correspondence2D3D> out;
  for (const auto& r : read_numeric_csv(path, 5, 5)) {
    out.push_back({Vec2(r[0], r[1]), Vec3(r[2], r[3], r[4])});
  }
  return out;
}

std::vector<TimedDetection> read_detections_csv(const fs::path& path) {
  std::vector<TimedDetection> out;
  for (const auto& r : read_numeric_csv(path, 3, 4)) {
    TimedDetection d;
    d.time_ms = r[0];
    d.pixel = Vec2(r[1], r[2]);
    d.track = r.size() == 4 ? static_cast<std::size_t>(r[3]) : 0;
    out.push_back(d);
  }
  return out;
}

std::vector<Vec3> read_points_csv(const fs::path& path) {
  std::vector<Vec3> out;
  for (const auto& r : read_numeric_csv(path, 3, 3)) out.emplace_back(r[0], r[1], r[2]);
  return out;
}

}  // namespace sixdof
