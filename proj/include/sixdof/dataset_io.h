// SPDX-License-Identifier: MIT

#ifndef SIXDOF_DATASET_IO_H_
#define SIXDOF_DATASET_IO_H_

#include <filesystem>
#include <string>
#include <vector>

#include "sixdof/calibration.h"
#include "sixdof/mesh.h"
#include "sixdof/sequence.h"

namespace sixdof {

namespace fs = std::filesystem;

// PLY (ascii, binary little/big endian) or OBJ, chosen by extension. Polygons
// are fan-triangulated. Throws Error(kParseError) on malformed or truncated
// files and Error(kEmptyMesh) when no triangle survives.
Mesh load_mesh(const fs::path& path);
void save_mesh_ply(const fs::path& path, const Mesh& mesh, bool binary = true);
void save_mesh_obj(const fs::path& path, const Mesh& mesh);

// Native sequence layout:
//   depth/%06d.png   16-bit depth in mm
//   rgb/%06d.png     optional 8-bit RGB
//   poses.jsonl      one 16-number row-major matrix per line
//   meta.json        scenario, object id, intrinsics, timestamps, markers
// Throws Error(kMissingFrame) when no depth frames exist or numbering has gaps,
// Error(kPoseCountMismatch) when poses.jsonl disagrees with the frame count.
Sequence load_sequence(const fs::path& dir);
void save_sequence(const Sequence& sequence, const fs::path& dir);

std::string frame_filename(std::size_t index);

struct ManifestObject {
  std::string name;
  std::string mesh;  // relative to the dataset root
  double max_dimension_mm = 0.0;
};

struct ManifestSequence {
  std::string path;  // relative to the dataset root
  ScenarioKind scenario;
  std::string object;
};

// Declared per-object sequence counts.
struct ScenarioBreakdown {
  int stability = 12;
  int occlusion = 11;
  int interaction = 4;
};

struct DatasetManifest {
  std::vector<ManifestObject> objects;
  std::vector<ManifestSequence> sequences;
  ScenarioBreakdown breakdown;
};

inline constexpr const char* kManifestFilename = "manifest.json";

DatasetManifest load_manifest(const fs::path& path);
void save_manifest(const DatasetManifest& manifest, const fs::path& path);

// Human-readable list of violations; empty when the manifest is consistent.
std::vector<std::string> validate_manifest(const DatasetManifest& manifest,
                                           const fs::path& root);

// CSV readers. A non-numeric first line is treated as a header.
// timestamp_ms,x_mm,y_mm,z_mm
MocapTrack read_track_csv(const fs::path& path);
// u_px,v_px,x_mm,y_mm,z_mm
std::vector<Correspondence2D3D> read_correspondences_csv(const fs::path& path);
// timestamp_ms,u_px,v_px[,track]
std::vector<TimedDetection> read_detections_csv(const fs::path& path);
// x_mm,y_mm,z_mm
std::vector<Vec3> read_points_csv(const fs::path& path);

}  // namespace sixdof

#endif  // SIXDOF_DATASET_IO_H_
