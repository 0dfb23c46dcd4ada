// SPDX-License-Identifier: MIT

#include <gtest/gtest.h>

#include <algorithm>
#include <fstream>
#include <functional>
#include <random>

#include <unistd.h>

#include "sixdof/dataset_io.h"
#include "sixdof/error.h"
#include "test_util.h"

namespace sixdof {
namespace {

class TempDir {
 public:
  TempDir() {
    static int counter = 0;
    path_ = fs::temp_directory_path() /
            ("sixdof_io_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    fs::remove_all(path_);
    fs::create_directories(path_);
  }
  ~TempDir() { fs::remove_all(path_); }
  const fs::path& path() const { return path_; }

 private:
  fs::path path_;
};

void write_file(const fs::path& p, const std::string& text) {
  std::ofstream(p, std::ios::binary) << text;
}

void expect_code(ErrorCode code, const std::function<void()>& fn) {
  try {
    fn();
    ADD_FAILURE() << "expected " << to_string(code);
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), code) << e.what();
  }
}

std::vector<std::array<double, 3>> sorted_vertices(const Mesh& m) {
  std::vector<std::array<double, 3>> v;
  for (const auto& p : m.vertices) v.push_back({p.x(), p.y(), p.z()});
  std::sort(v.begin(), v.end());
  return v;
}

TEST(MeshIo, MinimalAsciiPly) {
  TempDir dir;
  write_file(dir.path() / "tri.ply",
             "ply\nformat ascii 1.0\ncomment one triangle\nelement vertex 3\n"
             "property float x\nproperty float y\nproperty float z\n"
             "element face 1\nproperty list uchar int vertex_indices\nend_header\n"
             "0 0 0\n10 0 0\n0 10 0\n3 0 1 2\n");
  const Mesh m = load_mesh(dir.path() / "tri.ply");
  EXPECT_EQ(m.vertices.size(), 3u);
  ASSERT_EQ(m.triangles.size(), 1u);
  EXPECT_EQ(m.triangles[0], (std::array<int, 3>{0, 1, 2}));
  EXPECT_DOUBLE_EQ(m.vertices[1].x(), 10.0);
}

TEST(MeshIo, ObjAndPlyOfSameCubeAgree) {
  TempDir dir;
  write_file(dir.path() / "cube.obj",
             "# unit cube\n"
             "v 0 0 0\nv 1 0 0\nv 1 1 0\nv 0 1 0\nv 0 0 1\nv 1 0 1\nv 1 1 1\nv 0 1 1\n"
             "f 1 4 3 2\nf 5 6 7 8\nf 1 2 6 5\nf 2 3 7 6\nf 3 4 8 7\nf -8 -4 -1 -5\n");
  // Same cube with a different vertex order, written as binary big-endian PLY.
  const std::vector<Vec3> order = {{1, 1, 1}, {0, 0, 0}, {1, 0, 0}, {0, 1, 1},
                                   {1, 1, 0}, {0, 1, 0}, {0, 0, 1}, {1, 0, 1}};
  std::string body;
  auto put_be = [&](const void* p, std::size_t n) {
    const auto* b = static_cast<const char*>(p);
    for (std::size_t i = 0; i < n; ++i) body.push_back(b[n - 1 - i]);
  };
  for (const auto& v : order) {
    for (int k = 0; k < 3; ++k) {
      const float f = static_cast<float>(v[k]);
      put_be(&f, 4);
    }
  }
  const int quad[6][4] = {{1, 5, 4, 2}, {6, 7, 0, 3}, {1, 2, 7, 6},
                          {2, 4, 0, 7}, {4, 5, 3, 0}, {1, 6, 3, 5}};
  for (const auto& q : quad) {
    body.push_back(4);
    for (int idx : q) put_be(&idx, 4);
  }
  write_file(dir.path() / "cube.ply",
             "ply\nformat binary_big_endian 1.0\nelement vertex 8\n"
             "property float x\nproperty float y\nproperty float z\n"
             "element face 6\nproperty list uchar int vertex_indices\nend_header\n" +
                 body);
  const Mesh obj = load_mesh(dir.path() / "cube.obj");
  const Mesh ply = load_mesh(dir.path() / "cube.ply");
  EXPECT_EQ(sorted_vertices(obj), sorted_vertices(ply));
  EXPECT_EQ(obj.triangles.size(), 12u);
  EXPECT_EQ(ply.triangles.size(), 12u);
  EXPECT_NEAR(obj.surface_area(), 6.0, 1e-12);
  EXPECT_NEAR(ply.surface_area(), 6.0, 1e-12);
}

TEST(MeshIo, SaveLoadRoundTripBinaryAndAscii) {
  TempDir dir;
  const Mesh box = make_box(40, 60, 80);
  save_mesh_ply(dir.path() / "b.ply", box, true);
  save_mesh_ply(dir.path() / "a.ply", box, false);
  save_mesh_obj(dir.path() / "o.obj", box);
  for (const char* name : {"b.ply", "a.ply", "o.obj"}) {
    const Mesh m = load_mesh(dir.path() / name);
    EXPECT_EQ(m.vertices, box.vertices) << name;
    EXPECT_EQ(m.triangles, box.triangles) << name;
  }
}

TEST(MeshIo, TruncatedFileIsParseError) {
  TempDir dir;
  write_file(dir.path() / "t.ply",
             "ply\nformat ascii 1.0\nelement vertex 3\n"
             "property float x\nproperty float y\nproperty float z\n"
             "element face 1\nproperty list uchar int vertex_indices\nend_header\n"
             "0 0 0\n10 0 0\n");
  expect_code(ErrorCode::kParseError, [&] { load_mesh(dir.path() / "t.ply"); });

  write_file(dir.path() / "h.ply", "ply\nformat ascii 1.0\nelement vertex 3\n");
  expect_code(ErrorCode::kParseError, [&] { load_mesh(dir.path() / "h.ply"); });

  const Mesh box = make_box(10, 10, 10);
  save_mesh_ply(dir.path() / "b.ply", box, true);
  const auto size = fs::file_size(dir.path() / "b.ply");
  fs::resize_file(dir.path() / "b.ply", size - 7);
  expect_code(ErrorCode::kParseError, [&] { load_mesh(dir.path() / "b.ply"); });
}

TEST(MeshIo, FaceIndexOutOfRangeAndEmpty) {
  TempDir dir;
  write_file(dir.path() / "bad.obj", "v 0 0 0\nv 1 0 0\nv 0 1 0\nf 1 2 9\n");
  expect_code(ErrorCode::kParseError, [&] { load_mesh(dir.path() / "bad.obj"); });
  write_file(dir.path() / "empty.obj", "v 0 0 0\nv 1 0 0\n");
  expect_code(ErrorCode::kEmptyMesh, [&] { load_mesh(dir.path() / "empty.obj"); });
  write_file(dir.path() / "x.stl", "solid");
  expect_code(ErrorCode::kParseError, [&] { load_mesh(dir.path() / "x.stl"); });
}

Sequence make_sequence(std::uint64_t seed, bool with_rgb) {
  std::mt19937_64 rng(seed);
  Sequence s;
  s.scenario = OcclusionScenario{45, OccluderOrientation::kVertical};
  s.object_id = "box";
  s.intrinsics = {100.5, 101.25, 31.75, 23.5, 64, 48};
  s.markers = MarkerSet{{Vec3(1, 2, 3), Vec3(-4.5, 0.125, 9)}, 3.0};
  std::uniform_int_distribution<int> depth(0, 65535);
  for (int i = 0; i < 5; ++i) {
    Frame f;
    f.depth = DepthImage(64, 48);
    for (auto& d : f.depth.data()) d = static_cast<float>(depth(rng));
    if (with_rgb) {
      RgbImage rgb{64, 48, std::vector<std::uint8_t>(64 * 48 * 3)};
      for (auto& c : rgb.data) c = static_cast<std::uint8_t>(rng());
      f.rgb = rgb;
    }
    f.timestamp_ms = 1000.0 / 30.0 * i + 0.1;
    f.gt_pose = testing::random_pose(rng);
    s.frames.push_back(std::move(f));
  }
  return s;
}

void expect_sequences_equal(const Sequence& a, const Sequence& b) {
  EXPECT_EQ(a.scenario, b.scenario);
  EXPECT_EQ(a.object_id, b.object_id);
  EXPECT_EQ(a.intrinsics.fx, b.intrinsics.fx);
  EXPECT_EQ(a.intrinsics.cy, b.intrinsics.cy);
  EXPECT_EQ(a.intrinsics.width, b.intrinsics.width);
  ASSERT_EQ(a.markers.has_value(), b.markers.has_value());
  if (a.markers) EXPECT_EQ(a.markers->positions, b.markers->positions);
  ASSERT_EQ(a.frames.size(), b.frames.size());
  for (std::size_t i = 0; i < a.frames.size(); ++i) {
    EXPECT_EQ(a.frames[i].depth, b.frames[i].depth);
    EXPECT_EQ(a.frames[i].rgb, b.frames[i].rgb);
    EXPECT_EQ(a.frames[i].timestamp_ms, b.frames[i].timestamp_ms);
    EXPECT_EQ(a.frames[i].gt_pose.matrix(), b.frames[i].gt_pose.matrix());
  }
}

TEST(SequenceIo, SaveLoadIsIdentity) {
  for (bool rgb : {false, true}) {
    TempDir dir;
    const Sequence s = make_sequence(rgb ? 7 : 8, rgb);
    save_sequence(s, dir.path() / "seq");
    expect_sequences_equal(s, load_sequence(dir.path() / "seq"));
  }
}

TEST(SequenceIo, MissingPoseFileIsPoseCountMismatch) {
  TempDir dir;
  save_sequence(make_sequence(1, false), dir.path());
  fs::remove(dir.path() / "poses.jsonl");
  expect_code(ErrorCode::kPoseCountMismatch, [&] { load_sequence(dir.path()); });
}

TEST(SequenceIo, ShortPoseFileIsPoseCountMismatch) {
  TempDir dir;
  save_sequence(make_sequence(1, false), dir.path());
  write_file(dir.path() / "poses.jsonl",
             "[1,0,0,0,0,1,0,0,0,0,1,0,0,0,0,1]\n");
  expect_code(ErrorCode::kPoseCountMismatch, [&] { load_sequence(dir.path()); });
}

TEST(SequenceIo, EmptyDirectoryIsMissingFrame) {
  TempDir dir;
  expect_code(ErrorCode::kMissingFrame, [&] { load_sequence(dir.path()); });
}

TEST(SequenceIo, GapInNumberingIsMissingFrame) {
  TempDir dir;
  save_sequence(make_sequence(2, false), dir.path());
  fs::remove(dir.path() / "depth" / frame_filename(2));
  expect_code(ErrorCode::kMissingFrame, [&] { load_sequence(dir.path()); });
}

TEST(SequenceIo, FrameFilename) {
  EXPECT_EQ(frame_filename(0), "000000.png");
  EXPECT_EQ(frame_filename(123456), "123456.png");
}

DatasetManifest well_formed_manifest(const fs::path& root, int objects) {
  DatasetManifest m;
  for (int o = 0; o < objects; ++o) {
    const std::string name = "obj" + std::to_string(o);
    fs::create_directories(root / "meshes");
    write_file(root / "meshes" / (name + ".ply"), "");
    m.objects.push_back({name, "meshes/" + name + ".ply", 100.0});
    auto add = [&](const ScenarioKind& sc, int idx) {
      const std::string path = name + "/" + std::string(scenario_family(sc)) + std::to_string(idx);
      fs::create_directories(root / path);
      m.sequences.push_back({path, sc, name});
    };
    for (int i = 0; i < 12; ++i) add(StabilityScenario{StabilityVariant(i % 3)}, i);
    const int percents[6] = {0, 15, 30, 45, 60, 75};
    for (int i = 0; i < 11; ++i) {
      add(OcclusionScenario{percents[i % 6], OccluderOrientation(i / 6)}, i);
    }
    for (int i = 0; i < 4; ++i) add(InteractionScenario{InteractionVariant(i)}, i);
  }
  return m;
}

TEST(Manifest, WellFormedHasNoViolations) {
  TempDir dir;
  const DatasetManifest m = well_formed_manifest(dir.path(), 2);
  EXPECT_EQ(m.sequences.size(), 54u);
  EXPECT_TRUE(validate_manifest(m, dir.path()).empty());
}

TEST(Manifest, MissingSequenceReported) {
  TempDir dir;
  DatasetManifest m = well_formed_manifest(dir.path(), 1);
  m.sequences.pop_back();
  const auto issues = validate_manifest(m, dir.path());
  ASSERT_EQ(issues.size(), 1u);
  EXPECT_NE(issues[0].find("interaction"), std::string::npos);
}

TEST(Manifest, DanglingPathsReported) {
  TempDir dir;
  DatasetManifest m = well_formed_manifest(dir.path(), 1);
  m.objects[0].mesh = "meshes/nope.ply";
  fs::remove_all(dir.path() / m.sequences[3].path);
  const auto issues = validate_manifest(m, dir.path());
  ASSERT_EQ(issues.size(), 2u);
  EXPECT_NE(issues[0].find("nope.ply"), std::string::npos);
  EXPECT_NE(issues[1].find(m.sequences[3].path), std::string::npos);
}

TEST(Manifest, SaveLoadRoundTrip) {
  TempDir dir;
  const DatasetManifest m = well_formed_manifest(dir.path(), 1);
  save_manifest(m, dir.path() / kManifestFilename);
  const DatasetManifest back = load_manifest(dir.path() / kManifestFilename);
  ASSERT_EQ(back.sequences.size(), m.sequences.size());
  for (std::size_t i = 0; i < m.sequences.size(); ++i) {
    EXPECT_EQ(back.sequences[i].scenario, m.sequences[i].scenario);
    EXPECT_EQ(back.sequences[i].path, m.sequences[i].path);
  }
  EXPECT_TRUE(validate_manifest(back, dir.path()).empty());
}

TEST(Csv, ReadersAcceptHeaderAndRejectGarbage) {
  TempDir dir;
  write_file(dir.path() / "t.csv", "timestamp_ms,x_mm,y_mm,z_mm\n0,1,2,3\n10,4,5,6\n");
  const MocapTrack t = read_track_csv(dir.path() / "t.csv");
  ASSERT_EQ(t.size(), 2u);
  EXPECT_EQ(t[1].position, Vec3(4, 5, 6));

  write_file(dir.path() / "d.csv", "0,10.5,20.5\n33.3,11,21,2\n");
  const auto d = read_detections_csv(dir.path() / "d.csv");
  ASSERT_EQ(d.size(), 2u);
  EXPECT_EQ(d[0].track, 0u);
  EXPECT_EQ(d[1].track, 2u);

  write_file(dir.path() / "c.csv", "1,2,3,4,5\n");
  EXPECT_EQ(read_correspondences_csv(dir.path() / "c.csv")[0].world_point, Vec3(3, 4, 5));

  write_file(dir.path() / "p.csv", "1,2,3\n4,oops,6\n");
  expect_code(ErrorCode::kParseError, [&] { read_points_csv(dir.path() / "p.csv"); });
  write_file(dir.path() / "q.csv", "1,2\n");
  expect_code(ErrorCode::kParseError, [&] { read_points_csv(dir.path() / "q.csv"); });
}

}  // namespace
}  // namespace sixdof
