// SPDX-License-Identifier: MIT

#include "cli.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <sstream>
#include <stdexcept>

#include <CLI11.hpp>

#include "sixdof/calibration.h"
#include "sixdof/dataset_io.h"
#include "sixdof/error.h"
#include "sixdof/harness.h"
#include "sixdof/image_io.h"
#include "sixdof/marker_repair.h"
#include "sixdof/parallel.h"
#include "sixdof/random.h"
#include "sixdof/sampler.h"
#include "sixdof/serialization.h"
#include "sixdof/synth_gen.h"
#include "sixdof/tracking.h"
#include "sixdof/version.h"

namespace sixdof::cli {
namespace {

using nlohmann::json;
namespace fs = std::filesystem;

// Raised for flag combinations that CLI11 cannot express; maps to exit 2.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Common {
  std::uint64_t seed = 0;
  int jobs = default_jobs();
};

json read_json(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIoError, "cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kParseError, path.string() + ": " + e.what());
  }
}

void write_text(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kIoError, "cannot write " + path.string());
  out << text;
  if (!out) throw Error(ErrorCode::kIoError, "failed writing " + path.string());
}

void emit_json(const json& doc, const std::string& out_path, std::ostream& out) {
  const std::string text = doc.dump(2) + "\n";
  if (out_path.empty()) {
    out << text;
  } else {
    write_text(out_path, text);
  }
}

Intrinsics default_intrinsics() { return {525.0, 525.0, 320.0, 240.0, 640, 480}; }

Intrinsics load_intrinsics(const std::string& path) {
  if (path.empty()) return default_intrinsics();
  const json j = read_json(path);
  return intrinsics_from_json(j.contains("intrinsics") ? j["intrinsics"] : j);
}

Pose load_pose(const std::string& path) {
  const json j = read_json(path);
  return pose_from_json(j.is_object() && j.contains("pose") ? j["pose"] : j);
}

std::vector<Pose> load_pose_lines(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIoError, "cannot open " + path.string());
  std::vector<Pose> poses;
  std::string line;
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      poses.push_back(pose_from_json(json::parse(line)));
    } catch (const json::exception& e) {
      throw Error(ErrorCode::kParseError, path.string() + ": " + e.what());
    }
  }
  if (poses.empty()) throw Error(ErrorCode::kInvalidArgument, "no poses in " + path.string());
  return poses;
}

// "box:WxHxD" (millimetres) or a mesh file path.
Mesh load_mesh_spec(const std::string& spec, std::string* default_name = nullptr) {
  if (spec.rfind("box:", 0) == 0) {
    double w = 0, h = 0, d = 0;
    char tail = 0;
    if (std::sscanf(spec.c_str() + 4, "%lfx%lfx%lf%c", &w, &h, &d, &tail) != 3 || w <= 0 ||
        h <= 0 || d <= 0) {
      throw UsageError("mesh spec '" + spec + "' is not of the form box:WxHxD");
    }
    if (default_name) *default_name = "box";
    return make_box(w, h, d);
  }
  if (default_name) *default_name = fs::path(spec).stem().string();
  return load_mesh(spec);
}

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

std::string sanitize(std::string text) {
  for (char& c : text) {
    if (c == '/') c = '_';
  }
  return text;
}

fs::path sibling(const fs::path& path, const std::string& suffix) {
  return path.parent_path() / (path.stem().string() + suffix);
}

BinSpec bins_by_name(const std::string& name) {
  if (name == "fine") return fine_bins();
  if (name == "coarse") return coarse_bins();
  throw UsageError("unknown bin table '" + name + "'");
}

void echo_seed(std::ostream& err, const std::string& command, const json& stanza) {
  err << "sixdof " << kVersion << ' ' << command << ": seed=" << stanza["seed"].get<std::uint64_t>()
      << " config_hash=" << stanza["config_hash"].get<std::string>() << '\n';
}

// ---------------------------------------------------------------------------

struct SphereArgs {
  std::string points;
  std::string out;
};

void cmd_calibrate_sphere(const SphereArgs& a, const Common& c, std::ostream& out,
                          std::ostream& err) {
  const json config = {{"command", "calibrate-sphere"}, {"points", a.points}};
  const json stanza = reproducibility(c.seed, config);
  echo_seed(err, "calibrate-sphere", stanza);
  const auto points = read_points_csv(a.points);
  const SphereFit fit = fit_sphere(points);
  const json doc = {{"reproducibility", stanza},
                    {"config", config},
                    {"points", points.size()},
                    {"center_mm", vec3_to_json(fit.center)},
                    {"radius_mm", fit.radius},
                    {"rms_residual_mm", fit.rms_residual}};
  emit_json(doc, a.out, out);
}

struct PnpArgs {
  std::string correspondences;
  std::string intrinsics;
  std::string out;
  int max_iterations = 100;
  double max_rms_px = 1.0;
};

void cmd_calibrate_pnp(const PnpArgs& a, const Common& c, std::ostream& out, std::ostream& err) {
  const Intrinsics k = load_intrinsics(a.intrinsics);
  const json config = {{"command", "calibrate-pnp"},
                       {"correspondences", a.correspondences},
                       {"intrinsics", intrinsics_to_json(k)},
                       {"max_iterations", a.max_iterations},
                       {"max_rms_px", a.max_rms_px}};
  const json stanza = reproducibility(c.seed, config);
  echo_seed(err, "calibrate-pnp", stanza);
  const auto corr = read_correspondences_csv(a.correspondences);
  PnpOptions options;
  options.max_iterations = a.max_iterations;
  options.max_rms_px = a.max_rms_px;
  const PnpResult r = solve_pnp(corr, k, options);
  const json doc = {{"reproducibility", stanza},
                    {"config", config},
                    {"correspondences", corr.size()},
                    {"world_to_camera", pose_to_json(r.world_to_camera)},
                    {"mean_reprojection_px", r.mean_reprojection_px},
                    {"rms_reprojection_px", r.rms_reprojection_px},
                    {"iterations", r.iterations},
                    {"cost_history", r.cost_history}};
  emit_json(doc, a.out, out);
}

struct SyncArgs {
  std::vector<std::string> tracks;
  std::string detections;
  std::string intrinsics;
  std::string mocap_to_camera;
  std::string out;
  double window_ms = 500.0;
  double step_ms = 1.0;
  std::size_t min_detections = 3;
  double flat_tolerance = 1e-3;
};

void cmd_sync(const SyncArgs& a, const Common& c, std::ostream& out, std::ostream& err) {
  const Intrinsics k = load_intrinsics(a.intrinsics);
  const Pose mocap_to_camera = load_pose(a.mocap_to_camera);
  const json config = {{"command", "sync"},
                       {"tracks", a.tracks},
                       {"detections", a.detections},
                       {"intrinsics", intrinsics_to_json(k)},
                       {"mocap_to_camera", pose_to_json(mocap_to_camera)},
                       {"window_ms", a.window_ms},
                       {"step_ms", a.step_ms},
                       {"min_detections", a.min_detections},
                       {"flat_tolerance", a.flat_tolerance}};
  const json stanza = reproducibility(c.seed, config);
  echo_seed(err, "sync", stanza);

  std::vector<MocapTrack> tracks;
  for (const auto& path : a.tracks) tracks.push_back(read_track_csv(path));
  const auto detections = read_detections_csv(a.detections);
  for (const auto& d : detections) {
    if (d.track >= tracks.size()) {
      throw Error(ErrorCode::kInvalidArgument,
                  "detection refers to track " + std::to_string(d.track) + " but only " +
                      std::to_string(tracks.size()) + " were given");
    }
  }
  SyncOptions options;
  options.window_ms = a.window_ms;
  options.step_ms = a.step_ms;
  options.min_detections = a.min_detections;
  options.flat_tolerance = a.flat_tolerance;
  const SyncResult r = estimate_time_offset(tracks, detections, k, mocap_to_camera, options);
  json grid = json::array();
  for (std::size_t i = 0; i < r.grid_offsets_ms.size(); ++i) {
    const double v = r.grid_residuals_px[i];
    grid.push_back({r.grid_offsets_ms[i], std::isfinite(v) ? json(v) : json(nullptr)});
  }
  const json doc = {{"reproducibility", stanza},
                    {"config", config},
                    {"delta_t_ms", r.delta_t_ms},
                    {"residual_px", r.residual_px},
                    {"grid", grid}};
  emit_json(doc, a.out, out);
}

struct InpaintArgs {
  std::string sequence;
  std::string mesh;
  std::string markers;
  std::string out;
  double marker_diameter_mm = 3.0;
  double sigma_mm = 2.0;
  int window_px = 10;
  double visibility_mm = 10.0;
  double min_overlap = 0.1;
};

json repair_report_json(const RepairReport& r) {
  json j = {{"markers_total", r.markers_total},
            {"markers_visible", r.markers_visible},
            {"markers_patched", r.markers_patched},
            {"pixels_patched", r.pixels_patched},
            {"fraction_object_pixels_patched", r.fraction_object_pixels_patched}};
  if (r.rmse_before_mm) j["rmse_before_mm"] = *r.rmse_before_mm;
  if (r.rmse_after_mm) j["rmse_after_mm"] = *r.rmse_after_mm;
  return j;
}

void cmd_inpaint(const InpaintArgs& a, const Common& c, std::ostream& out, std::ostream& err) {
  const fs::path out_dir = a.out.empty() ? fs::path(a.sequence) / "repaired" : fs::path(a.out);
  RepairOptions options;
  options.window_px = a.window_px;
  options.visibility_threshold_mm = a.visibility_mm;
  options.noise_sigma_mm = a.sigma_mm;
  options.min_mask_overlap = a.min_overlap;
  const json config = {{"command", "inpaint"},
                       {"sequence", a.sequence},
                       {"mesh", a.mesh},
                       {"markers", a.markers},
                       {"marker_diameter_mm", a.marker_diameter_mm},
                       {"sigma_mm", a.sigma_mm},
                       {"window_px", a.window_px},
                       {"visibility_threshold_mm", a.visibility_mm},
                       {"min_mask_overlap", a.min_overlap}};
  const json stanza = reproducibility(c.seed, config);
  echo_seed(err, "inpaint", stanza);

  const Mesh mesh = load_mesh_spec(a.mesh);
  Sequence seq = load_sequence(a.sequence);
  MarkerSet markers;
  if (!a.markers.empty()) {
    markers.positions = read_points_csv(a.markers);
    markers.diameter_mm = a.marker_diameter_mm;
  } else if (seq.markers) {
    markers = *seq.markers;
  } else {
    throw Error(ErrorCode::kInvalidArgument,
                "no --markers given and the sequence declares no markers");
  }
  markers.validate();
  const auto reports = repair_sequence(seq, mesh, markers, options, c.seed, c.jobs);
  seq.markers = markers;
  save_sequence(seq, out_dir);

  json frames = json::array();
  int patched = 0;
  std::size_t pixels = 0;
  for (std::size_t i = 0; i < reports.size(); ++i) {
    json f = repair_report_json(reports[i]);
    f["frame"] = i;
    frames.push_back(f);
    patched += reports[i].markers_patched;
    pixels += reports[i].pixels_patched;
  }
  const json doc = {{"reproducibility", stanza},
                    {"config", config},
                    {"frames", frames},
                    {"totals", {{"frames", reports.size()},
                                {"markers_patched", patched},
                                {"pixels_patched", pixels}}}};
  write_text(out_dir / "repair_report.json", doc.dump(2) + "\n");
  out << "repaired " << reports.size() << " frames (" << patched << " marker patches) into "
      << out_dir.string() << '\n';
}

struct PairsArgs {
  std::uint64_t n = 0;
  double delta_t_mm = 0.0;
  double delta_r_deg = 0.0;
  std::string mode = "spherical";
  std::string poses;
  std::string out;
  bool render = false;
  std::string mesh;
  std::string intrinsics;
  int crop_px = 150;
  double crop_scale = 1.3;
};

void cmd_gen_pairs(const PairsArgs& a, const Common& c, std::ostream& out, std::ostream& err) {
  if (a.render && a.mesh.empty()) throw UsageError("--render requires --mesh");
  PerturbationConfig cfg;
  cfg.delta_t_mm = a.delta_t_mm;
  cfg.delta_r_deg = a.delta_r_deg;
  cfg.mode = a.mode == "uniform" ? PerturbationMode::kUniformComponent
                                 : PerturbationMode::kSpherical;
  cfg.validate();
  const Intrinsics k = load_intrinsics(a.intrinsics);
  CropOptions crop;
  crop.size_px = a.crop_px;
  crop.scale = a.crop_scale;

  json config = {{"command", "gen-pairs"},
                 {"n", a.n},
                 {"delta_t_mm", a.delta_t_mm},
                 {"delta_r_deg", a.delta_r_deg},
                 {"mode", a.mode},
                 {"poses", a.poses},
                 {"render", a.render}};
  if (a.render) {
    config["mesh"] = a.mesh;
    config["intrinsics"] = intrinsics_to_json(k);
    config["crop"] = {{"size_px", crop.size_px}, {"scale", crop.scale}};
  }
  const json stanza = reproducibility(c.seed, config);
  echo_seed(err, "gen-pairs", stanza);

  const fs::path pose_path =
      fs::is_directory(a.poses) ? fs::path(a.poses) / "poses.jsonl" : fs::path(a.poses);
  const std::vector<Pose> base = load_pose_lines(pose_path);
  std::optional<Mesh> mesh;
  if (a.render) mesh = load_mesh_spec(a.mesh);

  const fs::path out_dir(a.out);
  fs::create_directories(out_dir);
  if (a.render) fs::create_directories(out_dir / "crops");
  std::ofstream lines(out_dir / "pairs.jsonl", std::ios::binary);
  if (!lines) throw Error(ErrorCode::kIoError, "cannot write pairs.jsonl");

  auto sink = [&](const PairSinkItem& item) {
    json rec = {{"index", item.index},
                {"pose_gt", pose_to_json(item.pair.pose_gt)},
                {"pose_pred", pose_to_json(item.pair.pose_pred)},
                {"label", std::vector<double>(item.pair.label.data(),
                                              item.pair.label.data() + 6)}};
    if (item.rendered) {
      char stem[32];
      std::snprintf(stem, sizeof(stem), "%06llu", static_cast<unsigned long long>(item.index));
      const std::string gt_name = std::string("crops/") + stem + "_gt.png";
      const std::string pred_name = std::string("crops/") + stem + "_pred.png";
      write_depth_png(out_dir / gt_name, item.rendered->depth_gt);
      write_depth_png(out_dir / pred_name, item.rendered->depth_pred);
      rec["crop_intrinsics"] = intrinsics_to_json(item.rendered->crop);
      rec["depth_gt"] = gt_name;
      rec["depth_pred"] = pred_name;
    }
    lines << rec.dump() << '\n';
  };
  generate_pairs(base, cfg, a.n, c.seed, sink, mesh ? &*mesh : nullptr, &k, crop);
  lines.close();
  if (!lines) throw Error(ErrorCode::kIoError, "failed writing pairs.jsonl");

  const json manifest = {{"reproducibility", stanza},
                         {"config", config},
                         {"base_poses", base.size()},
                         {"pairs", "pairs.jsonl"},
                         {"label_convention",
                          "t_gt = t_pred + label[0:3]; R_gt = R_pred * Euler(label[3:6] deg)"}};
  write_text(out_dir / "manifest.json", manifest.dump(2) + "\n");
  out << "wrote " << a.n << " pairs to " << out_dir.string() << '\n';
}

struct SequenceArgs {
  std::string mesh;
  std::string kind = "static";
  int length = 30;
  double distance_mm = 800.0;
  double elevation_deg = 25.0;
  double yaw_deg = 30.0;
  double deg_per_frame = 1.0;
  double speed_t = 0.0;
  double speed_r = 0.0;
  std::optional<double> occlusion;
  std::string orientation = "horizontal";
  double noise_mm = 0.0;
  std::string out;
  std::string scenario;
  std::string object;
  std::string dataset;
  std::string intrinsics;
};

void cmd_gen_sequence(const SequenceArgs& a, const Common& c, std::ostream& out,
                      std::ostream& err) {
  if (a.out.empty() && a.dataset.empty()) throw UsageError("one of --out or --dataset is required");
  std::string default_object;
  const Mesh mesh = load_mesh_spec(a.mesh, &default_object);
  const std::string object = a.object.empty() ? default_object : a.object;
  const Intrinsics k = load_intrinsics(a.intrinsics);

  TrajectorySpec spec;
  spec.kind = parse_trajectory_kind(a.kind);
  spec.length = a.length;
  spec.camera_distance_mm = a.distance_mm;
  spec.elevation_deg = a.elevation_deg;
  spec.initial_yaw_deg = a.yaw_deg;
  spec.deg_per_frame = a.deg_per_frame;
  spec.speed_t_mm_per_frame = a.speed_t;
  spec.speed_r_deg_per_frame = a.speed_r;
  spec.seed = derive_seed(c.seed, 0);
  spec.validate();
  std::optional<OccluderSpec> occluder;
  if (a.occlusion) {
    OccluderSpec o;
    o.fraction = *a.occlusion;
    o.orientation = a.orientation == "vertical" ? OccluderOrientation::kVertical
                                                : OccluderOrientation::kHorizontal;
    o.validate();
    occluder = o;
  }
  const ScenarioKind scenario =
      a.scenario.empty() ? default_scenario(spec, occluder) : parse_scenario(a.scenario);
  validate_scenario(scenario);

  json occluder_json = nullptr;
  if (occluder) {
    occluder_json = {{"fraction", occluder->fraction},
                     {"orientation", a.orientation},
                     {"standoff_mm", occluder->standoff_mm}};
  }
  const json config = {{"command", "gen-sequence"},
                       {"mesh", a.mesh},
                       {"object", object},
                       {"trajectory", trajectory_to_json(spec)},
                       {"occluder", occluder_json},
                       {"noise_sigma_mm", a.noise_mm},
                       {"intrinsics", intrinsics_to_json(k)},
                       {"scenario", to_string(scenario)}};
  const json stanza = reproducibility(c.seed, config);
  echo_seed(err, "gen-sequence", stanza);

  fs::path rel = a.out;
  if (rel.empty()) {
    rel = fs::path("sequences") / object /
          (sanitize(to_string(scenario)) + "_s" + std::to_string(c.seed));
  }
  const fs::path out_dir = a.dataset.empty() ? rel : fs::path(a.dataset) / rel;

  GenerationLog log;
  Sequence seq =
      generate_sequence(mesh, spec, occluder, a.noise_mm, k, derive_seed(c.seed, 1), &log, c.jobs);
  seq.scenario = scenario;
  seq.object_id = object;
  save_sequence(seq, out_dir);

  json occlusion_log = json::array();
  for (const auto& r : log.occlusion) {
    occlusion_log.push_back(
        {{"pixel_fraction", r.pixel_fraction}, {"extent_fraction", r.extent_fraction}});
  }
  json doc = config;
  doc.erase("command");
  doc["reproducibility"] = stanza;
  doc["occlusion_log"] = occlusion_log;
  write_text(out_dir / "spec.json", doc.dump(2) + "\n");

  if (!a.dataset.empty()) {
    const fs::path root(a.dataset);
    const fs::path manifest_path = root / kManifestFilename;
    DatasetManifest manifest;
    if (fs::exists(manifest_path)) manifest = load_manifest(manifest_path);
    const bool known = std::any_of(manifest.objects.begin(), manifest.objects.end(),
                                   [&](const ManifestObject& o) { return o.name == object; });
    if (!known) {
      const std::string mesh_rel = "meshes/" + object + ".ply";
      fs::create_directories(root / "meshes");
      save_mesh_ply(root / mesh_rel, mesh);
      manifest.objects.push_back({object, mesh_rel, mesh.max_dimension()});
    }
    const std::string seq_rel = rel.generic_string();
    auto it = std::find_if(manifest.sequences.begin(), manifest.sequences.end(),
                           [&](const ManifestSequence& s) { return s.path == seq_rel; });
    const ManifestSequence entry{seq_rel, scenario, object};
    if (it == manifest.sequences.end()) {
      manifest.sequences.push_back(entry);
    } else {
      *it = entry;
    }
    save_manifest(manifest, manifest_path);
  }
  out << "wrote " << seq.frames.size() << " frames (" << to_string(scenario) << ") to "
      << out_dir.string() << '\n';
}

struct EvalArgs {
  std::string scenario = "all";
  std::string tracker = "icp";
  std::string dataset;
  std::string out;
  std::string bins = "fine";
  std::string trace;
  int reset_interval = 15;
  double fail_t_mm = 30.0;
  double fail_r_deg = 20.0;
  int fail_window = 7;
};

void cmd_eval(const EvalArgs& a, const Common& c, std::ostream& out, std::ostream& err) {
  EvalConfig cfg;
  cfg.reset_interval = a.reset_interval;
  cfg.fail_t_mm = a.fail_t_mm;
  cfg.fail_r_deg = a.fail_r_deg;
  cfg.fail_window = a.fail_window;
  cfg.validate();
  const BinSpec bins = bins_by_name(a.bins);
  const json config = {{"command", "eval"},
                       {"scenario", a.scenario},
                       {"tracker", a.tracker},
                       {"dataset", a.dataset},
                       {"bins", a.bins},
                       {"reset_interval", a.reset_interval},
                       {"fail_t_mm", a.fail_t_mm},
                       {"fail_r_deg", a.fail_r_deg},
                       {"fail_window", a.fail_window}};
  const json stanza = reproducibility(c.seed, config);
  echo_seed(err, "eval", stanza);

  const fs::path root(a.dataset);
  const DatasetManifest manifest = load_manifest(root / kManifestFilename);
  std::vector<ManifestSequence> selected;
  for (const auto& s : manifest.sequences) {
    if (a.scenario == "all" || scenario_family(s.scenario) == a.scenario) selected.push_back(s);
  }
  if (selected.empty()) {
    throw Error(ErrorCode::kInvalidArgument,
                "no '" + a.scenario + "' sequences in " + (root / kManifestFilename).string());
  }
  std::map<std::string, Mesh> meshes;
  for (const auto& s : selected) {
    if (meshes.count(s.object)) continue;
    const auto it = std::find_if(manifest.objects.begin(), manifest.objects.end(),
                                 [&](const ManifestObject& o) { return o.name == s.object; });
    if (it == manifest.objects.end()) {
      throw Error(ErrorCode::kInvalidArgument, "sequence '" + s.path +
                                                   "' references unknown object '" + s.object +
                                                   "'");
    }
    meshes.emplace(s.object, load_mesh(root / it->mesh));
  }

  std::vector<EvalReport> reports(selected.size());
  parallel_for(selected.size(), c.jobs, [&](std::size_t i) {
    const ManifestSequence& entry = selected[i];
    Sequence seq = load_sequence(root / entry.path);
    seq.scenario = entry.scenario;
    IcpOptions icp;
    icp.seed = derive_seed(c.seed, i);
    auto tracker = make_tracker(a.tracker, seq, icp);
    reports[i] = evaluate(seq, meshes.at(entry.object), *tracker, cfg);
    reports[i].sequence_id = entry.path;
  });

  const Summary summary = aggregate(reports, bins);
  json report_list = json::array();
  for (const auto& r : reports) report_list.push_back(report_to_json(r));
  const json doc = {{"reproducibility", stanza},
                    {"config", config},
                    {"summary", summary_to_json(summary)},
                    {"reports", report_list}};
  const fs::path out_path(a.out);
  write_text(out_path, doc.dump(2) + "\n");
  write_text(sibling(out_path, "_frames.csv"), per_frame_csv(reports));
  write_text(sibling(out_path, "_summary.csv"), summary_to_csv(summary));
  write_text(sibling(out_path, "_bins.dat"), bins_dat(summary));

  if (!a.trace.empty()) {
    std::string text;
    for (const auto& r : reports) {
      for (const auto& f : r.per_frame) {
        const json line = {{"sequence", r.sequence_id},
                           {"frame", f.frame_index},
                           {"pose", pose_to_json(f.estimate)},
                           {"was_reset", f.was_reset}};
        text += line.dump() + "\n";
      }
    }
    write_text(a.trace, text);
  }

  char buf[160];
  for (const auto& row : summary.rows) {
    if (row.axis != "all") continue;
    std::snprintf(buf, sizeof(buf), "%-34s n=%-6zu mean_t=%9.4f mm  mean_r=%9.4f deg\n",
                  row.group.c_str(), row.err_t.count, row.err_t.mean, row.err_r.mean);
    out << buf;
  }
  for (const auto& [group, count] : summary.failures) {
    if (count > 0) out << group << ": " << count << " failures\n";
  }
}

struct ReportArgs {
  std::vector<std::string> inputs;
  std::string format = "json";
  std::string bins;
  std::string out;
};

void cmd_report(const ReportArgs& a, const Common& c, std::ostream& out, std::ostream& err) {
  std::vector<EvalReport> reports;
  std::string bins_name = a.bins;
  for (const auto& path : a.inputs) {
    const json j = read_json(path);
    if (j.contains("reports")) {
      for (const auto& r : j["reports"]) reports.push_back(report_from_json(r));
      if (bins_name.empty() && j.contains("config") && j["config"].contains("bins")) {
        bins_name = j["config"]["bins"].get<std::string>();
      }
    } else {
      reports.push_back(report_from_json(j));
    }
  }
  if (bins_name.empty()) bins_name = "fine";
  const BinSpec bins = bins_by_name(bins_name);
  const json config = {
      {"command", "report"}, {"inputs", a.inputs}, {"format", a.format}, {"bins", bins_name}};
  const json stanza = reproducibility(c.seed, config);
  echo_seed(err, "report", stanza);

  const Summary summary = aggregate(reports, bins);
  if (a.format == "csv") {
    const std::string text = "# sixdof " + std::string(kVersion) +
                             " seed=" + std::to_string(c.seed) +
                             " config_hash=" + stanza["config_hash"].get<std::string>() + "\n" +
                             summary_to_csv(summary);
    if (a.out.empty()) {
      out << text;
    } else {
      write_text(a.out, text);
    }
  } else {
    const json doc = {{"reproducibility", stanza},
                      {"config", config},
                      {"summary", summary_to_json(summary)}};
    emit_json(doc, a.out, out);
  }
}

struct ValidateArgs {
  std::string dataset;
  std::string sequence;
  bool deep = false;
};

int cmd_validate(const ValidateArgs& a, const Common& c, std::ostream& out, std::ostream& err) {
  if (a.dataset.empty() == a.sequence.empty()) {
    throw UsageError("exactly one of --dataset or --sequence is required");
  }
  const json config = {{"command", "validate"},
                       {"dataset", a.dataset},
                       {"sequence", a.sequence},
                       {"deep", a.deep}};
  echo_seed(err, "validate", reproducibility(c.seed, config));

  std::vector<std::string> issues;
  if (!a.sequence.empty()) {
    try {
      const Sequence seq = load_sequence(a.sequence);
      out << "ok: " << seq.frames.size() << " frames, " << to_string(seq.scenario) << '\n';
    } catch (const Error& e) {
      issues.push_back(e.what());
    }
  } else {
    const fs::path root(a.dataset);
    const DatasetManifest manifest = load_manifest(root / kManifestFilename);
    issues = validate_manifest(manifest, root);
    if (a.deep) {
      for (const auto& s : manifest.sequences) {
        if (!fs::exists(root / s.path)) continue;
        try {
          const Sequence seq = load_sequence(root / s.path);
          if (seq.object_id != s.object) {
            issues.push_back("sequence '" + s.path + "' stores object '" + seq.object_id +
                             "' but the manifest says '" + s.object + "'");
          }
          if (!(seq.scenario == s.scenario)) {
            issues.push_back("sequence '" + s.path + "' stores scenario '" +
                             to_string(seq.scenario) + "' but the manifest says '" +
                             to_string(s.scenario) + "'");
          }
        } catch (const Error& e) {
          issues.push_back("sequence '" + s.path + "': " + e.what());
        }
      }
    }
    if (issues.empty()) {
      out << "ok: " << manifest.objects.size() << " objects, " << manifest.sequences.size()
          << " sequences\n";
    }
  }
  for (const auto& issue : issues) out << "violation: " << issue << '\n';
  return issues.empty() ? kExitOk : kExitDomainError;
}

void add_common(CLI::App* sub, Common& c) {
  sub->add_option("--seed", c.seed, "Master seed (falls back to $SIXDOF_SEED)")
      ->envname("SIXDOF_SEED")
      ->capture_default_str();
  sub->add_option("--jobs", c.jobs, "Worker threads")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
}

}  // namespace

std::uint64_t fnv1a64(const std::string& text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return h;
}

json reproducibility(std::uint64_t seed, const json& config) {
  return {{"version", kVersion}, {"seed", seed}, {"config_hash", hex64(fnv1a64(config.dump()))}};
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"6-DOF object tracking evaluation toolkit", "sixdof"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(kVersion));

  Common common;
  std::function<int()> action;
  auto bind = [&](CLI::App* sub, auto fn) {
    add_common(sub, common);
    sub->callback([&action, fn] { action = fn; });
  };
  const auto existing = CLI::ExistingFile;
  const auto existing_dir = CLI::ExistingDirectory;

  SphereArgs sphere;
  auto* s1 = app.add_subcommand("calibrate-sphere", "Fit a sphere to probe-tip positions");
  s1->add_option("--points", sphere.points, "CSV of x,y,z in mm")->required()->check(existing);
  s1->add_option("--out", sphere.out, "Output JSON (default: stdout)");
  bind(s1, [&] { cmd_calibrate_sphere(sphere, common, out, err); return kExitOk; });

  PnpArgs pnp;
  auto* s2 = app.add_subcommand("calibrate-pnp", "Camera pose from 2D-3D correspondences");
  s2->add_option("--correspondences", pnp.correspondences, "CSV of u,v,x,y,z")
      ->required()
      ->check(existing);
  s2->add_option("--intrinsics", pnp.intrinsics, "Intrinsics JSON")->required()->check(existing);
  s2->add_option("--max-iterations", pnp.max_iterations)->check(CLI::PositiveNumber)
      ->capture_default_str();
  s2->add_option("--max-rms", pnp.max_rms_px, "Failure threshold in px")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  s2->add_option("--out", pnp.out, "Output JSON (default: stdout)");
  bind(s2, [&] { cmd_calibrate_pnp(pnp, common, out, err); return kExitOk; });

  SyncArgs sync;
  auto* s3 = app.add_subcommand("sync", "Estimate the mocap/camera clock offset");
  s3->add_option("--tracks", sync.tracks, "Mocap track CSVs (t,x,y,z); order gives track ids")
      ->required()
      ->expected(1, -1)
      ->check(existing);
  s3->add_option("--detections", sync.detections, "CSV of t,u,v[,track]")
      ->required()
      ->check(existing);
  s3->add_option("--intrinsics", sync.intrinsics)->required()->check(existing);
  s3->add_option("--mocap-to-camera", sync.mocap_to_camera, "Pose JSON (16 numbers)")
      ->required()
      ->check(existing);
  s3->add_option("--window", sync.window_ms, "Search half-width in ms")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  s3->add_option("--step", sync.step_ms, "Grid step in ms")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  s3->add_option("--min-detections", sync.min_detections)->capture_default_str();
  s3->add_option("--flat-tolerance", sync.flat_tolerance)->capture_default_str();
  s3->add_option("--out", sync.out, "Output JSON (default: stdout)");
  bind(s3, [&] { cmd_sync(sync, common, out, err); return kExitOk; });

  InpaintArgs inpaint;
  auto* s4 = app.add_subcommand("inpaint", "Remove marker artifacts from depth frames");
  s4->add_option("--sequence", inpaint.sequence)->required()->check(existing_dir);
  s4->add_option("--mesh", inpaint.mesh, "Mesh file or box:WxHxD")->required();
  s4->add_option("--markers", inpaint.markers, "CSV of marker centres (object frame, mm)")
      ->check(existing);
  s4->add_option("--marker-diameter", inpaint.marker_diameter_mm)->capture_default_str();
  s4->add_option("--sigma", inpaint.sigma_mm, "Patch noise in mm")
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();
  s4->add_option("--window", inpaint.window_px)->check(CLI::PositiveNumber)->capture_default_str();
  s4->add_option("--visibility-threshold", inpaint.visibility_mm)->capture_default_str();
  s4->add_option("--min-overlap", inpaint.min_overlap)->capture_default_str();
  s4->add_option("--out", inpaint.out, "Output sequence directory (default: <sequence>/repaired)");
  bind(s4, [&] { cmd_inpaint(inpaint, common, out, err); return kExitOk; });

  PairsArgs pairs;
  auto* s5 = app.add_subcommand("gen-pairs", "Sample perturbed training pose pairs");
  s5->add_option("--n", pairs.n, "Number of pairs")->required();
  s5->add_option("--delta-t", pairs.delta_t_mm, "Translation scale in mm")
      ->required()
      ->check(CLI::NonNegativeNumber);
  s5->add_option("--delta-r", pairs.delta_r_deg, "Rotation scale in degrees")
      ->required()
      ->check(CLI::NonNegativeNumber);
  s5->add_option("--mode", pairs.mode)
      ->check(CLI::IsMember({"spherical", "uniform"}))
      ->capture_default_str();
  s5->add_option("--poses", pairs.poses, "poses.jsonl or a sequence directory")
      ->required()
      ->check(CLI::ExistingPath);
  s5->add_option("--out", pairs.out, "Output directory")->required();
  s5->add_flag("--render", pairs.render, "Also write depth crops");
  s5->add_option("--mesh", pairs.mesh, "Mesh file or box:WxHxD");
  s5->add_option("--intrinsics", pairs.intrinsics)->check(existing);
  s5->add_option("--crop-size", pairs.crop_px)->check(CLI::PositiveNumber)->capture_default_str();
  s5->add_option("--crop-scale", pairs.crop_scale)->check(CLI::PositiveNumber)
      ->capture_default_str();
  bind(s5, [&] { cmd_gen_pairs(pairs, common, out, err); return kExitOk; });

  SequenceArgs gen;
  auto* s6 = app.add_subcommand("gen-sequence", "Render a synthetic sequence");
  s6->add_option("--mesh", gen.mesh, "Mesh file or box:WxHxD")->required();
  s6->add_option("--kind", gen.kind)
      ->check(CLI::IsMember({"static", "turntable", "smooth_random"}))
      ->capture_default_str();
  s6->add_option("--length", gen.length)->check(CLI::Range(2, 1000000))->capture_default_str();
  s6->add_option("--distance", gen.distance_mm, "Camera distance in mm")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  s6->add_option("--elevation", gen.elevation_deg)->capture_default_str();
  s6->add_option("--yaw", gen.yaw_deg, "Initial yaw in degrees")->capture_default_str();
  s6->add_option("--deg-per-frame", gen.deg_per_frame)->capture_default_str();
  s6->add_option("--speed-t", gen.speed_t, "mm per frame")
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();
  s6->add_option("--speed-r", gen.speed_r, "degrees per frame")
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();
  s6->add_option("--occlusion", gen.occlusion, "Occluded fraction: 0, 0.15, ..., 0.75");
  s6->add_option("--orientation", gen.orientation)
      ->check(CLI::IsMember({"horizontal", "vertical"}))
      ->capture_default_str();
  s6->add_option("--noise", gen.noise_mm, "Depth noise sigma in mm")
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();
  s6->add_option("--out", gen.out, "Output directory (relative to --dataset when given)");
  s6->add_option("--scenario", gen.scenario, "Scenario label override");
  s6->add_option("--object", gen.object, "Object id");
  s6->add_option("--dataset", gen.dataset, "Dataset root; the sequence is added to its manifest");
  s6->add_option("--intrinsics", gen.intrinsics)->check(existing);
  bind(s6, [&] { cmd_gen_sequence(gen, common, out, err); return kExitOk; });

  EvalArgs ev;
  auto* s7 = app.add_subcommand("eval", "Run a tracker over a dataset");
  s7->add_option("--scenario", ev.scenario)
      ->check(CLI::IsMember({"stability", "occlusion", "interaction", "all"}))
      ->capture_default_str();
  s7->add_option("--tracker", ev.tracker)
      ->check(CLI::IsMember({"icp", "echo", "frozen"}))
      ->capture_default_str();
  s7->add_option("--dataset", ev.dataset)->required()->check(existing_dir);
  s7->add_option("--out", ev.out, "Report JSON; CSV and .dat files are written next to it")
      ->required();
  s7->add_option("--reset-interval", ev.reset_interval)
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();
  s7->add_option("--bins", ev.bins)
      ->check(CLI::IsMember({"fine", "coarse"}))
      ->capture_default_str();
  s7->add_option("--fail-t", ev.fail_t_mm)->capture_default_str();
  s7->add_option("--fail-r", ev.fail_r_deg)->capture_default_str();
  s7->add_option("--fail-window", ev.fail_window)->capture_default_str();
  s7->add_option("--trace", ev.trace, "Per-frame pose trace (JSON lines)");
  bind(s7, [&] { cmd_eval(ev, common, out, err); return kExitOk; });

  ReportArgs rep;
  auto* s8 = app.add_subcommand("report", "Merge and re-aggregate eval reports");
  s8->add_option("--in", rep.inputs)->required()->expected(1, -1)->check(existing);
  s8->add_option("--format", rep.format)
      ->check(CLI::IsMember({"csv", "json"}))
      ->capture_default_str();
  s8->add_option("--bins", rep.bins, "fine or coarse (default: from the inputs)")
      ->check(CLI::IsMember({"fine", "coarse"}));
  s8->add_option("--out", rep.out, "Output file (default: stdout)");
  bind(s8, [&] { cmd_report(rep, common, out, err); return kExitOk; });

  ValidateArgs val;
  auto* s9 = app.add_subcommand("validate", "Check a dataset or a sequence");
  s9->add_option("--dataset", val.dataset)->check(existing_dir);
  s9->add_option("--sequence", val.sequence)->check(existing_dir);
  s9->add_flag("--deep", val.deep, "Also load every sequence of the dataset");
  bind(s9, [&] { return cmd_validate(val, common, out, err); });

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e, out, err);
    CLI::App* failing = &app;
    for (CLI::App* sub : app.get_subcommands()) failing = sub;
    err << "error: " << e.what() << "\n\n" << failing->help();
    return kExitUsage;
  }

  try {
    return action ? action() : kExitUsage;
  } catch (const UsageError& e) {
    CLI::App* sub = app.get_subcommands().empty() ? &app : app.get_subcommands().front();
    err << "error: " << e.what() << "\n\n" << sub->help();
    return kExitUsage;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitDomainError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitDomainError;
  }
}

}  // namespace sixdof::cli
