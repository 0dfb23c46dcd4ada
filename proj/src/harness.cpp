// SPDX-License-Identifier: MIT

#include "sixdof/harness.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>
#include <sstream>

#include "sixdof/error.h"

namespace sixdof {
namespace {

using nlohmann::json;

void require_length(const Sequence& seq) {
  if (seq.frames.size() < 2) {
    throw Error(ErrorCode::kSequenceTooShort, "evaluation needs at least two frames");
  }
}

FrameView view_of(const Sequence& seq, std::size_t i) {
  const Frame& f = seq.frames[i];
  return FrameView{f.depth, f.rgb ? &*f.rgb : nullptr, f.timestamp_ms, seq.intrinsics, i};
}

EvalReport start_report(const Sequence& seq, const Tracker& tracker, MetricKind metric) {
  EvalReport r;
  r.sequence_id = seq.object_id;
  r.scenario = seq.scenario;
  r.tracker = tracker.name();
  r.metric = metric;
  r.per_frame.reserve(seq.frames.size() - 1);
  return r;
}

FrameRecord base_record(const Sequence& seq, std::size_t i) {
  FrameRecord rec;
  rec.frame_index = i;
  const PoseError speed = pose_error(seq.frames[i - 1].gt_pose, seq.frames[i].gt_pose);
  rec.gt_speed_t_mm = speed.translation_mm;
  rec.gt_speed_r_deg = speed.rotation_deg;
  return rec;
}

// Shared loop for the protocols that compare against ground truth.
EvalReport track_against_truth(const Sequence& seq, const Mesh& mesh, Tracker& tracker,
                               const EvalConfig& config, bool periodic_resets,
                               bool failure_rule) {
  require_length(seq);
  config.validate();
  EvalReport report = start_report(seq, tracker, MetricKind::kError);
  tracker.init(mesh, seq.frames[0].gt_pose);
  FailureMonitor monitor(config);
  for (std::size_t i = 1; i < seq.frames.size(); ++i) {
    const TrackResult result = tracker.update(view_of(seq, i));
    const Pose& gt = seq.frames[i].gt_pose;
    FrameRecord rec = base_record(seq, i);
    const PoseError err = pose_error(gt, result.pose);
    rec.err_t_mm = err.translation_mm;
    rec.err_r_deg = err.rotation_deg;
    rec.low_overlap = result.low_overlap;
    rec.estimate = result.pose;
    if (periodic_resets && config.reset_interval > 0 &&
        i % static_cast<std::size_t>(config.reset_interval) == 0) {
      rec.was_reset = true;
      tracker.reset(gt);
    }
    if (failure_rule && monitor.observe(rec.err_t_mm, rec.err_r_deg)) {
      rec.failed = true;
      tracker.reset(gt);
    }
    report.per_frame.push_back(rec);
  }
  report.failures = monitor.failures();
  return report;
}

double quantile(const std::vector<double>& sorted, double q) {
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const std::size_t lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (pos - lo) * (sorted[hi] - sorted[lo]);
}

std::string format_edge(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%g", v);
  return buf;
}

json stats_json(const Stats& s) {
  return {{"count", s.count}, {"mean", s.mean}, {"median", s.median}, {"p95", s.p95}};
}

}  // namespace

void EvalConfig::validate() const {
  if (reset_interval < 0 || !(fail_t_mm > 0.0) || !(fail_r_deg > 0.0) || fail_window < 1) {
    throw Error(ErrorCode::kInvalidArgument, "evaluation thresholds must be positive");
  }
}

bool FailureMonitor::observe(double err_t_mm, double err_r_deg) {
  if (err_t_mm > config_.fail_t_mm || err_r_deg > config_.fail_r_deg) {
    ++streak_;
  } else {
    streak_ = 0;
  }
  if (streak_ > config_.fail_window) {
    ++failures_;
    streak_ = 0;
    return true;
  }
  return false;
}

EvalReport eval_stability(const Sequence& seq, const Mesh& mesh, Tracker& tracker) {
  require_length(seq);
  EvalReport report = start_report(seq, tracker, MetricKind::kJitter);
  tracker.init(mesh, seq.frames[0].gt_pose);
  Pose previous = tracker.pose();
  for (std::size_t i = 1; i < seq.frames.size(); ++i) {
    const TrackResult result = tracker.update(view_of(seq, i));
    FrameRecord rec = base_record(seq, i);
    const PoseError jitter = pose_error(previous, result.pose);
    rec.err_t_mm = jitter.translation_mm;
    rec.err_r_deg = jitter.rotation_deg;
    rec.low_overlap = result.low_overlap;
    rec.estimate = result.pose;
    report.per_frame.push_back(rec);
    previous = result.pose;
  }
  return report;
}

EvalReport eval_occlusion(const Sequence& seq, const Mesh& mesh, Tracker& tracker,
                          const EvalConfig& config) {
  return track_against_truth(seq, mesh, tracker, config, true, false);
}

EvalReport eval_interaction(const Sequence& seq, const Mesh& mesh, Tracker& tracker,
                            const EvalConfig& config) {
  const auto* s = std::get_if<InteractionScenario>(&seq.scenario);
  const bool hard = s != nullptr && s->variant == InteractionVariant::kFreeHard;
  return track_against_truth(seq, mesh, tracker, config, !hard, hard);
}

EvalReport evaluate(const Sequence& seq, const Mesh& mesh, Tracker& tracker,
                    const EvalConfig& config) {
  switch (seq.scenario.index()) {
    case 0: return eval_stability(seq, mesh, tracker);
    case 1: return eval_occlusion(seq, mesh, tracker, config);
    default: return eval_interaction(seq, mesh, tracker, config);
  }
}

std::unique_ptr<Tracker> make_tracker(const std::string& name, const Sequence& seq,
                                      const IcpOptions& icp) {
  if (name == "icp") return std::make_unique<IcpTracker>(icp);
  if (name == "echo") return std::make_unique<EchoTracker>(seq.ground_truth());
  if (name == "frozen") return std::make_unique<FrozenTracker>();
  throw Error(ErrorCode::kInvalidArgument, "unknown tracker '" + name + "'");
}

BinSpec fine_bins() { return {"fine", {0, 10, 20, 30, 40}, {0, 4, 8, 12, 16}}; }
BinSpec coarse_bins() { return {"coarse", {0, 12.5, 25, 37.5, 50}, {0, 19, 37, 56, 75}}; }

std::size_t bin_index(double value, const std::vector<double>& edges) {
  for (std::size_t k = 1; k < edges.size(); ++k) {
    if (value <= edges[k]) return k - 1;
  }
  return edges.size() - 1;
}

std::string bin_label(std::size_t index, const std::vector<double>& edges) {
  if (index + 1 >= edges.size()) return "overflow";
  return (index == 0 ? "[" : "(") + format_edge(edges[index]) + "," +
         format_edge(edges[index + 1]) + "]";
}

Stats compute_stats(std::vector<double> values) {
  Stats s;
  s.count = values.size();
  if (values.empty()) return s;
  std::sort(values.begin(), values.end());
  double sum = 0.0;
  for (double v : values) sum += v;
  s.mean = sum / static_cast<double>(values.size());
  s.median = quantile(values, 0.5);
  s.p95 = quantile(values, 0.95);
  return s;
}

Summary aggregate(const std::vector<EvalReport>& reports, const BinSpec& bins) {
  if (reports.empty()) throw Error(ErrorCode::kInvalidArgument, "nothing to aggregate");
  Summary summary;
  summary.bins = bins.name;
  struct Pool {
    std::vector<double> t, r;
  };
  // Keyed by (group, axis, bin index) to give a stable row order.
  std::map<std::tuple<std::string, int, std::size_t>, Pool> pools;
  std::set<std::string> groups;
  for (const auto& rep : reports) {
    const std::string family(scenario_family(rep.scenario));
    const std::string label = to_string(rep.scenario);
    const bool binned = rep.scenario.index() == 2;
    for (const std::string& g : {family, label}) {
      summary.failures[g] += rep.failures;
      summary.sequences[g] += 1;
      groups.insert(g);
    }
    for (const auto& f : rep.per_frame) {
      if (f.was_reset) continue;
      for (const std::string& g : {family, label}) {
        auto add = [&](int axis, std::size_t bin) {
          Pool& p = pools[{g, axis, bin}];
          p.t.push_back(f.err_t_mm);
          p.r.push_back(f.err_r_deg);
        };
        add(0, 0);
        if (binned) {
          add(1, bin_index(f.gt_speed_t_mm, bins.t_edges_mm));
          add(2, bin_index(f.gt_speed_r_deg, bins.r_edges_deg));
        }
      }
    }
  }
  for (const auto& [key, pool] : pools) {
    const auto& [group, axis, bin] = key;
    SummaryRow row;
    row.group = group;
    row.axis = axis == 0 ? "all" : axis == 1 ? "speed_t" : "speed_r";
    row.bin = axis == 0 ? "all" : bin_label(bin, axis == 1 ? bins.t_edges_mm : bins.r_edges_deg);
    row.err_t = compute_stats(pool.t);
    row.err_r = compute_stats(pool.r);
    summary.rows.push_back(std::move(row));
  }
  return summary;
}

std::string to_string(MetricKind kind) { return kind == MetricKind::kJitter ? "jitter" : "error"; }

json report_to_json(const EvalReport& r) {
  json frames = json::array();
  for (const auto& f : r.per_frame) {
    frames.push_back({{"frame", f.frame_index},
                      {"err_t_mm", f.err_t_mm},
                      {"err_r_deg", f.err_r_deg},
                      {"gt_speed_t_mm", f.gt_speed_t_mm},
                      {"gt_speed_r_deg", f.gt_speed_r_deg},
                      {"was_reset", f.was_reset},
                      {"failed", f.failed},
                      {"low_overlap", f.low_overlap}});
  }
  return {{"sequence", r.sequence_id}, {"scenario", to_string(r.scenario)},
          {"tracker", r.tracker},      {"metric", to_string(r.metric)},
          {"failures", r.failures},    {"per_frame", frames}};
}

EvalReport report_from_json(const json& j) {
  EvalReport r;
  try {
    r.sequence_id = j.at("sequence").get<std::string>();
    r.scenario = parse_scenario(j.at("scenario").get<std::string>());
    r.tracker = j.at("tracker").get<std::string>();
    r.metric = j.at("metric").get<std::string>() == "jitter" ? MetricKind::kJitter
                                                             : MetricKind::kError;
    r.failures = j.at("failures").get<int>();
    for (const auto& f : j.at("per_frame")) {
      FrameRecord rec;
      rec.frame_index = f.at("frame").get<std::size_t>();
      rec.err_t_mm = f.at("err_t_mm").get<double>();
      rec.err_r_deg = f.at("err_r_deg").get<double>();
      rec.gt_speed_t_mm = f.at("gt_speed_t_mm").get<double>();
      rec.gt_speed_r_deg = f.at("gt_speed_r_deg").get<double>();
      rec.was_reset = f.value("was_reset", false);
      rec.failed = f.value("failed", false);
      rec.low_overlap = f.value("low_overlap", false);
      r.per_frame.push_back(rec);
    }
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kParseError, std::string("report: ") + e.what());
  }
  return r;
}

json summary_to_json(const Summary& s) {
  json rows = json::array();
  for (const auto& row : s.rows) {
    rows.push_back({{"group", row.group},
                    {"axis", row.axis},
                    {"bin", row.bin},
                    {"err_t_mm", stats_json(row.err_t)},
                    {"err_r_deg", stats_json(row.err_r)}});
  }
  return {{"bins", s.bins}, {"rows", rows}, {"failures", s.failures}, {"sequences", s.sequences}};
}

std::string summary_to_csv(const Summary& s) {
  std::ostringstream out;
  out.precision(10);
  out << "group,axis,bin,count,mean_t_mm,median_t_mm,p95_t_mm,mean_r_deg,median_r_deg,"
         "p95_r_deg,failures\n";
  for (const auto& row : s.rows) {
    const auto it = s.failures.find(row.group);
    out << row.group << ',' << row.axis << ',' << row.bin << ',' << row.err_t.count << ','
        << row.err_t.mean << ',' << row.err_t.median << ',' << row.err_t.p95 << ','
        << row.err_r.mean << ',' << row.err_r.median << ',' << row.err_r.p95 << ','
        << (it == s.failures.end() ? 0 : it->second) << '\n';
  }
  return out.str();
}

std::string per_frame_csv(const std::vector<EvalReport>& reports) {
  std::ostringstream out;
  out.precision(10);
  out << "sequence,scenario,tracker,metric,frame,err_t_mm,err_r_deg,gt_speed_t_mm,"
         "gt_speed_r_deg,was_reset,failed,low_overlap\n";
  for (const auto& r : reports) {
    const std::string scenario = to_string(r.scenario);
    for (const auto& f : r.per_frame) {
      out << r.sequence_id << ',' << scenario << ',' << r.tracker << ',' << to_string(r.metric)
          << ',' << f.frame_index << ',' << f.err_t_mm << ',' << f.err_r_deg << ','
          << f.gt_speed_t_mm << ',' << f.gt_speed_r_deg << ',' << f.was_reset << ','
          << f.failed << ',' << f.low_overlap << '\n';
    }
  }
  return out.str();
}

std::string bins_dat(const Summary& s) {
  std::ostringstream out;
  out.precision(10);
  out << "# bins: " << s.bins << "\n";
  for (const auto& row : s.rows) {
    if (row.axis == "all") continue;
    out << row.group << ' ' << row.axis << ' ' << row.bin << ' ' << row.err_t.count << ' '
        << row.err_t.mean << ' ' << row.err_r.mean << ' ' << row.err_t.median << ' '
        << row.err_r.median << '\n';
  }
  return out.str();
}

}  // namespace sixdof
