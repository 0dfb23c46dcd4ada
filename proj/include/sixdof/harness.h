// SPDX-License-Identifier: MIT

#ifndef SIXDOF_HARNESS_H_
#define SIXDOF_HARNESS_H_

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "sixdof/mesh.h"
#include "sixdof/sequence.h"
#include "sixdof/tracking.h"

namespace sixdof {

struct EvalConfig {
  // Ground-truth reset period in frames for occlusion and non-free-hard
  // interaction runs; 0 disables periodic resets.
  int reset_interval = 15;
  double fail_t_mm = 30.0;
  double fail_r_deg = 20.0;
  // A failure fires once the error exceeds a threshold on more than this many
  // consecutive frames.
  int fail_window = 7;

  void validate() const;
};

enum class MetricKind { kJitter, kError };

struct FrameRecord {
  std::size_t frame_index = 0;
  double err_t_mm = 0.0;
  double err_r_deg = 0.0;
  double gt_speed_t_mm = 0.0;
  double gt_speed_r_deg = 0.0;
  bool was_reset = false;
  bool failed = false;
  bool low_overlap = false;
  // Tracker output for this frame (before any reset); not serialized.
  Pose estimate;
};

struct EvalReport {
  std::string sequence_id;
  ScenarioKind scenario;
  std::string tracker;
  MetricKind metric = MetricKind::kError;
  // One record per frame after the initialization frame.
  std::vector<FrameRecord> per_frame;
  int failures = 0;
};

// Consecutive-violation counter for the free-hard protocol.
class FailureMonitor {
 public:
  explicit FailureMonitor(const EvalConfig& config) : config_(config) {}
  // Returns true when this frame completes a failure; the counter then clears.
  bool observe(double err_t_mm, double err_r_deg);
  int failures() const { return failures_; }
  int streak() const { return streak_; }

 private:
  EvalConfig config_;
  int streak_ = 0;
  int failures_ = 0;
};

// All eval_* functions initialise the tracker at the frame-0 ground truth and
// never modify the sequence. They throw Error(kSequenceTooShort) below two
// frames.

// Jitter between consecutive estimates; no resets.
EvalReport eval_stability(const Sequence& seq, const Mesh& mesh, Tracker& tracker);
// Error against ground truth. At frames i > 0 with i % reset_interval == 0 the
// tracker is updated, its error recorded, and its pose then overwritten with
// the ground truth; such frames are flagged and left out of aggregates.
EvalReport eval_occlusion(const Sequence& seq, const Mesh& mesh, Tracker& tracker,
                          const EvalConfig& config);
// Periodic resets as for occlusion, except free-hard sequences, which reset
// only when the failure rule fires.
EvalReport eval_interaction(const Sequence& seq, const Mesh& mesh, Tracker& tracker,
                            const EvalConfig& config);
// Dispatches on the sequence's scenario family.
EvalReport evaluate(const Sequence& seq, const Mesh& mesh, Tracker& tracker,
                    const EvalConfig& config);

// Builds "icp", "echo" or "frozen". The echo tracker receives the sequence's
// ground truth at construction. Throws Error(kInvalidArgument) otherwise.
std::unique_ptr<Tracker> make_tracker(const std::string& name, const Sequence& seq,
                                      const IcpOptions& icp = {});

struct BinSpec {
  std::string name;
  std::vector<double> t_edges_mm;
  std::vector<double> r_edges_deg;
};
// Per-frame speed bins: fine spans 0-40 mm and 0-16 deg, coarse spans
// 0-50 mm and 0-75 deg, four bins each plus overflow.
BinSpec fine_bins();
BinSpec coarse_bins();
// Bin k covers (edges[k], edges[k+1]]; the first bin also includes edges[0].
// Values past the last edge return edges.size() - 1 (the overflow bin).
std::size_t bin_index(double value, const std::vector<double>& edges);
std::string bin_label(std::size_t index, const std::vector<double>& edges);

struct Stats {
  std::size_t count = 0;
  double mean = 0.0;
  double median = 0.0;
  double p95 = 0.0;
};
// Linear-interpolated quantiles; count 0 for empty input.
Stats compute_stats(std::vector<double> values);

struct SummaryRow {
  std::string group;  // scenario family or full scenario label
  std::string axis;   // "all", "speed_t" or "speed_r"
  std::string bin;    // "all" or a bin label
  Stats err_t;
  Stats err_r;
};

struct Summary {
  std::string bins;
  std::vector<SummaryRow> rows;
  std::map<std::string, int> failures;
  std::map<std::string, int> sequences;
};

// Pools non-reset frames across reports per group. Interaction groups also get
// rows per speed bin; bins with no frames are omitted.
Summary aggregate(const std::vector<EvalReport>& reports, const BinSpec& bins);

std::string to_string(MetricKind kind);
nlohmann::json report_to_json(const EvalReport& report);
EvalReport report_from_json(const nlohmann::json& j);
nlohmann::json summary_to_json(const Summary& summary);
std::string summary_to_csv(const Summary& summary);
std::string per_frame_csv(const std::vector<EvalReport>& reports);
// Whitespace-separated speed-bin table per interaction group, for plotting.
std::string bins_dat(const Summary& summary);

}  // namespace sixdof

#endif  // SIXDOF_HARNESS_H_
