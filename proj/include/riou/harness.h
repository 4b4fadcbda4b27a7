// Copyright 2026 The rIoU Authors. All Rights Reserved.
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


#ifndef RIOU_HARNESS_H_
#define RIOU_HARNESS_H_

#include <filesystem>
#include <istream>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "riou/box.h"
#include "riou/optimizer.h"
#include "riou/oracle.h"
#include "riou/theoretical.h"

namespace riou {

// Output of one tracker on one sequence. An absent box means the tracker
// reported no output for that frame.
struct TrackerRun {
  std::string tracker_name;
  std::string sequence_name;
  FamilyKind abilities = FamilyKind::kAxisAligned;
  std::vector<std::optional<OrientedBox>> per_frame;
};

// Run file: a header `# tracker=<name> abilities={noscale|aa|rot}` (an
// optional `sequence=<name>` names the sequence), then one line per frame
// holding a box (`r_c c_c w h phi_deg`) or `skip`. Blank lines are ignored.
// Throws ParseError with the line number, or LengthError when the number of
// frames does not match `seq`.
TrackerRun parse_tracker_run(std::istream& in, const MaskSequence& seq);
TrackerRun load_tracker_run(const std::filesystem::path& path,
                            const MaskSequence& seq);
// Header keys only; used to route run files to their sequences.
TrackerRun read_tracker_run_header(const std::filesystem::path& path);
std::string format_tracker_run(const TrackerRun& run);
void save_tracker_run(const TrackerRun& run, const std::filesystem::path& path);

// A theoretical track replayed as a tracker run.
TrackerRun run_from_track(const TheoreticalTrack& track,
                          const std::string& tracker_name,
                          const std::string& sequence_name);

// Frame-0 axis-aligned optimum, the box trackers are initialized with.
// Throws EmptyFirstFrameError.
OptResult init_box(const MaskSequence& seq, const OptimizerConfig& config);
OptResult emit_init_box(const MaskSequence& seq, const std::filesystem::path& out,
                        const OptimizerConfig& config);

struct FrameScore {
  int frame = 0;
  std::optional<double> iou;
  std::optional<double> phi_opt;
  std::optional<double> riou;      // iou / phi_opt clamped to [0, 1]
  std::optional<double> riou_raw;  // unclamped ratio
  bool failed = false;             // iou == 0 on a non-empty mask
};

struct SequenceEval {
  std::string tracker_name;
  std::string sequence_name;
  FamilyKind abilities = FamilyKind::kAxisAligned;
  std::vector<FrameScore> frames;
  double mean_iou = 0.0;
  double mean_riou = 0.0;
  double mean_phi_opt = 0.0;
  double riou_ratio_of_means = 0.0;  // mean_iou / mean_phi_opt
  int failure_count = 0;
  int skipped_frames = 0;
};

// Recomputes the aggregate fields of `eval` from its frames.
void summarize(SequenceEval& eval);

// Scores the run against the theoretical track of the same abilities. Throws
// ConfigError when no such track is given or when an axis-aligned run reports
// a rotated box, LengthError on a frame-count mismatch.
SequenceEval score_run(const TrackerRun& run, const MaskSequence& seq,
                       std::span<const TheoreticalTrack> tracks);

struct TrackerSummary {
  std::string tracker_name;
  int sequences = 0;
  double mean_iou = 0.0;
  double mean_riou = 0.0;
  double riou_ratio_of_means = 0.0;
  int failures = 0;
  int skips = 0;
};

// One summary per tracker, sorted by name; every sequence weighs the same.
std::vector<TrackerSummary> aggregate_dataset(std::span<const SequenceEval> evals);

// Report formats; numbers carry 6 decimals.
std::string frames_csv(const SequenceEval& eval);
// Inverse of frames_csv (frame scores only; aggregates via summarize()).
std::vector<FrameScore> parse_frames_csv(const std::string& text);
std::string sequence_json(const SequenceEval& eval);
std::string dataset_csv(std::span<const TrackerSummary> summaries);
std::string dataset_json(std::span<const TrackerSummary> summaries,
                         std::span<const SequenceEval> evals);

struct ValidationRow {
  std::string mask;
  double oracle_phi = 0.0;
  double optimizer_phi = 0.0;
  double delta = 0.0;  // optimizer - oracle
  int downsample_factor = 1;
};

// Compares optimize(AxisAligned) against exhaustive_axis_aligned. Masks over
// the budget are downsampled by the smallest sufficient integer factor.
ValidationRow validate_mask(const SegMask& mask, const std::string& name,
                            const OptimizerConfig& config,
                            std::int64_t budget = kDefaultOracleBudget);
std::vector<ValidationRow> validate_masks(
    std::span<const std::filesystem::path> files, const OptimizerConfig& config,
    int jobs = 1, std::int64_t budget = kDefaultOracleBudget, int threshold = 1);
// `mask,oracle_phi,optimizer_phi,delta`; downsampled masks are reported as
// `<name>@1/<factor>`.
std::string validation_csv(std::span<const ValidationRow> rows);

}  // namespace riou

#endif  // RIOU_HARNESS_H_
