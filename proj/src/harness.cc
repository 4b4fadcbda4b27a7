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


#include "riou/harness.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "json.hpp"
#include "parallel.h"
#include "riou/errors.h"

namespace riou {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::string fixed6(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  return buf;
}

// Value as printed with 6 decimals, for JSON output.
double round6(double v) { return std::round(v * 1e6) / 1e6; }

// Parses the `# key=value ...` header line into `run`.
void parse_header(const std::string& line, std::size_t line_no, TrackerRun& run) {
  if (line.empty() || line[0] != '#') {
    throw ParseError("expected header '# tracker=<name> abilities=<aa|rot|noscale>'",
                     line_no);
  }
  std::istringstream in(line.substr(1));
  std::string token;
  bool have_tracker = false, have_abilities = false;
  while (in >> token) {
    const auto eq = token.find('=');
    if (eq == std::string::npos) throw ParseError("bad header field '" + token + "'", line_no);
    const std::string key = token.substr(0, eq);
    const std::string value = token.substr(eq + 1);
    if (key == "tracker") {
      run.tracker_name = value;
      have_tracker = !value.empty();
    } else if (key == "abilities") {
      try {
        run.abilities = parse_family_tag(value);
      } catch (const ConfigError& e) {
        throw ParseError(e.what(), line_no);
      }
      have_abilities = true;
    } else if (key == "sequence") {
      run.sequence_name = value;
    } else {
      throw ParseError("unknown header field '" + key + "'", line_no);
    }
  }
  if (!have_tracker || !have_abilities) {
    throw ParseError("header needs tracker= and abilities=", line_no);
  }
}

}  // namespace

TrackerRun parse_tracker_run(std::istream& in, const MaskSequence& seq) {
  TrackerRun run;
  std::string line;
  std::size_t line_no = 0;
  bool header_seen = false;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string text = trim(line);
    if (text.empty()) continue;
    if (!header_seen) {
      parse_header(text, line_no, run);
      header_seen = true;
      continue;
    }
    if (text == "skip") {
      run.per_frame.emplace_back(std::nullopt);
    } else {
      run.per_frame.emplace_back(parse_box(text, line_no));
    }
  }
  if (!header_seen) throw ParseError("empty run file", 0);
  if (run.sequence_name.empty()) run.sequence_name = seq.name;
  if (run.per_frame.size() != seq.frames.size()) {
    throw LengthError("run '" + run.tracker_name + "' has " +
                      std::to_string(run.per_frame.size()) + " frames, sequence '" +
                      seq.name + "' has " + std::to_string(seq.frames.size()));
  }
  return run;
}

TrackerRun load_tracker_run(const std::filesystem::path& path,
                            const MaskSequence& seq) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  return parse_tracker_run(in, seq);
}

TrackerRun read_tracker_run_header(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  std::string line;
  std::size_t line_no = 0;
  TrackerRun run;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string text = trim(line);
    if (text.empty()) continue;
    parse_header(text, line_no, run);
    return run;
  }
  throw ParseError("empty run file", 0);
}

std::string format_tracker_run(const TrackerRun& run) {
  std::string out = "# tracker=" + run.tracker_name +
                    " abilities=" + family_tag(run.abilities);
  if (!run.sequence_name.empty()) out += " sequence=" + run.sequence_name;
  out += '\n';
  for (const auto& box : run.per_frame) {
    out += box ? format_box(*box) : "skip";
    out += '\n';
  }
  return out;
}

void save_tracker_run(const TrackerRun& run, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  out << format_tracker_run(run);
  if (!out) throw IoError("cannot write " + path.string());
}

TrackerRun run_from_track(const TheoreticalTrack& track,
                          const std::string& tracker_name,
                          const std::string& sequence_name) {
  TrackerRun run;
  run.tracker_name = tracker_name;
  run.sequence_name = sequence_name;
  run.abilities = track.family.kind;
  for (const TrackFrame& f : track.per_frame) run.per_frame.push_back(f.box);
  return run;
}

OptResult init_box(const MaskSequence& seq, const OptimizerConfig& config) {
  validate_sequence(seq);
  if (seq.frames.front().is_empty()) throw EmptyFirstFrameError();
  return optimize(seq.frames.front(), BoxFamily::axis_aligned(), config);
}

OptResult emit_init_box(const MaskSequence& seq, const std::filesystem::path& out,
                        const OptimizerConfig& config) {
  const OptResult result = init_box(seq, config);
  std::ofstream file(out);
  if (!file) throw IoError("cannot write " + out.string());
  file << format_box(result.box) << '\n';
  if (!file) throw IoError("cannot write " + out.string());
  return result;
}

void summarize(SequenceEval& eval) {
  double sum_iou = 0.0, sum_riou = 0.0, sum_phi = 0.0;
  int counted = 0;
  eval.failure_count = 0;
  eval.skipped_frames = 0;
  for (const FrameScore& f : eval.frames) {
    if (!f.iou || !f.phi_opt) {
      ++eval.skipped_frames;
      continue;
    }
    ++counted;
    sum_iou += *f.iou;
    sum_phi += *f.phi_opt;
    sum_riou += f.riou.value_or(0.0);
    if (f.failed) ++eval.failure_count;
  }
  eval.mean_iou = counted ? sum_iou / counted : 0.0;
  eval.mean_riou = counted ? sum_riou / counted : 0.0;
  eval.mean_phi_opt = counted ? sum_phi / counted : 0.0;
  eval.riou_ratio_of_means = eval.mean_phi_opt > 0.0 ? eval.mean_iou / eval.mean_phi_opt : 0.0;
}

SequenceEval score_run(const TrackerRun& run, const MaskSequence& seq,
                       std::span<const TheoreticalTrack> tracks) {
  validate_sequence(seq);
  auto track = std::find_if(tracks.begin(), tracks.end(), [&](const auto& t) {
    return t.family.kind == run.abilities;
  });
  if (track == tracks.end()) {
    throw ConfigError("no " + tracker_name(run.abilities) +
                      " theoretical track for tracker '" + run.tracker_name + "'");
  }
  if (run.per_frame.size() != seq.frames.size() ||
      track->per_frame.size() != seq.frames.size()) {
    throw LengthError("run, track and sequence '" + seq.name +
                      "' differ in frame count");
  }
  if (run.abilities != FamilyKind::kOriented) {
    for (const auto& box : run.per_frame) {
      if (box && box->phi != 0.0) {
        throw ConfigError("tracker '" + run.tracker_name +
                          "' declares axis-aligned abilities but reports a rotated box");
      }
    }
  }

  SequenceEval eval;
  eval.tracker_name = run.tracker_name;
  eval.sequence_name = seq.name;
  eval.abilities = run.abilities;
  for (std::size_t i = 0; i < seq.frames.size(); ++i) {
    const SegMask& mask = seq.frames[i];
    FrameScore score;
    score.frame = static_cast<int>(i);
    const TrackFrame& reference = track->per_frame[i];
    if (!mask.is_empty() && reference.phi_opt) {
      const auto& box = run.per_frame[i];
      const double iou = box ? iou_box_mask(*box, mask) : 0.0;
      score.iou = iou;
      score.phi_opt = *reference.phi_opt;
      score.riou_raw = iou / *reference.phi_opt;
      score.riou = std::clamp(*score.riou_raw, 0.0, 1.0);
      score.failed = iou == 0.0;
    }
    eval.frames.push_back(score);
  }
  summarize(eval);
  return eval;
}

std::vector<TrackerSummary> aggregate_dataset(std::span<const SequenceEval> evals) {
  std::map<std::string, std::vector<const SequenceEval*>> by_tracker;
  for (const SequenceEval& e : evals) by_tracker[e.tracker_name].push_back(&e);
  std::vector<TrackerSummary> out;
  for (auto& [name, list] : by_tracker) {
    std::stable_sort(list.begin(), list.end(), [](const auto* a, const auto* b) {
      return a->sequence_name < b->sequence_name;
    });
    TrackerSummary s;
    s.tracker_name = name;
    s.sequences = static_cast<int>(list.size());
    for (const SequenceEval* e : list) {
      s.mean_iou += e->mean_iou;
      s.mean_riou += e->mean_riou;
      s.riou_ratio_of_means += e->riou_ratio_of_means;
      s.failures += e->failure_count;
      s.skips += e->skipped_frames;
    }
    s.mean_iou /= s.sequences;
    s.mean_riou /= s.sequences;
    s.riou_ratio_of_means /= s.sequences;
    out.push_back(s);
  }
  return out;
}

std::string frames_csv(const SequenceEval& eval) {
  std::string out = "frame,iou,phi_opt,riou,failed\n";
  for (const FrameScore& f : eval.frames) {
    out += std::to_string(f.frame);
    out += ',';
    if (f.iou) out += fixed6(*f.iou);
    out += ',';
    if (f.phi_opt) out += fixed6(*f.phi_opt);
    out += ',';
    if (f.riou_raw) out += fixed6(*f.riou_raw);
    out += ',';
    out += f.failed ? '1' : '0';
    out += '\n';
  }
  return out;
}

std::vector<FrameScore> parse_frames_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  std::vector<FrameScore> frames;
  while (std::getline(in, line)) {
    ++line_no;
    if (line_no == 1 || trim(line).empty()) continue;
    std::vector<std::string> fields;
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, ',')) fields.push_back(trim(field));
    if (fields.size() == 4) fields.emplace_back();
    if (fields.size() != 5) throw ParseError("expected 5 fields", line_no);
    try {
      FrameScore f;
      f.frame = std::stoi(fields[0]);
      if (!fields[1].empty()) f.iou = std::stod(fields[1]);
      if (!fields[2].empty()) f.phi_opt = std::stod(fields[2]);
      if (!fields[3].empty()) {
        f.riou_raw = std::stod(fields[3]);
        f.riou = std::clamp(*f.riou_raw, 0.0, 1.0);
      }
      f.failed = fields[4] == "1";
      frames.push_back(f);
    } catch (const std::logic_error&) {
      throw ParseError("invalid number", line_no);
    }
  }
  return frames;
}

namespace {

nlohmann::json optional_number(const std::optional<double>& v) {
  return v ? nlohmann::json(round6(*v)) : nlohmann::json(nullptr);
}

nlohmann::json eval_json(const SequenceEval& eval) {
  nlohmann::json j;
  j["tracker"] = eval.tracker_name;
  j["sequence"] = eval.sequence_name;
  j["abilities"] = family_tag(eval.abilities);
  j["mean_iou"] = round6(eval.mean_iou);
  j["mean_riou"] = round6(eval.mean_riou);
  j["mean_phi_opt"] = round6(eval.mean_phi_opt);
  j["riou_ratio_of_means"] = round6(eval.riou_ratio_of_means);
  j["failure_count"] = eval.failure_count;
  j["skipped_frames"] = eval.skipped_frames;
  nlohmann::json frames = nlohmann::json::array();
  for (const FrameScore& f : eval.frames) {
    frames.push_back({{"frame", f.frame},
                      {"iou", optional_number(f.iou)},
                      {"phi_opt", optional_number(f.phi_opt)},
                      {"riou", optional_number(f.riou)},
                      {"riou_raw", optional_number(f.riou_raw)},
                      {"failed", f.failed}});
  }
  j["frames"] = std::move(frames);
  return j;
}

}  // namespace

std::string sequence_json(const SequenceEval& eval) {
  return eval_json(eval).dump(2) + "\n";
}

std::string dataset_csv(std::span<const TrackerSummary> summaries) {
  std::string out = "tracker,mean_iou,mean_riou,riou_ratio_of_means,failures,skips\n";
  for (const TrackerSummary& s : summaries) {
    out += s.tracker_name + ',' + fixed6(s.mean_iou) + ',' + fixed6(s.mean_riou) +
           ',' + fixed6(s.riou_ratio_of_means) + ',' + std::to_string(s.failures) +
           ',' + std::to_string(s.skips) + '\n';
  }
  return out;
}

std::string dataset_json(std::span<const TrackerSummary> summaries,
                         std::span<const SequenceEval> evals) {
  nlohmann::json j;
  nlohmann::json trackers = nlohmann::json::array();
  for (const TrackerSummary& s : summaries) {
    nlohmann::json sequences = nlohmann::json::array();
    for (const SequenceEval& e : evals) {
      if (e.tracker_name != s.tracker_name) continue;
      sequences.push_back({{"sequence", e.sequence_name},
                           {"mean_iou", round6(e.mean_iou)},
                           {"mean_riou", round6(e.mean_riou)},
                           {"riou_ratio_of_means", round6(e.riou_ratio_of_means)},
                           {"failures", e.failure_count},
                           {"skips", e.skipped_frames}});
    }
    trackers.push_back({{"tracker", s.tracker_name},
                        {"sequences", std::move(sequences)},
                        {"mean_iou", round6(s.mean_iou)},
                        {"mean_riou", round6(s.mean_riou)},
                        {"riou_ratio_of_means", round6(s.riou_ratio_of_means)},
                        {"failures", s.failures},
                        {"skips", s.skips}});
  }
  j["trackers"] = std::move(trackers);
  return j.dump(2) + "\n";
}

ValidationRow validate_mask(const SegMask& mask, const std::string& name,
                            const OptimizerConfig& config, std::int64_t budget) {
  ValidationRow row;
  row.mask = name;
  const std::int64_t pixels = static_cast<std::int64_t>(mask.width()) * mask.height();
  int factor = 1;
  while (pixels > budget * static_cast<std::int64_t>(factor) * factor) ++factor;
  const SegMask reduced = downsample(mask, factor);
  row.downsample_factor = factor;
  const OracleResult oracle = exhaustive_axis_aligned(reduced, budget);
  const OptResult opt = optimize(reduced, BoxFamily::axis_aligned(), config);
  row.oracle_phi = oracle.phi_value;
  row.optimizer_phi = opt.phi_opt;
  row.delta = opt.phi_opt - oracle.phi_value;
  return row;
}

std::vector<ValidationRow> validate_masks(
    std::span<const std::filesystem::path> files, const OptimizerConfig& config,
    int jobs, std::int64_t budget, int threshold) {
  std::vector<ValidationRow> rows(files.size());
  internal::parallel_for(files.size(), jobs, [&](std::size_t i) {
    rows[i] = validate_mask(load_mask(files[i], threshold),
                            files[i].filename().string(), config, budget);
  });
  return rows;
}

std::string validation_csv(std::span<const ValidationRow> rows) {
  std::string out = "mask,oracle_phi,optimizer_phi,delta\n";
  for (const ValidationRow& r : rows) {
    std::string name = r.mask;
    if (r.downsample_factor > 1) name += "@1/" + std::to_string(r.downsample_factor);
    out += name + ',' + fixed6(r.oracle_phi) + ',' + fixed6(r.optimizer_phi) + ',' +
           fixed6(r.delta) + '\n';
  }
  return out;
}

}  // namespace riou
