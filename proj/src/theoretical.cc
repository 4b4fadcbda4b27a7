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


#include "riou/theoretical.h"

#include <algorithm>
#include <cstdio>
#include <fstream>

#include "parallel.h"
#include "riou/errors.h"

namespace riou {

std::vector<std::filesystem::path> list_mask_files(
    const std::filesystem::path& dir) {
  if (!std::filesystem::is_directory(dir)) {
    throw IoError("not a directory: " + dir.string());
  }
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (!entry.is_regular_file()) continue;
    std::string ext = entry.path().extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(),
                   [](unsigned char ch) { return std::tolower(ch); });
    if (ext == ".png" || ext == ".pgm") files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end(),
            [](const auto& a, const auto& b) {
              return a.filename().string() < b.filename().string();
            });
  return files;
}

void validate_sequence(const MaskSequence& seq) {
  if (seq.frames.empty()) throw EmptySequenceError();
  for (const SegMask& frame : seq.frames) {
    if (frame.width() != seq.frames.front().width() ||
        frame.height() != seq.frames.front().height()) {
      throw FormatError("sequence " + seq.name +
                        ": frames have different dimensions");
    }
  }
}

MaskSequence load_sequence(const std::filesystem::path& dir, int threshold) {
  MaskSequence seq;
  const auto normalized = dir.lexically_normal();
  seq.name = normalized.has_filename() ? normalized.filename().string()
                                       : normalized.parent_path().filename().string();
  for (const auto& file : list_mask_files(dir)) {
    seq.frames.push_back(load_mask(file, threshold));
  }
  validate_sequence(seq);
  return seq;
}

namespace {

TrackFrame to_frame(const OptResult& r) { return {r.box, r.phi_opt}; }

}  // namespace

TheoreticalTrack run_theoretical(const MaskSequence& seq, FamilyKind family,
                                 const OptimizerConfig& config, int jobs) {
  validate_sequence(seq);
  TheoreticalTrack track;
  track.family.kind = family;
  track.per_frame.resize(seq.frames.size());

  std::vector<OrientedBox> frame0_seeds;
  if (family == FamilyKind::kFixedScaleAxisAligned) {
    const SegMask& first = seq.frames.front();
    if (first.is_empty()) throw EmptyFirstFrameError();
    const OptResult initial = optimize(first, BoxFamily::axis_aligned(), config);
    track.family = BoxFamily::fixed_scale(initial.box.w, initial.box.h);
    track.fixed_scale_origin = std::make_pair(initial.box.w, initial.box.h);
    // The frame-0 axis-aligned optimum already has the frozen scale.
    frame0_seeds.push_back(initial.box);
  }

  auto solve = [&](std::size_t i, std::span<const OrientedBox> extra) {
    const SegMask& mask = seq.frames[i];
    if (mask.is_empty()) return;
    track.per_frame[i] = to_frame(optimize(mask, track.family, config, extra));
  };

  if (config.warm_start) {
    std::optional<OrientedBox> previous;
    for (std::size_t i = 0; i < seq.frames.size(); ++i) {
      std::vector<OrientedBox> extra = i == 0 ? frame0_seeds : std::vector<OrientedBox>{};
      if (previous) extra.push_back(*previous);
      solve(i, extra);
      if (track.per_frame[i].box) previous = track.per_frame[i].box;
    }
  } else {
    internal::parallel_for(seq.frames.size(), jobs, [&](std::size_t i) {
      solve(i, i == 0 ? std::span<const OrientedBox>(frame0_seeds)
                      : std::span<const OrientedBox>());
    });
  }
  return track;
}

std::string curves_csv(std::span<const TheoreticalTrack> tracks) {
  std::string out = "frame,family,phi_opt,r_c,c_c,w,h,phi\n";
  char buf[256];
  for (const TheoreticalTrack& track : tracks) {
    const std::string name = tracker_name(track.family.kind);
    for (std::size_t i = 0; i < track.per_frame.size(); ++i) {
      const TrackFrame& f = track.per_frame[i];
      if (f.box && f.phi_opt) {
        std::snprintf(buf, sizeof(buf), "%zu,%s,%.6f,%.6f,%.6f,%.6f,%.6f,%.6f\n",
                      i, name.c_str(), *f.phi_opt, f.box->r_c, f.box->c_c,
                      f.box->w, f.box->h, f.box->phi);
      } else {
        std::snprintf(buf, sizeof(buf), "%zu,%s,,,,,,\n", i, name.c_str());
      }
      out += buf;
    }
  }
  return out;
}

void export_curves(std::span<const TheoreticalTrack> tracks,
                   const std::filesystem::path& out) {
  std::ofstream file(out, std::ios::binary);
  if (!file) throw IoError("cannot write " + out.string());
  file << curves_csv(tracks);
  if (!file) throw IoError("cannot write " + out.string());
}

}  // namespace riou
