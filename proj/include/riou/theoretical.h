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


#ifndef RIOU_THEORETICAL_H_
#define RIOU_THEORETICAL_H_

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "riou/box.h"
#include "riou/mask.h"
#include "riou/optimizer.h"

namespace riou {

// Frames of one object, all with the same dimensions. Empty masks (full
// occlusion) are allowed.
struct MaskSequence {
  std::string name;
  std::vector<SegMask> frames;
};

// Mask files (.png, .pgm) of a directory in lexicographic filename order.
std::vector<std::filesystem::path> list_mask_files(
    const std::filesystem::path& dir);

// Loads a sequence named after the directory. Throws EmptySequenceError for a
// directory without masks and FormatError for inconsistent dimensions.
MaskSequence load_sequence(const std::filesystem::path& dir, int threshold = 1);

// Checks the sequence invariants (non-empty, uniform dimensions).
void validate_sequence(const MaskSequence& seq);

struct TrackFrame {
  std::optional<OrientedBox> box;  // absent iff the mask is empty
  std::optional<double> phi_opt;
};

// Per-frame optimal boxes of one family: box-axis-aligned, box-rot or
// box-no-scale.
struct TheoreticalTrack {
  BoxFamily family;
  std::vector<TrackFrame> per_frame;
  // (w, h) frozen from the frame-0 axis-aligned optimum; fixed-scale only.
  std::optional<std::pair<double, double>> fixed_scale_origin;
};

// Optimizes every frame for the family. For kFixedScaleAxisAligned the scale
// is taken from the axis-aligned optimum of frame 0 and only the center is
// searched afterwards. Frames run on up to `jobs` threads unless warm starting
// is enabled. Throws EmptySequenceError, or EmptyFirstFrameError for the
// fixed-scale family.
TheoreticalTrack run_theoretical(const MaskSequence& seq, FamilyKind family,
                                 const OptimizerConfig& config, int jobs = 1);

// CSV `frame,family,phi_opt,r_c,c_c,w,h,phi`, one row per track and frame,
// grouped by track. Absent frames leave the numeric fields empty.
std::string curves_csv(std::span<const TheoreticalTrack> tracks);
void export_curves(std::span<const TheoreticalTrack> tracks,
                   const std::filesystem::path& out);

}  // namespace riou

#endif  // RIOU_THEORETICAL_H_
