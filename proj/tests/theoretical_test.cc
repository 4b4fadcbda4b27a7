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

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "riou/errors.h"
#include "riou/synthetic.h"

namespace riou {
namespace {

namespace fs = std::filesystem;

constexpr FamilyKind kAllFamilies[] = {FamilyKind::kAxisAligned,
                                       FamilyKind::kOriented,
                                       FamilyKind::kFixedScaleAxisAligned};

SegMask Blob(double angle) {
  const SegMask parts[] = {
      synthetic::rasterize_ellipse(64, 64, {30, 30}, 18, 8, angle),
      synthetic::rasterize_box(64, 64, {38, 40, 10, 6, 0}),
  };
  return synthetic::union_of(parts);
}

std::vector<std::string> Lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) out.push_back(line);
  return out;
}

TEST(TheoreticalTest, StaticSequence) {
  MaskSequence seq{"static", std::vector<SegMask>(5, Blob(20))};
  for (FamilyKind kind : kAllFamilies) {
    const TheoreticalTrack track = run_theoretical(seq, kind, {});
    ASSERT_EQ(track.per_frame.size(), 5u);
    for (const TrackFrame& f : track.per_frame) {
      EXPECT_EQ(f.box, track.per_frame[0].box);
      EXPECT_EQ(f.phi_opt, track.per_frame[0].phi_opt);
    }
  }
}

TEST(TheoreticalTest, GrowingRectangleLosesFixedScale) {
  const MaskSequence seq = synthetic::growing_rectangle(8, 20, 12, 0.1, 128);
  const TheoreticalTrack aa = run_theoretical(seq, FamilyKind::kAxisAligned, {});
  const TheoreticalTrack fixed =
      run_theoretical(seq, FamilyKind::kFixedScaleAxisAligned, {});
  ASSERT_TRUE(fixed.fixed_scale_origin);
  EXPECT_NEAR(fixed.fixed_scale_origin->first, 20, 1e-3);
  EXPECT_NEAR(fixed.fixed_scale_origin->second, 12, 1e-3);
  for (std::size_t i = 0; i < seq.frames.size(); ++i) {
    EXPECT_NEAR(*aa.per_frame[i].phi_opt, 1.0, 1e-6);
    EXPECT_EQ(fixed.per_frame[i].box->w, fixed.fixed_scale_origin->first);
    // A frozen w0×h0 box inside a W×H rectangle scores w0·h0 / (W·H).
    const OrientedBox truth = axis_aligned_bbox(seq.frames[i]);
    EXPECT_NEAR(*fixed.per_frame[i].phi_opt, 240.0 / truth.area(), 1e-6);
    if (i > 0) {
      EXPECT_LT(*fixed.per_frame[i].phi_opt, *fixed.per_frame[i - 1].phi_opt);
    }
  }
}

TEST(TheoreticalTest, RotatingRectangleFavoursOriented) {
  const double angles[] = {15, 30, 45, 60, 75};
  const MaskSequence seq = synthetic::rotating_rectangle(angles, 60, 20, 96);
  const TheoreticalTrack aa = run_theoretical(seq, FamilyKind::kAxisAligned, {});
  const TheoreticalTrack rot = run_theoretical(seq, FamilyKind::kOriented, {});
  for (std::size_t i = 0; i < seq.frames.size(); ++i) {
    // Staircase edges cap what any box can reach on a 60×20 raster.
    const OrientedBox truth{48, 48, 60, 20, angles[i]};
    EXPECT_GE(*rot.per_frame[i].phi_opt, iou_box_mask(truth, seq.frames[i]) - 1e-9);
    EXPECT_GE(*rot.per_frame[i].phi_opt, 0.95);
    EXPECT_GE(*rot.per_frame[i].phi_opt - *aa.per_frame[i].phi_opt, 0.05);
  }
}

TEST(TheoreticalTest, NestedFamiliesDominate) {
  MaskSequence seq{"blobs", {Blob(10), Blob(35), Blob(70)}};
  const TheoreticalTrack aa = run_theoretical(seq, FamilyKind::kAxisAligned, {});
  const TheoreticalTrack rot = run_theoretical(seq, FamilyKind::kOriented, {});
  const TheoreticalTrack fixed =
      run_theoretical(seq, FamilyKind::kFixedScaleAxisAligned, {});
  for (std::size_t i = 0; i < 3; ++i) {
    EXPECT_GE(*rot.per_frame[i].phi_opt, *aa.per_frame[i].phi_opt - 1e-6);
  }
  EXPECT_GE(*aa.per_frame[0].phi_opt, *fixed.per_frame[0].phi_opt - 2e-6);
  EXPECT_NEAR(*aa.per_frame[0].phi_opt, *fixed.per_frame[0].phi_opt, 2e-6);
}

TEST(TheoreticalTest, EmptyFramesAreAbsent) {
  MaskSequence seq{"gap", {Blob(0), SegMask(64, 64, {}), Blob(10)}};
  for (FamilyKind kind : kAllFamilies) {
    const TheoreticalTrack track = run_theoretical(seq, kind, {});
    EXPECT_TRUE(track.per_frame[0].box);
    EXPECT_FALSE(track.per_frame[1].box);
    EXPECT_FALSE(track.per_frame[1].phi_opt);
    EXPECT_TRUE(track.per_frame[2].phi_opt);
  }
}

TEST(TheoreticalTest, Errors) {
  EXPECT_THROW(run_theoretical({"none", {}}, FamilyKind::kAxisAligned, {}),
               EmptySequenceError);
  MaskSequence late{"late", {SegMask(64, 64, {}), Blob(0)}};
  EXPECT_THROW(run_theoretical(late, FamilyKind::kFixedScaleAxisAligned, {}),
               EmptyFirstFrameError);
  EXPECT_NO_THROW(run_theoretical(late, FamilyKind::kAxisAligned, {}));
  MaskSequence mixed{"mixed", {Blob(0), SegMask(32, 64, {})}};
  EXPECT_THROW(validate_sequence(mixed), FormatError);
}

TEST(TheoreticalTest, FramePermutationPermutesOutput) {
  MaskSequence seq{"perm", {Blob(5), Blob(40), Blob(80)}};
  MaskSequence rev{"perm", {Blob(80), Blob(40), Blob(5)}};
  for (FamilyKind kind : {FamilyKind::kAxisAligned, FamilyKind::kOriented}) {
    const TheoreticalTrack a = run_theoretical(seq, kind, {});
    const TheoreticalTrack b = run_theoretical(rev, kind, {});
    for (std::size_t i = 0; i < 3; ++i) {
      EXPECT_EQ(a.per_frame[i].box, b.per_frame[2 - i].box);
      EXPECT_EQ(a.per_frame[i].phi_opt, b.per_frame[2 - i].phi_opt);
    }
  }
}

TEST(TheoreticalTest, WarmStartMatchesColdStart) {
  const double angles[] = {0, 12, 24, 36, 48, 60};
  MaskSequence seq{"warm", {}};
  for (double a : angles) seq.frames.push_back(Blob(a));
  OptimizerConfig warm;
  warm.warm_start = true;
  for (FamilyKind kind : kAllFamilies) {
    const TheoreticalTrack cold = run_theoretical(seq, kind, {});
    const TheoreticalTrack hot = run_theoretical(seq, kind, warm);
    for (std::size_t i = 0; i < seq.frames.size(); ++i) {
      EXPECT_NEAR(*cold.per_frame[i].phi_opt, *hot.per_frame[i].phi_opt, 1e-3);
    }
  }
}

TEST(CurvesTest, RowsAndReproducibility) {
  MaskSequence seq{"curves", {Blob(0), SegMask(64, 64, {}), Blob(30), Blob(60)}};
  std::vector<TheoreticalTrack> tracks;
  for (FamilyKind kind : kAllFamilies) tracks.push_back(run_theoretical(seq, kind, {}, 1));
  const std::string csv = curves_csv(tracks);
  const auto lines = Lines(csv);
  ASSERT_EQ(lines.size(), 1 + 3 * seq.frames.size());
  EXPECT_EQ(lines[0], "frame,family,phi_opt,r_c,c_c,w,h,phi");
  EXPECT_EQ(lines[2], "1,box-axis-aligned,,,,,,");

  std::vector<TheoreticalTrack> parallel;
  for (FamilyKind kind : kAllFamilies) parallel.push_back(run_theoretical(seq, kind, {}, 4));
  EXPECT_EQ(curves_csv(parallel), csv);

  const fs::path out = fs::temp_directory_path() / "riou_curves_test.csv";
  export_curves(tracks, out);
  std::ifstream in(out);
  std::stringstream buf;
  buf << in.rdbuf();
  EXPECT_EQ(buf.str(), csv);
  EXPECT_THROW(export_curves(tracks, "/nonexistent-dir/x.csv"), IoError);
}

TEST(CurvesTest, StaticSequenceHasConstantColumns) {
  MaskSequence seq{"static", std::vector<SegMask>(4, Blob(25))};
  const TheoreticalTrack track = run_theoretical(seq, FamilyKind::kOriented, {});
  const auto lines = Lines(curves_csv({&track, 1}));
  for (std::size_t i = 2; i < lines.size(); ++i) {
    EXPECT_EQ(lines[i].substr(lines[i].find(',')), lines[1].substr(lines[1].find(',')));
  }
}

TEST(LoadSequenceTest, ReadsDirectoryInNameOrder) {
  const fs::path dir = fs::temp_directory_path() / "riou_seq_test" / "walker";
  fs::remove_all(dir);
  fs::create_directories(dir);
  save_png(Blob(0), dir / "00001.png");
  save_pgm(SegMask(64, 64, {}), dir / "00000.pgm");
  save_png(Blob(50), dir / "00002.png");
  std::ofstream(dir / "notes.txt") << "ignored";
  const MaskSequence seq = load_sequence(dir);
  EXPECT_EQ(seq.name, "walker");
  ASSERT_EQ(seq.frames.size(), 3u);
  EXPECT_TRUE(seq.frames[0].is_empty());
  EXPECT_EQ(seq.frames[1], Blob(0));
  EXPECT_EQ(seq.frames[2], Blob(50));
  EXPECT_THROW(load_sequence(dir / "00001.png"), IoError);
  const fs::path empty = dir.parent_path() / "empty";
  fs::create_directories(empty);
  EXPECT_THROW(load_sequence(empty), EmptySequenceError);
}

}  // namespace
}  // namespace riou
