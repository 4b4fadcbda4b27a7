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


#ifndef RIOU_MASK_H_
#define RIOU_MASK_H_

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "riou/box.h"

namespace riou {

// Half-open horizontal run [col_start, col_end) of foreground pixels.
struct Run {
  int row = 0;
  int col_start = 0;
  int col_end = 0;

  int length() const { return col_end - col_start; }
  bool operator==(const Run&) const = default;
};

// Binary segmentation of one frame, run-length encoded.
//
// Pixel (r, c) occupies the unit cell [r, r+1) x [c, c+1). Runs are sorted by
// (row, col_start), non-overlapping and maximal (adjacent runs merged).
// Immutable after construction.
class SegMask {
 public:
  // Normalizes `runs` (sorts, merges touching or overlapping runs, drops empty
  // ones). Throws FormatError for a zero dimension or an out-of-frame run.
  SegMask(int width, int height, std::vector<Run> runs);

  // Foreground iff value >= threshold. `values` is row-major, width*height.
  static SegMask from_pixels(int width, int height,
                             std::span<const std::uint8_t> values,
                             int threshold = 1);

  int width() const { return width_; }
  int height() const { return height_; }
  std::span<const Run> runs() const { return runs_; }
  // Runs of one row; empty span for rows outside the frame.
  std::span<const Run> row_runs(int row) const;
  std::int64_t area() const { return area_; }
  bool is_empty() const { return area_ == 0; }
  bool contains(int row, int col) const;

  // Row-major 0/1 raster.
  std::vector<std::uint8_t> rasterize() const;

  bool operator==(const SegMask& other) const {
    return width_ == other.width_ && height_ == other.height_ &&
           runs_ == other.runs_;
  }

 private:
  int width_;
  int height_;
  std::vector<Run> runs_;
  std::vector<std::size_t> row_offsets_;  // height + 1 entries
  std::int64_t area_ = 0;
};

struct MomentsSummary {
  double centroid_row = 0.0;
  double centroid_col = 0.0;
  double cov_rr = 0.0;
  double cov_cc = 0.0;
  double cov_rc = 0.0;
};

// Reads an 8-bit grayscale or paletted PNG, or a binary PGM (P5). For palette
// images the raw palette index is thresholded. threshold must be in [1, 255].
SegMask load_mask(const std::filesystem::path& path, int threshold = 1);

// Writes the mask as 0/255 grayscale.
void save_pgm(const SegMask& mask, const std::filesystem::path& path);
void save_png(const SegMask& mask, const std::filesystem::path& path);

// Tightest axis-aligned box around all foreground cells.
OrientedBox axis_aligned_bbox(const SegMask& mask);

// Minimum-area enclosing rectangle of the foreground cells (rotating calipers
// on the hull of the cell corners).
OrientedBox oriented_bbox(const SegMask& mask);

// Maximum-area axis-aligned rectangle of foreground cells.
OrientedBox largest_inner_axis_aligned_box(const SegMask& mask);

// Axis-aligned square inscribed in the largest inner circle: centered at the
// cell with maximal distance r to the background, side r * sqrt(2).
OrientedBox largest_inner_circle_square(const SegMask& mask);

MomentsSummary moments(const SegMask& mask);

// Rectangle with the centroid and covariance eigenvalues of the mask; sides are
// sqrt(12 * lambda), floored at 1 px.
OrientedBox second_moments_box(const SegMask& mask);

// Euclidean distance from each foreground cell center to the nearest background
// cell center, out-of-frame cells counting as background. Zero on background.
// Row-major, width*height.
std::vector<double> distance_transform(const SegMask& mask);

// Convex hull (Andrew's monotone chain), positively oriented, without
// collinear points.
std::vector<Point> convex_hull(std::vector<Point> points);

}  // namespace riou

#endif  // RIOU_MASK_H_
