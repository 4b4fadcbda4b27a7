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


#include "riou/oracle.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "riou/errors.h"

namespace riou {

IntegralImage::IntegralImage(const SegMask& mask)
    : stride_(static_cast<std::size_t>(mask.width()) + 1),
      table_(stride_ * (static_cast<std::size_t>(mask.height()) + 1), 0) {
  std::vector<std::int64_t> row(stride_, 0);
  for (int r = 0; r < mask.height(); ++r) {
    std::fill(row.begin(), row.end(), 0);
    for (const Run& run : mask.row_runs(r)) {
      for (int c = run.col_start; c < run.col_end; ++c) row[c + 1] = 1;
    }
    std::int64_t acc = 0;
    for (std::size_t c = 1; c < stride_; ++c) {
      acc += row[c];
      table_[(r + 1) * stride_ + c] = table_[r * stride_ + c] + acc;
    }
  }
}

namespace {

void check_budget(const SegMask& mask, std::int64_t max_pixels) {
  if (mask.is_empty()) throw EmptyMaskError();
  const std::int64_t pixels =
      static_cast<std::int64_t>(mask.width()) * mask.height();
  if (pixels > max_pixels) {
    throw BudgetExceededError("mask has " + std::to_string(pixels) +
                              " pixels, oracle budget is " +
                              std::to_string(max_pixels));
  }
}

struct SubRect {
  int r0 = 0, r1 = 0, c0 = 0, c1 = 0;
  double sum = -std::numeric_limits<double>::infinity();
};

// Maximum-sum sub-rectangle of a dense grid (Kadane over row pairs).
SubRect max_sum_subrect(const std::vector<double>& grid, int rows, int cols) {
  SubRect best;
  std::vector<double> acc(static_cast<std::size_t>(cols));
  for (int r0 = 0; r0 < rows; ++r0) {
    std::fill(acc.begin(), acc.end(), 0.0);
    for (int r1 = r0 + 1; r1 <= rows; ++r1) {
      const double* row = grid.data() + static_cast<std::size_t>(r1 - 1) * cols;
      for (int c = 0; c < cols; ++c) acc[c] += row[c];
      double run = 0.0;
      int start = 0;
      for (int c = 0; c < cols; ++c) {
        if (run <= 0.0) {
          run = 0.0;
          start = c;
        }
        run += acc[c];
        if (run > best.sum) best = {r0, r1, start, c + 1, run};
      }
    }
  }
  return best;
}

}  // namespace

OracleResult exhaustive_axis_aligned(const SegMask& mask,
                                     std::int64_t max_pixels) {
  check_budget(mask, max_pixels);
  const IntegralImage integral(mask);
  const int rows = mask.height();
  const int cols = mask.width();
  const std::int64_t area = mask.area();

  // Candidates are compared as exact fractions inter / union.
  std::int64_t best_inter = 0, best_union = 1;
  int bt = 0, bb = 1, bl = 0, br = 1;
  std::int64_t evaluated = 0;
  for (int r0 = 0; r0 < rows; ++r0) {
    for (int r1 = r0 + 1; r1 <= rows; ++r1) {
      const std::int64_t h = r1 - r0;
      for (int c0 = 0; c0 < cols; ++c0) {
        for (int c1 = c0 + 1; c1 <= cols; ++c1) {
          const std::int64_t inter = integral.count(r0, r1, c0, c1);
          const std::int64_t uni = area + h * (c1 - c0) - inter;
          if (inter * best_union > best_inter * uni) {
            best_inter = inter;
            best_union = uni;
            bt = r0;
            bb = r1;
            bl = c0;
            br = c1;
          }
        }
      }
      evaluated += static_cast<std::int64_t>(cols) * (cols + 1) / 2;
    }
  }
  OracleResult result;
  result.box = {(bt + bb) / 2.0, (bl + br) / 2.0, double(br - bl),
                double(bb - bt), 0.0};
  result.phi_value = static_cast<double>(best_inter) / static_cast<double>(best_union);
  result.candidates_evaluated = evaluated;
  return result;
}

OracleResult grid_oriented(const SegMask& mask, double angle_step,
                           std::int64_t max_pixels) {
  check_budget(mask, max_pixels);
  if (!(angle_step > 0.0)) throw ConfigError("angle_step must be > 0");
  constexpr int kSub = 4;  // samples per pixel side for the rotated raster
  const double area = static_cast<double>(mask.area());

  OracleResult result;
  result.phi_value = -1.0;
  const int steps = static_cast<int>(std::ceil(90.0 / angle_step - 1e-9));
  for (int k = 0; k < steps; ++k) {
    const double angle = k * angle_step;
    const Point u = width_axis(angle);
    const Point v = height_axis(angle);

    // Extent of the foreground cells in the rotated frame.
    double a_min = std::numeric_limits<double>::infinity(), b_min = a_min;
    double a_max = -a_min, b_max = -a_min;
    for (const Run& run : mask.runs()) {
      for (double dr : {0.0, 1.0}) {
        for (double cc : {double(run.col_start), double(run.col_end)}) {
          const double rr = run.row + dr;
          const double a = rr * u.row + cc * u.col;
          const double b = rr * v.row + cc * v.col;
          a_min = std::min(a_min, a);
          a_max = std::max(a_max, a);
          b_min = std::min(b_min, b);
          b_max = std::max(b_max, b);
        }
      }
    }
    const double a0 = std::floor(a_min);
    const double b0 = std::floor(b_min);
    const int cols = static_cast<int>(std::ceil(a_max) - a0);
    const int rows = static_cast<int>(std::ceil(b_max) - b0);
    std::vector<double> coverage(static_cast<std::size_t>(rows) * cols, 0.0);
    constexpr double kWeight = 1.0 / (kSub * kSub);
    for (const Run& run : mask.runs()) {
      for (int c = run.col_start; c < run.col_end; ++c) {
        for (int i = 0; i < kSub; ++i) {
          for (int j = 0; j < kSub; ++j) {
            const double rr = run.row + (i + 0.5) / kSub;
            const double cc = c + (j + 0.5) / kSub;
            const int ga = std::clamp(
                static_cast<int>(rr * u.row + cc * u.col - a0), 0, cols - 1);
            const int gb = std::clamp(
                static_cast<int>(rr * v.row + cc * v.col - b0), 0, rows - 1);
            coverage[static_cast<std::size_t>(gb) * cols + ga] += kWeight;
          }
        }
      }
    }

    // Dinkelbach iteration: the best ratio I / (A + |B| - I) over grid boxes
    // is the root of max_B [(1 + l) I(B) - l |B|] - l A.
    std::vector<double> weights(coverage.size());
    double lambda = 0.0;
    double best_ratio = -1.0;
    SubRect best_rect;
    for (int iter = 0; iter < 100; ++iter) {
      for (std::size_t i = 0; i < coverage.size(); ++i) {
        weights[i] = (1.0 + lambda) * coverage[i] - lambda;
      }
      const SubRect rect = max_sum_subrect(weights, rows, cols);
      double inter = 0.0;
      for (int r = rect.r0; r < rect.r1; ++r) {
        for (int c = rect.c0; c < rect.c1; ++c) {
          inter += coverage[static_cast<std::size_t>(r) * cols + c];
        }
      }
      const double box_area = double(rect.r1 - rect.r0) * (rect.c1 - rect.c0);
      const double ratio = inter / (area + box_area - inter);
      if (ratio > best_ratio) {
        best_ratio = ratio;
        best_rect = rect;
      }
      if (ratio <= lambda + 1e-12) break;
      lambda = ratio;
    }
    result.candidates_evaluated += static_cast<std::int64_t>(rows) * (rows + 1) /
                                   2 * (static_cast<std::int64_t>(cols) * (cols + 1) / 2);

    const double ac = a0 + 0.5 * (best_rect.c0 + best_rect.c1);
    const double bc = b0 + 0.5 * (best_rect.r0 + best_rect.r1);
    const OrientedBox box{ac * u.row + bc * v.row, ac * u.col + bc * v.col,
                          double(best_rect.c1 - best_rect.c0),
                          double(best_rect.r1 - best_rect.r0), angle};
    const double phi = iou_box_mask(box, mask);
    if (phi > result.phi_value) {
      result.phi_value = phi;
      result.box = box;
    }
  }
  return result;
}

SegMask downsample(const SegMask& mask, int factor) {
  if (factor <= 1) return mask;
  const int w = std::max(1, mask.width() / factor);
  const int h = std::max(1, mask.height() / factor);
  std::vector<std::uint8_t> values(static_cast<std::size_t>(w) * h, 0);
  for (int r = 0; r < h; ++r) {
    for (int c = 0; c < w; ++c) {
      values[static_cast<std::size_t>(r) * w + c] =
          mask.contains(r * factor + factor / 2, c * factor + factor / 2) ? 1 : 0;
    }
  }
  return SegMask::from_pixels(w, h, values, 1);
}

}  // namespace riou
