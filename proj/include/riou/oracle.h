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


#ifndef RIOU_ORACLE_H_
#define RIOU_ORACLE_H_

#include <cstdint>
#include <vector>

#include "riou/box.h"
#include "riou/mask.h"

namespace riou {

inline constexpr std::int64_t kDefaultOracleBudget = 128 * 128;

struct OracleResult {
  OrientedBox box;
  double phi_value = 0.0;
  std::int64_t candidates_evaluated = 0;
};

// Summed-area table of foreground counts.
class IntegralImage {
 public:
  explicit IntegralImage(const SegMask& mask);
  // Foreground pixels in rows [r0, r1) and columns [c0, c1).
  std::int64_t count(int r0, int r1, int c0, int c1) const {
    return at(r1, c1) - at(r0, c1) - at(r1, c0) + at(r0, c0);
  }

 private:
  std::int64_t at(int r, int c) const {
    return table_[static_cast<std::size_t>(r) * stride_ + c];
  }
  std::size_t stride_;
  std::vector<std::int64_t> table_;
};

// Best axis-aligned box with integer cell boundaries, over every candidate.
// Ties go to the first candidate in (top, bottom, left, right) order. Throws
// EmptyMaskError, or BudgetExceededError when width*height > max_pixels.
OracleResult exhaustive_axis_aligned(const SegMask& mask,
                                     std::int64_t max_pixels = kDefaultOracleBudget);

// For each angle in {0, step, ...} below 90 degrees, rasterizes the mask into
// a unit grid aligned with that angle and finds the best grid-aligned box on
// it; the winner of every angle is re-scored with iou_box_mask and the best is
// returned. A lower bound on the oriented optimum.
OracleResult grid_oriented(const SegMask& mask, double angle_step,
                           std::int64_t max_pixels = kDefaultOracleBudget);

// Nearest-neighbour downsampling by an integer factor (cell centers sampled).
SegMask downsample(const SegMask& mask, int factor);

}  // namespace riou

#endif  // RIOU_ORACLE_H_
