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


#ifndef RIOU_SYNTHETIC_H_
#define RIOU_SYNTHETIC_H_

#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "riou/box.h"
#include "riou/mask.h"
#include "riou/theoretical.h"

// Generators for synthetic masks and sequences with known geometry.
namespace riou::synthetic {

// Pixels whose cell center lies inside the box (boundary included).
SegMask rasterize_box(int width, int height, const OrientedBox& box);

// Pixels whose cell center lies inside the ellipse with semi-axes a (along the
// width axis of `phi`) and b.
SegMask rasterize_ellipse(int width, int height, Point center, double a,
                          double b, double phi);

SegMask union_of(std::span<const SegMask> masks);

// Union of 1-3 random rectangles or ellipses in a frame of 64..128 pixels per
// side.
SegMask random_blob(std::mt19937_64& rng);

// `count` random_blob masks from one seed.
std::vector<SegMask> blob_suite(int count, std::uint64_t seed);

// Axis-aligned rectangle whose size grows by `growth` per frame, centered in a
// square frame.
MaskSequence growing_rectangle(int frames, double initial_w, double initial_h,
                               double growth, int frame_size);

// Rectangle of fixed size rotated to each of `angles` (degrees).
MaskSequence rotating_rectangle(std::span<const double> angles, double w,
                                double h, int frame_size);

}  // namespace riou::synthetic

#endif  // RIOU_SYNTHETIC_H_
