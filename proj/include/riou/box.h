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


#ifndef RIOU_BOX_H_
#define RIOU_BOX_H_

#include <array>
#include <span>
#include <string>
#include <vector>

namespace riou {

class SegMask;

// Image-plane point. Rows grow downwards, columns to the right.
struct Point {
  double row = 0.0;
  double col = 0.0;
};

// Rectangle with center (r_c, c_c), extent w along the direction at angle
// phi (degrees, counter-clockwise on screen) from the column axis, and
// extent h perpendicular to it. Axis-aligned boxes have phi == 0, so w is the
// column extent and h the row extent.
//
// Library functions return canonical boxes (w, h > 0, 0 <= phi < 90). The
// geometry functions below accept any finite phi.
struct OrientedBox {
  double r_c = 0.0;
  double c_c = 0.0;
  double w = 1.0;
  double h = 1.0;
  double phi = 0.0;

  double area() const { return w * h; }
  bool operator==(const OrientedBox&) const = default;
};

// Reduces phi modulo 180 into [0, 90), swapping w and h when the reduction
// crosses a 90 degree boundary. Throws InvalidBoxError for w <= 0, h <= 0 or
// non-finite parameters.
OrientedBox canonicalize(const OrientedBox& box);

bool is_canonical(const OrientedBox& box);

// Unit vector along w for the given angle.
Point width_axis(double phi_deg);
// Unit vector along h for the given angle.
Point height_axis(double phi_deg);

// Vertices in positive orientation: the shoelace sum over (row, col) pairs is
// +w*h.
std::array<Point, 4> corners(const OrientedBox& box);

// Signed area, positive for the vertex order produced by corners().
double shoelace_area(std::span<const Point> polygon);

// Clips a convex polygon against the convex polygon `clip` (positively
// oriented). Sutherland-Hodgman; the result may be empty.
std::vector<Point> clip_convex(std::span<const Point> subject,
                               std::span<const Point> clip);

// |S ∩ B|: exact area of the box inside the foreground pixel cells.
double mask_intersection_area(const OrientedBox& box, const SegMask& mask);

// |S ∩ B| / |S ∪ B| with |B| = w*h (no clipping to the frame). Zero for an
// empty mask.
double iou_box_mask(const OrientedBox& box, const SegMask& mask);

// Exact IoU of two boxes via polygon clipping.
double iou_box_box(const OrientedBox& a, const OrientedBox& b);

// Box text format: `r_c c_c w h phi_deg`.
std::string format_box(const OrientedBox& box);
// Parses the five numbers of a box line and canonicalizes. Throws ParseError
// (line number `line`) on malformed input.
OrientedBox parse_box(const std::string& text, std::size_t line = 0);

}  // namespace riou

#endif  // RIOU_BOX_H_
