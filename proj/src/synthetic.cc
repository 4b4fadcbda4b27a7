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


#include "riou/synthetic.h"

#include <algorithm>
#include <cmath>
#include <string>

namespace riou::synthetic {

namespace {

template <typename Inside>
SegMask rasterize(int width, int height, Inside inside) {
  std::vector<std::uint8_t> values(static_cast<std::size_t>(width) * height, 0);
  for (int r = 0; r < height; ++r) {
    for (int c = 0; c < width; ++c) {
      if (inside(r + 0.5, c + 0.5)) {
        values[static_cast<std::size_t>(r) * width + c] = 1;
      }
    }
  }
  return SegMask::from_pixels(width, height, values, 1);
}

}  // namespace

SegMask rasterize_box(int width, int height, const OrientedBox& box) {
  const Point u = width_axis(box.phi);
  const Point v = height_axis(box.phi);
  constexpr double kEps = 1e-9;
  return rasterize(width, height, [&](double r, double c) {
    const double dr = r - box.r_c;
    const double dc = c - box.c_c;
    return std::abs(dr * u.row + dc * u.col) <= 0.5 * box.w + kEps &&
           std::abs(dr * v.row + dc * v.col) <= 0.5 * box.h + kEps;
  });
}

SegMask rasterize_ellipse(int width, int height, Point center, double a,
                          double b, double phi) {
  const Point u = width_axis(phi);
  const Point v = height_axis(phi);
  return rasterize(width, height, [&](double r, double c) {
    const double dr = r - center.row;
    const double dc = c - center.col;
    const double x = (dr * u.row + dc * u.col) / a;
    const double y = (dr * v.row + dc * v.col) / b;
    return x * x + y * y <= 1.0;
  });
}

SegMask union_of(std::span<const SegMask> masks) {
  std::vector<Run> runs;
  for (const SegMask& m : masks) runs.insert(runs.end(), m.runs().begin(), m.runs().end());
  return SegMask(masks.front().width(), masks.front().height(), std::move(runs));
}

SegMask random_blob(std::mt19937_64& rng) {
  auto uniform = [&](double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(rng);
  };
  const int width = static_cast<int>(uniform(64, 129));
  const int height = static_cast<int>(uniform(64, 129));
  const int shapes = static_cast<int>(uniform(1, 4));
  std::vector<SegMask> parts;
  for (int s = 0; s < shapes; ++s) {
    const double w = uniform(6.0, 0.5 * width);
    const double h = uniform(6.0, 0.5 * height);
    const double r = uniform(0.5 * h + 1.0, height - 0.5 * h - 1.0);
    const double c = uniform(0.5 * w + 1.0, width - 0.5 * w - 1.0);
    if (uniform(0.0, 1.0) < 0.5) {
      // Rectangles are axis-aligned half the time.
      const double phi = uniform(0.0, 1.0) < 0.5 ? 0.0 : uniform(0.0, 90.0);
      parts.push_back(rasterize_box(width, height, {r, c, w, h, phi}));
    } else {
      parts.push_back(rasterize_ellipse(width, height, {r, c}, 0.5 * w, 0.5 * h,
                                        uniform(0.0, 180.0)));
    }
  }
  SegMask mask = union_of(parts);
  if (mask.is_empty()) {
    // Degenerate draw; fall back to a centered square.
    return rasterize_box(width, height, {height / 2.0, width / 2.0, 8.0, 8.0, 0.0});
  }
  return mask;
}

std::vector<SegMask> blob_suite(int count, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<SegMask> masks;
  masks.reserve(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) masks.push_back(random_blob(rng));
  return masks;
}

MaskSequence growing_rectangle(int frames, double initial_w, double initial_h,
                               double growth, int frame_size) {
  MaskSequence seq;
  seq.name = "growing-rectangle";
  const double center = frame_size / 2.0;
  for (int i = 0; i < frames; ++i) {
    const double scale = std::pow(1.0 + growth, i);
    const double w = std::round(initial_w * scale);
    const double h = std::round(initial_h * scale);
    seq.frames.push_back(rasterize_box(
        frame_size, frame_size,
        {std::round(center - h / 2.0) + h / 2.0, std::round(center - w / 2.0) + w / 2.0,
         w, h, 0.0}));
  }
  return seq;
}

MaskSequence rotating_rectangle(std::span<const double> angles, double w,
                                double h, int frame_size) {
  MaskSequence seq;
  seq.name = "rotating-rectangle";
  const double center = frame_size / 2.0;
  for (double angle : angles) {
    seq.frames.push_back(
        rasterize_box(frame_size, frame_size, {center, center, w, h, angle}));
  }
  return seq;
}

}  // namespace riou::synthetic
