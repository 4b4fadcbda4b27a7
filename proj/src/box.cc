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


#include "riou/box.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>
#include <tuple>

#include "riou/errors.h"
#include "riou/mask.h"

namespace riou {

namespace {

constexpr double kDegToRad = std::numbers::pi / 180.0;

// Keeps the part of `poly` where side(p) >= 0; `side` must be affine.
template <typename Side>
void clip_halfplane(const std::vector<Point>& poly, Side side,
                    std::vector<Point>& out) {
  out.clear();
  const std::size_t n = poly.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Point& cur = poly[i];
    const Point& next = poly[(i + 1) % n];
    const double sc = side(cur);
    const double sn = side(next);
    if (sc >= 0.0) out.push_back(cur);
    if ((sc >= 0.0) != (sn >= 0.0)) {
      const double t = sc / (sc - sn);
      out.push_back({cur.row + t * (next.row - cur.row),
                     cur.col + t * (next.col - cur.col)});
    }
  }
}

// Cross-section of a convex polygon along the row direction, as a function of
// the column. Piecewise linear between the distinct vertex columns.
class ColumnProfile {
 public:
  void build(const std::vector<Point>& poly) {
    xs_.clear();
    for (const Point& p : poly) xs_.push_back(p.col);
    std::sort(xs_.begin(), xs_.end());
    xs_.erase(std::unique(xs_.begin(), xs_.end()), xs_.end());
    left_len_.assign(xs_.size(), 0.0);
    right_len_.assign(xs_.size(), 0.0);
    for (std::size_t j = 0; j + 1 < xs_.size(); ++j) {
      const double span = xs_[j + 1] - xs_[j];
      const double l1 = section(poly, xs_[j] + 0.25 * span);
      const double l3 = section(poly, xs_[j] + 0.75 * span);
      const double half_step = 0.5 * (l3 - l1);
      left_len_[j] = l1 - 0.5 * half_step;
      right_len_[j] = l3 + 0.5 * half_step;
    }
  }

  double lo() const { return xs_.front(); }
  double hi() const { return xs_.back(); }
  bool empty() const { return xs_.size() < 2; }

  // Area of the polygon between columns a < b.
  double area(double a, double b) const {
    double total = 0.0;
    auto j = static_cast<std::size_t>(
        std::upper_bound(xs_.begin(), xs_.end(), a) - xs_.begin());
    j = j == 0 ? 0 : j - 1;
    for (; j + 1 < xs_.size() && xs_[j] < b; ++j) {
      const double u = std::max(a, xs_[j]);
      const double v = std::min(b, xs_[j + 1]);
      if (v <= u) continue;
      const double span = xs_[j + 1] - xs_[j];
      const double slope = (right_len_[j] - left_len_[j]) / span;
      const double lu = left_len_[j] + slope * (u - xs_[j]);
      const double lv = left_len_[j] + slope * (v - xs_[j]);
      total += (v - u) * 0.5 * (lu + lv);
    }
    return total;
  }

 private:
  // Length of the intersection of the vertical line col = x with the polygon;
  // x lies strictly between vertex columns.
  static double section(const std::vector<Point>& poly, double x) {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    const std::size_t n = poly.size();
    for (std::size_t i = 0; i < n; ++i) {
      const Point& p = poly[i];
      const Point& q = poly[(i + 1) % n];
      if ((p.col < x) == (q.col < x)) continue;
      const double t = (x - p.col) / (q.col - p.col);
      const double row = p.row + t * (q.row - p.row);
      lo = std::min(lo, row);
      hi = std::max(hi, row);
    }
    return hi > lo ? hi - lo : 0.0;
  }

  std::vector<double> xs_;
  std::vector<double> left_len_;
  std::vector<double> right_len_;
};

double axis_aligned_intersection(const OrientedBox& box, const SegMask& mask) {
  const double top = box.r_c - 0.5 * box.h;
  const double bottom = box.r_c + 0.5 * box.h;
  const double left = box.c_c - 0.5 * box.w;
  const double right = box.c_c + 0.5 * box.w;
  const int r_begin = std::max(0, static_cast<int>(std::floor(top)));
  const int r_end = std::min(mask.height(), static_cast<int>(std::ceil(bottom)));
  double total = 0.0;
  for (int r = r_begin; r < r_end; ++r) {
    const double row_overlap = std::min(bottom, r + 1.0) - std::max(top, double(r));
    if (row_overlap <= 0.0) continue;
    double cols = 0.0;
    for (const Run& run : mask.row_runs(r)) {
      if (run.col_end <= left) continue;
      if (run.col_start >= right) break;
      cols += std::min(right, double(run.col_end)) -
              std::max(left, double(run.col_start));
    }
    total += row_overlap * cols;
  }
  return total;
}

}  // namespace

OrientedBox canonicalize(const OrientedBox& box) {
  if (!std::isfinite(box.r_c) || !std::isfinite(box.c_c) ||
      !std::isfinite(box.w) || !std::isfinite(box.h) ||
      !std::isfinite(box.phi)) {
    throw InvalidBoxError("box parameters must be finite");
  }
  if (box.w <= 0.0 || box.h <= 0.0) {
    throw InvalidBoxError("box width and height must be positive");
  }
  OrientedBox out = box;
  double phi = std::fmod(box.phi, 180.0);
  if (phi < 0.0) phi += 180.0;
  if (phi >= 180.0) phi -= 180.0;
  if (phi >= 90.0) {
    phi -= 90.0;
    std::swap(out.w, out.h);
  }
  out.phi = phi;
  return out;
}

bool is_canonical(const OrientedBox& box) {
  return box.w > 0.0 && box.h > 0.0 && box.phi >= 0.0 && box.phi < 90.0;
}

Point width_axis(double phi_deg) {
  const double a = phi_deg * kDegToRad;
  return {-std::sin(a), std::cos(a)};
}

Point height_axis(double phi_deg) {
  const double a = phi_deg * kDegToRad;
  return {std::cos(a), std::sin(a)};
}

std::array<Point, 4> corners(const OrientedBox& box) {
  if (box.phi == 0.0) {
    const double hh = 0.5 * box.h;
    const double hw = 0.5 * box.w;
    return {{{box.r_c - hh, box.c_c - hw},
             {box.r_c + hh, box.c_c - hw},
             {box.r_c + hh, box.c_c + hw},
             {box.r_c - hh, box.c_c + hw}}};
  }
  const Point u = width_axis(box.phi);
  const Point v = height_axis(box.phi);
  const double hw = 0.5 * box.w;
  const double hh = 0.5 * box.h;
  auto at = [&](double sw, double sh) {
    return Point{box.r_c + sw * hw * u.row + sh * hh * v.row,
                 box.c_c + sw * hw * u.col + sh * hh * v.col};
  };
  return {at(-1, -1), at(-1, 1), at(1, 1), at(1, -1)};
}

double shoelace_area(std::span<const Point> polygon) {
  double twice = 0.0;
  const std::size_t n = polygon.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Point& p = polygon[i];
    const Point& q = polygon[(i + 1) % n];
    twice += p.row * q.col - q.row * p.col;
  }
  return 0.5 * twice;
}

std::vector<Point> clip_convex(std::span<const Point> subject,
                               std::span<const Point> clip) {
  std::vector<Point> poly(subject.begin(), subject.end());
  std::vector<Point> next;
  const std::size_t n = clip.size();
  for (std::size_t i = 0; i < n && !poly.empty(); ++i) {
    const Point a = clip[i];
    const Point b = clip[(i + 1) % n];
    clip_halfplane(
        poly,
        [&](const Point& p) {
          return (b.row - a.row) * (p.col - a.col) -
                 (b.col - a.col) * (p.row - a.row);
        },
        next);
    poly.swap(next);
  }
  return poly;
}

double mask_intersection_area(const OrientedBox& box, const SegMask& mask) {
  if (mask.is_empty()) return 0.0;
  if (box.phi == 0.0) return axis_aligned_intersection(box, mask);

  const auto quad = corners(box);
  double r_min = quad[0].row, r_max = quad[0].row;
  for (const Point& p : quad) {
    r_min = std::min(r_min, p.row);
    r_max = std::max(r_max, p.row);
  }
  const int r_begin = std::max(0, static_cast<int>(std::floor(r_min)));
  const int r_end = std::min(mask.height(), static_cast<int>(std::ceil(r_max)));

  const std::vector<Point> box_poly(quad.begin(), quad.end());
  std::vector<Point> upper, slab;
  ColumnProfile profile;
  double total = 0.0;
  for (int r = r_begin; r < r_end; ++r) {
    auto runs = mask.row_runs(r);
    if (runs.empty()) continue;
    const double r0 = r;
    clip_halfplane(box_poly, [r0](const Point& p) { return p.row - r0; }, upper);
    clip_halfplane(upper, [r0](const Point& p) { return r0 + 1.0 - p.row; },
                   slab);
    if (slab.size() < 3) continue;
    profile.build(slab);
    if (profile.empty()) continue;
    for (const Run& run : runs) {
      const double a = std::max(profile.lo(), double(run.col_start));
      const double b = std::min(profile.hi(), double(run.col_end));
      if (b > a) total += profile.area(a, b);
    }
  }
  return total;
}

double iou_box_mask(const OrientedBox& box, const SegMask& mask) {
  if (mask.is_empty()) return 0.0;
  const double inter = mask_intersection_area(box, mask);
  const double uni = static_cast<double>(mask.area()) + box.area() - inter;
  return uni > 0.0 ? inter / uni : 0.0;
}

double iou_box_box(const OrientedBox& a, const OrientedBox& b) {
  const auto pa = corners(a);
  const auto pb = corners(b);
  // Clip the lexicographically smaller box against the other so the result is
  // symmetric bit for bit.
  const bool swap_order = std::tie(b.r_c, b.c_c, b.w, b.h, b.phi) <
                          std::tie(a.r_c, a.c_c, a.w, a.h, a.phi);
  const auto& subject = swap_order ? pb : pa;
  const auto& clip = swap_order ? pa : pb;
  const std::vector<Point> inter_poly = clip_convex(subject, clip);
  const double inter =
      inter_poly.size() < 3 ? 0.0 : std::abs(shoelace_area(inter_poly));
  const double uni = a.area() + b.area() - inter;
  return uni > 0.0 ? std::clamp(inter / uni, 0.0, 1.0) : 0.0;
}

std::string format_box(const OrientedBox& box) {
  std::string out;
  char buf[32];
  for (double v : {box.r_c, box.c_c, box.w, box.h, box.phi}) {
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    if (!out.empty()) out.push_back(' ');
    out.append(buf, res.ptr);
  }
  return out;
}

OrientedBox parse_box(const std::string& text, std::size_t line) {
  std::istringstream in(text);
  std::string token;
  double values[5];
  int count = 0;
  while (in >> token) {
    if (count == 5) throw ParseError("expected 5 box values", line);
    const char* first = token.data();
    const char* last = token.data() + token.size();
    if (*first == '+') ++first;
    auto res = std::from_chars(first, last, values[count]);
    if (res.ec != std::errc() || res.ptr != last) {
      throw ParseError("invalid number '" + token + "'", line);
    }
    ++count;
  }
  if (count != 5) throw ParseError("expected 5 box values", line);
  try {
    return canonicalize({values[0], values[1], values[2], values[3], values[4]});
  } catch (const InvalidBoxError& e) {
    throw ParseError(e.what(), line);
  }
}

}  // namespace riou
