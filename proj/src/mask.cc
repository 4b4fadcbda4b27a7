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


#include "riou/mask.h"

#include <png.h>

#include <algorithm>
#include <cmath>
#include <csetjmp>
#include <cstdio>
#include <fstream>
#include <iterator>
#include <limits>
#include <memory>
#include <numbers>
#include <string>

#include "riou/errors.h"

namespace riou {

SegMask::SegMask(int width, int height, std::vector<Run> runs)
    : width_(width), height_(height) {
  if (width <= 0 || height <= 0) {
    throw FormatError("mask dimensions must be positive, got " +
                      std::to_string(width) + "x" + std::to_string(height));
  }
  for (const Run& run : runs) {
    if (run.row < 0 || run.row >= height || run.col_start < 0 ||
        run.col_end > width || run.col_start > run.col_end) {
      throw FormatError("run outside the frame: row " +
                        std::to_string(run.row) + " [" +
                        std::to_string(run.col_start) + ", " +
                        std::to_string(run.col_end) + ")");
    }
  }
  std::sort(runs.begin(), runs.end(), [](const Run& a, const Run& b) {
    return a.row != b.row ? a.row < b.row : a.col_start < b.col_start;
  });
  runs_.reserve(runs.size());
  for (const Run& run : runs) {
    if (run.col_start == run.col_end) continue;
    if (!runs_.empty() && runs_.back().row == run.row &&
        runs_.back().col_end >= run.col_start) {
      runs_.back().col_end = std::max(runs_.back().col_end, run.col_end);
    } else {
      runs_.push_back(run);
    }
  }
  row_offsets_.assign(static_cast<std::size_t>(height) + 1, 0);
  for (const Run& run : runs_) {
    ++row_offsets_[static_cast<std::size_t>(run.row) + 1];
    area_ += run.length();
  }
  for (std::size_t r = 0; r < static_cast<std::size_t>(height); ++r) {
    row_offsets_[r + 1] += row_offsets_[r];
  }
}

SegMask SegMask::from_pixels(int width, int height,
                             std::span<const std::uint8_t> values,
                             int threshold) {
  if (width <= 0 || height <= 0) {
    throw FormatError("image has a zero dimension");
  }
  if (values.size() !=
      static_cast<std::size_t>(width) * static_cast<std::size_t>(height)) {
    throw FormatError("pixel buffer size does not match dimensions");
  }
  std::vector<Run> runs;
  for (int r = 0; r < height; ++r) {
    const std::uint8_t* row = values.data() + static_cast<std::size_t>(r) * width;
    int c = 0;
    while (c < width) {
      while (c < width && row[c] < threshold) ++c;
      if (c == width) break;
      int start = c;
      while (c < width && row[c] >= threshold) ++c;
      runs.push_back({r, start, c});
    }
  }
  return SegMask(width, height, std::move(runs));
}

std::span<const Run> SegMask::row_runs(int row) const {
  if (row < 0 || row >= height_) return {};
  auto begin = runs_.begin() + static_cast<std::ptrdiff_t>(row_offsets_[row]);
  auto end = runs_.begin() + static_cast<std::ptrdiff_t>(row_offsets_[row + 1]);
  return {begin, end};
}

bool SegMask::contains(int row, int col) const {
  auto runs = row_runs(row);
  auto it = std::upper_bound(
      runs.begin(), runs.end(), col,
      [](int c, const Run& run) { return c < run.col_start; });
  if (it == runs.begin()) return false;
  --it;
  return col < it->col_end;
}

std::vector<std::uint8_t> SegMask::rasterize() const {
  std::vector<std::uint8_t> out(
      static_cast<std::size_t>(width_) * static_cast<std::size_t>(height_), 0);
  for (const Run& run : runs_) {
    std::fill_n(out.begin() + static_cast<std::ptrdiff_t>(run.row) * width_ +
                    run.col_start,
                run.length(), 1);
  }
  return out;
}

// ---------------------------------------------------------------------------
// File IO

namespace {

struct FileCloser {
  void operator()(std::FILE* f) const {
    if (f != nullptr) std::fclose(f);
  }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

struct RawImage {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> values;
};

// libpng reports errors through longjmp; nothing with a destructor is created
// between setjmp and the end of this function.
bool read_png_raw(std::FILE* file, RawImage* image, std::string* error) {
  png_structp png =
      png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  if (png == nullptr) {
    *error = "cannot allocate png reader";
    return false;
  }
  png_infop info = png_create_info_struct(png);
  if (info == nullptr) {
    png_destroy_read_struct(&png, nullptr, nullptr);
    *error = "cannot allocate png info";
    return false;
  }
  std::vector<png_bytep> rows;
  std::vector<std::uint8_t> buffer;
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    *error = "corrupt png data";
    return false;
  }
  png_init_io(png, file);
  png_read_info(png, info);
  png_uint_32 width = png_get_image_width(png, info);
  png_uint_32 height = png_get_image_height(png, info);
  int color_type = png_get_color_type(png, info);
  int bit_depth = png_get_bit_depth(png, info);
  if (bit_depth == 16) png_set_strip_16(png);
  if (color_type == PNG_COLOR_TYPE_PALETTE) {
    png_set_packing(png);
  } else if (color_type == PNG_COLOR_TYPE_GRAY && bit_depth < 8) {
    png_set_expand_gray_1_2_4_to_8(png);
  }
  if (color_type & PNG_COLOR_MASK_ALPHA) png_set_strip_alpha(png);
  png_read_update_info(png, info);
  int channels = png_get_channels(png, info);
  std::size_t rowbytes = png_get_rowbytes(png, info);
  buffer.resize(rowbytes * height);
  rows.resize(height);
  for (png_uint_32 r = 0; r < height; ++r) rows[r] = buffer.data() + r * rowbytes;
  png_read_image(png, rows.data());
  png_read_end(png, nullptr);
  png_destroy_read_struct(&png, &info, nullptr);

  image->width = static_cast<int>(width);
  image->height = static_cast<int>(height);
  image->values.resize(static_cast<std::size_t>(width) * height);
  for (png_uint_32 r = 0; r < height; ++r) {
    for (png_uint_32 c = 0; c < width; ++c) {
      // Colour images: a pixel counts by its brightest channel.
      std::uint8_t v = 0;
      for (int k = 0; k < channels; ++k) {
        v = std::max(v, buffer[r * rowbytes + c * channels + k]);
      }
      image->values[r * width + c] = v;
    }
  }
  return true;
}

RawImage read_png(const std::filesystem::path& path) {
  FilePtr file(std::fopen(path.c_str(), "rb"));
  if (!file) throw IoError("cannot open " + path.string());
  RawImage image;
  std::string error;
  if (!read_png_raw(file.get(), &image, &error)) {
    throw FormatError(path.string() + ": " + error);
  }
  return image;
}

// Reads the next header token of a PNM file, skipping comments.
std::string pnm_token(std::istream& in) {
  std::string token;
  char ch;
  while (in.get(ch)) {
    if (ch == '#') {
      std::string ignored;
      std::getline(in, ignored);
      continue;
    }
    if (std::isspace(static_cast<unsigned char>(ch))) {
      if (!token.empty()) break;
      continue;
    }
    token.push_back(ch);
  }
  return token;
}

RawImage read_pgm(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  if (pnm_token(in) != "P5") {
    throw FormatError(path.string() + ": not a binary PGM");
  }
  RawImage image;
  long maxval = 0;
  try {
    image.width = std::stoi(pnm_token(in));
    image.height = std::stoi(pnm_token(in));
    maxval = std::stol(pnm_token(in));
  } catch (const std::logic_error&) {
    throw FormatError(path.string() + ": malformed PGM header");
  }
  if (image.width <= 0 || image.height <= 0) {
    throw FormatError(path.string() + ": zero-dimension image");
  }
  if (maxval <= 0 || maxval > 65535) {
    throw FormatError(path.string() + ": invalid PGM maxval");
  }
  const std::size_t count =
      static_cast<std::size_t>(image.width) * static_cast<std::size_t>(image.height);
  const std::size_t bytes_per_sample = maxval > 255 ? 2 : 1;
  std::vector<std::uint8_t> raw(count * bytes_per_sample);
  in.read(reinterpret_cast<char*>(raw.data()),
          static_cast<std::streamsize>(raw.size()));
  if (static_cast<std::size_t>(in.gcount()) != raw.size()) {
    throw FormatError(path.string() + ": truncated PGM data");
  }
  image.values.resize(count);
  for (std::size_t i = 0; i < count; ++i) {
    long v = bytes_per_sample == 2 ? (raw[2 * i] << 8) | raw[2 * i + 1] : raw[i];
    image.values[i] = maxval == 255
                          ? static_cast<std::uint8_t>(v)
                          : static_cast<std::uint8_t>((v * 255 + maxval / 2) / maxval);
  }
  return image;
}

}  // namespace

SegMask load_mask(const std::filesystem::path& path, int threshold) {
  if (threshold < 1 || threshold > 255) {
    throw FormatError("foreground threshold must be in [1, 255]");
  }
  std::ifstream probe(path, std::ios::binary);
  if (!probe) throw IoError("cannot open " + path.string());
  unsigned char magic[8] = {};
  probe.read(reinterpret_cast<char*>(magic), sizeof(magic));
  const auto got = static_cast<std::size_t>(probe.gcount());
  probe.close();

  RawImage image;
  if (got == 8 && png_sig_cmp(magic, 0, 8) == 0) {
    image = read_png(path);
  } else if (got >= 2 && magic[0] == 'P' && magic[1] == '5') {
    image = read_pgm(path);
  } else {
    throw FormatError(path.string() + ": unsupported image format");
  }
  if (image.width <= 0 || image.height <= 0) {
    throw FormatError(path.string() + ": zero-dimension image");
  }
  return SegMask::from_pixels(image.width, image.height, image.values,
                              threshold);
}

void save_pgm(const SegMask& mask, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << "P5\n" << mask.width() << ' ' << mask.height() << "\n255\n";
  std::vector<std::uint8_t> raster = mask.rasterize();
  for (auto& v : raster) v = v ? 255 : 0;
  out.write(reinterpret_cast<const char*>(raster.data()),
            static_cast<std::streamsize>(raster.size()));
  if (!out) throw IoError("cannot write " + path.string());
}

namespace {

bool write_png_raw(std::FILE* file, int width, int height,
                   std::vector<std::uint8_t>& raster) {
  png_structp png =
      png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  if (png == nullptr) return false;
  png_infop info = png_create_info_struct(png);
  if (info == nullptr) {
    png_destroy_write_struct(&png, nullptr);
    return false;
  }
  std::vector<png_bytep> rows(static_cast<std::size_t>(height));
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    return false;
  }
  png_init_io(png, file);
  png_set_IHDR(png, info, static_cast<png_uint_32>(width),
               static_cast<png_uint_32>(height), 8, PNG_COLOR_TYPE_GRAY,
               PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
               PNG_FILTER_TYPE_DEFAULT);
  for (int r = 0; r < height; ++r) {
    rows[r] = raster.data() + static_cast<std::size_t>(r) * width;
  }
  png_set_rows(png, info, rows.data());
  png_write_png(png, info, PNG_TRANSFORM_IDENTITY, nullptr);
  png_destroy_write_struct(&png, &info);
  return true;
}

}  // namespace

void save_png(const SegMask& mask, const std::filesystem::path& path) {
  std::vector<std::uint8_t> raster = mask.rasterize();
  for (auto& v : raster) v = v ? 255 : 0;
  FilePtr file(std::fopen(path.c_str(), "wb"));
  if (!file || !write_png_raw(file.get(), mask.width(), mask.height(), raster)) {
    throw IoError("cannot write " + path.string());
  }
}

// ---------------------------------------------------------------------------
// Seed geometry

namespace {

void require_foreground(const SegMask& mask) {
  if (mask.is_empty()) throw EmptyMaskError();
}

OrientedBox box_from_extents(double top, double bottom, double left,
                             double right) {
  return {(top + bottom) / 2.0, (left + right) / 2.0, right - left,
          bottom - top, 0.0};
}

double cross(const Point& o, const Point& a, const Point& b) {
  return (a.row - o.row) * (b.col - o.col) - (a.col - o.col) * (b.row - o.row);
}

// Angle of the direction (d_row, d_col) in the box convention, exact for the
// coordinate axes.
double direction_angle(double d_row, double d_col) {
  if (d_row == 0.0) return d_col >= 0.0 ? 0.0 : 180.0;
  if (d_col == 0.0) return d_row < 0.0 ? 90.0 : 270.0;
  return std::atan2(-d_row, d_col) * 180.0 / std::numbers::pi;
}

// 1-D squared Euclidean distance transform of a sampled function
// (lower envelope of parabolas).
void edt_1d(std::span<const double> f, std::span<double> d,
            std::vector<int>& v, std::vector<double>& z) {
  const int n = static_cast<int>(f.size());
  constexpr double kInf = std::numeric_limits<double>::infinity();
  int k = 0;
  v[0] = 0;
  z[0] = -kInf;
  z[1] = kInf;
  auto meet = [&](int q, int p) {
    return ((f[q] + static_cast<double>(q) * q) -
            (f[p] + static_cast<double>(p) * p)) /
           (2.0 * (q - p));
  };
  for (int q = 1; q < n; ++q) {
    double s = meet(q, v[k]);
    // z[0] is -inf, so k never drops below zero.
    while (s <= z[k]) {
      --k;
      s = meet(q, v[k]);
    }
    ++k;
    v[k] = q;
    z[k] = s;
    z[k + 1] = kInf;
  }
  k = 0;
  for (int q = 0; q < n; ++q) {
    while (z[k + 1] < q) ++k;
    const double diff = q - v[k];
    d[q] = diff * diff + f[v[k]];
  }
}

}  // namespace

OrientedBox axis_aligned_bbox(const SegMask& mask) {
  require_foreground(mask);
  auto runs = mask.runs();
  int left = mask.width();
  int right = 0;
  for (const Run& run : runs) {
    left = std::min(left, run.col_start);
    right = std::max(right, run.col_end);
  }
  return box_from_extents(runs.front().row, runs.back().row + 1, left, right);
}

std::vector<Point> convex_hull(std::vector<Point> points) {
  std::sort(points.begin(), points.end(), [](const Point& a, const Point& b) {
    return a.row != b.row ? a.row < b.row : a.col < b.col;
  });
  points.erase(std::unique(points.begin(), points.end(),
                           [](const Point& a, const Point& b) {
                             return a.row == b.row && a.col == b.col;
                           }),
               points.end());
  if (points.size() < 3) return points;
  std::vector<Point> hull(2 * points.size());
  std::size_t k = 0;
  for (const Point& p : points) {
    while (k >= 2 && cross(hull[k - 2], hull[k - 1], p) <= 0) --k;
    hull[k++] = p;
  }
  for (std::size_t i = points.size() - 1, lower = k + 1; i-- > 0;) {
    const Point& p = points[i];
    while (k >= lower && cross(hull[k - 2], hull[k - 1], p) <= 0) --k;
    hull[k++] = p;
  }
  hull.resize(k - 1);
  return hull;
}

OrientedBox oriented_bbox(const SegMask& mask) {
  require_foreground(mask);
  // Only the outermost cell corners of each row can be hull vertices.
  std::vector<Point> corners_in;
  for (int r = 0; r < mask.height(); ++r) {
    auto runs = mask.row_runs(r);
    if (runs.empty()) continue;
    const double left = runs.front().col_start;
    const double right = runs.back().col_end;
    corners_in.push_back({static_cast<double>(r), left});
    corners_in.push_back({static_cast<double>(r + 1), left});
    corners_in.push_back({static_cast<double>(r), right});
    corners_in.push_back({static_cast<double>(r + 1), right});
  }
  const std::vector<Point> hull = convex_hull(std::move(corners_in));

  double best_area = std::numeric_limits<double>::infinity();
  OrientedBox best;
  for (std::size_t i = 0; i < hull.size(); ++i) {
    const Point& p = hull[i];
    const Point& q = hull[(i + 1) % hull.size()];
    const double d_row = q.row - p.row;
    const double d_col = q.col - p.col;
    const double len = std::hypot(d_row, d_col);
    const Point e{d_row / len, d_col / len};
    const Point n{-e.col, e.row};
    double e_min = std::numeric_limits<double>::infinity();
    double e_max = -e_min;
    double n_min = e_min;
    double n_max = -e_min;
    for (const Point& h : hull) {
      const double pe = h.row * e.row + h.col * e.col;
      const double pn = h.row * n.row + h.col * n.col;
      e_min = std::min(e_min, pe);
      e_max = std::max(e_max, pe);
      n_min = std::min(n_min, pn);
      n_max = std::max(n_max, pn);
    }
    const double area = (e_max - e_min) * (n_max - n_min);
    if (area < best_area * (1.0 - 1e-12)) {
      best_area = area;
      const double me = (e_min + e_max) / 2.0;
      const double mn = (n_min + n_max) / 2.0;
      best.r_c = me * e.row + mn * n.row;
      best.c_c = me * e.col + mn * n.col;
      best.w = e_max - e_min;
      best.h = n_max - n_min;
      best.phi = direction_angle(d_row, d_col);
    }
  }
  return canonicalize(best);
}

OrientedBox largest_inner_axis_aligned_box(const SegMask& mask) {
  require_foreground(mask);
  const int width = mask.width();
  std::vector<int> heights(static_cast<std::size_t>(width) + 1, 0);
  std::vector<int> stack;
  stack.reserve(static_cast<std::size_t>(width) + 1);
  std::int64_t best_area = 0;
  int best_top = 0, best_bottom = 0, best_left = 0, best_right = 0;
  for (int r = 0; r < mask.height(); ++r) {
    auto runs = mask.row_runs(r);
    auto it = runs.begin();
    for (int c = 0; c < width; ++c) {
      while (it != runs.end() && it->col_end <= c) ++it;
      const bool fg = it != runs.end() && it->col_start <= c;
      heights[c] = fg ? heights[c] + 1 : 0;
    }
    // heights[width] stays 0 and flushes the stack.
    stack.clear();
    for (int c = 0; c <= width; ++c) {
      while (!stack.empty() && heights[stack.back()] >= heights[c]) {
        const int h = heights[stack.back()];
        stack.pop_back();
        const int left = stack.empty() ? 0 : stack.back() + 1;
        const std::int64_t area = static_cast<std::int64_t>(h) * (c - left);
        if (area > best_area) {
          best_area = area;
          best_top = r - h + 1;
          best_bottom = r + 1;
          best_left = left;
          best_right = c;
        }
      }
      stack.push_back(c);
    }
  }
  return box_from_extents(best_top, best_bottom, best_left, best_right);
}

std::vector<double> distance_transform(const SegMask& mask) {
  // Padded by one background cell on every side.
  const int w = mask.width() + 2;
  const int h = mask.height() + 2;
  // Exceeds every squared distance in the frame while staying exact.
  const double far = 4.0 * static_cast<double>(w + h) * (w + h);
  std::vector<double> grid(static_cast<std::size_t>(w) * h, 0.0);
  for (const Run& run : mask.runs()) {
    for (int c = run.col_start; c < run.col_end; ++c) {
      grid[static_cast<std::size_t>(run.row + 1) * w + c + 1] = far;
    }
  }
  const int n = std::max(w, h);
  std::vector<double> f(n), d(n), z(n + 1);
  std::vector<int> v(n);
  for (int c = 0; c < w; ++c) {
    for (int r = 0; r < h; ++r) f[r] = grid[static_cast<std::size_t>(r) * w + c];
    edt_1d(std::span(f).first(h), std::span(d).first(h), v, z);
    for (int r = 0; r < h; ++r) grid[static_cast<std::size_t>(r) * w + c] = d[r];
  }
  for (int r = 0; r < h; ++r) {
    auto row = std::span(grid).subspan(static_cast<std::size_t>(r) * w, w);
    std::copy(row.begin(), row.end(), f.begin());
    edt_1d(std::span(f).first(w), row, v, z);
  }
  std::vector<double> out(static_cast<std::size_t>(mask.width()) * mask.height());
  for (int r = 0; r < mask.height(); ++r) {
    for (int c = 0; c < mask.width(); ++c) {
      out[static_cast<std::size_t>(r) * mask.width() + c] =
          std::sqrt(grid[static_cast<std::size_t>(r + 1) * w + c + 1]);
    }
  }
  return out;
}

OrientedBox largest_inner_circle_square(const SegMask& mask) {
  require_foreground(mask);
  const std::vector<double> dist = distance_transform(mask);
  const auto best = std::max_element(dist.begin(), dist.end());
  const auto index = static_cast<int>(std::distance(dist.begin(), best));
  const int row = index / mask.width();
  const int col = index % mask.width();
  const double side = *best * std::numbers::sqrt2;
  return {row + 0.5, col + 0.5, side, side, 0.0};
}

MomentsSummary moments(const SegMask& mask) {
  require_foreground(mask);
  const double n = static_cast<double>(mask.area());
  double sum_r = 0.0, sum_c = 0.0;
  for (const Run& run : mask.runs()) {
    const double len = run.length();
    sum_r += len * (run.row + 0.5);
    sum_c += len * (run.col_start + run.col_end) / 2.0;
  }
  MomentsSummary m;
  m.centroid_row = sum_r / n;
  m.centroid_col = sum_c / n;
  double srr = 0.0, scc = 0.0, src = 0.0;
  for (const Run& run : mask.runs()) {
    const double len = run.length();
    const double dr = run.row + 0.5 - m.centroid_row;
    const double dc = (run.col_start + run.col_end) / 2.0 - m.centroid_col;
    srr += len * dr * dr;
    // Spread of the cell centers around the run midpoint: (len^2 - 1) / 12.
    scc += len * dc * dc + len * (len * len - 1.0) / 12.0;
    src += len * dr * dc;
  }
  m.cov_rr = srr / n;
  m.cov_cc = scc / n;
  m.cov_rc = src / n;
  return m;
}

OrientedBox second_moments_box(const SegMask& mask) {
  const MomentsSummary m = moments(mask);
  const double half_trace = (m.cov_rr + m.cov_cc) / 2.0;
  const double half_diff = (m.cov_cc - m.cov_rr) / 2.0;
  const double disc = std::hypot(half_diff, m.cov_rc);
  const double lambda_major = half_trace + disc;
  const double lambda_minor = std::max(0.0, half_trace - disc);
  auto side = [](double lambda) { return std::max(1.0, std::sqrt(12.0 * lambda)); };

  OrientedBox box{m.centroid_row, m.centroid_col, 0.0, 0.0, 0.0};
  if (disc <= 1e-12 * std::max(half_trace, 1e-300)) {
    box.w = side(half_trace);
    box.h = box.w;
  } else if (m.cov_rc == 0.0) {
    box.w = side(m.cov_cc);
    box.h = side(m.cov_rr);
  } else {
    // Major axis angle measured from the column axis towards +row, negated for
    // the counter-clockwise box convention.
    const double theta = 0.5 * std::atan2(2.0 * m.cov_rc, m.cov_cc - m.cov_rr);
    box.w = side(lambda_major);
    box.h = side(lambda_minor);
    box.phi = -theta * 180.0 / std::numbers::pi;
  }
  return canonicalize(box);
}

}  // namespace riou
