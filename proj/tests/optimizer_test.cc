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


#include "riou/optimizer.h"

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "oracles.h"
#include "riou/errors.h"
#include "riou/oracle.h"
#include "riou/synthetic.h"

namespace riou {
namespace {

SegMask Rect(int width, int height, int r0, int c0, int rows, int cols) {
  std::vector<riou::Run> runs;
  for (int r = r0; r < r0 + rows; ++r) runs.push_back({r, c0, c0 + cols});
  return SegMask(width, height, runs);
}

// Lopsided blob: rotated ellipse plus an offset bar.
SegMask Blob() {
  const SegMask parts[] = {
      synthetic::rasterize_ellipse(80, 70, {34, 38}, 26, 9, 35),
      synthetic::rasterize_box(80, 70, {46, 52, 8, 8, 0}),
  };
  return synthetic::union_of(parts);
}

SegMask Upsample(const SegMask& m, int k) {
  std::vector<riou::Run> runs;
  for (const riou::Run& r : m.runs()) {
    for (int i = 0; i < k; ++i) {
      runs.push_back({r.row * k + i, r.col_start * k, r.col_end * k});
    }
  }
  return SegMask(m.width() * k, m.height() * k, runs);
}

bool Contains(const std::vector<OrientedBox>& seeds, const OrientedBox& b) {
  return std::any_of(seeds.begin(), seeds.end(), [&](const OrientedBox& s) {
    return std::abs(s.r_c - b.r_c) < 1e-9 && std::abs(s.c_c - b.c_c) < 1e-9 &&
           std::abs(s.w - b.w) < 1e-9 && std::abs(s.h - b.h) < 1e-9 &&
           std::abs(s.phi - b.phi) < 1e-9;
  });
}

TEST(FamilyTest, TagsAndNames) {
  EXPECT_EQ(family_tag(FamilyKind::kAxisAligned), "aa");
  EXPECT_EQ(family_tag(FamilyKind::kOriented), "rot");
  EXPECT_EQ(family_tag(FamilyKind::kFixedScaleAxisAligned), "noscale");
  EXPECT_EQ(parse_family_tag("rot"), FamilyKind::kOriented);
  EXPECT_THROW(parse_family_tag("diag"), ConfigError);
  EXPECT_EQ(tracker_name(FamilyKind::kAxisAligned), "box-axis-aligned");
  EXPECT_EQ(tracker_name(FamilyKind::kOriented), "box-rot");
  EXPECT_EQ(tracker_name(FamilyKind::kFixedScaleAxisAligned), "box-no-scale");
  EXPECT_EQ(BoxFamily::axis_aligned().free_parameters(), 4);
  EXPECT_EQ(BoxFamily::oriented().free_parameters(), 5);
  EXPECT_EQ(BoxFamily::fixed_scale(3, 4).free_parameters(), 2);
}

TEST(ProjectTest, ForcesFamilyConstraints) {
  const OrientedBox b{4, 5, 6, 2, 30};
  EXPECT_EQ(project_to_family(b, BoxFamily::axis_aligned()).phi, 0.0);
  const OrientedBox fixed = project_to_family(b, BoxFamily::fixed_scale(3, 7));
  EXPECT_EQ(fixed, (OrientedBox{4, 5, 3, 7, 0}));
  EXPECT_EQ(project_to_family(b, BoxFamily::oriented()), b);
}

TEST(SeedTest, RectangleAxisAligned) {
  const SegMask m = Rect(30, 30, 4, 6, 10, 16);
  const auto seeds = seed_boxes(m, BoxFamily::axis_aligned());
  const OrientedBox rect{9, 14, 16, 10, 0};
  // Bounding box, oriented bounding box and inner box all collapse onto the
  // rectangle; the inner-circle square and moments box differ from it.
  EXPECT_TRUE(Contains(seeds, rect));
  EXPECT_EQ(std::count_if(seeds.begin(), seeds.end(),
                          [&](const OrientedBox& s) {
                            return iou_box_mask(s, m) > 1 - 1e-12;
                          }),
            1);
  EXPECT_LE(seeds.size(), 3u);
  for (const OrientedBox& s : seeds) EXPECT_EQ(s.phi, 0.0);
}

TEST(SeedTest, BlobOrientedHasFiveDistinct) {
  const auto seeds = seed_boxes(Blob(), BoxFamily::oriented());
  EXPECT_EQ(seeds.size(), 5u);
}

TEST(SeedTest, FixedScaleKeepsCenters) {
  const SegMask m = Blob();
  const auto free = seed_boxes(m, BoxFamily::oriented());
  const auto fixed = seed_boxes(m, BoxFamily::fixed_scale(7.5, 3.25));
  ASSERT_FALSE(fixed.empty());
  for (const OrientedBox& s : fixed) {
    EXPECT_EQ(s.w, 7.5);
    EXPECT_EQ(s.h, 3.25);
    EXPECT_EQ(s.phi, 0.0);
    EXPECT_TRUE(std::any_of(free.begin(), free.end(), [&](const OrientedBox& f) {
      return f.r_c == s.r_c && f.c_c == s.c_c;
    }));
  }
}

TEST(SeedTest, EmptyMaskThrows) {
  EXPECT_THROW(seed_boxes(SegMask(5, 5, {}), BoxFamily::axis_aligned()),
               EmptyMaskError);
  EXPECT_THROW(optimize(SegMask(5, 5, {}), BoxFamily::axis_aligned(), {}),
               EmptyMaskError);
}

TEST(GradientTest, ZeroFarFromMask) {
  const SegMask m = Rect(40, 40, 0, 0, 2, 2);
  const OptimizerConfig config;
  for (BoxFamily fam : {BoxFamily::axis_aligned(), BoxFamily::oriented(),
                        BoxFamily::fixed_scale(3, 3)}) {
    const auto g = numeric_gradient(m, {30, 30, 3, 3, 0}, fam, config);
    ASSERT_EQ(static_cast<int>(g.size()), fam.free_parameters());
    for (double v : g) EXPECT_EQ(v, 0.0);
  }
}

TEST(GradientTest, SignTowardPixel) {
  const SegMask m(3, 3, {{0, 0, 1}});
  const auto g = numeric_gradient(m, {0.5, 0.3, 1, 1, 0},
                                  BoxFamily::axis_aligned(), OptimizerConfig{});
  // Φ(c = 0.4) = 0.9 / 1.1 and Φ(c = 0.2) = 0.7 / 1.3.
  EXPECT_GT(g[1], 0.0);
  EXPECT_NEAR(g[1], (0.9 / 1.1 - 0.7 / 1.3) / 0.2, 1e-12);
}

TEST(GradientTest, AgreesWithFinerStep) {
  const SegMask m = synthetic::rasterize_ellipse(120, 120, {60, 60}, 40, 25, 20);
  std::mt19937_64 rng(41);
  std::uniform_real_distribution<double> pos(52, 68), side(40, 70), ang(5, 85);
  OptimizerConfig coarse;
  OptimizerConfig fine;
  fine.grad_step_pos = fine.grad_step_size = fine.grad_step_angle = 0.01;
  for (int i = 0; i < 20; ++i) {
    const OrientedBox b{pos(rng), pos(rng), side(rng), side(rng), ang(rng)};
    const auto g = numeric_gradient(m, b, BoxFamily::oriented(), coarse);
    const auto g10 = numeric_gradient(m, b, BoxFamily::oriented(), fine);
    double diff = 0, norm = 0;
    for (std::size_t k = 0; k < g.size(); ++k) {
      diff += (g[k] - g10[k]) * (g[k] - g10[k]);
      norm += g10[k] * g10[k];
    }
    EXPECT_LE(std::sqrt(diff), 0.05 * std::sqrt(norm)) << format_box(b);
  }
}

TEST(AscendTest, TraceIsNondecreasing) {
  std::mt19937_64 rng(42);
  const OptimizerConfig config;
  for (int i = 0; i < 100; ++i) {
    const SegMask m = testing::random_rect_union(rng, 24, 24, 2);
    const BoxFamily fam = i % 2 ? BoxFamily::oriented() : BoxFamily::axis_aligned();
    const OrientedBox seed =
        project_to_family(canonicalize(testing::random_box(rng, 4, 20, 12)), fam);
    std::vector<double> trace;
    const OptResult r = ascend_from(m, seed, fam, config, &trace);
    ASSERT_FALSE(trace.empty());
    EXPECT_EQ(trace.front(), iou_box_mask(seed, m));
    for (std::size_t k = 1; k < trace.size(); ++k) EXPECT_GE(trace[k], trace[k - 1]);
    EXPECT_EQ(r.phi_opt, trace.back());
    EXPECT_TRUE(is_canonical(r.box));
    EXPECT_GE(r.box.w, 0.5);
    EXPECT_GE(r.box.h, 0.5);
  }
}

TEST(AscendTest, StationaryStart) {
  const SegMask m = Rect(30, 30, 5, 5, 8, 12);
  const OrientedBox rect{9, 11, 12, 8, 0};
  const OptResult r = ascend_from(m, rect, BoxFamily::axis_aligned(), {});
  EXPECT_LE(r.iterations_total, 2);
  EXPECT_EQ(r.phi_opt, 1.0);
  EXPECT_EQ(r.box, rect);
}

TEST(AscendTest, RectangleFromAnySeed) {
  const SegMask m = Rect(40, 40, 10, 8, 12, 18);
  std::mt19937_64 rng(43);
  std::uniform_real_distribution<double> pos(12, 24), side(6, 24);
  for (int i = 0; i < 20; ++i) {
    const OrientedBox seed{pos(rng), pos(rng), side(rng), side(rng), 0};
    const OptResult r = ascend_from(m, seed, BoxFamily::axis_aligned(), {});
    EXPECT_NEAR(r.phi_opt, 1.0, 1e-3) << format_box(seed);
  }
}

TEST(OptimizeTest, RectangleAllFamilies) {
  const SegMask m = Rect(50, 40, 7, 11, 9, 23);
  const OrientedBox rect{11.5, 22.5, 23, 9, 0};
  for (BoxFamily fam : {BoxFamily::axis_aligned(), BoxFamily::oriented(),
                        BoxFamily::fixed_scale(23, 9)}) {
    const OptResult r = optimize(m, fam, {});
    EXPECT_NEAR(r.phi_opt, 1.0, 1e-6);
    EXPECT_NEAR(r.box.r_c, rect.r_c, 1e-3);
    EXPECT_NEAR(r.box.c_c, rect.c_c, 1e-3);
    EXPECT_NEAR(r.box.w, rect.w, 1e-3);
    EXPECT_NEAR(r.box.h, rect.h, 1e-3);
    EXPECT_NEAR(r.box.phi, 0.0, 1e-3);
  }
}

TEST(OptimizeTest, Deterministic) {
  const SegMask m = Blob();
  for (BoxFamily fam : {BoxFamily::axis_aligned(), BoxFamily::oriented()}) {
    const OptResult a = optimize(m, fam, {});
    const OptResult b = optimize(m, fam, {});
    EXPECT_EQ(a.box, b.box);
    EXPECT_EQ(a.phi_opt, b.phi_opt);
    EXPECT_EQ(a.starts_used, b.starts_used);
    EXPECT_EQ(a.iterations_total, b.iterations_total);
    EXPECT_EQ(a.distinct_optima, b.distinct_optima);
  }
}

TEST(OptimizeTest, DominanceAndCanonicalOutput) {
  const auto suite = synthetic::blob_suite(8, 5);
  const OptimizerConfig config;
  for (const SegMask& m : suite) {
    const OptResult aa = optimize(m, BoxFamily::axis_aligned(), config);
    const OptResult rot = optimize(m, BoxFamily::oriented(), config);
    const OptResult fixed =
        optimize(m, BoxFamily::fixed_scale(aa.box.w, aa.box.h), config);
    EXPECT_GE(rot.phi_opt, aa.phi_opt - 1e-6);
    EXPECT_GE(aa.phi_opt, fixed.phi_opt - 1e-6);
    EXPECT_EQ(fixed.box.w, aa.box.w);
    EXPECT_EQ(fixed.box.h, aa.box.h);
    for (const OptResult* r : {&aa, &rot, &fixed}) {
      EXPECT_TRUE(is_canonical(r->box));
      EXPECT_NEAR(r->phi_opt, iou_box_mask(r->box, m), 1e-15);
    }
    EXPECT_EQ(aa.box.phi, 0.0);
  }
}

TEST(OptimizeTest, SeedDominance) {
  const SegMask m = Blob();
  for (BoxFamily fam : {BoxFamily::axis_aligned(), BoxFamily::oriented()}) {
    const OptResult r = optimize(m, fam, {});
    for (const OrientedBox& s : seed_boxes(m, fam)) {
      EXPECT_GE(r.phi_opt, iou_box_mask(s, m));
    }
  }
}

TEST(OptimizeTest, ExtraSeedIsUsed) {
  const SegMask m = Rect(30, 30, 5, 5, 8, 12);
  OptimizerConfig config;
  config.max_iters = 1;
  const OrientedBox exact{9, 11, 12, 8, 0};
  const OptResult r = optimize(m, BoxFamily::axis_aligned(), config, {&exact, 1});
  EXPECT_EQ(r.phi_opt, 1.0);
}

TEST(OptimizeTest, BeatsIntegerBoxesOnSmallMasks) {
  std::mt19937_64 rng(44);
  for (int i = 0; i < 15; ++i) {
    const SegMask m = testing::random_rect_union(rng, 12, 12, 3);
    const double oracle = testing::brute_axis_aligned_phi(m);
    EXPECT_GE(optimize(m, BoxFamily::axis_aligned(), {}).phi_opt, oracle - 1e-3);
  }
}

TEST(OptimizeTest, OracleBoundUpTo64) {
  std::mt19937_64 rng(45);
  for (int i = 0; i < 10; ++i) {
    const SegMask m = testing::random_rect_union(rng, 64, 48, 3);
    EXPECT_GE(optimize(m, BoxFamily::axis_aligned(), {}).phi_opt,
              exhaustive_axis_aligned(m).phi_value - 1e-3);
  }
}

TEST(OptimizeTest, UpsamplingBarelyChangesPhi) {
  const auto suite = synthetic::blob_suite(4, 9);
  for (const SegMask& m : suite) {
    const double base = optimize(m, BoxFamily::axis_aligned(), {}).phi_opt;
    const double big = optimize(Upsample(m, 2), BoxFamily::axis_aligned(), {}).phi_opt;
    EXPECT_LT(std::abs(base - big), 0.02);
  }
}

TEST(ConfigTest, ParsesKeysAndComments) {
  const OptimizerConfig c = parse_optimizer_config(
      "# tuned\n"
      "grad_step_pos = 0.2\n"
      "  max_iters=50   # fewer\n"
      "\n"
      "rng_seed = 9\n"
      "warm_start = true\n"
      "backtrack_rho = 0.25\n");
  EXPECT_EQ(c.grad_step_pos, 0.2);
  EXPECT_EQ(c.max_iters, 50);
  EXPECT_EQ(c.rng_seed, 9u);
  EXPECT_TRUE(c.warm_start);
  EXPECT_EQ(c.backtrack_rho, 0.25);
  EXPECT_EQ(c.grad_step_size, OptimizerConfig{}.grad_step_size);
}

TEST(ConfigTest, Errors) {
  try {
    parse_optimizer_config("max_iters = 5\nbogus = 1\n");
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 2u);
  }
  EXPECT_THROW(parse_optimizer_config("max_iters = 5x"), ParseError);
  EXPECT_THROW(parse_optimizer_config("no equals sign"), ParseError);
  EXPECT_THROW(parse_optimizer_config("backtrack_rho = 1"), ConfigError);
  EXPECT_THROW(parse_optimizer_config("grad_step_pos = 0"), ConfigError);
  EXPECT_THROW(parse_optimizer_config("restart_samples = -1"), ConfigError);
  EXPECT_NO_THROW(parse_optimizer_config("restart_samples = 0"));
}

}  // namespace
}  // namespace riou
