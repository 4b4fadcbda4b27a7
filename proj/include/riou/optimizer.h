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


#ifndef RIOU_OPTIMIZER_H_
#define RIOU_OPTIMIZER_H_

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "riou/box.h"
#include "riou/mask.h"

namespace riou {

enum class FamilyKind { kAxisAligned, kOriented, kFixedScaleAxisAligned };

// Feasible set of the box search.
struct BoxFamily {
  FamilyKind kind = FamilyKind::kAxisAligned;
  // Only meaningful for kFixedScaleAxisAligned.
  double fixed_w = 0.0;
  double fixed_h = 0.0;

  static BoxFamily axis_aligned() { return {FamilyKind::kAxisAligned}; }
  static BoxFamily oriented() { return {FamilyKind::kOriented}; }
  static BoxFamily fixed_scale(double w, double h) {
    return {FamilyKind::kFixedScaleAxisAligned, w, h};
  }

  int free_parameters() const;
};

// Short tags used on the command line and in run-file headers:
// "aa", "rot", "noscale".
std::string family_tag(FamilyKind kind);
FamilyKind parse_family_tag(const std::string& tag);
// Theoretical tracker names: "box-axis-aligned", "box-rot", "box-no-scale".
std::string tracker_name(FamilyKind kind);

struct OptimizerConfig {
  double grad_step_pos = 0.1;    // px, for r_c and c_c
  double grad_step_size = 0.1;   // px, for w and h
  double grad_step_angle = 0.1;  // degrees
  // Number of tenfold reductions of the difference-quotient steps once the
  // ascent stalls at the current step.
  int grad_refinements = 2;
  double armijo_c = 1e-4;
  double backtrack_rho = 0.5;
  double initial_step = 1.0;
  int max_iters = 200;
  double convergence_tol = 1e-6;
  int restart_samples = 50;
  double optima_cluster_tol = 1e-4;
  std::uint64_t rng_seed = 0;
  // Seeds each frame of a theoretical track with the previous frame's optimum.
  bool warm_start = false;

  // Throws ConfigError when a value is out of range.
  void validate() const;
};

// Flat `key = value` text; '#' starts a comment. Unknown keys are errors.
OptimizerConfig parse_optimizer_config(const std::string& text);
OptimizerConfig load_optimizer_config(const std::filesystem::path& path);

struct OptResult {
  OrientedBox box;
  double phi_opt = 0.0;
  int starts_used = 0;
  int iterations_total = 0;  // accepted ascent steps, summed over starts
  bool converged = false;
  int distinct_optima = 0;
};

// Forces the frozen parameters of `family` onto `box` and canonicalizes.
OrientedBox project_to_family(const OrientedBox& box, const BoxFamily& family);

// The five initial boxes (axis-aligned bbox, oriented bbox, largest inner
// box, inner-circle square, second-moments box) projected into the family,
// with duplicates removed. Throws EmptyMaskError.
std::vector<OrientedBox> seed_boxes(const SegMask& mask, const BoxFamily& family);

// Central differences over the free parameters of the family, in the order
// (r_c, c_c, w, h, phi) restricted to the free ones.
std::vector<double> numeric_gradient(const SegMask& mask, const OrientedBox& box,
                                     const BoxFamily& family,
                                     const OptimizerConfig& config);

// Single-start ascent with Armijo backtracking. When `trace` is given, the
// objective after every accepted iteration is appended (starting with the
// seed's value).
OptResult ascend_from(const SegMask& mask, const OrientedBox& seed,
                      const BoxFamily& family, const OptimizerConfig& config,
                      std::vector<double>* trace = nullptr);

// Best box of the family for the mask. `extra_seeds` are ascended from in
// addition to seed_boxes(). Oriented searches also start from the
// axis-aligned optimum. Throws EmptyMaskError.
OptResult optimize(const SegMask& mask, const BoxFamily& family,
                   const OptimizerConfig& config,
                   std::span<const OrientedBox> extra_seeds = {});

}  // namespace riou

#endif  // RIOU_OPTIMIZER_H_
