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
#include <array>
#include <cmath>
#include <fstream>
#include <numbers>
#include <random>
#include <sstream>

#include "riou/errors.h"

namespace riou {

int BoxFamily::free_parameters() const {
  switch (kind) {
    case FamilyKind::kAxisAligned:
      return 4;
    case FamilyKind::kOriented:
      return 5;
    case FamilyKind::kFixedScaleAxisAligned:
      return 2;
  }
  return 0;
}

std::string family_tag(FamilyKind kind) {
  switch (kind) {
    case FamilyKind::kAxisAligned:
      return "aa";
    case FamilyKind::kOriented:
      return "rot";
    case FamilyKind::kFixedScaleAxisAligned:
      return "noscale";
  }
  return "";
}

FamilyKind parse_family_tag(const std::string& tag) {
  if (tag == "aa") return FamilyKind::kAxisAligned;
  if (tag == "rot") return FamilyKind::kOriented;
  if (tag == "noscale") return FamilyKind::kFixedScaleAxisAligned;
  throw ConfigError("unknown box family '" + tag +
                    "' (expected aa, rot or noscale)");
}

std::string tracker_name(FamilyKind kind) {
  switch (kind) {
    case FamilyKind::kAxisAligned:
      return "box-axis-aligned";
    case FamilyKind::kOriented:
      return "box-rot";
    case FamilyKind::kFixedScaleAxisAligned:
      return "box-no-scale";
  }
  return "";
}

void OptimizerConfig::validate() const {
  auto positive = [](double v, const char* name) {
    if (!(v > 0.0)) throw ConfigError(std::string(name) + " must be > 0");
  };
  positive(grad_step_pos, "grad_step_pos");
  positive(grad_step_size, "grad_step_size");
  positive(grad_step_angle, "grad_step_angle");
  positive(armijo_c, "armijo_c");
  positive(initial_step, "initial_step");
  positive(convergence_tol, "convergence_tol");
  positive(optima_cluster_tol, "optima_cluster_tol");
  if (!(backtrack_rho > 0.0 && backtrack_rho < 1.0)) {
    throw ConfigError("backtrack_rho must be in (0, 1)");
  }
  if (max_iters <= 0) throw ConfigError("max_iters must be > 0");
  if (restart_samples < 0) throw ConfigError("restart_samples must be >= 0");
  if (grad_refinements < 0) throw ConfigError("grad_refinements must be >= 0");
}

OptimizerConfig parse_optimizer_config(const std::string& text) {
  OptimizerConfig config;
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  auto trim = [](std::string s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return std::string();
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
  };
  while (std::getline(in, line)) {
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ParseError("expected key = value", line_no);
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    try {
      std::size_t used = 0;
      auto as_double = [&] {
        double v = std::stod(value, &used);
        if (used != value.size()) throw std::invalid_argument(value);
        return v;
      };
      auto as_int = [&] {
        long long v = std::stoll(value, &used);
        if (used != value.size()) throw std::invalid_argument(value);
        return v;
      };
      if (key == "grad_step_pos") config.grad_step_pos = as_double();
      else if (key == "grad_step_size") config.grad_step_size = as_double();
      else if (key == "grad_step_angle") config.grad_step_angle = as_double();
      else if (key == "grad_refinements") config.grad_refinements = static_cast<int>(as_int());
      else if (key == "armijo_c") config.armijo_c = as_double();
      else if (key == "backtrack_rho") config.backtrack_rho = as_double();
      else if (key == "initial_step") config.initial_step = as_double();
      else if (key == "max_iters") config.max_iters = static_cast<int>(as_int());
      else if (key == "convergence_tol") config.convergence_tol = as_double();
      else if (key == "restart_samples") config.restart_samples = static_cast<int>(as_int());
      else if (key == "optima_cluster_tol") config.optima_cluster_tol = as_double();
      else if (key == "rng_seed") config.rng_seed = static_cast<std::uint64_t>(as_int());
      else if (key == "warm_start") {
        if (value == "true" || value == "1") config.warm_start = true;
        else if (value == "false" || value == "0") config.warm_start = false;
        else throw std::invalid_argument(value);
      } else {
        throw ParseError("unknown key '" + key + "'", line_no);
      }
    } catch (const std::logic_error&) {
      throw ParseError("invalid value for '" + key + "': " + value, line_no);
    }
  }
  config.validate();
  return config;
}

OptimizerConfig load_optimizer_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_optimizer_config(buffer.str());
}

// ---------------------------------------------------------------------------

namespace {

using Params = std::array<double, 5>;  // r_c, c_c, w, h, phi
constexpr int kRow = 0, kCol = 1, kWidth = 2, kHeight = 3, kAngle = 4;
constexpr double kSizeFloor = 0.5;
constexpr double kMinStep = 1e-8;

Params to_params(const OrientedBox& b) { return {b.r_c, b.c_c, b.w, b.h, b.phi}; }
OrientedBox to_box(const Params& p) { return {p[0], p[1], p[2], p[3], p[4]}; }

std::span<const int> free_indices(FamilyKind kind) {
  static constexpr int kAll[] = {kRow, kCol, kWidth, kHeight, kAngle};
  switch (kind) {
    case FamilyKind::kAxisAligned:
      return std::span(kAll, 4);
    case FamilyKind::kOriented:
      return std::span(kAll, 5);
    case FamilyKind::kFixedScaleAxisAligned:
      return std::span(kAll, 2);
  }
  return {};
}

double grad_step(int index, const OptimizerConfig& config) {
  switch (index) {
    case kRow:
    case kCol:
      return config.grad_step_pos;
    case kWidth:
    case kHeight:
      return config.grad_step_size;
    default:
      return config.grad_step_angle;
  }
}

// Per-parameter preconditioner: squared object size for the pixel parameters
// and (180/pi)^2 for the angle, so that a unit line-search step is roughly a
// Newton step for a box of the object's size.
Params step_scaling(const SegMask& mask) {
  const double size2 = std::max(1.0, static_cast<double>(mask.area()));
  const double deg2 = (180.0 / std::numbers::pi) * (180.0 / std::numbers::pi);
  return {size2, size2, size2, size2, deg2};
}

Params project(Params p, const BoxFamily& family) {
  switch (family.kind) {
    case FamilyKind::kFixedScaleAxisAligned:
      p[kWidth] = family.fixed_w;
      p[kHeight] = family.fixed_h;
      p[kAngle] = 0.0;
      break;
    case FamilyKind::kAxisAligned:
      p[kWidth] = std::max(p[kWidth], kSizeFloor);
      p[kHeight] = std::max(p[kHeight], kSizeFloor);
      p[kAngle] = 0.0;
      break;
    case FamilyKind::kOriented:
      p[kWidth] = std::max(p[kWidth], kSizeFloor);
      p[kHeight] = std::max(p[kHeight], kSizeFloor);
      p = to_params(canonicalize(to_box(p)));
      break;
  }
  return p;
}

double objective(const SegMask& mask, const Params& p) {
  return iou_box_mask(to_box(p), mask);
}

std::vector<double> gradient(const SegMask& mask, const Params& p,
                             const BoxFamily& family,
                             const OptimizerConfig& config, double step_scale) {
  auto indices = free_indices(family.kind);
  std::vector<double> g(indices.size());
  for (std::size_t k = 0; k < indices.size(); ++k) {
    const int i = indices[k];
    const double delta = grad_step(i, config) * step_scale;
    Params plus = p, minus = p;
    plus[i] += delta;
    minus[i] -= delta;
    g[k] = (objective(mask, plus) - objective(mask, minus)) / (2.0 * delta);
  }
  return g;
}

bool same_params(const Params& a, const Params& b) {
  for (int i = 0; i < 5; ++i) {
    if (std::abs(a[i] - b[i]) >= 1e-6) return false;
  }
  return true;
}

// Search directions of the ascent. Pixel parameters are probed per box side
// (moving one side along its normal, the opposite side fixed); at phi = 0 the
// kinks of the coverage function at pixel boundaries are then aligned with the
// search coordinates. The angle is probed about the box center.
struct Probe {
  Params direction{};
  double delta = 0.0;
  double scaling = 0.0;
};

std::vector<Probe> probes(const Params& p, const BoxFamily& family,
                          const OptimizerConfig& config, const Params& scaling,
                          double step_scale) {
  std::vector<Probe> out;
  const double pos_delta = config.grad_step_pos * step_scale;
  if (family.kind == FamilyKind::kFixedScaleAxisAligned) {
    for (int i : {kRow, kCol}) {
      Probe probe;
      probe.direction[i] = 1.0;
      probe.delta = pos_delta;
      probe.scaling = scaling[i];
      out.push_back(probe);
    }
    return out;
  }
  const Point u = width_axis(p[kAngle]);
  const Point v = height_axis(p[kAngle]);
  const double side_delta = config.grad_step_size * step_scale;
  for (double sign : {-1.0, 1.0}) {
    Probe along_h;
    along_h.direction[kRow] = 0.5 * sign * v.row;
    along_h.direction[kCol] = 0.5 * sign * v.col;
    along_h.direction[kHeight] = 1.0;
    along_h.delta = side_delta;
    along_h.scaling = scaling[kHeight];
    out.push_back(along_h);
    Probe along_w;
    along_w.direction[kRow] = 0.5 * sign * u.row;
    along_w.direction[kCol] = 0.5 * sign * u.col;
    along_w.direction[kWidth] = 1.0;
    along_w.delta = side_delta;
    along_w.scaling = scaling[kWidth];
    out.push_back(along_w);
  }
  if (family.kind == FamilyKind::kOriented) {
    Probe angle;
    angle.direction[kAngle] = 1.0;
    angle.delta = config.grad_step_angle * step_scale;
    angle.scaling = scaling[kAngle];
    out.push_back(angle);
  }
  return out;
}

}  // namespace

OrientedBox project_to_family(const OrientedBox& box, const BoxFamily& family) {
  if (family.kind == FamilyKind::kFixedScaleAxisAligned &&
      !(family.fixed_w > 0.0 && family.fixed_h > 0.0)) {
    throw InvalidBoxError("fixed scale must be positive");
  }
  return canonicalize(to_box(project(to_params(box), family)));
}

std::vector<OrientedBox> seed_boxes(const SegMask& mask, const BoxFamily& family) {
  if (mask.is_empty()) throw EmptyMaskError();
  const OrientedBox raw[] = {
      axis_aligned_bbox(mask),
      oriented_bbox(mask),
      largest_inner_axis_aligned_box(mask),
      largest_inner_circle_square(mask),
      second_moments_box(mask),
  };
  std::vector<OrientedBox> seeds;
  for (const OrientedBox& box : raw) {
    const OrientedBox projected = project_to_family(box, family);
    const bool duplicate =
        std::any_of(seeds.begin(), seeds.end(), [&](const OrientedBox& s) {
          return same_params(to_params(s), to_params(projected));
        });
    if (!duplicate) seeds.push_back(projected);
  }
  return seeds;
}

std::vector<double> numeric_gradient(const SegMask& mask, const OrientedBox& box,
                                     const BoxFamily& family,
                                     const OptimizerConfig& config) {
  return gradient(mask, to_params(box), family, config, 1.0);
}

OptResult ascend_from(const SegMask& mask, const OrientedBox& seed,
                      const BoxFamily& family, const OptimizerConfig& config,
                      std::vector<double>* trace) {
  const Params scaling = step_scaling(mask);
  Params p = project(to_params(seed), family);
  double f = objective(mask, p);
  if (trace != nullptr) trace->push_back(f);

  OptResult result;
  result.starts_used = 1;
  double step_scale = 1.0;
  int refinements_left = config.grad_refinements;
  int steps = 0;
  for (int iter = 0; iter < config.max_iters; ++iter) {
    Params direction{};
    double slope = 0.0;  // g . D g
    for (const Probe& probe : probes(p, family, config, scaling, step_scale)) {
      Params plus = p, minus = p;
      for (int i = 0; i < 5; ++i) {
        plus[i] += probe.delta * probe.direction[i];
        minus[i] -= probe.delta * probe.direction[i];
      }
      const double f_plus = objective(mask, plus);
      const double f_minus = objective(mask, minus);
      // A kink maximum along this probe (both one-sided quotients point back
      // at p) contributes no ascent direction.
      const double g = f_plus <= f && f_minus <= f
                           ? 0.0
                           : (f_plus - f_minus) / (2.0 * probe.delta);
      for (int i = 0; i < 5; ++i) direction[i] += probe.scaling * g * probe.direction[i];
      slope += probe.scaling * g * g;
    }

    bool accepted = false;
    Params candidate = p;
    double f_candidate = f;
    if (slope > 0.0) {
      for (double t = config.initial_step; t >= kMinStep;
           t *= config.backtrack_rho) {
        Params trial = p;
        for (int i = 0; i < 5; ++i) trial[i] += t * direction[i];
        trial = project(trial, family);
        const double f_trial = objective(mask, trial);
        if (f_trial >= f + config.armijo_c * t * slope) {
          candidate = trial;
          f_candidate = f_trial;
          accepted = true;
          break;
        }
      }
    }

    const double improvement = accepted ? f_candidate - f : 0.0;
    if (accepted) {
      p = candidate;
      f = f_candidate;
      ++steps;
      if (trace != nullptr) trace->push_back(f);
    }
    if (improvement >= config.convergence_tol) continue;
    // Stalled at this difference step: refine it or stop.
    if (refinements_left > 0) {
      --refinements_left;
      step_scale *= 0.1;
      continue;
    }
    result.converged = true;
    break;
  }
  result.iterations_total = steps;
  result.box = canonicalize(to_box(p));
  result.phi_opt = f;
  result.distinct_optima = 1;
  return result;
}

OptResult optimize(const SegMask& mask, const BoxFamily& family,
                   const OptimizerConfig& config,
                   std::span<const OrientedBox> extra_seeds) {
  if (mask.is_empty()) throw EmptyMaskError();
  config.validate();
  std::vector<OrientedBox> starts = seed_boxes(mask, family);
  for (const OrientedBox& box : extra_seeds) {
    starts.push_back(project_to_family(box, family));
  }
  int iterations = 0;
  if (family.kind == FamilyKind::kOriented) {
    const OptResult nested = optimize(mask, BoxFamily::axis_aligned(), config);
    starts.push_back(nested.box);
    iterations += nested.iterations_total;
  }

  std::vector<OptResult> results;
  results.reserve(starts.size() + static_cast<std::size_t>(config.restart_samples));
  for (const OrientedBox& start : starts) {
    results.push_back(ascend_from(mask, start, family, config));
  }

  // Cluster the local optima by objective value.
  auto cluster_representatives = [&](const std::vector<OptResult>& rs) {
    std::vector<const OptResult*> sorted;
    for (const OptResult& r : rs) sorted.push_back(&r);
    std::stable_sort(sorted.begin(), sorted.end(),
                     [](const OptResult* a, const OptResult* b) {
                       return a->phi_opt > b->phi_opt;
                     });
    std::vector<const OptResult*> reps;
    for (const OptResult* r : sorted) {
      if (reps.empty() ||
          reps.back()->phi_opt - r->phi_opt > config.optima_cluster_tol) {
        reps.push_back(r);
      }
    }
    return reps;
  };

  const auto reps = cluster_representatives(results);
  if (reps.size() > 1 && config.restart_samples > 0) {
    const auto indices = free_indices(family.kind);
    Params lo, hi;
    lo.fill(std::numeric_limits<double>::infinity());
    hi.fill(-std::numeric_limits<double>::infinity());
    for (const OptResult* r : reps) {
      const Params p = to_params(r->box);
      for (int i = 0; i < 5; ++i) {
        lo[i] = std::min(lo[i], p[i]);
        hi[i] = std::max(hi[i], p[i]);
      }
    }
    for (int i : indices) {
      const double pad = std::max(0.1 * (hi[i] - lo[i]), 0.5);
      lo[i] -= pad;
      hi[i] += pad;
    }
    std::mt19937_64 rng(config.rng_seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const Params base = to_params(reps.front()->box);
    for (int s = 0; s < config.restart_samples; ++s) {
      Params p = base;
      for (int i : indices) p[i] = lo[i] + unit(rng) * (hi[i] - lo[i]);
      results.push_back(ascend_from(mask, to_box(project(p, family)), family, config));
    }
  }

  std::size_t best = 0;
  for (std::size_t i = 1; i < results.size(); ++i) {
    if (results[i].phi_opt > results[best].phi_opt) best = i;
  }
  for (const OptResult& r : results) iterations += r.iterations_total;

  OptResult out = results[best];
  out.starts_used = static_cast<int>(results.size());
  out.iterations_total = iterations;
  out.distinct_optima = static_cast<int>(cluster_representatives(results).size());
  return out;
}

}  // namespace riou
