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


#include "riou/cli.h"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>

#include "CLI11.hpp"
#include "parallel.h"
#include "riou/errors.h"
#include "riou/harness.h"
#include "riou/optimizer.h"
#include "riou/synthetic.h"
#include "riou/theoretical.h"

namespace riou {

namespace {

namespace fs = std::filesystem;

struct GlobalOptions {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  int jobs = 1;
  int threshold = 1;

  OptimizerConfig config() const {
    OptimizerConfig c =
        config_path.empty() ? OptimizerConfig{} : load_optimizer_config(config_path);
    if (seed) c.rng_seed = *seed;
    c.validate();
    return c;
  }
};

void write_text(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << text;
  if (!out) throw IoError("cannot write " + path.string());
}

std::string describe(const OptResult& r) {
  char buf[256];
  std::snprintf(buf, sizeof(buf),
                "phi_opt = %.6f\nbox = %.6f %.6f %.6f %.6f %.6f\n"
                "starts = %d iterations = %d distinct_optima = %d converged = %s\n",
                r.phi_opt, r.box.r_c, r.box.c_c, r.box.w, r.box.h, r.box.phi,
                r.starts_used, r.iterations_total, r.distinct_optima,
                r.converged ? "true" : "false");
  return buf;
}

std::vector<FamilyKind> families_from(const std::string& tag) {
  if (tag == "all") {
    return {FamilyKind::kFixedScaleAxisAligned, FamilyKind::kAxisAligned,
            FamilyKind::kOriented};
  }
  return {parse_family_tag(tag)};
}

int cmd_optbox(const GlobalOptions& g, const std::string& mask_path,
               const std::string& family_tag_value, const std::vector<double>& scale,
               std::ostream& out) {
  const SegMask mask = load_mask(mask_path, g.threshold);
  BoxFamily family{parse_family_tag(family_tag_value)};
  const OptimizerConfig config = g.config();
  if (family.kind == FamilyKind::kFixedScaleAxisAligned) {
    if (scale.size() == 2) {
      family = BoxFamily::fixed_scale(scale[0], scale[1]);
    } else {
      const OptResult aa = optimize(mask, BoxFamily::axis_aligned(), config);
      family = BoxFamily::fixed_scale(aa.box.w, aa.box.h);
    }
  }
  out << describe(optimize(mask, family, config));
  return kExitOk;
}

int cmd_init(const GlobalOptions& g, const std::string& seq_dir,
             const std::string& out_path, std::ostream& out) {
  const MaskSequence seq = load_sequence(seq_dir, g.threshold);
  const OptResult r = emit_init_box(seq, out_path, g.config());
  out << describe(r);
  return kExitOk;
}

int cmd_theoretical(const GlobalOptions& g, const std::string& seq_dir,
                    const std::string& family, const std::string& out_path,
                    std::ostream& out) {
  const MaskSequence seq = load_sequence(seq_dir, g.threshold);
  const OptimizerConfig config = g.config();
  std::vector<TheoreticalTrack> tracks;
  for (FamilyKind kind : families_from(family)) {
    tracks.push_back(run_theoretical(seq, kind, config, g.jobs));
  }
  write_text(out_path, curves_csv(tracks));
  out << "wrote " << tracks.size() << " track(s) x " << seq.frames.size()
      << " frame(s) to " << out_path << '\n';
  return kExitOk;
}

int cmd_eval(const GlobalOptions& g, const std::vector<std::string>& seq_dirs,
             const std::vector<std::string>& run_paths, const std::string& out_dir,
             std::ostream& out) {
  const OptimizerConfig config = g.config();
  std::vector<MaskSequence> sequences;
  for (const auto& dir : seq_dirs) sequences.push_back(load_sequence(dir, g.threshold));

  // Route every run file to its sequence.
  std::map<std::string, std::size_t> seq_index;
  for (std::size_t i = 0; i < sequences.size(); ++i) {
    if (!seq_index.emplace(sequences[i].name, i).second) {
      throw ConfigError("duplicate sequence name " + sequences[i].name);
    }
  }
  struct Job {
    std::size_t seq;
    fs::path run_file;
  };
  std::vector<Job> jobs;
  std::map<std::size_t, std::vector<FamilyKind>> needed;
  for (const auto& path : run_paths) {
    const TrackerRun header = read_tracker_run_header(path);
    std::size_t index = 0;
    if (!header.sequence_name.empty()) {
      auto it = seq_index.find(header.sequence_name);
      if (it == seq_index.end()) {
        throw ConfigError(path + ": unknown sequence " + header.sequence_name);
      }
      index = it->second;
    } else if (sequences.size() != 1) {
      throw ConfigError(path + ": run file needs sequence= when several --seq are given");
    }
    jobs.push_back({index, path});
    auto& kinds = needed[index];
    if (std::find(kinds.begin(), kinds.end(), header.abilities) == kinds.end()) {
      kinds.push_back(header.abilities);
    }
  }

  // Theoretical tracks, one per (sequence, needed family).
  std::vector<std::vector<TheoreticalTrack>> tracks(sequences.size());
  for (auto& [index, kinds] : needed) {
    for (FamilyKind kind : kinds) {
      tracks[index].push_back(run_theoretical(sequences[index], kind, config, g.jobs));
    }
  }

  std::vector<SequenceEval> evals(jobs.size());
  internal::parallel_for(jobs.size(), g.jobs, [&](std::size_t i) {
    const MaskSequence& seq = sequences[jobs[i].seq];
    const TrackerRun run = load_tracker_run(jobs[i].run_file, seq);
    evals[i] = score_run(run, seq, tracks[jobs[i].seq]);
  });
  std::stable_sort(evals.begin(), evals.end(), [](const auto& a, const auto& b) {
    return std::tie(a.tracker_name, a.sequence_name) <
           std::tie(b.tracker_name, b.sequence_name);
  });

  const fs::path dir(out_dir);
  fs::create_directories(dir);
  for (const SequenceEval& e : evals) {
    const std::string stem = e.tracker_name + "__" + e.sequence_name;
    write_text(dir / (stem + ".frames.csv"), frames_csv(e));
    write_text(dir / (stem + ".json"), sequence_json(e));
  }
  const auto summaries = aggregate_dataset(evals);
  write_text(dir / "dataset.csv", dataset_csv(summaries));
  write_text(dir / "dataset.json", dataset_json(summaries, evals));
  out << dataset_csv(summaries);
  return kExitOk;
}

int cmd_validate(const GlobalOptions& g, const std::string& masks_dir,
                 const std::string& out_path, std::int64_t budget,
                 std::ostream& out) {
  const auto files = list_mask_files(masks_dir);
  if (files.empty()) throw IoError("no mask files in " + masks_dir);
  const auto rows = validate_masks(files, g.config(), g.jobs, budget, g.threshold);
  write_text(out_path, validation_csv(rows));
  int below_1e3 = 0, below_1e4 = 0;
  for (const auto& r : rows) {
    if (r.delta < -1e-3) ++below_1e3;
    if (r.delta < -1e-4) ++below_1e4;
  }
  out << rows.size() << " masks, " << below_1e3 << " below oracle - 1e-3, "
      << below_1e4 << " below oracle - 1e-4\n";
  return below_1e3 == 0 ? kExitOk : kExitValidationFailed;
}

int cmd_synth(const std::string& kind, const std::string& out_dir, int count,
              std::uint64_t seed, std::ostream& out) {
  const fs::path dir(out_dir);
  fs::create_directories(dir);
  std::vector<SegMask> masks;
  if (kind == "blobs") {
    masks = synthetic::blob_suite(count, seed);
  } else if (kind == "growing") {
    masks = synthetic::growing_rectangle(count, 20, 12, 0.1, 128).frames;
  } else if (kind == "rotating") {
    std::vector<double> angles;
    for (int i = 0; i < count; ++i) angles.push_back(15.0 + 60.0 * i / std::max(1, count - 1));
    masks = synthetic::rotating_rectangle(angles, 60, 20, 96).frames;
  } else {
    throw ConfigError("unknown synthetic kind '" + kind + "'");
  }
  for (std::size_t i = 0; i < masks.size(); ++i) {
    char name[32];
    std::snprintf(name, sizeof(name), "%05zu.png", i);
    save_png(masks[i], dir / name);
  }
  out << "wrote " << masks.size() << " masks to " << out_dir << '\n';
  return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out,
            std::ostream& err) {
  CLI::App app{"Optimal boxes and relative IoU for segmentation masks", "riou"};
  app.require_subcommand(1);
  GlobalOptions g;
  std::uint64_t seed_value = 0;
  app.add_option("--config", g.config_path, "Optimizer config file (key = value)");
  auto* seed_opt = app.add_option("--seed", seed_value, "Optimizer RNG seed");
  app.add_option("--jobs", g.jobs, "Worker threads")->check(CLI::PositiveNumber);
  app.add_option("--threshold", g.threshold, "Foreground threshold")
      ->check(CLI::Range(1, 255));

  std::string mask_path, family = "aa";
  std::vector<double> scale;
  auto* optbox = app.add_subcommand("optbox", "Optimal box of one mask");
  optbox->add_option("mask", mask_path, "Mask image")->required();
  optbox->add_option("--family", family, "aa, rot or noscale")
      ->check(CLI::IsMember({"aa", "rot", "noscale"}));
  optbox->add_option("--scale", scale, "Fixed w h for noscale")->expected(2);

  std::string seq_dir, out_path;
  auto* init = app.add_subcommand("init", "Write the tracker initialization box");
  init->add_option("--seq", seq_dir, "Mask sequence directory")->required();
  init->add_option("--out", out_path, "Output box file")->required();

  std::string theo_family = "all";
  auto* theoretical = app.add_subcommand("theoretical", "Theoretical tracker curves");
  theoretical->add_option("--seq", seq_dir, "Mask sequence directory")->required();
  theoretical->add_option("--family", theo_family, "aa, rot, noscale or all")
      ->check(CLI::IsMember({"aa", "rot", "noscale", "all"}));
  theoretical->add_option("--out", out_path, "Output CSV")->required();

  std::vector<std::string> seq_dirs, run_paths;
  auto* eval = app.add_subcommand("eval", "Score tracker runs with IoU and rIoU");
  eval->add_option("--seq", seq_dirs, "Mask sequence directories")->required();
  eval->add_option("--run", run_paths, "Tracker run files")->required();
  eval->add_option("--out", out_path, "Output directory")->required();

  std::string masks_dir;
  std::int64_t budget = kDefaultOracleBudget;
  auto* validate = app.add_subcommand("validate", "Compare optimizer and exhaustive search");
  validate->add_option("--masks", masks_dir, "Directory of masks")->required();
  validate->add_option("--out", out_path, "Output CSV")->required();
  validate->add_option("--budget", budget, "Oracle pixel budget")->check(CLI::PositiveNumber);

  std::string synth_kind = "blobs";
  int count = 50;
  auto* synth = app.add_subcommand("synth", "Write synthetic masks");
  synth->add_option("--kind", synth_kind, "blobs, growing or rotating")
      ->check(CLI::IsMember({"blobs", "growing", "rotating"}));
  synth->add_option("--count", count, "Number of masks")->check(CLI::PositiveNumber);
  synth->add_option("--out", out_path, "Output directory")->required();

  for (CLI::App* sub : {optbox, init, theoretical, eval, validate, synth}) {
    sub->fallthrough();
  }

  std::vector<std::string> argv_tail(args.begin() + (args.empty() ? 0 : 1), args.end());
  std::reverse(argv_tail.begin(), argv_tail.end());
  try {
    app.parse(argv_tail);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }
  if (*seed_opt) g.seed = seed_value;

  try {
    if (*optbox) return cmd_optbox(g, mask_path, family, scale, out);
    if (*init) return cmd_init(g, seq_dir, out_path, out);
    if (*theoretical) return cmd_theoretical(g, seq_dir, theo_family, out_path, out);
    if (*eval) return cmd_eval(g, seq_dirs, run_paths, out_path, out);
    if (*validate) return cmd_validate(g, masks_dir, out_path, budget, out);
    if (*synth) return cmd_synth(synth_kind, out_path, count, g.seed.value_or(0), out);
  } catch (const ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const IoError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitValidationFailed;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitValidationFailed;
  }
  return kExitUsage;
}

}  // namespace riou
