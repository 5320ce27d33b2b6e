// Copyright (C) 2026 rboxkit contributors
// SPDX-License-Identifier: Apache-2.0
//
// rboxkit — command-line surface over the rotated-box toolkit. Every
// subcommand is a thin shell over library calls; all outputs are
// deterministic given the same inputs and seeds.
//
// Exit codes: 0 success, 1 usage error, 2 data/format error.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "rbox/rbox.hpp"
#include "rbox/random.hpp"

namespace fs = std::filesystem;

namespace {

constexpr int kExitData = 2;

rbox::RBox parse_box_tuple(const std::string& arg) {
  std::vector<double> vals;
  std::size_t pos = 0;
  while (pos <= arg.size()) {
    const std::size_t comma = arg.find(',', pos);
    const std::string tok = arg.substr(pos, comma == std::string::npos ? comma : comma - pos);
    try {
      std::size_t used = 0;
      vals.push_back(std::stod(tok, &used));
      if (used != tok.size()) throw std::invalid_argument(tok);
    } catch (const std::exception&) {
      throw rbox::ParseError("malformed box tuple \"" + arg + "\" (want cx,cy,w,h,theta)");
    }
    if (comma == std::string::npos) break;
    pos = comma + 1;
  }
  if (vals.size() != 5) {
    throw rbox::ParseError("malformed box tuple \"" + arg + "\" (want 5 comma-separated values)");
  }
  const rbox::RBox box{vals[0], vals[1], vals[2], vals[3], vals[4]};
  if (!rbox::is_valid(box)) {
    throw rbox::ParseError("invalid box \"" + arg + "\" (w and h must be positive and finite)");
  }
  return box;
}

rbox::AnglePeriod parse_period_flag(int deg) {
  if (deg == 180) return rbox::AnglePeriod::deg180;
  if (deg == 360) return rbox::AnglePeriod::deg360;
  throw rbox::ParseError("--period must be 180 or 360");
}

std::ofstream open_output(const fs::path& path) {
  std::ofstream out(path);
  if (!out) throw rbox::ParseError("cannot write " + path.string());
  return out;
}

rbox::ToolkitConfig resolve_config(const std::string& config_path, const std::string& task) {
  if (!config_path.empty()) return rbox::load_config(config_path);
  return rbox::default_config(rbox::parse_task(task));
}

void print_value(double v) { std::printf("%.6f\n", v); }

// --- priors ----------------------------------------------------------------

void cmd_priors(const rbox::ToolkitConfig& cfg, bool count_only) {
  const rbox::PriorSet set = rbox::generate(cfg.priors);
  if (count_only) {
    std::printf("%zu\n", set.priors.size());
    return;
  }
  for (std::size_t i = 0; i < set.priors.size(); ++i) {
    const rbox::RBox& p = set.priors[i];
    std::printf("%zu %.6f %.6f %.6f %.6f %.4f\n", i, p.cx, p.cy, p.w, p.h, p.theta);
  }
}

// --- match -------------------------------------------------------------------

void cmd_match(const rbox::ToolkitConfig& cfg, const std::string& ann_path,
               const std::string& image, bool no_guarantee, bool count_only) {
  const auto records = rbox::read_annotations(fs::path(ann_path));
  std::vector<rbox::RBox> gts;
  std::string bound_image = image;
  for (const auto& r : records) {
    if (bound_image.empty()) bound_image = r.image_id;
    if (r.image_id != bound_image) {
      if (!image.empty()) continue;
      throw rbox::ParseError(ann_path + ": multiple image ids; select one with --image");
    }
    gts.push_back(r.box);
  }
  rbox::MatchOptions opt;
  opt.threshold = cfg.match_threshold;
  opt.best_match_guarantee = !no_guarantee;
  const rbox::PriorSet priors = rbox::generate(cfg.priors);
  const rbox::MatchAssignment m = rbox::match(priors, gts, opt);
  if (count_only) {
    std::printf("%zu\n", m.positive_count());
    return;
  }
  for (const auto& [prior, gt] : m.positive_pairs) std::printf("%zu %zu\n", prior, gt);
}

// --- nms ---------------------------------------------------------------------

void cmd_nms(const std::string& input, const std::string& output, double threshold) {
  const auto records = rbox::read_detections(fs::path(input));
  std::map<std::pair<std::string, int>, std::vector<rbox::DetectionRecord>> groups;
  for (const auto& r : records) groups[{r.image_id, r.class_id}].push_back(r);

  std::vector<rbox::DetectionRecord> kept_records;
  for (auto& [key, recs] : groups) {
    std::vector<rbox::Detection> dets;
    dets.reserve(recs.size());
    for (const auto& r : recs) dets.push_back(rbox::Detection{r.box, r.score, r.class_id});
    for (const rbox::Detection& d : rbox::nms(dets, threshold)) {
      kept_records.push_back(rbox::DetectionRecord{key.first, d.class_id, d.score, d.box});
    }
  }
  auto out = open_output(output);
  rbox::write_detections(out, kept_records);
}

// --- tile-plan ----------------------------------------------------------------

void cmd_tile_plan(int width, int height, std::vector<double> scales, int tile_size,
                   double overlap) {
  if (scales.empty()) scales = rbox::default_scales(width, height, tile_size);
  const rbox::TilePlan plan = rbox::plan(width, height, scales, tile_size, overlap);
  for (const rbox::ScalePlan& sp : plan.scales) {
    for (const rbox::Tile& t : sp.tiles) {
      std::printf("%zu %.6f %d %d %d %d\n", t.scale_index, t.scale, t.x, t.y, t.w, t.h);
    }
  }
}

// --- simulate -----------------------------------------------------------------

struct SweepSpec {
  double start = 0.0;
  double step = 10.0;
  std::size_t count = 36;
};

SweepSpec parse_sweep(const std::string& spec) {
  SweepSpec s;
  if (spec.empty()) return s;
  unsigned long count = 0;
  if (std::sscanf(spec.c_str(), "%lf:%lf:%lu", &s.start, &s.step, &count) != 3 || count == 0) {
    throw rbox::ParseError("bad --rotations \"" + spec + "\" (want start:step:count)");
  }
  s.count = count;
  return s;
}

std::string angle_tag(double angle) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", angle);
  return buf;
}

void write_simulation(const fs::path& dir, const std::string& stem, const rbox::Scene& scene,
                      const rbox::OracleNoise& noise, std::uint64_t seed, double nms_threshold) {
  {
    auto out = open_output(dir / (stem + ".annotations.txt"));
    rbox::write_scene(out, scene, stem);
  }
  const std::vector<double> scales{1.0};
  const rbox::TilePlan plan =
      rbox::plan(static_cast<int>(std::lround(scene.width)),
                 static_cast<int>(std::lround(scene.height)), scales);
  rbox::PipelineOptions opt;
  opt.nms_threshold = nms_threshold;
  const rbox::RunResult run = rbox::run(plan, rbox::oracle_detector(scene, noise, seed), opt);
  std::vector<rbox::DetectionRecord> recs;
  recs.reserve(run.detections.size());
  for (const rbox::Detection& d : run.detections) {
    recs.push_back(rbox::DetectionRecord{stem, d.class_id, d.score, d.box});
  }
  auto out = open_output(dir / (stem + ".detections.txt"));
  rbox::write_detections(out, recs);
}

void cmd_simulate(const std::string& config_path, std::uint64_t seed, const std::string& out_dir,
                  const std::string& rotations, double nms_threshold) {
  const rbox::SimulateConfig cfg = rbox::load_simulate_config(config_path);
  const rbox::Scene scene = rbox::generate_scene(cfg.scene, seed);
  const fs::path dir(out_dir);
  fs::create_directories(dir);
  if (rotations.empty()) {
    write_simulation(dir, "scene", scene, cfg.noise, seed, nms_threshold);
    return;
  }
  const SweepSpec sweep = parse_sweep(rotations);
  for (std::size_t i = 0; i < sweep.count; ++i) {
    const double angle = sweep.start + sweep.step * static_cast<double>(i);
    const rbox::Scene rot = rbox::rotated(scene, angle);
    write_simulation(dir, "rot_" + angle_tag(angle), rot, cfg.noise, seed, nms_threshold);
  }
}

// --- evaluate -----------------------------------------------------------------

rbox::ClassPeriods periods_from_flag(const std::vector<int>& period180_classes) {
  rbox::ClassPeriods periods;
  for (int cls : period180_classes) periods.periods[cls] = rbox::AnglePeriod::deg180;
  return periods;
}

void cmd_evaluate(const std::string& det_path, const std::string& ann_path, double iou_threshold,
                  double bin_width, const std::vector<int>& period180, const std::string& sweep_dir,
                  const std::string& report_path, const std::string& pr_path) {
  const rbox::ClassPeriods periods = periods_from_flag(period180);
  const auto dets = rbox::read_detections(fs::path(det_path));
  const auto anns = rbox::read_annotations(fs::path(ann_path));
  rbox::EvalReport report = rbox::evaluate_records(dets, anns, iou_threshold, bin_width, periods);

  if (!sweep_dir.empty()) {
    // expects rot_<angle>.annotations.txt / rot_<angle>.detections.txt pairs
    std::map<double, std::pair<fs::path, fs::path>> sweep;
    for (const auto& entry : fs::directory_iterator(sweep_dir)) {
      const std::string name = entry.path().filename().string();
      constexpr std::string_view kAnn = ".annotations.txt";
      if (name.rfind("rot_", 0) != 0 || name.size() <= kAnn.size() ||
          name.substr(name.size() - kAnn.size()) != kAnn) {
        continue;
      }
      const std::string tag = name.substr(4, name.size() - 4 - kAnn.size());
      double angle = 0.0;
      try {
        angle = std::stod(tag);
      } catch (const std::exception&) {
        continue;
      }
      const fs::path det_file = entry.path().parent_path() / ("rot_" + tag + ".detections.txt");
      if (fs::exists(det_file)) sweep[angle] = {entry.path(), det_file};
    }
    if (sweep.size() < 2) {
      throw rbox::ParseError(sweep_dir + ": need at least two rot_<angle> file pairs for std_ap");
    }
    std::vector<double> maps;
    maps.reserve(sweep.size());
    for (const auto& [angle, files] : sweep) {
      const auto a = rbox::read_annotations(files.first);
      const auto d = rbox::read_detections(files.second);
      maps.push_back(rbox::evaluate_records(d, a, iou_threshold, bin_width, periods).map);
    }
    report.std_ap = rbox::population_std(maps);
  }

  const nlohmann::json j = rbox::to_json(report);
  if (report_path.empty()) {
    std::cout << j.dump(2) << '\n';
  } else {
    auto out = open_output(report_path);
    out << j.dump(2) << '\n';
  }
  if (!pr_path.empty()) {
    auto out = open_output(pr_path);
    rbox::write_pr_table(out, report);
  }
}

// --- bench --------------------------------------------------------------------

void cmd_bench(int pairs, int det_count) {
  using Clock = std::chrono::steady_clock;
  rbox::Rng rng(121212);
  std::vector<std::pair<rbox::RBox, rbox::RBox>> ps;
  ps.reserve(static_cast<std::size_t>(pairs));
  for (int i = 0; i < pairs; ++i) {
    rbox::RBox a{rng.uniform(-20, 20), rng.uniform(-20, 20), rng.uniform(1, 200),
                 rng.uniform(1, 200), rng.uniform(0, 360)};
    rbox::RBox b = a;
    b.cx += rng.uniform(-100, 100);
    b.cy += rng.uniform(-100, 100);
    b.theta = rng.uniform(0, 360);
    ps.emplace_back(a, b);
  }
  auto t0 = Clock::now();
  double sink = 0.0;
  for (const auto& [a, b] : ps) sink += rbox::iou(a, b);
  const double dt = std::chrono::duration<double>(Clock::now() - t0).count();
  std::printf("iou: %d pairs in %.3f s -> %.2fM pairs/s (checksum %.3f)\n", pairs, dt,
              pairs / dt / 1e6, sink);

  std::vector<rbox::Detection> dets;
  dets.reserve(static_cast<std::size_t>(det_count));
  for (int i = 0; i < det_count; ++i) {
    dets.push_back(rbox::Detection{rbox::RBox{rng.uniform(0, 2000), rng.uniform(0, 2000),
                                              rng.uniform(10, 60), rng.uniform(5, 40),
                                              rng.uniform(0, 360)},
                                   rng.uniform(0, 1), 0});
  }
  t0 = Clock::now();
  const auto kept = rbox::nms(dets, 0.3);
  const double nms_dt = std::chrono::duration<double>(Clock::now() - t0).count();
  std::printf("nms: %d detections -> %zu kept in %.1f ms\n", det_count, kept.size(),
              nms_dt * 1e3);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"rboxkit — rotated bounding box detection toolkit"};
  app.require_subcommand(1);

  // iou / ariou
  std::string box_a, box_b;
  int period_flag = 360;
  auto* c_iou = app.add_subcommand("iou", "exact IoU of two boxes (cx,cy,w,h,theta)");
  c_iou->add_option("a", box_a, "first box tuple")->required();
  c_iou->add_option("b", box_b, "second box tuple")->required();
  auto* c_ariou = app.add_subcommand("ariou", "angle-related IoU of two boxes (not commutative)");
  c_ariou->add_option("a", box_a, "first box tuple")->required();
  c_ariou->add_option("b", box_b, "second box tuple")->required();
  c_ariou->add_option("--period", period_flag, "angle period in degrees (180 or 360)")
      ->default_val(360);

  // priors
  std::string task = "ship", config_path;
  bool count_only = false, list_mode = false;
  auto* c_priors = app.add_subcommand("priors", "generate the multi-angle prior set");
  c_priors->add_option("--task", task, "ship, vehicle or airplane");
  c_priors->add_option("--config", config_path, "toolkit config JSON");
  c_priors->add_flag("--count", count_only, "print the prior count only");
  c_priors->add_flag("--list", list_mode, "stream 'index cx cy w h theta' lines");

  // match
  std::string ann_path, image_id;
  bool no_guarantee = false;
  double threshold_override = -1.0;
  auto* c_match = app.add_subcommand("match", "assign priors to ground-truth boxes via ArIoU");
  c_match->add_option("--task", task, "ship, vehicle or airplane");
  c_match->add_option("--config", config_path, "toolkit config JSON");
  c_match->add_option("--annotations", ann_path, "annotation file")->required();
  c_match->add_option("--image", image_id, "image id to match (default: single-image file)");
  c_match->add_option("--threshold", threshold_override, "ArIoU threshold (default from config)");
  c_match->add_flag("--no-best-match", no_guarantee, "disable the best-match guarantee");
  c_match->add_flag("--count", count_only, "print the number of positive pairs only");

  // nms
  std::string input_path, output_path;
  double nms_threshold = 0.3;
  auto* c_nms = app.add_subcommand("nms", "suppress a detection file per image and class");
  c_nms->add_option("--input", input_path, "detection file")->required();
  c_nms->add_option("--output", output_path, "filtered detection file")->required();
  c_nms->add_option("--threshold", nms_threshold, "IoU threshold")->default_val(0.3);

  // tile-plan
  int width = 0, height = 0, tile_size = rbox::kDefaultTileSize;
  double overlap = rbox::kDefaultTileOverlap;
  std::vector<double> scales;
  auto* c_plan = app.add_subcommand("tile-plan", "print the pyramid tiling plan");
  c_plan->add_option("--width", width, "image width, pixels")->required();
  c_plan->add_option("--height", height, "image height, pixels")->required();
  c_plan->add_option("--scales", scales, "pyramid scales (default: powers of 1/2)");
  c_plan->add_option("--tile", tile_size, "tile size")->default_val(rbox::kDefaultTileSize);
  c_plan->add_option("--overlap", overlap, "tile overlap fraction")
      ->default_val(rbox::kDefaultTileOverlap);

  // simulate
  std::uint64_t seed = 0;
  std::string out_dir, rotations;
  auto* c_sim = app.add_subcommand("simulate",
                                   "generate a synthetic scene and oracle detections");
  c_sim->add_option("--config", config_path, "scene/noise config JSON")->required();
  c_sim->add_option("--seed", seed, "random seed")->required();
  c_sim->add_option("--out", out_dir, "output directory")->required();
  c_sim->add_option("--rotations", rotations, "rotation sweep start:step:count (e.g. 0:10:36)");
  c_sim->add_option("--nms", nms_threshold, "pipeline NMS threshold")->default_val(0.3);

  // evaluate
  std::string det_path, sweep_dir, report_path, pr_path;
  double eval_iou = 0.5, bin_width = 30.0;
  std::vector<int> period180;
  auto* c_eval = app.add_subcommand("evaluate", "score detections against annotations");
  c_eval->add_option("--detections", det_path, "detection file")->required();
  c_eval->add_option("--annotations", ann_path, "annotation file")->required();
  c_eval->add_option("--iou", eval_iou, "match IoU threshold")->default_val(0.5);
  c_eval->add_option("--bin-width", bin_width, "angle bin width for the score-spread statistic")
      ->default_val(30.0);
  c_eval->add_option("--period-180", period180, "class ids with 180-degree angle period");
  c_eval->add_option("--sweep-dir", sweep_dir,
                     "directory of rot_<angle>.{annotations,detections}.txt pairs for std_ap");
  c_eval->add_option("--report", report_path, "write the JSON report here (default: stdout)");
  c_eval->add_option("--pr-table", pr_path, "write a plain-text P-R table here");

  // config
  auto* c_config = app.add_subcommand("config", "print the default config for a task");
  c_config->add_option("--task", task, "ship, vehicle or airplane");

  // bench
  int bench_pairs = 1000000, bench_dets = 10000;
  auto* c_bench = app.add_subcommand("bench", "measure IoU throughput and NMS latency");
  c_bench->add_option("--pairs", bench_pairs, "IoU pair count")->default_val(1000000);
  c_bench->add_option("--dets", bench_dets, "NMS detection count")->default_val(10000);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;  // help exits clean, usage errors exit 1
  }

  try {
    if (c_iou->parsed()) {
      print_value(rbox::iou(parse_box_tuple(box_a), parse_box_tuple(box_b)));
    } else if (c_ariou->parsed()) {
      print_value(rbox::ariou(parse_box_tuple(box_a), parse_box_tuple(box_b),
                              parse_period_flag(period_flag)));
    } else if (c_priors->parsed()) {
      if (!count_only && !list_mode) {
        std::fprintf(stderr, "priors: pass --count or --list\n");
        return 1;
      }
      cmd_priors(resolve_config(config_path, task), count_only);
    } else if (c_match->parsed()) {
      rbox::ToolkitConfig cfg = resolve_config(config_path, task);
      if (threshold_override >= 0.0) cfg.match_threshold = threshold_override;
      cmd_match(cfg, ann_path, image_id, no_guarantee, count_only);
    } else if (c_nms->parsed()) {
      cmd_nms(input_path, output_path, nms_threshold);
    } else if (c_plan->parsed()) {
      cmd_tile_plan(width, height, scales, tile_size, overlap);
    } else if (c_sim->parsed()) {
      cmd_simulate(config_path, seed, out_dir, rotations, nms_threshold);
    } else if (c_eval->parsed()) {
      cmd_evaluate(det_path, ann_path, eval_iou, bin_width, period180, sweep_dir, report_path,
                   pr_path);
    } else if (c_config->parsed()) {
      std::cout << rbox::to_json(rbox::default_config(rbox::parse_task(task))).dump(2) << '\n';
    } else if (c_bench->parsed()) {
      cmd_bench(bench_pairs, bench_dets);
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "rboxkit: %s\n", e.what());
    return kExitData;
  }
  return 0;
}
