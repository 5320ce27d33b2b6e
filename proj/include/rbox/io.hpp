// Copyright (C) 2026 rboxkit contributors
// SPDX-License-Identifier: Apache-2.0
//
// File formats and configuration.
//
// Detection files: one record per line, "image_id class score cx cy w h theta".
// Annotation files: identical minus the score column.
// Scene files: an annotation file with a "# scene <width> <height> <seed>"
// comment header. '#' lines and blank lines are skipped everywhere. Angles
// are degrees; writers print values with 6 decimals and angles with 4.

#pragma once

#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "rbox/geometry.hpp"
#include "rbox/harness.hpp"
#include "rbox/metrics.hpp"
#include "rbox/nms.hpp"
#include "rbox/pipeline.hpp"
#include "rbox/priors.hpp"

namespace rbox {

struct DetectionRecord {
  std::string image_id;
  int class_id = 0;
  double score = 0.0;
  RBox box;
};

struct AnnotationRecord {
  std::string image_id;
  int class_id = 0;
  RBox box;
};

class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& source, std::size_t line, const std::string& what)
      : std::runtime_error(source + ":" + std::to_string(line) + ": " + what) {}
  explicit ParseError(const std::string& what) : std::runtime_error(what) {}
};

namespace detail {

inline std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
    std::size_t j = i;
    while (j < line.size() && line[j] != ' ' && line[j] != '\t' && line[j] != '\r') ++j;
    if (j > i) out.push_back(line.substr(i, j - i));
    i = j;
  }
  return out;
}

inline double parse_double(std::string_view tok, const std::string& source, std::size_t line,
                           const char* what) {
  double v = 0.0;
  const auto* end = tok.data() + tok.size();
  const auto res = std::from_chars(tok.data(), end, v);
  if (res.ec != std::errc{} || res.ptr != end) {
    throw ParseError(source, line, std::string("bad ") + what + " \"" + std::string(tok) + "\"");
  }
  return v;
}

inline int parse_int(std::string_view tok, const std::string& source, std::size_t line,
                     const char* what) {
  int v = 0;
  const auto* end = tok.data() + tok.size();
  const auto res = std::from_chars(tok.data(), end, v);
  if (res.ec != std::errc{} || res.ptr != end) {
    throw ParseError(source, line, std::string("bad ") + what + " \"" + std::string(tok) + "\"");
  }
  return v;
}

inline RBox parse_box_fields(std::span<const std::string_view> f, const std::string& source,
                             std::size_t line) {
  RBox b{parse_double(f[0], source, line, "cx"), parse_double(f[1], source, line, "cy"),
         parse_double(f[2], source, line, "w"), parse_double(f[3], source, line, "h"),
         parse_double(f[4], source, line, "theta")};
  if (!is_valid(b)) throw ParseError(source, line, "invalid box (w, h must be positive and finite)");
  return b;
}

inline bool skippable(std::string_view line) {
  for (char c : line) {
    if (c == '#') return true;
    if (c != ' ' && c != '\t' && c != '\r') return false;
  }
  return true;
}

inline std::string format_box(const RBox& b) {
  char buf[160];
  std::snprintf(buf, sizeof buf, "%.6f %.6f %.6f %.6f %.4f", b.cx, b.cy, b.w, b.h, b.theta);
  return buf;
}

}  // namespace detail

inline std::vector<DetectionRecord> read_detections(std::istream& in, const std::string& source) {
  std::vector<DetectionRecord> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (detail::skippable(line)) continue;
    const auto f = detail::split_fields(line);
    if (f.size() != 8) {
      throw ParseError(source, lineno,
                       "expected 8 fields (image_id class score cx cy w h theta), got " +
                           std::to_string(f.size()));
    }
    DetectionRecord r;
    r.image_id = std::string(f[0]);
    r.class_id = detail::parse_int(f[1], source, lineno, "class");
    r.score = detail::parse_double(f[2], source, lineno, "score");
    if (!(r.score >= 0.0 && r.score <= 1.0)) {
      throw ParseError(source, lineno, "score outside [0, 1]");
    }
    r.box = detail::parse_box_fields(std::span(f).subspan(3), source, lineno);
    out.push_back(std::move(r));
  }
  return out;
}

inline std::vector<AnnotationRecord> read_annotations(std::istream& in,
                                                      const std::string& source) {
  std::vector<AnnotationRecord> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (detail::skippable(line)) continue;
    const auto f = detail::split_fields(line);
    if (f.size() != 7) {
      throw ParseError(source, lineno,
                       "expected 7 fields (image_id class cx cy w h theta), got " +
                           std::to_string(f.size()));
    }
    AnnotationRecord r;
    r.image_id = std::string(f[0]);
    r.class_id = detail::parse_int(f[1], source, lineno, "class");
    r.box = detail::parse_box_fields(std::span(f).subspan(2), source, lineno);
    out.push_back(std::move(r));
  }
  return out;
}

inline std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path.string());
  return in;
}

inline std::vector<DetectionRecord> read_detections(const std::filesystem::path& path) {
  auto in = open_input(path);
  return read_detections(in, path.string());
}

inline std::vector<AnnotationRecord> read_annotations(const std::filesystem::path& path) {
  auto in = open_input(path);
  return read_annotations(in, path.string());
}

inline void write_detection(std::ostream& out, const DetectionRecord& r) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", r.score);
  out << r.image_id << ' ' << r.class_id << ' ' << buf << ' ' << detail::format_box(r.box)
      << '\n';
}

inline void write_detections(std::ostream& out, std::span<const DetectionRecord> recs) {
  for (const DetectionRecord& r : recs) write_detection(out, r);
}

inline void write_annotations(std::ostream& out, std::span<const AnnotationRecord> recs) {
  for (const AnnotationRecord& r : recs) {
    out << r.image_id << ' ' << r.class_id << ' ' << detail::format_box(r.box) << '\n';
  }
}

/// Per-class angle periods, with a fallback for unlisted classes.
struct ClassPeriods {
  std::map<int, AnglePeriod> periods;
  AnglePeriod fallback = AnglePeriod::deg360;

  AnglePeriod of(int class_id) const {
    const auto it = periods.find(class_id);
    return it == periods.end() ? fallback : it->second;
  }
};

inline void write_scene(std::ostream& out, const Scene& scene,
                        const std::string& image_id = "scene") {
  char buf[96];
  std::snprintf(buf, sizeof buf, "# scene %.6f %.6f %llu", scene.width, scene.height,
                static_cast<unsigned long long>(scene.seed));
  out << buf << '\n';
  for (const Annotation& a : scene.objects) {
    out << image_id << ' ' << a.class_id << ' ' << detail::format_box(a.box) << '\n';
  }
}

inline Scene read_scene(std::istream& in, const std::string& source,
                        const ClassPeriods& periods = {}) {
  Scene scene;
  bool have_header = false;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.rfind("# scene", 0) == 0) {
      std::istringstream hs(line.substr(7));
      unsigned long long seed = 0;
      if (!(hs >> scene.width >> scene.height >> seed)) {
        throw ParseError(source, lineno, "bad scene header (want: # scene W H seed)");
      }
      scene.seed = seed;
      have_header = true;
      continue;
    }
    if (detail::skippable(line)) continue;
    const auto f = detail::split_fields(line);
    if (f.size() != 7) {
      throw ParseError(source, lineno, "expected 7 fields, got " + std::to_string(f.size()));
    }
    const int cls = detail::parse_int(f[1], source, lineno, "class");
    scene.objects.push_back(
        Annotation{detail::parse_box_fields(std::span(f).subspan(2), source, lineno), cls,
                   periods.of(cls)});
  }
  if (!have_header) throw ParseError(source + ": missing \"# scene W H seed\" header");
  return scene;
}

inline Scene read_scene(const std::filesystem::path& path, const ClassPeriods& periods = {}) {
  auto in = open_input(path);
  return read_scene(in, path.string(), periods);
}

// ---------------------------------------------------------------------------
// Toolkit configuration (JSON)

struct MetricOptions {
  double iou_threshold = 0.5;
  double std_as_bin_width = 30.0;
  double rotation_start = 0.0;
  double rotation_step = 10.0;
  std::size_t rotation_count = 36;
};

struct ToolkitConfig {
  std::string task = "ship";
  PriorConfig priors;
  double match_threshold = 0.5;
  double negative_ratio = 3.0;
  double nms_threshold = 0.3;
  int tile_size = kDefaultTileSize;
  double tile_overlap = kDefaultTileOverlap;
  std::vector<double> scales;  // empty -> default_scales at point of use
  std::vector<std::optional<SizeFilter>> size_filters;
  MetricOptions metrics;
};

inline ToolkitConfig default_config(Task task) {
  ToolkitConfig cfg;
  cfg.task = task_name(task);
  cfg.priors = builtin_config(task);
  return cfg;
}

namespace detail {

inline nlohmann::json to_json(const PriorConfig& p) {
  nlohmann::json sizes = nlohmann::json::array();
  for (const PriorSize& s : p.sizes) sizes.push_back({s.w, s.h});
  return {{"class_name", p.class_name},
          {"sizes", sizes},
          {"angles", p.angles},
          {"grid", {p.grid.rows, p.grid.cols}},
          {"step", p.step},
          {"input_size", p.input_size},
          {"angle_period", static_cast<int>(p.angle_period)}};
}

inline AnglePeriod parse_period(int degrees) {
  if (degrees == 180) return AnglePeriod::deg180;
  if (degrees == 360) return AnglePeriod::deg360;
  throw ParseError("angle_period must be 180 or 360, got " + std::to_string(degrees));
}

inline PriorConfig prior_config_from_json(const nlohmann::json& j, PriorConfig base) {
  if (j.contains("class_name")) base.class_name = j.at("class_name").get<std::string>();
  if (j.contains("sizes")) {
    base.sizes.clear();
    for (const auto& s : j.at("sizes")) {
      base.sizes.push_back(PriorSize{s.at(0).get<double>(), s.at(1).get<double>()});
    }
  }
  if (j.contains("angles")) base.angles = j.at("angles").get<std::vector<double>>();
  if (j.contains("grid")) {
    base.grid.rows = j.at("grid").at(0).get<std::size_t>();
    base.grid.cols = j.at("grid").at(1).get<std::size_t>();
  }
  if (j.contains("input_size")) base.input_size = j.at("input_size").get<double>();
  if (j.contains("angle_period")) base.angle_period = parse_period(j.at("angle_period").get<int>());
  if (j.contains("step")) {
    base.step = j.at("step").get<double>();
  } else if (j.contains("input_size") || j.contains("grid")) {
    base.step = base.input_size / static_cast<double>(base.grid.cols);
  }
  return base;
}

}  // namespace detail

inline nlohmann::json to_json(const ToolkitConfig& cfg) {
  nlohmann::json filters = nlohmann::json::array();
  for (const auto& f : cfg.size_filters) {
    if (f) {
      filters.push_back({f->min_size, f->max_size});
    } else {
      filters.push_back(nullptr);
    }
  }
  return {{"task", cfg.task},
          {"priors", detail::to_json(cfg.priors)},
          {"match_threshold", cfg.match_threshold},
          {"negative_ratio", cfg.negative_ratio},
          {"nms_threshold", cfg.nms_threshold},
          {"tile_size", cfg.tile_size},
          {"tile_overlap", cfg.tile_overlap},
          {"scales", cfg.scales},
          {"size_filters", filters},
          {"metrics",
           {{"iou_threshold", cfg.metrics.iou_threshold},
            {"std_as_bin_width", cfg.metrics.std_as_bin_width},
            {"rotation_start", cfg.metrics.rotation_start},
            {"rotation_step", cfg.metrics.rotation_step},
            {"rotation_count", cfg.metrics.rotation_count}}}};
}

inline ToolkitConfig config_from_json(const nlohmann::json& j) {
  const std::string task = j.value("task", std::string("ship"));
  ToolkitConfig cfg = default_config(parse_task(task));
  if (j.contains("priors")) {
    cfg.priors = detail::prior_config_from_json(j.at("priors"), cfg.priors);
  }
  cfg.match_threshold = j.value("match_threshold", cfg.match_threshold);
  cfg.negative_ratio = j.value("negative_ratio", cfg.negative_ratio);
  cfg.nms_threshold = j.value("nms_threshold", cfg.nms_threshold);
  cfg.tile_size = j.value("tile_size", cfg.tile_size);
  cfg.tile_overlap = j.value("tile_overlap", cfg.tile_overlap);
  if (j.contains("scales")) cfg.scales = j.at("scales").get<std::vector<double>>();
  if (j.contains("size_filters")) {
    cfg.size_filters.clear();
    for (const auto& f : j.at("size_filters")) {
      if (f.is_null()) {
        cfg.size_filters.push_back(std::nullopt);
      } else {
        cfg.size_filters.push_back(SizeFilter{f.at(0).get<double>(), f.at(1).get<double>()});
      }
    }
  }
  if (j.contains("metrics")) {
    const auto& m = j.at("metrics");
    cfg.metrics.iou_threshold = m.value("iou_threshold", cfg.metrics.iou_threshold);
    cfg.metrics.std_as_bin_width = m.value("std_as_bin_width", cfg.metrics.std_as_bin_width);
    cfg.metrics.rotation_start = m.value("rotation_start", cfg.metrics.rotation_start);
    cfg.metrics.rotation_step = m.value("rotation_step", cfg.metrics.rotation_step);
    cfg.metrics.rotation_count = m.value("rotation_count", cfg.metrics.rotation_count);
  }
  validate(cfg.priors);
  return cfg;
}

inline ToolkitConfig load_config(const std::filesystem::path& path) {
  auto in = open_input(path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
  try {
    return config_from_json(j);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

// ---------------------------------------------------------------------------
// Scene / simulation configuration (JSON)

struct SimulateConfig {
  SceneConfig scene;
  OracleNoise noise;
};

inline SimulateConfig simulate_config_from_json(const nlohmann::json& j) {
  SimulateConfig cfg;
  cfg.scene.width = j.at("width").get<double>();
  cfg.scene.height = j.at("height").get<double>();
  cfg.scene.circular_region = j.value("circular_region", false);
  cfg.scene.margin = j.value("margin", cfg.scene.margin);
  cfg.scene.separation = j.value("separation", cfg.scene.separation);
  for (const auto& o : j.at("objects")) {
    SceneObjectSpec spec;
    spec.class_id = o.at("class_id").get<int>();
    spec.count = o.at("count").get<std::size_t>();
    spec.period = detail::parse_period(o.value("period", 360));
    for (const auto& s : o.at("sizes")) {
      spec.sizes.push_back(PriorSize{s.at(0).get<double>(), s.at(1).get<double>()});
    }
    cfg.scene.objects.push_back(std::move(spec));
  }
  if (j.contains("noise")) {
    const auto& n = j.at("noise");
    cfg.noise.score_base = n.value("score_base", cfg.noise.score_base);
    cfg.noise.score_noise = n.value("score_noise", cfg.noise.score_noise);
    cfg.noise.localization_noise = n.value("localization_noise", cfg.noise.localization_noise);
    cfg.noise.miss_rate = n.value("miss_rate", cfg.noise.miss_rate);
    cfg.noise.fp_count = n.value("fp_count", cfg.noise.fp_count);
    cfg.noise.fp_score = n.value("fp_score", cfg.noise.fp_score);
    cfg.noise.angle_score_bias = n.value("angle_score_bias", cfg.noise.angle_score_bias);
  }
  return cfg;
}

inline SimulateConfig load_simulate_config(const std::filesystem::path& path) {
  auto in = open_input(path);
  nlohmann::json j;
  try {
    in >> j;
    return simulate_config_from_json(j);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

// ---------------------------------------------------------------------------
// Evaluation report emission

inline nlohmann::json to_json(const EvalReport& rep) {
  nlohmann::json classes = nlohmann::json::array();
  for (const ClassReport& c : rep.classes) {
    classes.push_back({{"class", c.class_id},
                       {"gt_count", c.gt_count},
                       {"tp", c.tp},
                       {"fp", c.fp},
                       {"fn", c.fn},
                       {"ap", c.ap},
                       {"bep", c.bep}});
  }
  nlohmann::json j{{"classes", classes}, {"map", rep.map}};
  j["std_ap"] = rep.std_ap ? nlohmann::json(*rep.std_ap) : nlohmann::json(nullptr);
  j["std_as"] = rep.std_as ? nlohmann::json(*rep.std_as) : nlohmann::json(nullptr);
  return j;
}

/// Plain-text P-R table, one block per class, for external plotting.
inline void write_pr_table(std::ostream& out, const EvalReport& rep) {
  out << "# class score_threshold precision recall\n";
  for (const ClassReport& c : rep.classes) {
    for (const PrSample& s : c.pr) {
      char buf[128];
      std::snprintf(buf, sizeof buf, "%d %.6f %.6f %.6f", c.class_id, s.score_threshold,
                    s.precision, s.recall);
      out << buf << '\n';
    }
  }
}

// ---------------------------------------------------------------------------
// Record grouping + full evaluation over files

/// Groups detection/annotation records into per-(class, image) samples and
/// evaluates every class that has ground truth. Detections for classes
/// without any gt are skipped (AP is undefined there); callers may warn.
inline EvalReport evaluate_records(std::span<const DetectionRecord> dets,
                                   std::span<const AnnotationRecord> anns,
                                   double iou_threshold = 0.5, double std_as_bin_width = 30.0,
                                   const ClassPeriods& periods = {}) {
  std::map<int, std::map<std::string, ImageSample>> grouped;
  for (const AnnotationRecord& a : anns) grouped[a.class_id][a.image_id].gts.push_back(a.box);
  for (const DetectionRecord& d : dets) {
    auto cls = grouped.find(d.class_id);
    if (cls == grouped.end()) continue;  // no gt for this class anywhere
    cls->second[d.image_id].detections.push_back(Detection{d.box, d.score, d.class_id});
  }

  EvalReport rep;
  std::vector<double> aps;
  std::vector<double> bin_means;
  for (auto& [class_id, images] : grouped) {
    std::vector<ImageSample> samples;
    samples.reserve(images.size());
    for (auto& [id, sample] : images) samples.push_back(std::move(sample));
    ClassReport cr = evaluate_class(class_id, samples, iou_threshold);
    if (cr.gt_count == 0) continue;
    aps.push_back(cr.ap);

    // per-class angle-bin means feeding the pooled score-spread statistic
    std::vector<double> scores;
    std::vector<double> angles;
    const AnglePeriod period = periods.of(class_id);
    for (const ImageSample& s : samples) {
      const auto matches = match_detections(s.detections, s.gts, iou_threshold);
      const auto per_gt = matched_scores_per_gt(matches, s.gts.size());
      for (std::size_t g = 0; g < s.gts.size(); ++g) {
        scores.push_back(per_gt[g]);
        angles.push_back(s.gts[g].theta);
      }
    }
    if (!scores.empty()) {
      const auto means = angle_bin_means(scores, angles, std_as_bin_width, period);
      bin_means.insert(bin_means.end(), means.begin(), means.end());
    }
    rep.classes.push_back(std::move(cr));
  }
  if (!aps.empty()) rep.map = mean_ap(aps);
  if (!bin_means.empty()) rep.std_as = population_std(bin_means);
  return rep;
}

}  // namespace rbox
