// Copyright (C) 2026 rboxkit contributors
// SPDX-License-Identifier: Apache-2.0
//
// Detection evaluation: greedy IoU matching, precision-recall curves, AP,
// break-even point, mAP, and the rotation-robustness statistics (standard
// deviation of AP across input rotations, standard deviation of per-angle
// average scores).

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <numeric>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "rbox/geometry.hpp"
#include "rbox/nms.hpp"

namespace rbox {

enum class MatchOutcome { true_positive, false_positive, false_negative };

struct EvalMatch {
  std::optional<std::size_t> detection_index;  // empty for FN rows
  std::optional<std::size_t> gt_index;         // empty for FP rows
  double iou = 0.0;
  double score = 0.0;  // detection score; 0 for FN rows
  MatchOutcome outcome = MatchOutcome::false_negative;
};

/// Greedy matching by descending score (ties by input order): a detection
/// claims the highest-IoU unconsumed gt when that IoU is strictly above the
/// threshold, otherwise it is a false positive. Unconsumed gts become false
/// negatives. Single class, single image.
inline std::vector<EvalMatch> match_detections(std::span<const Detection> dets,
                                               std::span<const RBox> gts,
                                               double iou_threshold = 0.5) {
  std::vector<std::size_t> order(dets.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return dets[a].score > dets[b].score; });

  std::vector<EvalMatch> out;
  out.reserve(dets.size() + gts.size());
  std::vector<char> consumed(gts.size(), 0);
  for (std::size_t idx : order) {
    double best = 0.0;
    std::size_t best_j = gts.size();
    for (std::size_t j = 0; j < gts.size(); ++j) {
      if (consumed[j]) continue;
      const double v = iou(dets[idx].box, gts[j]);
      if (v > best) {
        best = v;
        best_j = j;
      }
    }
    EvalMatch m;
    m.detection_index = idx;
    m.score = dets[idx].score;
    if (best_j < gts.size() && best > iou_threshold) {
      consumed[best_j] = 1;
      m.gt_index = best_j;
      m.iou = best;
      m.outcome = MatchOutcome::true_positive;
    } else {
      m.outcome = MatchOutcome::false_positive;
    }
    out.push_back(m);
  }
  for (std::size_t j = 0; j < gts.size(); ++j) {
    if (consumed[j]) continue;
    EvalMatch m;
    m.gt_index = j;
    m.outcome = MatchOutcome::false_negative;
    out.push_back(m);
  }
  return out;
}

struct PrSample {
  double precision = 0.0;
  double recall = 0.0;
  double score_threshold = 0.0;
};

/// Precision-recall samples swept over the distinct detection scores,
/// descending (threshold semantics: score >= threshold is accepted).
inline std::vector<PrSample> pr_curve(std::span<const EvalMatch> matches, std::size_t total_gt) {
  if (total_gt == 0) throw std::invalid_argument("pr_curve: total_gt must be >= 1");
  std::vector<std::pair<double, bool>> scored;  // (score, is_tp)
  for (const EvalMatch& m : matches) {
    if (m.outcome == MatchOutcome::true_positive) {
      scored.emplace_back(m.score, true);
    } else if (m.outcome == MatchOutcome::false_positive) {
      scored.emplace_back(m.score, false);
    }
  }
  std::sort(scored.begin(), scored.end(),
            [](const auto& a, const auto& b) { return a.first > b.first; });

  std::vector<PrSample> pr;
  std::size_t tp = 0, fp = 0;
  for (std::size_t i = 0; i < scored.size(); ++i) {
    if (scored[i].second) {
      ++tp;
    } else {
      ++fp;
    }
    const bool last_of_threshold = i + 1 == scored.size() || scored[i + 1].first != scored[i].first;
    if (last_of_threshold) {
      PrSample s;
      s.score_threshold = scored[i].first;
      s.precision = static_cast<double>(tp) / static_cast<double>(tp + fp);
      s.recall = static_cast<double>(tp) / static_cast<double>(total_gt);
      pr.push_back(s);
    }
  }
  return pr;
}

/// Area under the P-R curve, raw trapezoid over recall. The curve is
/// anchored at (recall 0, precision of the first sample); an empty curve or
/// one that never achieves recall has zero area.
inline double average_precision(std::span<const PrSample> pr) {
  if (pr.empty()) return 0.0;
  double ap = 0.0;
  double prev_r = 0.0;
  double prev_p = pr.front().precision;
  for (const PrSample& s : pr) {
    ap += (s.recall - prev_r) * 0.5 * (s.precision + prev_p);
    prev_r = s.recall;
    prev_p = s.precision;
  }
  return ap;
}

/// Break-even point: the value where precision equals recall, linearly
/// interpolated along the P-R polyline; when no segment crosses, the sample
/// minimizing |precision - recall| (reported as the midpoint of the two).
/// Equal-gap candidates resolve to the highest value.
inline double break_even_point(std::span<const PrSample> pr) {
  if (pr.empty()) return 0.0;
  double best_gap = std::numeric_limits<double>::infinity();
  double best_value = 0.0;
  auto consider = [&](double p, double r) {
    constexpr double tie = 1e-12;
    const double gap = std::fabs(p - r);
    const double value = 0.5 * (p + r);
    if (gap + tie < best_gap || (gap < best_gap + tie && value > best_value)) {
      best_gap = std::min(best_gap, gap);
      best_value = value;
    }
  };
  consider(pr.front().precision, pr.front().recall);
  for (std::size_t i = 1; i < pr.size(); ++i) {
    const double p0 = pr[i - 1].precision, r0 = pr[i - 1].recall;
    const double p1 = pr[i].precision, r1 = pr[i].recall;
    const double g0 = p0 - r0, g1 = p1 - r1;
    if ((g0 <= 0.0 && g1 >= 0.0) || (g0 >= 0.0 && g1 <= 0.0)) {
      const double t = (g0 == g1) ? 0.0 : g0 / (g0 - g1);
      const double p = p0 + t * (p1 - p0);
      const double r = r0 + t * (r1 - r0);
      consider(p, r);
    }
    consider(p1, r1);
  }
  return best_value;
}

inline double mean_ap(std::span<const double> per_class_ap) {
  if (per_class_ap.empty()) throw std::invalid_argument("mean_ap: need at least one class");
  return std::accumulate(per_class_ap.begin(), per_class_ap.end(), 0.0) /
         static_cast<double>(per_class_ap.size());
}

inline double population_std(std::span<const double> values) {
  if (values.empty()) throw std::invalid_argument("population_std: empty input");
  const bool all_equal =
      std::all_of(values.begin(), values.end(), [&](double v) { return v == values.front(); });
  if (all_equal) return 0.0;  // keeps identical inputs at an exact zero
  const double mean =
      std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
  double acc = 0.0;
  for (double v : values) acc += (v - mean) * (v - mean);
  return std::sqrt(acc / static_cast<double>(values.size()));
}

/// The rotation sweep: 0:10:350 by default.
inline std::vector<double> sweep_angles(double start = 0.0, double step = 10.0,
                                        std::size_t count = 36) {
  std::vector<double> a(count);
  for (std::size_t i = 0; i < count; ++i) a[i] = start + step * static_cast<double>(i);
  return a;
}

/// Population standard deviation of AP over a rotated test-set sweep.
inline double std_ap(const std::function<double(double angle_deg)>& ap_at_angle,
                     std::span<const double> angles) {
  if (angles.empty()) throw std::invalid_argument("std_ap: empty angle sweep");
  std::vector<double> aps;
  aps.reserve(angles.size());
  for (double a : angles) aps.push_back(ap_at_angle(a));
  return population_std(aps);
}

/// Matched detection score per gt (zero when missed), indexed like the gt
/// list that produced `matches`.
inline std::vector<double> matched_scores_per_gt(std::span<const EvalMatch> matches,
                                                 std::size_t gt_count) {
  std::vector<double> scores(gt_count, 0.0);
  for (const EvalMatch& m : matches) {
    if (m.outcome == MatchOutcome::true_positive && m.gt_index && *m.gt_index < gt_count) {
      scores[*m.gt_index] = m.score;
    }
  }
  return scores;
}

/// Mean score per angle bin; bins partition [0, period) at bin_width
/// degrees and empty bins are dropped.
inline std::vector<double> angle_bin_means(std::span<const double> gt_scores,
                                           std::span<const double> gt_angles, double bin_width,
                                           AnglePeriod period) {
  if (gt_scores.size() != gt_angles.size()) {
    throw std::invalid_argument("angle_bin_means: scores/angles size mismatch");
  }
  if (!(bin_width > 0.0)) throw std::invalid_argument("angle_bin_means: bin_width must be positive");
  const auto bins = static_cast<std::size_t>(std::ceil(period_degrees(period) / bin_width));
  std::vector<double> sum(bins, 0.0);
  std::vector<std::size_t> count(bins, 0);
  for (std::size_t i = 0; i < gt_scores.size(); ++i) {
    auto b = static_cast<std::size_t>(normalize_angle(gt_angles[i], period) / bin_width);
    if (b >= bins) b = bins - 1;
    sum[b] += gt_scores[i];
    ++count[b];
  }
  std::vector<double> means;
  means.reserve(bins);
  for (std::size_t b = 0; b < bins; ++b) {
    if (count[b] > 0) means.push_back(sum[b] / static_cast<double>(count[b]));
  }
  return means;
}

/// Population standard deviation of the per-angle-bin mean matched score.
inline double std_as(std::span<const double> gt_scores, std::span<const double> gt_angles,
                     double bin_width = 30.0, AnglePeriod period = AnglePeriod::deg360) {
  if (gt_scores.empty()) throw std::invalid_argument("std_as: no ground truths");
  return population_std(angle_bin_means(gt_scores, gt_angles, bin_width, period));
}

struct ClassReport {
  int class_id = 0;
  std::size_t gt_count = 0;
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;
  double ap = 0.0;
  double bep = 0.0;
  std::vector<PrSample> pr;
};

struct EvalReport {
  std::vector<ClassReport> classes;
  double map = 0.0;
  std::optional<double> std_ap;
  std::optional<double> std_as;
};

/// Detections and ground truths of one image (single class).
struct ImageSample {
  std::vector<Detection> detections;
  std::vector<RBox> gts;
};

/// Per-class evaluation across images: per-image greedy matching, pooled
/// P-R sweep over the union of detections.
inline ClassReport evaluate_class(int class_id, std::span<const ImageSample> images,
                                  double iou_threshold = 0.5) {
  ClassReport rep;
  rep.class_id = class_id;
  std::vector<EvalMatch> all;
  for (const ImageSample& img : images) {
    rep.gt_count += img.gts.size();
    const std::vector<EvalMatch> matches =
        match_detections(img.detections, img.gts, iou_threshold);
    for (const EvalMatch& m : matches) {
      switch (m.outcome) {
        case MatchOutcome::true_positive: ++rep.tp; break;
        case MatchOutcome::false_positive: ++rep.fp; break;
        case MatchOutcome::false_negative: ++rep.fn; break;
      }
      all.push_back(m);
    }
  }
  if (rep.gt_count > 0) {
    rep.pr = pr_curve(all, rep.gt_count);
    rep.ap = average_precision(rep.pr);
    rep.bep = break_even_point(rep.pr);
  }
  return rep;
}

}  // namespace rbox
