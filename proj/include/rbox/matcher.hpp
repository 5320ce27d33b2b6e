// Copyright (C) 2026 rboxkit contributors
// SPDX-License-Identifier: Apache-2.0
//
// Prior-to-ground-truth assignment via angle-related IoU, plus hard
// negative mining over confidence scores.

#pragma once

#include <algorithm>
#include <cstddef>
#include <limits>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "rbox/codec.hpp"
#include "rbox/geometry.hpp"
#include "rbox/priors.hpp"

namespace rbox {

struct MatchAssignment {
  std::vector<std::pair<std::size_t, std::size_t>> positive_pairs;  // (prior, gt)
  std::vector<std::size_t> negative_indices;

  std::size_t positive_count() const { return positive_pairs.size(); }
};

struct MatchOptions {
  double threshold = 0.5;
  // Force-assign every otherwise unmatched gt its best (non-singular, not
  // already positive) prior. Keeps gts lying between angle bins trainable.
  bool best_match_guarantee = true;
};

/// Threshold matching: a prior is positive for its argmax-ArIoU gt when that
/// value is strictly above the threshold (ties broken toward the lower gt
/// index). With the best-match guarantee, unmatched gts then claim their
/// best remaining prior whose encode precondition holds. Each prior is
/// assigned at most once; pairs come back sorted by prior index.
inline MatchAssignment match(std::span<const RBox> priors, std::span<const RBox> gts,
                             AnglePeriod period, const MatchOptions& opt = {}) {
  MatchAssignment out;
  if (priors.empty() || gts.empty()) return out;

  // Cache gt AABBs for the zero-overlap fast path. ArIoU realigns the prior
  // to the gt angle, so the prior's reach is bounded by its circumradius.
  std::vector<AABox> gt_bounds(gts.size());
  for (std::size_t j = 0; j < gts.size(); ++j) gt_bounds[j] = circumscribe(gts[j]);

  auto pair_score = [&](std::size_t i, std::size_t j) {
    const RBox& p = priors[i];
    const double reach = 0.5 * std::hypot(p.w, p.h);
    const AABox& g = gt_bounds[j];
    if (p.cx + reach < g.xmin || p.cx - reach > g.xmax || p.cy + reach < g.ymin ||
        p.cy - reach > g.ymax) {
      return 0.0;  // realigned prior cannot touch the gt
    }
    return ariou(p, gts[j], period);
  };

  std::vector<char> prior_taken(priors.size(), 0);
  std::vector<char> gt_matched(gts.size(), 0);
  for (std::size_t i = 0; i < priors.size(); ++i) {
    double best = -1.0;
    std::size_t best_j = 0;
    for (std::size_t j = 0; j < gts.size(); ++j) {
      const double v = pair_score(i, j);
      if (v > best) {
        best = v;
        best_j = j;
      }
    }
    if (best > opt.threshold) {
      out.positive_pairs.emplace_back(i, best_j);
      prior_taken[i] = 1;
      gt_matched[best_j] = 1;
    }
  }

  if (opt.best_match_guarantee) {
    for (std::size_t j = 0; j < gts.size(); ++j) {
      if (gt_matched[j]) continue;
      double best = -1.0;
      std::size_t best_i = priors.size();
      for (std::size_t i = 0; i < priors.size(); ++i) {
        if (prior_taken[i] || !can_encode(gts[j], priors[i])) continue;
        const double v = pair_score(i, j);
        if (v > best) {
          best = v;
          best_i = i;
        }
      }
      if (best_i < priors.size()) {
        out.positive_pairs.emplace_back(best_i, j);
        prior_taken[best_i] = 1;
        gt_matched[j] = 1;
      }
    }
    std::sort(out.positive_pairs.begin(), out.positive_pairs.end());
  }
  return out;
}

inline MatchAssignment match(const PriorSet& priors, std::span<const RBox> gts,
                             const MatchOptions& opt = {}) {
  return match(std::span<const RBox>(priors.priors), gts, priors.config.angle_period, opt);
}

/// Hard negative mining: among non-positive priors, the ratio*N with the
/// highest object softmax score, ties broken toward the lower prior index.
/// Returns all candidates when fewer exist.
inline std::vector<std::size_t> mine_negatives(std::span<const ConfidenceVector> confidences,
                                               const MatchAssignment& matches,
                                               double ratio = 3.0) {
  if (ratio < 0.0) throw std::invalid_argument("mine_negatives: ratio must be >= 0");
  std::vector<char> positive(confidences.size(), 0);
  for (const auto& [prior, gt] : matches.positive_pairs) {
    if (prior >= confidences.size()) {
      throw std::out_of_range("mine_negatives: positive prior index out of bounds");
    }
    positive[prior] = 1;
  }
  std::vector<std::size_t> candidates;
  candidates.reserve(confidences.size());
  for (std::size_t i = 0; i < confidences.size(); ++i) {
    if (!positive[i]) candidates.push_back(i);
  }
  const auto want = static_cast<std::size_t>(
      std::llround(ratio * static_cast<double>(matches.positive_count())));
  const std::size_t take = std::min(want, candidates.size());
  std::partial_sort(candidates.begin(), candidates.begin() + static_cast<std::ptrdiff_t>(take),
                    candidates.end(), [&](std::size_t a, std::size_t b) {
                      const double sa = object_score(confidences[a]);
                      const double sb = object_score(confidences[b]);
                      if (sa != sb) return sa > sb;
                      return a < b;
                    });
  candidates.resize(take);
  return candidates;
}

}  // namespace rbox
