// Copyright (C) 2026 rboxkit contributors
// SPDX-License-Identifier: Apache-2.0
//
// Greedy non-maximum suppression over scored rotated boxes, using exact
// IoU. A uniform grid over circumscribed boxes skips provably zero-IoU
// pairs, so results match the quadratic reference suppression exactly.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <span>
#include <stdexcept>
#include <unordered_map>
#include <vector>

#include "rbox/geometry.hpp"

namespace rbox {

struct Detection {
  RBox box;
  double score = 0.0;
  int class_id = 0;
};

inline void validate(const Detection& d) {
  validate(d.box);
  if (!std::isfinite(d.score) || d.score < 0.0 || d.score > 1.0) {
    throw std::invalid_argument("Detection score must be finite in [0, 1]");
  }
}

namespace detail {

// Uniform grid over circumscribed boxes. Cells are keyed by (cx, cy) packed
// into one 64-bit value; a box is registered in every cell its AABB touches.
class AABoxGrid {
 public:
  AABoxGrid(const AABox& extent, double cell) : cell_(cell), x0_(extent.xmin), y0_(extent.ymin) {}

  void insert(std::size_t id, const AABox& b) {
    visit_cells(b, [&](std::int64_t key) { cells_[key].push_back(id); });
  }

  template <typename Fn>
  void for_candidates(const AABox& b, Fn&& fn) {
    ++epoch_;
    visit_cells(b, [&](std::int64_t key) {
      auto it = cells_.find(key);
      if (it == cells_.end()) return;
      for (std::size_t id : it->second) {
        if (id < seen_.size() && seen_[id] == epoch_) continue;
        if (id >= seen_.size()) seen_.resize(id + 1, 0);
        seen_[id] = epoch_;
        fn(id);
      }
    });
  }

 private:
  template <typename Fn>
  void visit_cells(const AABox& b, Fn&& fn) {
    const auto cx0 = static_cast<std::int64_t>(std::floor((b.xmin - x0_) / cell_));
    const auto cx1 = static_cast<std::int64_t>(std::floor((b.xmax - x0_) / cell_));
    const auto cy0 = static_cast<std::int64_t>(std::floor((b.ymin - y0_) / cell_));
    const auto cy1 = static_cast<std::int64_t>(std::floor((b.ymax - y0_) / cell_));
    for (std::int64_t cy = cy0; cy <= cy1; ++cy) {
      for (std::int64_t cx = cx0; cx <= cx1; ++cx) {
        fn((cy << 32) ^ (cx & 0xffffffffll));
      }
    }
  }

  double cell_;
  double x0_, y0_;
  std::uint64_t epoch_ = 0;
  std::unordered_map<std::int64_t, std::vector<std::size_t>> cells_;
  std::vector<std::uint64_t> seen_;
};

}  // namespace detail

/// Greedy NMS: detections sorted by score (ties by input order), each kept
/// iff its IoU with every already-kept detection is <= iou_threshold.
/// Output preserves the score order. All detections must share one class.
inline std::vector<Detection> nms(std::span<const Detection> dets, double iou_threshold = 0.3) {
  if (!(iou_threshold >= 0.0 && iou_threshold <= 1.0)) {
    throw std::invalid_argument("nms: iou_threshold must lie in [0, 1]");
  }
  if (dets.empty()) return {};
  for (const Detection& d : dets) {
    validate(d);
    if (d.class_id != dets.front().class_id) {
      throw std::invalid_argument("nms: detections must share one class (run per class)");
    }
  }

  std::vector<std::size_t> order(dets.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return dets[a].score > dets[b].score;
  });

  std::vector<AABox> bounds(dets.size());
  AABox extent = circumscribe(dets.front().box);
  double max_side = 1.0;
  for (std::size_t i = 0; i < dets.size(); ++i) {
    bounds[i] = circumscribe(dets[i].box);
    extent = merge(extent, bounds[i]);
    max_side = std::max({max_side, bounds[i].width(), bounds[i].height()});
  }

  detail::AABoxGrid grid(extent, max_side);
  std::vector<std::size_t> kept;  // detection indices, score order
  kept.reserve(dets.size());
  for (std::size_t idx : order) {
    bool suppressed = false;
    grid.for_candidates(bounds[idx], [&](std::size_t kept_slot) {
      if (suppressed) return;
      const std::size_t other = kept[kept_slot];
      if (!bounds[idx].intersects(bounds[other])) return;
      if (iou(dets[idx].box, dets[other].box) > iou_threshold) suppressed = true;
    });
    if (!suppressed) {
      grid.insert(kept.size(), bounds[idx]);
      kept.push_back(idx);
    }
  }

  std::vector<Detection> out;
  out.reserve(kept.size());
  for (std::size_t idx : kept) out.push_back(dets[idx]);
  return out;
}

}  // namespace rbox
