// Copyright (C) 2026 rboxkit contributors
// SPDX-License-Identifier: Apache-2.0
//
#include "rbox/nms.hpp"

#include <gtest/gtest.h>

#include <numeric>
#include <vector>

#include "rbox/random.hpp"
#include "testutil.hpp"

namespace {

using rbox::Detection;
using rbox::RBox;

// Plain quadratic greedy reference, no spatial pruning.
std::vector<Detection> nms_reference(std::span<const Detection> dets, double threshold) {
  std::vector<std::size_t> order(dets.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return dets[a].score > dets[b].score; });
  std::vector<Detection> kept;
  for (std::size_t idx : order) {
    bool ok = true;
    for (const Detection& k : kept) {
      if (rbox::iou(dets[idx].box, k.box) > threshold) {
        ok = false;
        break;
      }
    }
    if (ok) kept.push_back(dets[idx]);
  }
  return kept;
}

bool same_detections(const std::vector<Detection>& a, const std::vector<Detection>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i].score != b[i].score || a[i].box.cx != b[i].box.cx || a[i].box.cy != b[i].box.cy ||
        a[i].box.w != b[i].box.w || a[i].box.h != b[i].box.h || a[i].box.theta != b[i].box.theta) {
      return false;
    }
  }
  return true;
}

std::vector<Detection> random_detections(rbox::Rng& rng, std::size_t n, double extent) {
  std::vector<Detection> dets;
  dets.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    dets.push_back(Detection{RBox{rng.uniform(0, extent), rng.uniform(0, extent),
                                  rng.uniform(5, 60), rng.uniform(5, 40), rng.uniform(0, 360)},
                             rng.uniform(0, 1), 0});
  }
  return dets;
}

TEST(Nms, IdenticalBoxesKeepHighestScore) {
  const RBox b{10, 10, 8, 4, 30};
  const std::vector<Detection> dets{{b, 0.9, 0}, {b, 0.8, 0}};
  const auto kept = rbox::nms(dets, 0.3);
  ASSERT_EQ(kept.size(), 1u);
  EXPECT_DOUBLE_EQ(kept[0].score, 0.9);
}

TEST(Nms, DisjointBoxesAllKept) {
  const std::vector<Detection> dets{{RBox{0, 0, 4, 2, 0}, 0.5, 0},
                                    {RBox{100, 0, 4, 2, 45}, 0.4, 0},
                                    {RBox{0, 100, 4, 2, 90}, 0.9, 0}};
  const auto kept = rbox::nms(dets, 0.3);
  EXPECT_EQ(kept.size(), 3u);
  // score order preserved
  EXPECT_DOUBLE_EQ(kept[0].score, 0.9);
  EXPECT_DOUBLE_EQ(kept[2].score, 0.4);
}

TEST(Nms, MatchesBruteForceOnRandomSets) {
  rbox::Rng rng(123);
  for (int it = 0; it < 60; ++it) {
    const std::size_t n = 1 + rng.index(100);
    const auto dets = random_detections(rng, n, 200.0);
    const double t = rng.uniform(0.0, 0.8);
    EXPECT_TRUE(same_detections(rbox::nms(dets, t), nms_reference(dets, t))) << "set " << it;
  }
}

TEST(Nms, OutputSubsetWithBoundedPairwiseIou) {
  rbox::Rng rng(321);
  const auto dets = random_detections(rng, 80, 150.0);
  const double t = 0.3;
  const auto kept = rbox::nms(dets, t);
  EXPECT_LE(kept.size(), dets.size());
  for (std::size_t i = 0; i < kept.size(); ++i) {
    for (std::size_t j = i + 1; j < kept.size(); ++j) {
      EXPECT_LE(rbox::iou(kept[i].box, kept[j].box), t);
    }
    EXPECT_GE(i == 0 ? 1.0 : kept[i - 1].score, kept[i].score);  // score order
  }
}

TEST(Nms, PairwiseSuppressionMonotoneInThreshold) {
  // for two detections the kept set can only grow as the threshold rises
  rbox::Rng rng(555);
  for (int it = 0; it < 200; ++it) {
    const auto [a, b] = rboxtest::random_box_pair(rng);
    const std::vector<Detection> dets{{a, 0.9, 0}, {b, 0.5, 0}};
    const auto lo = rbox::nms(dets, 0.2);
    const auto hi = rbox::nms(dets, 0.6);
    EXPECT_GE(hi.size(), lo.size());
  }
}

TEST(Nms, CoCenteredRotatedSquaresSuppressEachOther) {
  // exact IoU (not the angle-aware score) drives suppression: 0 vs 45
  // degree squares overlap at ~0.707 and must collapse at threshold 0.3
  const std::vector<Detection> dets{{RBox{50, 50, 20, 20, 0}, 0.9, 0},
                                    {RBox{50, 50, 20, 20, 45}, 0.8, 0}};
  const auto kept = rbox::nms(dets, 0.3);
  ASSERT_EQ(kept.size(), 1u);
  EXPECT_DOUBLE_EQ(kept[0].score, 0.9);
}

TEST(Nms, EqualScoresBreakTiesByInputOrder) {
  const RBox b{10, 10, 8, 4, 0};
  RBox shifted = b;
  shifted.cx += 1.0;
  const std::vector<Detection> dets{{b, 0.7, 0}, {shifted, 0.7, 0}};
  const auto kept = rbox::nms(dets, 0.3);
  ASSERT_EQ(kept.size(), 1u);
  EXPECT_DOUBLE_EQ(kept[0].box.cx, 10.0);
}

TEST(Nms, RejectsMixedClassesAndBadInputs) {
  const std::vector<Detection> mixed{{RBox{0, 0, 2, 2, 0}, 0.5, 0}, {RBox{9, 9, 2, 2, 0}, 0.5, 1}};
  EXPECT_THROW(rbox::nms(mixed, 0.3), std::invalid_argument);
  const std::vector<Detection> bad_score{{RBox{0, 0, 2, 2, 0}, 1.5, 0}};
  EXPECT_THROW(rbox::nms(bad_score, 0.3), std::invalid_argument);
  const std::vector<Detection> ok{{RBox{0, 0, 2, 2, 0}, 0.5, 0}};
  EXPECT_THROW(rbox::nms(ok, -0.1), std::invalid_argument);
  EXPECT_THROW(rbox::nms(ok, 1.5), std::invalid_argument);
}

TEST(Nms, EmptyInput) { EXPECT_TRUE(rbox::nms({}, 0.3).empty()); }

}  // namespace
