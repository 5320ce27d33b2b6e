// Copyright (C) 2026 rboxkit contributors
// SPDX-License-Identifier: Apache-2.0
//
// Prints IoU / ArIoU values for a co-centered pair swept over angle
// differences — the quickest way to see why matching uses the angle-aware
// overlap while suppression uses the exact one.

#include <cstdio>

#include "rbox/geometry.hpp"

int main() {
  const rbox::RBox base{0, 0, 40, 14, 0};
  std::printf("%8s %12s %12s %12s\n", "delta", "iou", "ariou_360", "ariou_180");
  for (int d = 0; d <= 180; d += 15) {
    const rbox::RBox turned{0, 0, 40, 14, static_cast<double>(d)};
    std::printf("%8d %12.6f %12.6f %12.6f\n", d, rbox::iou(turned, base),
                rbox::ariou(turned, base, rbox::AnglePeriod::deg360),
                rbox::ariou(turned, base, rbox::AnglePeriod::deg180));
  }
  return 0;
}
