// Copyright (C) 2026 rboxkit contributors
// SPDX-License-Identifier: Apache-2.0
//
// Offset encoding / decoding between boxes and priors, and the training
// loss terms (softmax confidence loss, smooth-L1 box regression loss).
// Pure functions, no framework dependencies.

#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>

#include "rbox/geometry.hpp"

namespace rbox {

/// Regression target / prediction: center offsets normalized by the prior
/// size, log size ratios, and tan of the angle difference.
struct OffsetVector {
  double dcx = 0.0;
  double dcy = 0.0;
  double dw = 0.0;
  double dh = 0.0;
  double da = 0.0;
};

/// Two-class logits: index 0 background, index 1 object.
struct ConfidenceVector {
  double background = 0.0;
  double object = 0.0;
};

enum class SampleLabel : int { background = 0, object = 1 };

/// Angle differences within this margin of the tan pole are rejected.
inline constexpr double kEncodeAngleMarginDeg = 1e-6;

inline bool can_encode(const RBox& gt, const RBox& prior) {
  return std::fabs(wrap_half_turn(gt.theta - prior.theta)) < 90.0 - kEncodeAngleMarginDeg;
}

/// Offsets of `gt` relative to `prior`. Throws std::domain_error when the
/// wrapped angle difference is within kEncodeAngleMarginDeg of 90 degrees;
/// a near-pole encode signals a configuration bug, not data noise.
inline OffsetVector encode(const RBox& gt, const RBox& prior) {
  const double d = wrap_half_turn(gt.theta - prior.theta);
  if (!(std::fabs(d) < 90.0 - kEncodeAngleMarginDeg)) {
    throw std::domain_error("encode: angle difference at the tan singularity (|d| ~ 90 deg)");
  }
  return OffsetVector{
      (gt.cx - prior.cx) / prior.w,
      (gt.cy - prior.cy) / prior.h,
      std::log(gt.w / prior.w),
      std::log(gt.h / prior.h),
      std::tan(deg_to_rad(d)),
  };
}

/// Inverse of encode. atan lands in (-90, 90), so the decoded angle stays
/// within a half period of the prior before normalization.
inline RBox decode(const OffsetVector& o, const RBox& prior,
                   AnglePeriod period = AnglePeriod::deg360) {
  if (!std::isfinite(o.dcx) || !std::isfinite(o.dcy) || !std::isfinite(o.dw) ||
      !std::isfinite(o.dh) || !std::isfinite(o.da)) {
    throw std::invalid_argument("decode: offsets must be finite");
  }
  return RBox{
      prior.cx + o.dcx * prior.w,
      prior.cy + o.dcy * prior.h,
      prior.w * std::exp(o.dw),
      prior.h * std::exp(o.dh),
      normalize_angle(prior.theta + rad_to_deg(std::atan(o.da)), period),
  };
}

inline double smooth_l1(double x) {
  const double a = std::fabs(x);
  return a < 1.0 ? 0.5 * x * x : a - 0.5;
}

/// d/dx smooth_l1: x inside the quadratic region, sign(x) outside.
inline double smooth_l1_grad(double x) {
  const double a = std::fabs(x);
  if (a < 1.0) return x;
  return x > 0.0 ? 1.0 : -1.0;
}

/// Unnormalized box regression loss: smooth-L1 summed over the five offset
/// fields of every matched pair. Normalization by the match count happens
/// in total_loss.
inline double rbox_loss(std::span<const OffsetVector> predicted,
                        std::span<const OffsetVector> target) {
  if (predicted.size() != target.size()) {
    throw std::invalid_argument("rbox_loss: predicted/target size mismatch");
  }
  double sum = 0.0;
  for (std::size_t i = 0; i < predicted.size(); ++i) {
    sum += smooth_l1(predicted[i].dcx - target[i].dcx);
    sum += smooth_l1(predicted[i].dcy - target[i].dcy);
    sum += smooth_l1(predicted[i].dw - target[i].dw);
    sum += smooth_l1(predicted[i].dh - target[i].dh);
    sum += smooth_l1(predicted[i].da - target[i].da);
  }
  return sum;
}

/// Softmax probability of the object class; numerically stable.
inline double object_score(const ConfidenceVector& c) {
  return 1.0 / (1.0 + std::exp(c.background - c.object));
}

/// Two-class softmax cross-entropy summed over the selected samples
/// (positives plus mined negatives).
inline double conf_loss(std::span<const ConfidenceVector> confidences,
                        std::span<const SampleLabel> labels) {
  if (confidences.empty()) throw std::invalid_argument("conf_loss: empty selection");
  if (confidences.size() != labels.size()) {
    throw std::invalid_argument("conf_loss: confidences/labels size mismatch");
  }
  double sum = 0.0;
  for (std::size_t i = 0; i < confidences.size(); ++i) {
    const double l0 = confidences[i].background;
    const double l1 = confidences[i].object;
    const double m = std::max(l0, l1);
    const double lse = m + std::log(std::exp(l0 - m) + std::exp(l1 - m));
    const double correct = labels[i] == SampleLabel::object ? l1 : l0;
    sum += lse - correct;
  }
  return sum;
}

/// (conf + rbox_weight * rbox) / N; zero when no priors matched.
inline double total_loss(double conf, double rbox, std::size_t matched_count,
                         double rbox_weight = 1.0) {
  if (matched_count == 0) return 0.0;
  return (conf + rbox_weight * rbox) / static_cast<double>(matched_count);
}

}  // namespace rbox
