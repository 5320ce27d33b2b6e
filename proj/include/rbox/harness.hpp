// Copyright (C) 2026 rboxkit contributors
// SPDX-License-Identifier: Apache-2.0
//
// Synthetic verification harness: Monte-Carlo IoU estimation, seeded scene
// generation with non-overlapping objects, a scene rotation operator, and
// simulated per-tile detectors with configurable noise. Everything is
// deterministic given (inputs, seed).

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "rbox/geometry.hpp"
#include "rbox/pipeline.hpp"
#include "rbox/priors.hpp"
#include "rbox/random.hpp"

namespace rbox {

struct McEstimate {
  double value = 0.0;
  double std_error = 0.0;
  std::uint64_t samples = 0;
  std::uint64_t union_hits = 0;
  std::uint64_t inter_hits = 0;
};

namespace detail {

struct BoxFrame {
  double cx, cy;    // center
  double ux, uy;    // unit width axis
  double hw, hh;    // half extents
  bool contains(double x, double y) const {
    const double dx = x - cx;
    const double dy = y - cy;
    const double a = dx * ux + dy * uy;
    const double b = -dx * uy + dy * ux;
    return a >= -hw && a <= hw && b >= -hh && b <= hh;
  }
};

inline BoxFrame box_frame(const RBox& b) {
  const double r = deg_to_rad(b.theta);
  return BoxFrame{b.cx, b.cy, std::cos(r), std::sin(r), b.w * 0.5, b.h * 0.5};
}

}  // namespace detail

/// Monte-Carlo IoU oracle: uniform points over the circumscribed box of the
/// union, ratio of intersection hits to union hits. The standard error uses
/// the Agresti-Coull smoothed proportion so it stays positive at 0/1.
/// Disjoint circumscribed boxes short-circuit to an exact zero.
inline McEstimate mc_iou(const RBox& a, const RBox& b, std::uint64_t samples, std::uint64_t seed) {
  if (samples < 10000) throw std::invalid_argument("mc_iou: need at least 1e4 samples");
  validate(a);
  validate(b);
  McEstimate est;
  est.samples = samples;
  const AABox ba = circumscribe(a);
  const AABox bb = circumscribe(b);
  if (!ba.intersects(bb)) return est;  // disjoint -> exactly zero

  const AABox ext = merge(ba, bb);
  const detail::BoxFrame fa = detail::box_frame(a);
  const detail::BoxFrame fb = detail::box_frame(b);
  std::mt19937_64 eng(seed);
  const double w = ext.width(), h = ext.height();
  std::uint64_t in_union = 0, in_inter = 0;
  for (std::uint64_t i = 0; i < samples; ++i) {
    const double x = ext.xmin + w * (static_cast<double>(eng() >> 11) * 0x1.0p-53);
    const double y = ext.ymin + h * (static_cast<double>(eng() >> 11) * 0x1.0p-53);
    const bool ia = fa.contains(x, y);
    const bool ib = fb.contains(x, y);
    if (ia || ib) {
      ++in_union;
      if (ia && ib) ++in_inter;
    }
  }
  est.union_hits = in_union;
  est.inter_hits = in_inter;
  if (in_union == 0) return est;
  est.value = static_cast<double>(in_inter) / static_cast<double>(in_union);
  const double n = static_cast<double>(in_union);
  const double p_smooth = (static_cast<double>(in_inter) + 0.5) / (n + 1.0);
  est.std_error = std::sqrt(p_smooth * (1.0 - p_smooth) / n);
  return est;
}

/// Ground-truth object: box, class, and the class's angle period.
struct Annotation {
  RBox box;
  int class_id = 0;
  AnglePeriod period = AnglePeriod::deg360;
};

struct Scene {
  double width = 0.0;
  double height = 0.0;
  std::uint64_t seed = 0;
  std::vector<Annotation> objects;
};

struct SceneObjectSpec {
  int class_id = 0;
  std::size_t count = 0;
  std::vector<PriorSize> sizes;  // sampled uniformly per object
  AnglePeriod period = AnglePeriod::deg360;
};

struct SceneConfig {
  double width = 0.0;
  double height = 0.0;
  std::vector<SceneObjectSpec> objects;
  // Placement inside the inscribed disc keeps every object in bounds under
  // arbitrary scene rotation (the substrate for the rotation sweeps).
  bool circular_region = false;
  double margin = 2.0;      // distance kept from the boundary, pixels
  double separation = 1.0;  // minimum slack between objects, pixels
  std::size_t retries_per_object = 1000;
};

namespace detail {

inline bool overlaps_any(const RBox& candidate, std::span<const Annotation> placed,
                         double separation) {
  RBox inflated = candidate;
  inflated.w += 2.0 * separation;
  inflated.h += 2.0 * separation;
  const AABox cb = circumscribe(inflated);
  for (const Annotation& a : placed) {
    if (!cb.intersects(circumscribe(a.box))) continue;
    if (iou(inflated, a.box) > 0.0) return true;
  }
  return false;
}

}  // namespace detail

/// Rejection-samples non-overlapping placements. Deterministic per seed;
/// throws std::runtime_error when an object cannot be placed within the
/// retry budget.
inline Scene generate_scene(const SceneConfig& cfg, std::uint64_t seed) {
  if (!(cfg.width > 0.0) || !(cfg.height > 0.0)) {
    throw std::invalid_argument("generate_scene: scene size must be positive");
  }
  Scene scene;
  scene.width = cfg.width;
  scene.height = cfg.height;
  scene.seed = seed;
  const double ccx = cfg.width / 2.0, ccy = cfg.height / 2.0;
  const double disc_r = std::min(ccx, ccy) - cfg.margin;

  std::uint64_t stream = 0;
  for (const SceneObjectSpec& spec : cfg.objects) {
    if (spec.sizes.empty()) throw std::invalid_argument("generate_scene: object spec needs sizes");
    for (std::size_t k = 0; k < spec.count; ++k, ++stream) {
      Rng rng(derive_seed(seed, stream));
      bool placed = false;
      for (std::size_t attempt = 0; attempt < cfg.retries_per_object; ++attempt) {
        const PriorSize sz = spec.sizes[rng.index(spec.sizes.size())];
        const double theta =
            normalize_angle(rng.uniform(0.0, period_degrees(spec.period)), spec.period);
        const double radius = 0.5 * std::hypot(sz.w, sz.h);
        RBox box{0.0, 0.0, sz.w, sz.h, theta};
        if (cfg.circular_region) {
          const double max_r = disc_r - radius;
          if (max_r <= 0.0) throw std::runtime_error("generate_scene: object too large for region");
          // uniform over the disc
          const double rr = max_r * std::sqrt(rng.uniform());
          const double phi = rng.uniform(0.0, 360.0);
          box.cx = ccx + rr * std::cos(deg_to_rad(phi));
          box.cy = ccy + rr * std::sin(deg_to_rad(phi));
        } else {
          const double lo_x = cfg.margin + radius, hi_x = cfg.width - cfg.margin - radius;
          const double lo_y = cfg.margin + radius, hi_y = cfg.height - cfg.margin - radius;
          if (lo_x >= hi_x || lo_y >= hi_y) {
            throw std::runtime_error("generate_scene: object too large for region");
          }
          box.cx = rng.uniform(lo_x, hi_x);
          box.cy = rng.uniform(lo_y, hi_y);
        }
        if (!detail::overlaps_any(box, scene.objects, cfg.separation)) {
          scene.objects.push_back(Annotation{box, spec.class_id, spec.period});
          placed = true;
          break;
        }
      }
      if (!placed) {
        throw std::runtime_error("generate_scene: placement failed after retry budget");
      }
    }
  }
  return scene;
}

/// Rotates a scene about its center: centers move rigidly, orientation
/// angles shift by phi modulo each object's period. Pairwise geometry is
/// preserved, which makes rotated scenes exact substrates for the
/// rotation-robustness metrics.
inline Scene rotated(const Scene& scene, double phi_deg) {
  Scene out = scene;
  const double r = deg_to_rad(phi_deg);
  const double c = std::cos(r), s = std::sin(r);
  const double ccx = scene.width / 2.0, ccy = scene.height / 2.0;
  for (Annotation& a : out.objects) {
    const double dx = a.box.cx - ccx;
    const double dy = a.box.cy - ccy;
    a.box.cx = ccx + c * dx - s * dy;
    a.box.cy = ccy + s * dx + c * dy;
    a.box.theta = normalize_angle(a.box.theta + phi_deg, a.period);
  }
  return out;
}

/// Noise model for the simulated detector. All randomness is drawn from
/// per-object streams, so a given object is perturbed identically from
/// every tile that sees it.
struct OracleNoise {
  double score_base = 0.9;        // score of an unperturbed true detection
  double score_noise = 0.0;       // gaussian sigma added to scores
  double localization_noise = 0.0;  // gaussian sigma, pixels, in the gt frame
  double miss_rate = 0.0;         // per-object Bernoulli miss probability
  std::size_t fp_count = 0;       // scene-wide injected false positives
  double fp_score = 0.95;         // score of injected false positives
  double angle_score_bias = 0.0;  // score penalty factor * |sin(theta)|
};

namespace detail {

struct Emission {
  RBox box;  // global coordinates
  double score;
  int class_id;
};

inline std::vector<Emission> oracle_emissions(const Scene& scene, const OracleNoise& noise,
                                              std::uint64_t seed) {
  std::vector<Emission> out;
  out.reserve(scene.objects.size() + noise.fp_count);
  for (std::size_t k = 0; k < scene.objects.size(); ++k) {
    const Annotation& a = scene.objects[k];
    Rng rng(derive_seed(seed, k));
    if (noise.miss_rate > 0.0 && rng.uniform() < noise.miss_rate) continue;
    RBox box = a.box;
    if (noise.localization_noise > 0.0) {
      // jitter along the object's own axes so the perturbation magnitude is
      // rotation equivariant by construction
      const double da = rng.normal(0.0, noise.localization_noise);
      const double db = rng.normal(0.0, noise.localization_noise);
      const double t = deg_to_rad(box.theta);
      box.cx += da * std::cos(t) - db * std::sin(t);
      box.cy += da * std::sin(t) + db * std::cos(t);
    }
    double score = noise.score_base;
    if (noise.angle_score_bias > 0.0) {
      score -= noise.angle_score_bias * std::fabs(std::sin(deg_to_rad(a.box.theta)));
    }
    if (noise.score_noise > 0.0) score += rng.normal(0.0, noise.score_noise);
    score = std::clamp(score, 0.0, 1.0);
    out.push_back(Emission{box, score, a.class_id});
  }

  // Injected false positives: placed clear of every gt (and each other) so
  // they can never match or suppress a true detection.
  std::vector<Annotation> occupied = scene.objects;
  for (std::size_t f = 0; f < noise.fp_count; ++f) {
    Rng rng(derive_seed(seed ^ 0x5a5a5a5a5a5a5a5aull, f));
    const Annotation& tpl =
        scene.objects.empty() ? Annotation{RBox{0, 0, 30, 10, 0}, 0, AnglePeriod::deg360}
                              : scene.objects[rng.index(scene.objects.size())];
    bool placed = false;
    for (std::size_t attempt = 0; attempt < 1000 && !placed; ++attempt) {
      RBox box = tpl.box;
      const double radius = 0.5 * std::hypot(box.w, box.h);
      box.cx = rng.uniform(radius, scene.width - radius);
      box.cy = rng.uniform(radius, scene.height - radius);
      box.theta = normalize_angle(rng.uniform(0.0, period_degrees(tpl.period)), tpl.period);
      if (!overlaps_any(box, occupied, 1.0)) {
        occupied.push_back(Annotation{box, tpl.class_id, tpl.period});
        out.push_back(Emission{box, noise.fp_score, tpl.class_id});
        placed = true;
      }
    }
    if (!placed) throw std::runtime_error("oracle_detector: false-positive placement failed");
  }
  return out;
}

}  // namespace detail

/// Simulated per-tile detector derived from the scene's ground truth: a
/// tile reports every (possibly perturbed) object whose center falls in its
/// bounds, in tile-local coordinates. With zero noise it is exact and
/// rotation equivariant.
inline TileDetector oracle_detector(const Scene& scene, const OracleNoise& noise,
                                    std::uint64_t seed) {
  if (noise.miss_rate < 0.0 || noise.miss_rate > 1.0) {
    throw std::invalid_argument("oracle_detector: miss_rate must lie in [0, 1]");
  }
  if (noise.score_noise < 0.0 || noise.localization_noise < 0.0) {
    throw std::invalid_argument("oracle_detector: noise sigmas must be >= 0");
  }
  auto emissions = detail::oracle_emissions(scene, noise, seed);
  return [emissions](const Tile& tile) {
    std::vector<Detection> dets;
    for (const detail::Emission& e : emissions) {
      const RBox local = to_tile(e.box, tile);
      if (local.cx < 0.0 || local.cx >= tile.w || local.cy < 0.0 || local.cy >= tile.h) continue;
      dets.push_back(Detection{local, e.score, e.class_id});
    }
    return dets;
  };
}

}  // namespace rbox
