// Copyright (C) 2026 rboxkit contributors
// SPDX-License-Identifier: Apache-2.0
//
// End-to-end walkthrough: generate a synthetic scene, run a simulated
// detector through the tiling pipeline, and evaluate the detections.

#include <cstdio>

#include "rbox/harness.hpp"
#include "rbox/metrics.hpp"
#include "rbox/pipeline.hpp"

int main() {
  rbox::SceneConfig cfg;
  cfg.width = 1600;
  cfg.height = 1600;
  cfg.objects.push_back(rbox::SceneObjectSpec{
      0, 60, {{20, 8}, {40, 14}, {60, 17}, {80, 20}, {100, 25}}, rbox::AnglePeriod::deg180});
  const rbox::Scene scene = rbox::generate_scene(cfg, 7);

  rbox::OracleNoise noise;
  noise.miss_rate = 0.05;
  noise.score_noise = 0.03;
  noise.localization_noise = 0.5;
  noise.fp_count = 3;
  noise.fp_score = 0.88;
  const rbox::TileDetector detector = rbox::oracle_detector(scene, noise, 7);

  const double scales[] = {1.0};
  const rbox::TilePlan plan = rbox::plan(1600, 1600, scales);
  const rbox::RunResult result = rbox::run(plan, detector);
  std::printf("tiles: %zu, detections: %zu, tile failures: %zu\n", plan.tile_count(),
              result.detections.size(), result.failures.size());

  std::vector<rbox::RBox> gts;
  for (const rbox::Annotation& a : scene.objects) gts.push_back(a.box);
  rbox::ImageSample sample{result.detections, gts};
  const rbox::ClassReport report = rbox::evaluate_class(0, {&sample, 1});
  std::printf("gt=%zu tp=%zu fp=%zu fn=%zu ap=%.4f bep=%.4f\n", report.gt_count, report.tp,
              report.fp, report.fn, report.ap, report.bep);
  return 0;
}
