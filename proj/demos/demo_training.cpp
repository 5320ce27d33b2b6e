// Copyright (C) 2026 rboxkit contributors
// SPDX-License-Identifier: Apache-2.0
//
// Training-side walkthrough: match priors to ground truth, encode the
// regression targets, mine hard negatives, and evaluate the loss a
// hypothetical network would see for a given set of predictions.

#include <cstdio>
#include <vector>

#include "rbox/codec.hpp"
#include "rbox/harness.hpp"
#include "rbox/matcher.hpp"
#include "rbox/priors.hpp"

int main() {
  const rbox::PriorSet priors = rbox::generate(rbox::builtin_config(rbox::Task::ship));

  // one 300x300 training tile with a couple of ships
  rbox::SceneConfig cfg;
  cfg.width = 300;
  cfg.height = 300;
  cfg.objects.push_back(rbox::SceneObjectSpec{0, 4, {{40, 14}, {80, 20}}, rbox::AnglePeriod::deg180});
  const rbox::Scene tile = rbox::generate_scene(cfg, 5);
  std::vector<rbox::RBox> gts;
  for (const rbox::Annotation& a : tile.objects) gts.push_back(a.box);

  const rbox::MatchAssignment matches = rbox::match(priors, gts);
  std::printf("priors=%zu gts=%zu positives=%zu\n", priors.priors.size(), gts.size(),
              matches.positive_count());

  // regression targets for the positives
  std::vector<rbox::OffsetVector> targets;
  for (const auto& [prior_idx, gt_idx] : matches.positive_pairs) {
    targets.push_back(rbox::encode(gts[gt_idx], priors.priors[prior_idx]));
  }

  // a fake network: logits favoring background everywhere, predictions at
  // the priors themselves (zero offsets)
  std::vector<rbox::ConfidenceVector> confidences(priors.priors.size(),
                                                  rbox::ConfidenceVector{1.2, -0.4});
  const std::vector<std::size_t> negatives = rbox::mine_negatives(confidences, matches);

  std::vector<rbox::ConfidenceVector> selected;
  std::vector<rbox::SampleLabel> labels;
  for (const auto& [prior_idx, gt_idx] : matches.positive_pairs) {
    selected.push_back(confidences[prior_idx]);
    labels.push_back(rbox::SampleLabel::object);
  }
  for (std::size_t idx : negatives) {
    selected.push_back(confidences[idx]);
    labels.push_back(rbox::SampleLabel::background);
  }

  const std::vector<rbox::OffsetVector> predictions(targets.size());  // all-zero offsets
  const double l_conf = rbox::conf_loss(selected, labels);
  const double l_rbox = rbox::rbox_loss(predictions, targets);
  std::printf("negatives=%zu conf_loss=%.4f rbox_loss=%.4f total=%.4f\n", negatives.size(),
              l_conf, l_rbox, rbox::total_loss(l_conf, l_rbox, matches.positive_count()));
  return 0;
}
