// Copyright 2026 The text-scene-motion Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <nlohmann/json.hpp>
#include <string>
#include <vector>

#include "tsm/motion/motion_clip.hpp"
#include "tsm/scene/aabb.hpp"

namespace tsm::pipeline {

struct EvalOptions {
  int diversity_pairs = 200;
  int multimodality_pairs = 20;
  std::uint64_t seed = 0;
};

/// A generated clip with the box it was grounded to.
struct PredictedSample {
  std::string stem;
  std::string label;
  motion::MotionClip clip;
  scene::Aabb grounded_box;
};

/// Reference clip with its ground-truth target.
struct ReferenceSample {
  std::string stem;
  std::string label;
  motion::MotionClip clip;
  scene::Aabb target_box;
};

/// `<stem>.clip` + `<stem>.json` pairs written by `generate`.
std::vector<PredictedSample> load_predictions(const std::filesystem::path& dir);
/// Dataset items (see dataset.hpp); only clips, labels and target boxes are read.
std::vector<ReferenceSample> load_references(const std::filesystem::path& dir);

/// Predictions are matched to references by stem. Report fields:
/// count, feature_extractor, goal_dist {mean, values}, fid, diversity,
/// multimodality, grounding {acc, center_dist}.
nlohmann::json evaluate(const std::vector<PredictedSample>& pred,
                        const std::vector<ReferenceSample>& gt, const EvalOptions& options);

}  // namespace tsm::pipeline
