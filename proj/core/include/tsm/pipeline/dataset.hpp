// Copyright 2026 The text-scene-motion Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <nlohmann/json.hpp>
#include <string>
#include <vector>

#include "tsm/motion/motion_clip.hpp"
#include "tsm/pipeline/synthetic.hpp"
#include "tsm/scene/point_cloud.hpp"
#include "tsm/scene/scene_graph.hpp"

namespace tsm::pipeline {

/// One recorded scene with its instruction and reference motion.
///
/// On disk, `<stem>.json` holds {utterance, target_id, target_box, files}
/// next to `<stem>.cloud.txt`, `<stem>.detections.json` and `<stem>.clip`.
struct DatasetItem {
  std::string stem;
  scene::PointCloud cloud;
  std::vector<scene::DetectedObject> objects;
  std::string utterance;
  scene::ObjectId target_id = 0;
  motion::MotionClip clip;

  const scene::DetectedObject& target() const;
};

nlohmann::json box_to_json(const scene::Aabb& box);
scene::Aabb box_from_json(const nlohmann::json& j);

/// Writes the four files of one item; returns the paths written.
std::vector<std::filesystem::path> write_dataset_item(const std::filesystem::path& dir,
                                                      const DatasetItem& item);

/// Every `<stem>.json` describing a dataset item, ordered by stem.
std::vector<DatasetItem> load_dataset(const std::filesystem::path& dir);

/// `count` walk/sit scenes from consecutive seeds starting at `seed`.
std::vector<DatasetItem> synthesize_dataset(int count, std::uint64_t seed, int frames, double fps);

}  // namespace tsm::pipeline
