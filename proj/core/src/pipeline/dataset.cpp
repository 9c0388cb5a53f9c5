// Copyright 2026 The text-scene-motion Authors
// SPDX-License-Identifier: Apache-2.0

#include "tsm/pipeline/dataset.hpp"

#include <algorithm>
#include <cstdio>

#include "tsm/common/error.hpp"
#include "tsm/common/io.hpp"

namespace tsm::pipeline {

namespace fs = std::filesystem;

const scene::DetectedObject& DatasetItem::target() const {
  for (const auto& o : objects) {
    if (o.id == target_id) return o;
  }
  throw LookupError("dataset item " + stem + " has no object " + std::to_string(target_id));
}

nlohmann::json box_to_json(const scene::Aabb& box) {
  const Eigen::Vector3d s = box.size();
  return {{"center", {box.center.x(), box.center.y(), box.center.z()}},
          {"size", {s.x(), s.y(), s.z()}}};
}

scene::Aabb box_from_json(const nlohmann::json& j) {
  const auto c = j.at("center").get<std::vector<double>>();
  const auto s = j.at("size").get<std::vector<double>>();
  if (c.size() != 3 || s.size() != 3) throw ValidationError("box needs 3-vectors center and size");
  return scene::Aabb::from_center_size({c[0], c[1], c[2]}, {s[0], s[1], s[2]});
}

std::vector<fs::path> write_dataset_item(const fs::path& dir, const DatasetItem& item) {
  fs::create_directories(dir);
  const fs::path cloud = dir / (item.stem + ".cloud.txt");
  const fs::path detections = dir / (item.stem + ".detections.json");
  const fs::path clip = dir / (item.stem + ".clip");
  const fs::path meta = dir / (item.stem + ".json");
  scene::save_point_cloud(cloud, item.cloud);
  io::write_file(detections, scene::detections_to_json(item.objects).dump(2) + "\n");
  motion::save_clip(clip, item.clip);
  const nlohmann::json j = {{"kind", "tsm-dataset-item"},
                            {"utterance", item.utterance},
                            {"label", item.utterance},
                            {"target_id", item.target_id},
                            {"target_box", box_to_json(item.target().box)},
                            {"files",
                             {{"cloud", cloud.filename().string()},
                              {"detections", detections.filename().string()},
                              {"clip", clip.filename().string()}}}};
  io::write_file(meta, j.dump(2) + "\n");
  return {cloud, detections, clip, meta};
}

std::vector<DatasetItem> load_dataset(const fs::path& dir) {
  if (!fs::is_directory(dir)) throw IoError("not a directory: " + dir.string());
  std::vector<fs::path> metas;
  for (const auto& entry : fs::directory_iterator(dir)) {
    const auto& p = entry.path();
    const std::string name = p.filename().string();
    if (p.extension() == ".json" && !name.ends_with(".detections.json")) metas.push_back(p);
  }
  std::sort(metas.begin(), metas.end());
  std::vector<DatasetItem> items;
  for (const auto& meta_path : metas) {
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(io::read_file(meta_path));
    } catch (const nlohmann::json::parse_error& e) {
      throw ParseError(meta_path.string() + ": " + e.what());
    }
    if (j.value("kind", "") != "tsm-dataset-item") continue;
    DatasetItem item;
    item.stem = meta_path.stem().string();
    item.utterance = j.at("utterance").get<std::string>();
    item.target_id = j.at("target_id").get<scene::ObjectId>();
    const auto& files = j.at("files");
    item.cloud = scene::load_point_cloud(dir / files.at("cloud").get<std::string>());
    item.objects = scene::load_detections(dir / files.at("detections").get<std::string>());
    item.clip = motion::load_clip(dir / files.at("clip").get<std::string>());
    item.target();  // validates the id
    items.push_back(std::move(item));
  }
  if (items.empty()) throw EmptyInputError("no dataset items in " + dir.string());
  return items;
}

std::vector<DatasetItem> synthesize_dataset(int count, std::uint64_t seed, int frames, double fps) {
  if (count < 1) throw ValidationError("dataset size must be positive");
  std::vector<DatasetItem> items;
  for (int k = 0; k < count; ++k) {
    const std::uint64_t s = seed + static_cast<std::uint64_t>(k);
    WalkScene scene = make_walk_scene(s);
    DatasetItem item;
    char stem[32];
    std::snprintf(stem, sizeof stem, "scene_%05d", k);
    item.stem = stem;
    item.clip = make_walk_clip(scene, frames, s, fps);
    item.cloud = std::move(scene.cloud);
    item.objects = std::move(scene.objects);
    item.utterance = std::move(scene.utterance);
    item.target_id = scene.target_id;
    items.push_back(std::move(item));
  }
  return items;
}

}  // namespace tsm::pipeline
