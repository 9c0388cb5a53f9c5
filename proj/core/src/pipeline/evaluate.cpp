// Copyright 2026 The text-scene-motion Authors
// SPDX-License-Identifier: Apache-2.0

#include "tsm/pipeline/evaluate.hpp"

#include <algorithm>
#include <map>

#include "tsm/common/error.hpp"
#include "tsm/common/io.hpp"
#include "tsm/grounding/grounder.hpp"
#include "tsm/pipeline/dataset.hpp"
#include "tsm/pipeline/metrics.hpp"

namespace tsm::pipeline {

namespace fs = std::filesystem;

namespace {

std::vector<std::pair<fs::path, nlohmann::json>> read_metas(const fs::path& dir,
                                                            std::string_view required_key) {
  if (!fs::is_directory(dir)) throw IoError("not a directory: " + dir.string());
  std::vector<fs::path> paths;
  for (const auto& entry : fs::directory_iterator(dir)) {
    const auto& p = entry.path();
    if (p.extension() == ".json" && !p.filename().string().ends_with(".detections.json")) {
      paths.push_back(p);
    }
  }
  std::sort(paths.begin(), paths.end());
  std::vector<std::pair<fs::path, nlohmann::json>> out;
  for (const auto& p : paths) {
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(io::read_file(p));
    } catch (const nlohmann::json::parse_error& e) {
      throw ParseError(p.string() + ": " + e.what());
    }
    if (j.is_object() && j.contains(required_key)) out.emplace_back(p, std::move(j));
  }
  return out;
}

}  // namespace

std::vector<PredictedSample> load_predictions(const fs::path& dir) {
  std::vector<PredictedSample> out;
  for (const auto& [path, j] : read_metas(dir, "goal_dist")) {
    PredictedSample s;
    s.stem = path.stem().string();
    s.label = j.at("label").get<std::string>();
    s.clip = motion::load_clip(dir / (s.stem + ".clip"));
    s.grounded_box = box_from_json(j.at("target_box"));
    out.push_back(std::move(s));
  }
  if (out.empty()) throw EmptyInputError("no generated samples in " + dir.string());
  return out;
}

std::vector<ReferenceSample> load_references(const fs::path& dir) {
  std::vector<ReferenceSample> out;
  for (const auto& [path, j] : read_metas(dir, "target_box")) {
    if (j.value("kind", "") != "tsm-dataset-item") continue;
    ReferenceSample s;
    s.stem = path.stem().string();
    s.label = j.at("label").get<std::string>();
    s.clip = motion::load_clip(dir / j.at("files").at("clip").get<std::string>());
    s.target_box = box_from_json(j.at("target_box"));
    out.push_back(std::move(s));
  }
  if (out.empty()) throw EmptyInputError("no reference samples in " + dir.string());
  return out;
}

nlohmann::json evaluate(const std::vector<PredictedSample>& pred,
                        const std::vector<ReferenceSample>& gt, const EvalOptions& options) {
  std::map<std::string, const ReferenceSample*> by_stem;
  for (const auto& r : gt) by_stem[r.stem] = &r;
  const auto skeleton = motion::Skeleton::canonical();

  std::vector<motion::MotionClip> pred_clips, gt_clips;
  std::vector<std::string> labels;
  std::vector<double> goal;
  int hits = 0;
  double center_sum = 0.0;
  for (const auto& p : pred) {
    const auto it = by_stem.find(p.stem);
    if (it == by_stem.end()) throw LookupError("no reference for generated sample " + p.stem);
    const ReferenceSample& r = *it->second;
    goal.push_back(motion::goal_distance(p.clip, skeleton, r.target_box));
    grounding::GroundingResult g;
    g.box = p.grounded_box;
    g.center = p.grounded_box.center;
    const auto e = grounding::eval_grounding(g, r.target_box);
    hits += e.hit ? 1 : 0;
    center_sum += e.center_dist;
    pred_clips.push_back(p.clip);
    labels.push_back(p.label);
  }
  for (const auto& r : gt) gt_clips.push_back(r.clip);

  const FeatureSet fp = extract_features(pred_clips, labels);
  const FeatureSet fg = extract_features(gt_clips);
  double goal_mean = 0.0;
  for (double g : goal) goal_mean += g;
  goal_mean /= static_cast<double>(goal.size());
  const double n = static_cast<double>(pred.size());
  return {{"count", pred.size()},
          {"reference_count", gt.size()},
          {"feature_extractor", fp.extractor},
          {"goal_dist", {{"mean", goal_mean}, {"values", goal}}},
          {"fid", fid(fp, fg)},
          {"diversity", diversity(fp.samples, options.diversity_pairs, options.seed)},
          {"multimodality",
           multimodality(fp.samples, fp.labels, options.multimodality_pairs, options.seed)},
          {"grounding", {{"acc", hits / n}, {"center_dist", center_sum / n}}},
          {"pairs", {{"diversity", options.diversity_pairs},
                     {"multimodality_per_label", options.multimodality_pairs}}},
          {"seed", options.seed}};
}

}  // namespace tsm::pipeline
