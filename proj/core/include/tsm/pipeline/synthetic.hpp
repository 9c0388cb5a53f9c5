// Copyright 2026 The text-scene-motion Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "tsm/grounding/instruction.hpp"
#include "tsm/motion/motion_clip.hpp"
#include "tsm/scene/point_cloud.hpp"
#include "tsm/scene/scene_graph.hpp"

namespace tsm::pipeline {

/// A box layout in which exactly one object satisfies `instruction`.
struct GroundingCase {
  std::vector<scene::DetectedObject> objects;
  grounding::ParsedInstruction instruction;
  std::string utterance;
  scene::ObjectId target_id = 0;
};

/// Relation type cycles with the seed (seed % 7 over near, far, above,
/// below, supported_by, supporting, between). Same-category distractors are
/// placed so that they fail the relation.
GroundingCase make_grounding_case(std::uint64_t seed, const scene::RelationParams& params = {});

/// Floor plus a few boxes; the target category is unique in the scene.
struct WalkScene {
  scene::PointCloud cloud;
  std::vector<scene::DetectedObject> objects;
  scene::ObjectId target_id = 0;
  grounding::Action action = grounding::Action::Walk;
  std::string utterance;

  const scene::DetectedObject& target() const;
};

/// Walk scenes ask to walk to a "box"; sit scenes to sit on a "chair".
WalkScene make_walk_scene(std::uint64_t seed);

/// Scripted approach from 1.5 to 3 m away, ending beside the target (walk)
/// or seated on it (sit). World frame, canonical skeleton.
motion::MotionClip make_walk_clip(const WalkScene& scene, int frames, std::uint64_t seed,
                                  double fps = 30.0);

/// Surface points (top and sides, outward normals) of `box`, about `spacing` apart.
void add_box_surface(scene::PointCloud& cloud, const scene::Aabb& box, double spacing);

}  // namespace tsm::pipeline
