// Copyright 2026 The text-scene-motion Authors
// SPDX-License-Identifier: Apache-2.0

#include "tsm/pipeline/synthetic.hpp"

#include <gtest/gtest.h>

#include <set>

#include "test_support.hpp"
#include "tsm/common/error.hpp"
#include "tsm/grounding/grounder.hpp"
#include "tsm/pipeline/dataset.hpp"

namespace tsm::pipeline {
namespace {

using scene::SpatialRelation;

// Candidates of the target category that satisfy the instruction in `g`.
std::vector<scene::ObjectId> satisfiers(const scene::SceneGraph& g,
                                        const grounding::ParsedInstruction& p) {
  auto cat = [&](scene::ObjectId id) { return g.find(id)->category; };
  std::vector<scene::ObjectId> out;
  for (const auto& n : g.nodes) {
    if (n.category != p.target_category) continue;
    bool ok = !p.relation;
    if (p.relation == SpatialRelation::Between) {
      for (const auto& e : g.between_edges) {
        if (e.subject != n.id) continue;
        const std::set<std::string> got{cat(e.anchor1), cat(e.anchor2)};
        ok |= got == std::set<std::string>(p.anchor_categories.begin(), p.anchor_categories.end());
      }
    } else if (p.relation) {
      for (const auto& e : g.binary_edges) {
        ok |= e.subject == n.id && e.relation == *p.relation && cat(e.object) == p.anchor_categories[0];
      }
    }
    if (ok) out.push_back(n.id);
  }
  return out;
}

TEST(GroundingCase, UniqueSatisfierAndParsableUtterance) {
  std::set<SpatialRelation> relations;
  for (std::uint64_t seed = 0; seed < 140; ++seed) {
    const auto c = make_grounding_case(seed);
    const auto g = scene::build_scene_graph(c.objects);
    EXPECT_EQ(satisfiers(g, c.instruction), std::vector<scene::ObjectId>{c.target_id}) << c.utterance;
    EXPECT_EQ(grounding::parse_instruction(c.utterance), c.instruction);
    ASSERT_TRUE(c.instruction.relation.has_value());
    relations.insert(*c.instruction.relation);
    // At least one distractor of the target category.
    int same = 0;
    for (const auto& o : c.objects) same += o.category == c.instruction.target_category;
    EXPECT_GE(same, 2) << c.utterance;
  }
  EXPECT_EQ(relations.size(), 7u);
}

TEST(GroundingCase, DeterministicPerSeed) {
  const auto a = make_grounding_case(42), b = make_grounding_case(42);
  EXPECT_EQ(a.utterance, b.utterance);
  EXPECT_EQ(a.target_id, b.target_id);
  EXPECT_EQ(scene::detections_to_json(a.objects), scene::detections_to_json(b.objects));
  EXPECT_NE(scene::detections_to_json(a.objects),
            scene::detections_to_json(make_grounding_case(43).objects));
}

TEST(WalkScene, TargetAndUtterance) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto s = make_walk_scene(seed);
    EXPECT_FALSE(s.cloud.empty());
    const auto& t = s.target();
    if (s.action == grounding::Action::Walk) {
      EXPECT_EQ(s.utterance, "walk to the box");
      EXPECT_EQ(t.category, "box");
    } else {
      EXPECT_EQ(s.utterance, "sit on the chair");
      EXPECT_EQ(t.category, "chair");
    }
    // Symbolic grounding of the utterance finds the target.
    const auto r = grounding::ground_symbolic(scene::build_scene_graph(s.objects),
                                              grounding::parse_instruction(s.utterance));
    EXPECT_EQ(r.object_id, s.target_id);
  }
}

TEST(WalkClip, EndsBesideOrOnTarget) {
  const auto skel = motion::Skeleton::canonical();
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto s = make_walk_scene(seed);
    const auto clip = make_walk_clip(s, 32, seed, 30.0);
    EXPECT_NO_THROW(clip.validate());
    EXPECT_EQ(clip.frames(), 32u);
    EXPECT_EQ(clip.joints, 22);
    const auto& box = s.target().box;
    const double start = scene::distance_to_box(clip.trajectory.front().root, box);
    const double end = motion::goal_distance(clip, skel, box);
    EXPECT_GT(start, 1.0);
    EXPECT_LT(end, start);
    const Eigen::Vector3d last = clip.trajectory.back().root;
    if (s.action == grounding::Action::Walk) {
      // Stops 0.3 m past the footprint edge along the ray from its center.
      const Eigen::Vector2d gap = ((last - box.center).head<2>().cwiseAbs() - box.half_extents.head<2>())
                                      .cwiseMax(0.0);
      EXPECT_LE(gap.norm(), 0.3 + 1e-9);
      EXPECT_GE(gap.norm(), 0.3 / std::sqrt(2.0) - 1e-9);
    } else {
      // Seated 0.1 m above the top face.
      EXPECT_NEAR(end, 0.1, 1e-9);
    }
    for (const auto& f : clip.trajectory) EXPECT_NEAR(f.heading.norm(), 1.0, 1e-9);
  }
}

TEST(Dataset, WriteLoadRoundTrip) {
  testing::TempDir dir;
  const auto items = synthesize_dataset(3, 10, 8, 30.0);
  ASSERT_EQ(items.size(), 3u);
  EXPECT_EQ(items[0].stem, "scene_00000");
  for (const auto& it : items) EXPECT_EQ(write_dataset_item(dir.path(), it).size(), 4u);
  const auto loaded = load_dataset(dir.path());
  ASSERT_EQ(loaded.size(), 3u);
  for (std::size_t i = 0; i < 3; ++i) {
    EXPECT_EQ(loaded[i].stem, items[i].stem);
    EXPECT_EQ(loaded[i].utterance, items[i].utterance);
    EXPECT_EQ(loaded[i].target_id, items[i].target_id);
    EXPECT_EQ(loaded[i].cloud.size(), items[i].cloud.size());
    EXPECT_EQ(loaded[i].clip.frames(), 8u);
    EXPECT_TRUE(loaded[i].target().box.center.isApprox(items[i].target().box.center, 1e-9));
  }
  EXPECT_THROW(load_dataset(dir / "missing"), IoError);
}

}  // namespace
}  // namespace tsm::pipeline
