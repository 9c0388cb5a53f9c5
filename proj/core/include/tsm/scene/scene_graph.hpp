// Copyright 2026 The text-scene-motion Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <filesystem>
#include <nlohmann/json.hpp>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "tsm/scene/aabb.hpp"

namespace tsm::scene {

using ObjectId = int;

struct DetectedObject {
  ObjectId id = 0;
  std::string category;  // lowercase, trimmed
  Aabb box;
};

/// Egocentric-free spatial predicates. Allocentric relations (left of, behind)
/// need object orientation and are intentionally not representable.
enum class SpatialRelation { Near, Far, Above, Below, SupportedBy, Supporting, Between };

inline constexpr std::array<SpatialRelation, 7> kAllRelations = {
    SpatialRelation::Near,        SpatialRelation::Far,        SpatialRelation::Above,
    SpatialRelation::Below,       SpatialRelation::SupportedBy, SpatialRelation::Supporting,
    SpatialRelation::Between};

std::string_view to_string(SpatialRelation r);
std::optional<SpatialRelation> relation_from_string(std::string_view s);

/// Phrase used in edge sentences, e.g. "far from".
std::string_view relation_phrase(SpatialRelation r);

struct RelationParams {
  double near_threshold = 1.0;       // m, horizontal center distance
  double far_threshold = 2.0;        // m
  double overlap_min = 0.25;         // footprint overlap / smaller footprint
  double contact_eps = 0.05;         // m, support contact gap
  double between_margin = 0.1;       // segment parameter margin
  double between_lateral_max = 0.5;  // m
};

nlohmann::json to_json(const RelationParams& p);
RelationParams relation_params_from_json(const nlohmann::json& j);

using RelationSet = std::set<SpatialRelation>;

/// Binary relations of `a` with respect to `b`.
///
/// Vertical relations (Above/Below/SupportedBy/Supporting) need footprint
/// overlap (relative to the smaller footprint) above `overlap_min` and
/// separated z-intervals, up to `contact_eps` of interpenetration. Horizontal
/// proximity (Near/Far) is only reported for pairs without a vertical relation,
/// so a book on a table is "on" it rather than "near" it. Center distances in
/// [near, far] yield neither.
RelationSet infer_pairwise_relations(const DetectedObject& a, const DetectedObject& b,
                                     const RelationParams& params = {});

/// Whether `c` lies between `a` and `b` in the horizontal plane. Symmetric in a, b.
bool infer_between(const DetectedObject& c, const DetectedObject& a, const DetectedObject& b,
                   const RelationParams& params = {});

struct BinaryEdge {
  ObjectId subject;
  SpatialRelation relation;
  ObjectId object;
  auto operator<=>(const BinaryEdge&) const = default;
};

/// `subject` is between `anchor1` < `anchor2`.
struct BetweenEdge {
  ObjectId subject;
  ObjectId anchor1;
  ObjectId anchor2;
  auto operator<=>(const BetweenEdge&) const = default;
};

struct SceneGraph {
  std::vector<DetectedObject> nodes;
  std::vector<BinaryEdge> binary_edges;    // sorted, unique
  std::vector<BetweenEdge> between_edges;  // sorted, unique
  RelationParams params;

  const DetectedObject* find(ObjectId id) const;
  bool empty() const noexcept { return nodes.empty(); }
};

/// Evaluates every ordered pair and every (subject, unordered anchor pair).
/// Output is sorted so it does not depend on input order.
SceneGraph build_scene_graph(std::vector<DetectedObject> objects,
                             const RelationParams& params = {});

/// JSON array of {id, category, center:[3], size:[3]}. Throws ValidationError
/// on duplicate ids, empty categories or non-positive sizes.
std::vector<DetectedObject> parse_detections(const nlohmann::json& j);
std::vector<DetectedObject> load_detections(const std::filesystem::path& path);
nlohmann::json detections_to_json(const std::vector<DetectedObject>& objects);

/// {nodes, edges:[{s,rel,o}], between:[{s,a1,a2}], params}
nlohmann::json to_json(const SceneGraph& graph);
SceneGraph scene_graph_from_json(const nlohmann::json& j);

/// Lowercases and trims; collapses internal whitespace runs.
std::string normalize_category(std::string_view raw);

}  // namespace tsm::scene
