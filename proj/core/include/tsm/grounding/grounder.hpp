// Copyright 2026 The text-scene-motion Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "tsm/grounding/instruction.hpp"
#include "tsm/grounding/llm_client.hpp"
#include "tsm/grounding/prompt.hpp"
#include "tsm/scene/scene_graph.hpp"

namespace tsm::grounding {

enum class GroundingMethod { Llm, Symbolic };

std::string_view to_string(GroundingMethod m);

struct GroundingResult {
  scene::ObjectId object_id = 0;
  std::string category;
  scene::Aabb box;
  Eigen::Vector3d center = Eigen::Vector3d::Zero();  // == box.center
  GroundingMethod method = GroundingMethod::Symbolic;
};

/// Keeps nodes whose category is listed and edges whose endpoints all survive.
/// Throws GroundingError if no node of `target_category` remains.
scene::SceneGraph filter_graph(const scene::SceneGraph& graph,
                               const std::set<std::string>& categories,
                               std::string_view target_category);
/// Same as above without the target check.
scene::SceneGraph filter_graph(const scene::SceneGraph& graph,
                               const std::set<std::string>& categories);

/// "chair 4 is far from the end table 0", ordered by (subject, relation, object).
std::vector<std::string> edge_sentences(const scene::SceneGraph& graph);

struct RetryPolicy {
  enum class OnFailure { FallbackSymbolic, Strict };
  int max_retries = 2;
  OnFailure on_failure = OnFailure::FallbackSymbolic;
};

/// Two-stage LLM grounding: categories, then graph filtering, then object choice.
///
/// Unparsable replies are re-asked up to `policy.max_retries` times with a
/// clarification turn. When that fails, or the answered id is not a node of the
/// filtered graph with the target category, Strict rethrows and
/// FallbackSymbolic resolves the instruction symbolically (method = symbolic).
GroundingResult ground_llm(const scene::SceneGraph& graph, std::string_view utterance,
                           LlmClient& client, const RetryPolicy& policy = {},
                           const PromptOptions& options = {});

/// Deterministic resolver: candidates of the target category that have the
/// required edge to an instance of every anchor category; smallest id wins.
/// Throws GroundingError when nothing satisfies the instruction.
GroundingResult ground_symbolic(const scene::SceneGraph& graph, const ParsedInstruction& parsed);

struct GroundingEval {
  bool hit = false;         // IoU > 0.25
  double center_dist = 0.0; // meters
  double iou = 0.0;
};

inline constexpr double kGroundingIouThreshold = 0.25;

GroundingEval eval_grounding(const GroundingResult& pred, const scene::Aabb& gt_box);

/// {utterance, method, object_id, category, center, box, hit, center_dist}.
nlohmann::json grounding_report(std::string_view utterance, const GroundingResult& result,
                                const std::optional<scene::Aabb>& gt_box);

}  // namespace tsm::grounding
