// Copyright 2026 The text-scene-motion Authors
// SPDX-License-Identifier: Apache-2.0

#include "tsm/grounding/grounder.hpp"

#include <algorithm>
#include <tuple>

#include "tsm/common/error.hpp"

namespace tsm::grounding {

using scene::BetweenEdge;
using scene::BinaryEdge;
using scene::DetectedObject;
using scene::ObjectId;
using scene::SceneGraph;
using scene::SpatialRelation;

std::string_view to_string(GroundingMethod m) {
  return m == GroundingMethod::Llm ? "llm" : "symbolic";
}

SceneGraph filter_graph(const SceneGraph& graph, const std::set<std::string>& categories) {
  SceneGraph out;
  out.params = graph.params;
  std::set<ObjectId> kept;
  for (const auto& n : graph.nodes) {
    if (categories.contains(n.category)) {
      out.nodes.push_back(n);
      kept.insert(n.id);
    }
  }
  for (const auto& e : graph.binary_edges) {
    if (kept.contains(e.subject) && kept.contains(e.object)) out.binary_edges.push_back(e);
  }
  for (const auto& e : graph.between_edges) {
    if (kept.contains(e.subject) && kept.contains(e.anchor1) && kept.contains(e.anchor2)) {
      out.between_edges.push_back(e);
    }
  }
  return out;
}

SceneGraph filter_graph(const SceneGraph& graph, const std::set<std::string>& categories,
                        std::string_view target_category) {
  SceneGraph out = filter_graph(graph, categories);
  const bool has_target = std::any_of(out.nodes.begin(), out.nodes.end(), [&](const auto& n) {
    return n.category == target_category;
  });
  if (!has_target) {
    throw GroundingError("no object of category '" + std::string(target_category) +
                         "' in the scene");
  }
  return out;
}

std::vector<std::string> edge_sentences(const SceneGraph& graph) {
  auto label = [&](ObjectId id) {
    const DetectedObject* o = graph.find(id);
    return (o ? o->category : std::string("object")) + " " + std::to_string(id);
  };
  // Between edges sort after the binary relations of the same subject by the
  // relation enum order.
  using Key = std::tuple<ObjectId, int, ObjectId, ObjectId>;
  std::vector<std::pair<Key, std::string>> keyed;
  for (const BinaryEdge& e : graph.binary_edges) {
    keyed.push_back({{e.subject, static_cast<int>(e.relation), e.object, -1},
                     label(e.subject) + " is " + std::string(relation_phrase(e.relation)) +
                         " the " + label(e.object)});
  }
  for (const BetweenEdge& e : graph.between_edges) {
    keyed.push_back({{e.subject, static_cast<int>(SpatialRelation::Between), e.anchor1, e.anchor2},
                     label(e.subject) + " is between the " + label(e.anchor1) + " and the " +
                         label(e.anchor2)});
  }
  std::sort(keyed.begin(), keyed.end());
  std::vector<std::string> out;
  out.reserve(keyed.size());
  for (auto& [_, s] : keyed) out.push_back(std::move(s));
  return out;
}

namespace {

GroundingResult make_result(const DetectedObject& o, GroundingMethod m) {
  return {o.id, o.category, o.box, o.box.center, m};
}

template <typename Parse>
auto ask_with_retries(LlmClient& client, Prompt prompt, int stage, const RetryPolicy& policy,
                      Parse parse) {
  for (int attempt = 0;; ++attempt) {
    const std::string reply = client.chat(prompt);
    try {
      return parse(reply);
    } catch (const ProtocolError& e) {
      if (attempt >= policy.max_retries) {
        throw ProtocolError("stage " + std::to_string(stage) + " failed after " +
                            std::to_string(attempt + 1) + " attempts: " + e.what());
      }
      prompt.add(Role::Assistant, reply.empty() ? std::string("(empty reply)") : reply);
      prompt.add(Role::User, clarification_message(stage));
    }
  }
}

// Symbolic resolution used when the LLM path cannot finish.
GroundingResult fallback(const SceneGraph& graph, std::string_view utterance,
                         const std::string& stage1_target) {
  std::optional<ParsedInstruction> parsed;
  try {
    parsed = parse_instruction(utterance);
  } catch (const ParseError&) {
  }
  if (parsed) return ground_symbolic(graph, *parsed);
  // Unparsable utterance: smallest id of the category the LLM named.
  const DetectedObject* best = nullptr;
  for (const auto& n : graph.nodes) {
    if (n.category == stage1_target && (!best || n.id < best->id)) best = &n;
  }
  if (!best) throw GroundingError("fallback grounding found no candidate");
  return make_result(*best, GroundingMethod::Symbolic);
}

}  // namespace

GroundingResult ground_llm(const SceneGraph& graph, std::string_view utterance,
                           LlmClient& client, const RetryPolicy& policy,
                           const PromptOptions& options) {
  if (graph.empty()) throw EmptyInputError("scene graph has no nodes");
  const bool strict = policy.on_failure == RetryPolicy::OnFailure::Strict;
  std::string stage1_target;
  try {
    const Stage1Answer categories =
        ask_with_retries(client, build_stage1_prompt(utterance, options), 1, policy,
                         [](const std::string& r) { return parse_stage1_response(r); });
    stage1_target = categories.target_category;
    std::set<std::string> keep(categories.anchor_categories.begin(),
                               categories.anchor_categories.end());
    keep.insert(categories.target_category);
    const SceneGraph filtered = filter_graph(graph, keep, categories.target_category);

    std::vector<const DetectedObject*> candidates;
    for (const auto& n : filtered.nodes) {
      if (n.category == categories.target_category) candidates.push_back(&n);
    }
    if (candidates.size() == 1) return make_result(*candidates.front(), GroundingMethod::Llm);

    std::vector<std::string> sentences = edge_sentences(filtered);
    if (sentences.empty()) {
      for (const auto& n : filtered.nodes) {
        sentences.push_back("there is a " + n.category + " " + std::to_string(n.id));
      }
    }
    const ObjectId answer =
        ask_with_retries(client, build_stage2_prompt(utterance, sentences, options), 2, policy,
                         [](const std::string& r) { return parse_stage2_response(r); });
    const DetectedObject* chosen = filtered.find(answer);
    if (!chosen || chosen->category != categories.target_category) {
      throw GroundingError("answered id " + std::to_string(answer) +
                           " is not a candidate '" + categories.target_category + "'");
    }
    return make_result(*chosen, GroundingMethod::Llm);
  } catch (const ProtocolError&) {
    if (strict) throw;
    return fallback(graph, utterance, stage1_target);
  } catch (const GroundingError&) {
    if (strict) throw;
    return fallback(graph, utterance, stage1_target);
  }
}

namespace {

bool has_binary(const SceneGraph& g, ObjectId subject, SpatialRelation r,
                const std::string& anchor_category) {
  return std::any_of(g.binary_edges.begin(), g.binary_edges.end(), [&](const BinaryEdge& e) {
    if (e.subject != subject || e.relation != r) return false;
    const DetectedObject* o = g.find(e.object);
    return o && o->category == anchor_category;
  });
}

bool has_between(const SceneGraph& g, ObjectId subject, const std::string& a,
                 const std::string& b) {
  return std::any_of(g.between_edges.begin(), g.between_edges.end(), [&](const BetweenEdge& e) {
    if (e.subject != subject) return false;
    const DetectedObject* x = g.find(e.anchor1);
    const DetectedObject* y = g.find(e.anchor2);
    if (!x || !y) return false;
    return (x->category == a && y->category == b) || (x->category == b && y->category == a);
  });
}

}  // namespace

GroundingResult ground_symbolic(const SceneGraph& graph, const ParsedInstruction& parsed) {
  for (const auto& anchor : parsed.anchor_categories) {
    const bool present = std::any_of(graph.nodes.begin(), graph.nodes.end(),
                                     [&](const auto& n) { return n.category == anchor; });
    if (!present) throw GroundingError("anchor category '" + anchor + "' not in the scene");
  }
  const DetectedObject* best = nullptr;
  bool any_target = false;
  for (const auto& n : graph.nodes) {
    if (n.category != parsed.target_category) continue;
    any_target = true;
    bool ok = true;
    if (parsed.relation == SpatialRelation::Between) {
      ok = has_between(graph, n.id, parsed.anchor_categories.at(0),
                       parsed.anchor_categories.at(1));
    } else if (parsed.relation) {
      ok = has_binary(graph, n.id, *parsed.relation, parsed.anchor_categories.at(0));
    }
    if (ok && (!best || n.id < best->id)) best = &n;
  }
  if (!any_target) {
    throw GroundingError("no object of category '" + parsed.target_category + "' in the scene");
  }
  if (!best) throw GroundingError("no '" + parsed.target_category + "' satisfies the relation");
  return make_result(*best, GroundingMethod::Symbolic);
}

GroundingEval eval_grounding(const GroundingResult& pred, const scene::Aabb& gt_box) {
  GroundingEval e;
  e.iou = scene::iou(pred.box, gt_box);
  e.hit = e.iou > kGroundingIouThreshold;
  e.center_dist = (pred.center - gt_box.center).norm();
  return e;
}

nlohmann::json grounding_report(std::string_view utterance, const GroundingResult& result,
                                const std::optional<scene::Aabb>& gt_box) {
  const auto& c = result.center;
  const auto s = result.box.size();
  nlohmann::json j = {{"utterance", utterance},
                      {"method", to_string(result.method)},
                      {"object_id", result.object_id},
                      {"category", result.category},
                      {"center", {c.x(), c.y(), c.z()}},
                      {"size", {s.x(), s.y(), s.z()}},
                      {"hit", nullptr},
                      {"center_dist", nullptr}};
  if (gt_box) {
    const auto e = eval_grounding(result, *gt_box);
    j["hit"] = e.hit;
    j["center_dist"] = e.center_dist;
  }
  return j;
}

}  // namespace tsm::grounding
