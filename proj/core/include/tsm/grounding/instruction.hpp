// Copyright 2026 The text-scene-motion Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "tsm/scene/scene_graph.hpp"

namespace tsm::grounding {

enum class Action { Walk, Sit, StandUp, Lie };

std::string_view to_string(Action a);  // "walk", "sit", "standup", "lie"
std::optional<Action> action_from_string(std::string_view s);

/// A template utterance such as "sit on the chair that is near the desk".
struct ParsedInstruction {
  Action action = Action::Walk;
  std::string target_category;
  std::optional<scene::SpatialRelation> relation;
  std::vector<std::string> anchor_categories;  // 0, 1 or 2 entries

  bool operator==(const ParsedInstruction&) const = default;
};

/// Parses "<action> the <target> [that is <relation> the <anchor> [and the <anchor>]]".
/// "that is" is optional. Throws ParseError quoting the unrecognized span.
ParsedInstruction parse_instruction(std::string_view text);

/// Canonical utterance for a parsed instruction; parse_instruction inverts it.
std::string render_instruction(const ParsedInstruction& instruction);

/// Accepted surface phrases, longest first.
const std::vector<std::pair<std::string, Action>>& action_lexicon();
const std::vector<std::pair<std::string, scene::SpatialRelation>>& relation_lexicon();

}  // namespace tsm::grounding
