// Copyright 2026 The text-scene-motion Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <nlohmann/json.hpp>
#include <string>
#include <string_view>
#include <vector>

namespace tsm::grounding {

enum class Role { System, User, Assistant };

std::string_view to_string(Role r);

struct ChatMessage {
  Role role = Role::User;
  std::string content;
};

/// Ordered chat transcript sent to an LLM.
struct Prompt {
  std::vector<ChatMessage> messages;

  /// Throws ValidationError on empty content.
  void add(Role role, std::string content);
  const ChatMessage& last() const { return messages.back(); }
  nlohmann::json to_json() const;  // [{role, content}]
};

/// One demonstration turn: a user question and the assistant's answer.
struct FewShotExample {
  std::string question;
  std::string answer;
};

std::vector<FewShotExample> parse_few_shot(const nlohmann::json& j);
/// Built-in demonstrations (three per stage).
const std::vector<FewShotExample>& default_stage1_examples();
const std::vector<FewShotExample>& default_stage2_examples();

struct PromptOptions {
  bool few_shot = true;
  std::vector<FewShotExample> stage1_examples = default_stage1_examples();
  std::vector<FewShotExample> stage2_examples = default_stage2_examples();
};

/// Header line that opens every stage-2 question.
inline constexpr std::string_view kStage2Header = "Objects and relations:";

/// Asks for the target and anchor categories of `utterance`.
Prompt build_stage1_prompt(std::string_view utterance, const PromptOptions& options = {});

struct Stage1Answer {
  std::string target_category;
  std::vector<std::string> anchor_categories;
  bool operator==(const Stage1Answer&) const = default;
};

/// Reads the "target:" and "anchors:" lines. Throws ProtocolError without a target.
Stage1Answer parse_stage1_response(std::string_view text);
std::string render_stage1_response(const Stage1Answer& answer);

/// Asks which object the edge sentences single out. Throws ValidationError on
/// an empty sentence list.
Prompt build_stage2_prompt(std::string_view utterance, const std::vector<std::string>& sentences,
                           const PromptOptions& options = {});

/// Trailing integer of the "answer:" line. Throws ProtocolError.
int parse_stage2_response(std::string_view text);

/// Message appended after an unparsable reply.
std::string clarification_message(int stage);

}  // namespace tsm::grounding
