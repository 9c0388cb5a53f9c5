// Copyright 2026 The text-scene-motion Authors
// SPDX-License-Identifier: Apache-2.0

#include "tsm/grounding/prompt.hpp"

#include <cctype>
#include <sstream>

#include "tsm/common/error.hpp"
#include "tsm/grounding/fewshot_data.hpp"
#include "tsm/scene/scene_graph.hpp"

namespace tsm::grounding {

std::string_view to_string(Role r) {
  switch (r) {
    case Role::System: return "system";
    case Role::User: return "user";
    case Role::Assistant: return "assistant";
  }
  return "user";
}

void Prompt::add(Role role, std::string content) {
  if (content.empty()) throw ValidationError("chat message content must be non-empty");
  messages.push_back({role, std::move(content)});
}

nlohmann::json Prompt::to_json() const {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& m : messages) arr.push_back({{"role", to_string(m.role)}, {"content", m.content}});
  return arr;
}

std::vector<FewShotExample> parse_few_shot(const nlohmann::json& j) {
  std::vector<FewShotExample> out;
  for (const auto& item : j) {
    out.push_back({item.at("question").get<std::string>(), item.at("answer").get<std::string>()});
  }
  return out;
}

const std::vector<FewShotExample>& default_stage1_examples() {
  static const auto v = parse_few_shot(nlohmann::json::parse(data::kFewShotStage1));
  return v;
}

const std::vector<FewShotExample>& default_stage2_examples() {
  static const auto v = parse_few_shot(nlohmann::json::parse(data::kFewShotStage2));
  return v;
}

namespace {

constexpr std::string_view kStage1System =
    "You help a virtual character act inside a 3D room. Given an instruction, name the "
    "target object category the character must interact with, and the anchor object "
    "categories that are only mentioned to tell which target is meant. Reply with exactly "
    "two lines:\n"
    "target: <category>\n"
    "anchors: <category>[, <category>]\n"
    "Leave the anchors line empty after the colon when the instruction mentions no anchor.";

constexpr std::string_view kStage2System =
    "You locate objects in a 3D room from a list of spatial relations between detected "
    "objects. Every object is written as '<category> <id>'. Decide which object the "
    "instruction refers to and reply with a single line:\n"
    "answer: <category> <id>";

void add_examples(Prompt& p, const std::vector<FewShotExample>& examples) {
  for (const auto& ex : examples) {
    p.add(Role::User, ex.question);
    p.add(Role::Assistant, ex.answer);
  }
}

std::string lower(std::string_view s) {
  std::string out(s);
  for (auto& ch : out) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
  return out;
}

std::string strip_punct(std::string s) {
  while (!s.empty() && (std::ispunct(static_cast<unsigned char>(s.back())) ||
                        std::isspace(static_cast<unsigned char>(s.back())))) {
    s.pop_back();
  }
  std::size_t i = 0;
  while (i < s.size() && (std::isspace(static_cast<unsigned char>(s[i])) ||
                          s[i] == '"' || s[i] == '\'' || s[i] == '*')) {
    ++i;
  }
  return s.substr(i);
}

std::vector<std::string> lines_of(std::string_view text) {
  std::vector<std::string> out;
  std::istringstream in{std::string(text)};
  std::string line;
  while (std::getline(in, line)) out.push_back(line);
  return out;
}

// Value after "<key>:" anywhere in a line (case-insensitive), or npos.
std::size_t find_key(const std::string& lowered_line, std::string_view key) {
  std::size_t pos = 0;
  while ((pos = lowered_line.find(key, pos)) != std::string::npos) {
    const bool word_start =
        pos == 0 || !std::isalpha(static_cast<unsigned char>(lowered_line[pos - 1]));
    std::size_t j = pos + key.size();
    while (j < lowered_line.size() && lowered_line[j] == ' ') ++j;
    if (word_start && j < lowered_line.size() && lowered_line[j] == ':') return j + 1;
    pos += key.size();
  }
  return std::string::npos;
}

}  // namespace

Prompt build_stage1_prompt(std::string_view utterance, const PromptOptions& options) {
  if (utterance.empty()) throw ValidationError("utterance must be non-empty");
  Prompt p;
  p.add(Role::System, std::string(kStage1System));
  if (options.few_shot) add_examples(p, options.stage1_examples);
  p.add(Role::User, "Instruction: " + std::string(utterance));
  return p;
}

Stage1Answer parse_stage1_response(std::string_view text) {
  Stage1Answer out;
  bool have_target = false;
  for (const auto& line : lines_of(text)) {
    const std::string low = lower(line);
    if (!have_target) {
      if (auto v = find_key(low, "target"); v != std::string::npos) {
        out.target_category = scene::normalize_category(strip_punct(low.substr(v)));
        have_target = !out.target_category.empty();
        continue;
      }
    }
    auto v = find_key(low, "anchors");
    if (v == std::string::npos) v = find_key(low, "anchor");
    if (v != std::string::npos) {
      std::string rest = low.substr(v);
      std::size_t start = 0;
      while (start <= rest.size()) {
        auto comma = rest.find(',', start);
        if (comma == std::string::npos) comma = rest.size();
        std::string item = scene::normalize_category(strip_punct(rest.substr(start, comma - start)));
        if (item.starts_with("and ")) item = item.substr(4);
        if (!item.empty() && item != "none") out.anchor_categories.push_back(item);
        start = comma + 1;
      }
    }
  }
  if (!have_target) throw ProtocolError("reply has no 'target:' line");
  return out;
}

std::string render_stage1_response(const Stage1Answer& answer) {
  std::string out = "target: " + answer.target_category + "\nanchors:";
  for (std::size_t i = 0; i < answer.anchor_categories.size(); ++i) {
    out += (i == 0 ? " " : ", ") + answer.anchor_categories[i];
  }
  return out;
}

Prompt build_stage2_prompt(std::string_view utterance, const std::vector<std::string>& sentences,
                           const PromptOptions& options) {
  if (sentences.empty()) throw ValidationError("stage-2 prompt needs at least one sentence");
  if (utterance.empty()) throw ValidationError("utterance must be non-empty");
  Prompt p;
  p.add(Role::System, std::string(kStage2System));
  if (options.few_shot) add_examples(p, options.stage2_examples);
  std::string q(kStage2Header);
  q += '\n';
  for (const auto& s : sentences) q += s + '\n';
  q += "Instruction: " + std::string(utterance) + '\n';
  q += "Which object is the target? Reply with one line: answer: <category> <id>";
  p.add(Role::User, std::move(q));
  return p;
}

int parse_stage2_response(std::string_view text) {
  for (const auto& line : lines_of(text)) {
    const std::string low = lower(line);
    const auto v = find_key(low, "answer");
    if (v == std::string::npos) continue;
    // Last run of digits on the line.
    std::size_t end = low.size();
    while (end > v && !std::isdigit(static_cast<unsigned char>(low[end - 1]))) --end;
    if (end == v) break;
    std::size_t begin = end;
    while (begin > v && std::isdigit(static_cast<unsigned char>(low[begin - 1]))) --begin;
    if (end - begin > 9) throw ProtocolError("object id out of range in '" + line + "'");
    return std::stoi(low.substr(begin, end - begin));
  }
  throw ProtocolError("reply has no 'answer: <category> <id>' line");
}

std::string clarification_message(int stage) {
  if (stage == 1) {
    return "Your previous reply could not be parsed. Reply with exactly two lines:\n"
           "target: <category>\nanchors: <category>[, <category>]";
  }
  return "Your previous reply could not be parsed. Reply with a single line:\n"
         "answer: <category> <id>";
}

}  // namespace tsm::grounding
