// Copyright 2026 The text-scene-motion Authors
// SPDX-License-Identifier: Apache-2.0

#include "tsm/grounding/instruction.hpp"

#include <algorithm>
#include <cctype>
#include <regex>

#include "tsm/common/error.hpp"

namespace tsm::grounding {

using scene::SpatialRelation;

std::string_view to_string(Action a) {
  switch (a) {
    case Action::Walk: return "walk";
    case Action::Sit: return "sit";
    case Action::StandUp: return "standup";
    case Action::Lie: return "lie";
  }
  return "walk";
}

std::optional<Action> action_from_string(std::string_view s) {
  for (auto a : {Action::Walk, Action::Sit, Action::StandUp, Action::Lie}) {
    if (to_string(a) == s) return a;
  }
  return std::nullopt;
}

namespace {

template <typename T>
void sort_longest_first(std::vector<std::pair<std::string, T>>& v) {
  std::stable_sort(v.begin(), v.end(),
                   [](const auto& a, const auto& b) { return a.first.size() > b.first.size(); });
}

std::string regex_alternation(const auto& lexicon) {
  std::string out;
  for (const auto& [phrase, _] : lexicon) {
    if (!out.empty()) out += '|';
    for (char ch : phrase) {
      if (ch == ' ') {
        out += "\\s+";
      } else {
        out += ch;
      }
    }
  }
  return out;
}

std::string lower(std::string_view s) {
  std::string out(s);
  for (auto& ch : out) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
  return out;
}

std::string collapse_ws(std::string_view s) { return scene::normalize_category(s); }

}  // namespace

const std::vector<std::pair<std::string, Action>>& action_lexicon() {
  static const auto lex = [] {
    std::vector<std::pair<std::string, Action>> v = {
        {"walk to", Action::Walk},          {"walk towards", Action::Walk},
        {"walk toward", Action::Walk},      {"go to", Action::Walk},
        {"sit on", Action::Sit},            {"sit down on", Action::Sit},
        {"sit in", Action::Sit},            {"stand up from", Action::StandUp},
        {"get up from", Action::StandUp},   {"lie on", Action::Lie},
        {"lie down on", Action::Lie},       {"lie in", Action::Lie},
    };
    sort_longest_first(v);
    return v;
  }();
  return lex;
}

const std::vector<std::pair<std::string, SpatialRelation>>& relation_lexicon() {
  static const auto lex = [] {
    std::vector<std::pair<std::string, SpatialRelation>> v = {
        {"in the middle of", SpatialRelation::Between},
        {"in the center of", SpatialRelation::Between},
        {"between", SpatialRelation::Between},
        {"far away from", SpatialRelation::Far},
        {"far from", SpatialRelation::Far},
        {"near", SpatialRelation::Near},
        {"close to", SpatialRelation::Near},
        {"next to", SpatialRelation::Near},
        {"beside", SpatialRelation::Near},
        {"on top of", SpatialRelation::SupportedBy},
        {"supported by", SpatialRelation::SupportedBy},
        {"resting on", SpatialRelation::SupportedBy},
        {"on", SpatialRelation::SupportedBy},
        {"supporting", SpatialRelation::Supporting},
        {"above", SpatialRelation::Above},
        {"over", SpatialRelation::Above},
        {"below", SpatialRelation::Below},
        {"underneath", SpatialRelation::Below},
        {"beneath", SpatialRelation::Below},
        {"under", SpatialRelation::Below},
    };
    sort_longest_first(v);
    return v;
  }();
  return lex;
}

namespace {

template <typename T>
T lookup(const std::vector<std::pair<std::string, T>>& lex, std::string_view phrase) {
  const std::string key = collapse_ws(phrase);
  for (const auto& [p, value] : lex) {
    if (p == key) return value;
  }
  throw ParseError("unrecognized phrase '" + std::string(phrase) + "'");
}

const std::regex& instruction_regex() {
  static const std::regex re(
      "^\\s*(" + regex_alternation(action_lexicon()) +
          ")\\s+the\\s+(.+?)"
          "(?:(?:\\s+(?:that|which)\\s+(?:is|are))?\\s+(" +
          regex_alternation(relation_lexicon()) +
          ")\\s+(?:the\\s+)?(.+?)(?:\\s+and\\s+(?:the\\s+)?(.+?))?)?"
          "\\s*[.!]?\\s*$",
      std::regex::icase | std::regex::ECMAScript | std::regex::optimize);
  return re;
}

// Builds a diagnostic for text the grammar rejected.
[[noreturn]] void reject(std::string_view text) {
  const std::string low = lower(text);
  bool action_ok = false;
  std::size_t after_action = 0;
  const std::string trimmed = collapse_ws(low);
  for (const auto& [phrase, _] : action_lexicon()) {
    if (trimmed.starts_with(phrase + " ")) {
      action_ok = true;
      after_action = phrase.size() + 1;
      break;
    }
  }
  if (!action_ok) {
    const auto the = trimmed.find(" the ");
    const std::string span = the == std::string::npos ? trimmed : trimmed.substr(0, the);
    throw ParseError("unrecognized action phrase '" + span + "'");
  }
  std::string rest = trimmed.substr(after_action);
  if (!rest.starts_with("the ")) {
    throw ParseError("expected 'the <target>' after action, got '" + rest + "'");
  }
  for (const char* marker : {" that is ", " which is ", " that are ", " which are "}) {
    const auto pos = rest.find(marker);
    if (pos != std::string::npos) {
      std::string tail = rest.substr(pos + std::string(marker).size());
      const auto the = tail.find("the ");
      const std::string span = the == std::string::npos ? tail : tail.substr(0, the);
      throw ParseError("unrecognized relation phrase '" + collapse_ws(span) + "'");
    }
  }
  throw ParseError("instruction does not follow the template: '" + std::string(text) + "'");
}

}  // namespace

ParsedInstruction parse_instruction(std::string_view text) {
  std::smatch m;
  const std::string s(text);
  if (!std::regex_match(s, m, instruction_regex())) reject(text);

  // A relative clause left inside a category means its relation phrase was not recognized.
  static const std::regex clause("\\b(?:that|which)\\s+(?:is|are)\\b", std::regex::icase);
  for (int g : {2, 4, 5}) {
    if (m[g].matched && std::regex_search(m[g].str(), clause)) reject(text);
  }

  ParsedInstruction out;
  out.action = lookup(action_lexicon(), lower(m[1].str()));
  out.target_category = collapse_ws(lower(m[2].str()));
  if (m[3].matched) {
    out.relation = lookup(relation_lexicon(), lower(m[3].str()));
    out.anchor_categories.push_back(collapse_ws(lower(m[4].str())));
    if (m[5].matched) out.anchor_categories.push_back(collapse_ws(lower(m[5].str())));
  }
  if (out.relation == SpatialRelation::Between && out.anchor_categories.size() != 2) {
    throw ParseError("'between' needs two anchors joined by 'and'");
  }
  if (out.relation && out.relation != SpatialRelation::Between &&
      out.anchor_categories.size() != 1) {
    throw ParseError("relation '" + std::string(scene::to_string(*out.relation)) +
                     "' takes exactly one anchor");
  }
  return out;
}

std::string render_instruction(const ParsedInstruction& ins) {
  static constexpr std::string_view kAction[] = {"walk to", "sit on", "stand up from", "lie on"};
  std::string out = std::string(kAction[static_cast<int>(ins.action)]) + " the " +
                    ins.target_category;
  if (!ins.relation) return out;
  std::string_view rel;
  switch (*ins.relation) {
    case SpatialRelation::Near: rel = "near"; break;
    case SpatialRelation::Far: rel = "far from"; break;
    case SpatialRelation::Above: rel = "above"; break;
    case SpatialRelation::Below: rel = "below"; break;
    case SpatialRelation::SupportedBy: rel = "on"; break;
    case SpatialRelation::Supporting: rel = "supporting"; break;
    case SpatialRelation::Between: rel = "in the middle of"; break;
  }
  out += " that is " + std::string(rel) + " the " + ins.anchor_categories.at(0);
  if (ins.anchor_categories.size() > 1) out += " and the " + ins.anchor_categories[1];
  return out;
}

}  // namespace tsm::grounding
