// Copyright 2026 The text-scene-motion Authors
// SPDX-License-Identifier: Apache-2.0

#include "tsm/grounding/instruction.hpp"

#include <gtest/gtest.h>

#include <random>
#include <sstream>

#include "tsm/common/error.hpp"

namespace tsm::grounding {
namespace {

using scene::SpatialRelation;

TEST(Instruction, BetweenExample) {
  const auto p =
      parse_instruction("sit on the chair that is in the middle of the board and the end table");
  EXPECT_EQ(p.action, Action::Sit);
  EXPECT_EQ(p.target_category, "chair");
  EXPECT_EQ(p.relation, SpatialRelation::Between);
  EXPECT_EQ(p.anchor_categories, (std::vector<std::string>{"board", "end table"}));
}

TEST(Instruction, NoRelation) {
  const auto p = parse_instruction("walk to the table");
  EXPECT_EQ(p.action, Action::Walk);
  EXPECT_EQ(p.target_category, "table");
  EXPECT_FALSE(p.relation.has_value());
  EXPECT_TRUE(p.anchor_categories.empty());
}

TEST(Instruction, ThatIsIsOptional) {
  const auto p = parse_instruction("Lie on the bed near the nightstand.");
  EXPECT_EQ(p.action, Action::Lie);
  EXPECT_EQ(p.target_category, "bed");
  EXPECT_EQ(p.relation, SpatialRelation::Near);
  EXPECT_EQ(p.anchor_categories, std::vector<std::string>{"nightstand"});
}

TEST(Instruction, MultiWordPhrases) {
  const auto p = parse_instruction("stand up from the office chair which is far from the tv");
  EXPECT_EQ(p.action, Action::StandUp);
  EXPECT_EQ(p.target_category, "office chair");
  EXPECT_EQ(p.relation, SpatialRelation::Far);
}

TEST(Instruction, RejectsWithSpan) {
  try {
    parse_instruction("dance with the chair");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_NE(std::string(e.what()).find("dance with"), std::string::npos);
  }
  try {
    parse_instruction("sit on the chair that is diagonal to the desk");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_NE(std::string(e.what()).find("diagonal to"), std::string::npos);
  }
  EXPECT_THROW(parse_instruction(""), ParseError);
  EXPECT_THROW(parse_instruction("sit on the chair between the desk"), ParseError);
  EXPECT_THROW(parse_instruction("sit on the chair near the desk and the lamp"), ParseError);
}

TEST(Instruction, ActionStrings) {
  for (auto a : {Action::Walk, Action::Sit, Action::StandUp, Action::Lie}) {
    EXPECT_EQ(action_from_string(to_string(a)), a);
  }
  EXPECT_FALSE(action_from_string("run").has_value());
}

// Reference parser: word-level recursive descent over the same lexicons.
class ReferenceParser {
 public:
  explicit ReferenceParser(const std::string& text) {
    std::istringstream in(text);
    for (std::string w; in >> w;) {
      for (auto& c : w) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
      words_.push_back(w);
    }
  }

  ParsedInstruction parse() {
    ParsedInstruction out;
    out.action = phrase(action_lexicon());
    expect("the");
    out.target_category = noun([&] { return at_relation(); });
    if (pos_ == words_.size()) return out;
    if (peek("that") || peek("which")) {
      ++pos_;
      expect("is");
    }
    out.relation = phrase(relation_lexicon());
    if (peek("the")) ++pos_;
    out.anchor_categories.push_back(noun([&] { return peek("and"); }));
    if (peek("and")) {
      ++pos_;
      if (peek("the")) ++pos_;
      out.anchor_categories.push_back(noun([] { return false; }));
    }
    return out;
  }

 private:
  bool peek(const std::string& w) const { return pos_ < words_.size() && words_[pos_] == w; }
  void expect(const std::string& w) {
    if (!peek(w)) throw std::runtime_error("expected " + w);
    ++pos_;
  }
  bool matches_at(std::size_t at, const std::string& p) const {
    std::istringstream in(p);
    for (std::string w; in >> w; ++at) {
      if (at >= words_.size() || words_[at] != w) return false;
    }
    return true;
  }
  bool at_relation() const {
    if (peek("that") || peek("which")) return true;
    for (const auto& [p, _] : relation_lexicon()) {
      if (matches_at(pos_, p)) return true;
    }
    return false;
  }
  template <typename T>
  T phrase(const std::vector<std::pair<std::string, T>>& lex) {
    for (const auto& [p, v] : lex) {
      if (matches_at(pos_, p)) {
        pos_ += static_cast<std::size_t>(std::count(p.begin(), p.end(), ' ') + 1);
        return v;
      }
    }
    throw std::runtime_error("no phrase");
  }
  template <typename Stop>
  std::string noun(Stop stop) {
    std::string out;
    while (pos_ < words_.size() && (out.empty() || !stop())) {
      if (!out.empty()) out += ' ';
      out += words_[pos_++];
    }
    return out;
  }

  std::vector<std::string> words_;
  std::size_t pos_ = 0;
};

TEST(Instruction, AgreesWithReferenceParser) {
  const std::vector<std::string> nouns = {"bed", "chair", "end table", "tv", "office chair",
                                          "nightstand", "desk"};
  std::mt19937 rng(11);
  auto pick = [&](const auto& v) { return v[rng() % v.size()]; };
  int checked = 0;
  for (int i = 0; i < 500; ++i) {
    const auto& act = pick(action_lexicon()).first;
    const auto& [rel, relv] = pick(relation_lexicon());
    std::string text = act + " the " + pick(nouns);
    if (i % 5 != 0) {
      text += (i % 2 ? " that is " : " ") + rel + " the " + pick(nouns);
      if (relv == SpatialRelation::Between) text += " and the " + pick(nouns);
    }
    EXPECT_EQ(parse_instruction(text), ReferenceParser(text).parse()) << text;
    ++checked;
  }
  EXPECT_EQ(checked, 500);
}

TEST(Instruction, RenderRoundTrip) {
  std::mt19937 rng(3);
  const std::vector<std::string> nouns = {"bed", "chair", "end table", "sofa", "coffee table"};
  const SpatialRelation rels[] = {SpatialRelation::Near,        SpatialRelation::Far,
                                  SpatialRelation::Above,       SpatialRelation::Below,
                                  SpatialRelation::SupportedBy, SpatialRelation::Supporting,
                                  SpatialRelation::Between};
  for (int i = 0; i < 300; ++i) {
    ParsedInstruction p;
    p.action = static_cast<Action>(rng() % 4);
    p.target_category = nouns[rng() % nouns.size()];
    if (i % 8 != 0) {
      p.relation = rels[rng() % 7];
      p.anchor_categories.push_back(nouns[rng() % nouns.size()]);
      if (p.relation == SpatialRelation::Between) {
        p.anchor_categories.push_back(nouns[rng() % nouns.size()]);
      }
    }
    EXPECT_EQ(parse_instruction(render_instruction(p)), p) << render_instruction(p);
  }
}

}  // namespace
}  // namespace tsm::grounding
